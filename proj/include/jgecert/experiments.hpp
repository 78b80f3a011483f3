#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jgecert/approx.hpp"
#include "jgecert/pencil.hpp"

namespace jgecert {

/// Parameters of one experiment run. Rows are produced for every combination of
/// rank x dim x snr that the experiment uses (see README for the columns).
struct ExperimentConfig {
  std::string experiment;
  std::vector<Index> ranks;
  /// Side length I of I x I x I tensors; ignored where the tensor is R x R x R.
  std::vector<Index> dims;
  std::vector<double> snr_grid;
  int trials = 1;
  int n_unitaries = 1;
  bool reorder = false;
  bool include_identity = false;
  std::uint64_t seed = 1;
  int hopm_restarts = 10;
  AlsOptions als;
  PencilOptions pencil;
  double rank_tol = 1e-8;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> experiment_names();

/// Default grids, trial counts and unitary counts for each experiment.
/// Throws ArgumentError for an unknown name.
ExperimentConfig default_config(const std::string& name);

/// Seed of one trial: derive_seed(master, fnv1a(experiment), grid_index, trial).
std::uint64_t trial_seed(std::uint64_t master, const std::string& experiment, std::uint64_t grid_index,
                         std::uint64_t trial);

/// Runs the experiment. Trials run in parallel; rows are assembled in grid order.
Table run_experiment(const ExperimentConfig& config);

/// Header row plus one line per row, 17 significant digits, ',' separated.
std::string table_to_csv(const Table& t);
std::string table_to_json(const Table& t, const ExperimentConfig& config);

/// "a:b:step" (inclusive) or "v1,v2,...".
std::vector<double> parse_grid(const std::string& spec);

}  // namespace jgecert
