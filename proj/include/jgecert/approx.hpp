#pragma once

#include <array>
#include <vector>

#include "jgecert/rng.hpp"
#include "jgecert/tensor.hpp"

namespace jgecert {

struct AlsOptions {
  int max_iters = 2000;
  /// Stop when the relative error changes by less than tol between sweeps,
  /// or drops below tol.
  double tol = 1e-8;
  int restarts = 1;
  /// Record the objective after every half-sweep (factor update).
  bool record_objective = false;
};

struct FitResult {
  FactorTriple factors;
  /// ||T - synthesize(factors)||_F / ||T||_F.
  double rel_error = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Squared residual after each factor update of the returned run (if recorded).
  std::vector<double> objective;
};

/// Rank-R CPD by alternating least squares from i.i.d. normal starts; the best
/// run over `restarts` is returned. After every sweep the column norms of A and
/// B are moved into C.
FitResult cpd_als(const Tensor3& t, Index rank, SeededRng& rng, const AlsOptions& opts = {});

struct RankOneResult {
  /// T x_1 a x_2 b x_3 c, nonnegative.
  double sigma = 0.0;
  Vector a, b, c;
  int iterations = 0;
  /// sigma after each full sweep of the returned run.
  std::vector<double> trace;
};

/// Best rank-1 approximation by the higher-order power method. The first run
/// starts from the leading left singular vectors of the unfoldings; `restarts`
/// further runs start from random unit vectors. sigma is a lower bound on the
/// spectral norm.
RankOneResult best_rank1_hopm(const Tensor3& t, SeededRng& rng, int restarts = 10);

struct SpectralNormBounds {
  double lower = 0.0;
  /// min(min_i ||unfold(T, i)||_2, ||T||_F).
  double upper = 0.0;
  /// ||unfold(T, i)||_2 for i = 1, 2, 3.
  std::array<double, 3> unfolding_norms{};
};

SpectralNormBounds spectral_norm_bounds(const Tensor3& t, SeededRng& rng, int restarts = 10);

}  // namespace jgecert
