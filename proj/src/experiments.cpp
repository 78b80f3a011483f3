#include "jgecert/experiments.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "json.hpp"

#include "jgecert/bounds.hpp"
#include "jgecert/compress.hpp"
#include "jgecert/error.hpp"
#include "jgecert/serialize.hpp"
#include "jgecert/tensor_io.hpp"

namespace jgecert {

namespace {

template <class Fn>
auto run_trials(int n, Fn fn) {
  using Result = decltype(fn(0));
  std::vector<Result> out(static_cast<std::size_t>(n));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(i);
    } catch (...) {
#pragma omp critical(jgecert_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

template <class T, class Get>
double mean_of(const std::vector<T>& v, Get get) {
  double s = 0.0;
  for (const T& x : v) s += get(x);
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

struct SvTrial {
  double sv = 0.0;
  double bound = 0.0;      // capped at 1
  double bound_raw = 0.0;  // uncapped rank-1 estimate times coefficient
  double bound_upper = 0.0;
  double extra = 0.0;      // experiment specific
  double extra2 = 0.0;
};

// Chordal distances never exceed 1, so a larger bound carries no information.
double cap(double b) { return std::min(1.0, b); }

std::vector<double> sv_row(double rank, double dim, double snr, const std::vector<SvTrial>& t) {
  const double msv = mean_of(t, [](const SvTrial& x) { return x.sv; });
  const double mb = mean_of(t, [](const SvTrial& x) { return x.bound; });
  double violations = 0.0;
  for (const auto& x : t) violations += x.sv > x.bound_upper * (1.0 + 1e-9) ? 1.0 : 0.0;
  std::vector<double> row{rank};
  if (dim > 0) row.push_back(dim);
  row.insert(row.end(), {snr, msv, mb, std::log10(msv), std::log10(mb),
                         mean_of(t, [](const SvTrial& x) { return std::log10(x.sv); }),
                         mean_of(t, [](const SvTrial& x) { return std::log10(x.bound); }),
                         mean_of(t, [](const SvTrial& x) { return x.bound_raw; }),
                         mean_of(t, [](const SvTrial& x) { return x.extra; }), violations});
  return row;
}

std::vector<std::string> sv_columns(bool with_dim, const char* extra) {
  std::vector<std::string> c{"rank"};
  if (with_dim) c.emplace_back("dim");
  c.insert(c.end(), {"snr_db", "mean_sv", "mean_bound", "log10_mean_sv", "log10_mean_bound", "mean_log10_sv",
                     "mean_log10_bound", "mean_bound_uncapped", extra, "sound_bound_violations"});
  return c;
}

Table sv_structured(const ExperimentConfig& cfg) {
  Table table;
  table.columns = sv_columns(false, "mean_bound_closed_form");
  std::uint64_t grid = 0;
  for (Index r : cfg.ranks) {
    for (double snr : cfg.snr_grid) {
      const std::uint64_t g = grid++;
      auto trials = run_trials(cfg.trials, [&](int trial) {
        SeededRng rng(trial_seed(cfg.seed, cfg.experiment, g, static_cast<std::uint64_t>(trial)));
        const RandomRankR tr = random_rank_r(rng, {r, r, r}, r);
        Matrix e = rng.normal_matrix(r, r);
        e *= noise_norm_for_snr(tr.factors.C.norm(), snr) / e.norm();
        const Matrix c_hat = tr.factors.C + e;
        SvTrial out;
        out.sv = spectral_variation(spectrum_from_columns(tr.factors.C), spectrum_from_columns(c_hat));
        const Tensor3 err = synthesize(FactorTriple{tr.factors.A, tr.factors.B, e});
        const BauerFikeBound bf = bauer_fike_sv_bound(tr.factors, err, SpecialCase::SharedFactor, rng, cfg.hopm_restarts);
        out.bound_raw = bf.bound;
        out.bound = cap(bf.bound);
        out.bound_upper = bf.bound_upper;
        double closed = 0.0;
        for (Index k = 0; k < r; ++k) closed = std::max(closed, e.col(k).norm() / tr.factors.C.col(k).norm());
        out.extra = cap(closed);
        return out;
      });
      table.rows.push_back(sv_row(static_cast<double>(r), 0.0, snr, trials));
    }
  }
  return table;
}

// Rank-R approximation of an I x I x I tensor: CPD-ALS on the truncated MLSVD
// core, lifted back with the MLSVD bases.
FactorTriple compressed_fit(const Tensor3& t, Index rank, SeededRng& rng, const AlsOptions& als) {
  if (t.dim(1) == rank && t.dim(2) == rank && t.dim(3) == rank) return cpd_als(t, rank, rng, als).factors;
  const Compression c = mlsvd_truncate(t, {rank, rank, rank});
  const FitResult fit = cpd_als(c.core, rank, rng, als);
  return {c.factors[0] * fit.factors.A, c.factors[1] * fit.factors.B, c.factors[2] * fit.factors.C};
}

Table sv_generic(const ExperimentConfig& cfg) {
  Table table;
  table.columns = sv_columns(false, "mean_fit_rel_error");
  std::uint64_t grid = 0;
  for (Index r : cfg.ranks) {
    for (double snr : cfg.snr_grid) {
      const std::uint64_t g = grid++;
      auto trials = run_trials(cfg.trials, [&](int trial) {
        SeededRng rng(trial_seed(cfg.seed, cfg.experiment, g, static_cast<std::uint64_t>(trial)));
        const RandomRankR tr = random_rank_r(rng, {r, r, r}, r);
        const NoisyTensor nt = add_noise_at_snr(tr.tensor, rng, snr);
        const FitResult fit = cpd_als(nt.noisy, r, rng, cfg.als);
        SvTrial out;
        out.sv = spectral_variation(spectrum_from_columns(tr.factors.C), spectrum_from_columns(fit.factors.C));
        const Tensor3 err = synthesize(fit.factors) - tr.tensor;
        const BauerFikeBound bf = bauer_fike_sv_bound(tr.factors, err, SpecialCase::None, rng, cfg.hopm_restarts);
        out.bound_raw = bf.bound;
        out.bound = cap(bf.bound);
        out.bound_upper = bf.bound_upper;
        out.extra = fit.rel_error;
        return out;
      });
      table.rows.push_back(sv_row(static_cast<double>(r), 0.0, snr, trials));
    }
  }
  return table;
}

struct ProcrustesTrial {
  double noise_distance = 0.0;
  double fit_distance = 0.0;
  PairCompression pair;
  FactorTriple truth_core;
  FactorTriple fit_core;
};

ProcrustesTrial procrustes_trial(const ExperimentConfig& cfg, SeededRng& rng, Index rank, Index dim, double snr) {
  const RandomRankR tr = random_rank_r(rng, {dim, dim, dim}, rank);
  const NoisyTensor nt = add_noise_at_snr(tr.tensor, rng, snr);
  const FactorTriple fit = compressed_fit(nt.noisy, rank, rng, cfg.als);
  const Tensor3 approx = synthesize(fit);
  ProcrustesTrial out;
  out.noise_distance = frobenius_norm(nt.noise);
  out.fit_distance = frobenius_norm(tr.tensor - approx);
  PairCompressOptions po;
  po.rank_tol = cfg.rank_tol;
  out.pair = procrustes_pair_compress(tr.tensor, approx, {rank, rank, rank}, po);
  const auto& v = out.pair.factors;
  const auto& vh = out.pair.factors_hat;
  out.truth_core = {v[0].transpose() * tr.factors.A, v[1].transpose() * tr.factors.B, v[2].transpose() * tr.factors.C};
  out.fit_core = {vh[0].transpose() * fit.A, vh[1].transpose() * fit.B, vh[2].transpose() * fit.C};
  return out;
}

Table sv_procrustes(const ExperimentConfig& cfg) {
  Table table;
  table.columns = sv_columns(true, "mean_core_distance");
  std::uint64_t grid = 0;
  for (Index r : cfg.ranks) {
    for (Index dim : cfg.dims) {
      if (dim < r) continue;
      for (double snr : cfg.snr_grid) {
        const std::uint64_t g = grid++;
        auto trials = run_trials(cfg.trials, [&](int trial) {
          SeededRng rng(trial_seed(cfg.seed, cfg.experiment, g, static_cast<std::uint64_t>(trial)));
          const ProcrustesTrial pt = procrustes_trial(cfg, rng, r, dim, snr);
          SvTrial out;
          out.sv = spectral_variation(spectrum_from_columns(pt.truth_core.C), spectrum_from_columns(pt.fit_core.C));
          const BauerFikeBound bf =
              bauer_fike_sv_bound(pt.truth_core, pt.pair.w_hat - pt.pair.w, SpecialCase::None, rng, cfg.hopm_restarts);
          out.bound_raw = bf.bound;
          out.bound = cap(bf.bound);
          out.bound_upper = bf.bound_upper;
          out.extra = pt.pair.compressed_distance;
          return out;
        });
        table.rows.push_back(sv_row(static_cast<double>(r), static_cast<double>(dim), snr, trials));
      }
    }
  }
  return table;
}

Table existence_radius(const ExperimentConfig& cfg) {
  Table table;
  table.columns = {"rank", "unitaries", "mean_epsilon", "db_epsilon", "db_radius", "certified_fraction"};
  std::vector<int> checkpoints;
  for (int c = 1; c < cfg.n_unitaries; c *= 10) checkpoints.push_back(c);
  checkpoints.push_back(cfg.n_unitaries);
  std::uint64_t grid = 0;
  for (Index r : cfg.ranks) {
    const std::uint64_t g = grid++;
    BoundOptions bo;
    bo.pencil = cfg.pencil;
    bo.n_unitaries = cfg.n_unitaries;
    bo.include_identity = cfg.include_identity;
    bo.reorder = cfg.reorder;
    bo.rank_tol = cfg.rank_tol;
    auto trials = run_trials(cfg.trials, [&](int trial) {
      SeededRng rng(trial_seed(cfg.seed, cfg.experiment, g, static_cast<std::uint64_t>(trial)));
      const RandomRankR tr = random_rank_r(rng, {r, r, r}, r);
      return multi_pencil_epsilon(tr.tensor, rng, bo).best_so_far;
    });
    const std::size_t offset = cfg.include_identity ? 1 : 0;
    for (int c : checkpoints) {
      const std::size_t at = offset + static_cast<std::size_t>(c) - 1;
      const double m = mean_of(trials, [&](const std::vector<double>& b) { return b[at]; });
      const double cert = mean_of(trials, [&](const std::vector<double>& b) { return b[at] > 0.0 ? 1.0 : 0.0; });
      table.rows.push_back({static_cast<double>(r), static_cast<double>(c), m, -20.0 * std::log10(m),
                            -20.0 * std::log10(m / 2.0), cert});
    }
  }
  return table;
}

Table existence_proportion(const ExperimentConfig& cfg) {
  Table table;
  table.columns = {"rank", "dim", "snr_db", "trials", "certified", "proportion", "mean_epsilon", "mean_core_fit_error",
                   "mean_mlsvd_error"};
  MeasuredOptions mo;
  mo.bound.pencil = cfg.pencil;
  mo.bound.n_unitaries = cfg.n_unitaries;
  mo.bound.include_identity = cfg.include_identity;
  mo.bound.reorder = cfg.reorder;
  mo.bound.rank_tol = cfg.rank_tol;
  mo.als = cfg.als;
  mo.target = CertificateTarget::Truncated;
  std::uint64_t grid = 0;
  for (Index r : cfg.ranks) {
    for (Index dim : cfg.dims) {
      if (dim < r) continue;
      for (double snr : cfg.snr_grid) {
        const std::uint64_t g = grid++;
        auto trials = run_trials(cfg.trials, [&](int trial) {
          SeededRng rng(trial_seed(cfg.seed, cfg.experiment, g, static_cast<std::uint64_t>(trial)));
          const RandomRankR tr = random_rank_r(rng, {dim, dim, dim}, r);
          const NoisyTensor nt = add_noise_at_snr(tr.tensor, rng, snr);
          return mlsvd_existence_check(nt.noisy, r, rng, mo);
        });
        double certified = 0.0;
        for (const auto& c : trials) certified += c.verdict == Verdict::Certified ? 1.0 : 0.0;
        table.rows.push_back({static_cast<double>(r), static_cast<double>(dim), snr, static_cast<double>(cfg.trials),
                              certified, certified / cfg.trials,
                              mean_of(trials, [](const MeasuredCertificate& c) { return c.epsilon; }),
                              mean_of(trials, [](const MeasuredCertificate& c) { return c.core_fit_error; }),
                              mean_of(trials, [](const MeasuredCertificate& c) { return c.mlsvd_error; })});
      }
    }
  }
  return table;
}

Table procrustes_distances(const ExperimentConfig& cfg) {
  Table table;
  table.columns = {"rank", "dim", "snr_db", "mean_noise_distance", "mean_fit_distance", "mean_core_distance",
                   "contraction_violations"};
  std::uint64_t grid = 0;
  for (Index r : cfg.ranks) {
    for (Index dim : cfg.dims) {
      if (dim < r) continue;
      for (double snr : cfg.snr_grid) {
        const std::uint64_t g = grid++;
        auto trials = run_trials(cfg.trials, [&](int trial) {
          SeededRng rng(trial_seed(cfg.seed, cfg.experiment, g, static_cast<std::uint64_t>(trial)));
          const ProcrustesTrial pt = procrustes_trial(cfg, rng, r, dim, snr);
          return std::array<double, 3>{pt.noise_distance, pt.fit_distance, pt.pair.compressed_distance};
        });
        double violations = 0.0;
        for (const auto& t : trials) violations += t[2] > t[1] + 1e-9 * std::max(1.0, t[1]) ? 1.0 : 0.0;
        table.rows.push_back({static_cast<double>(r), static_cast<double>(dim), snr,
                              mean_of(trials, [](const auto& t) { return t[0]; }),
                              mean_of(trials, [](const auto& t) { return t[1]; }),
                              mean_of(trials, [](const auto& t) { return t[2]; }), violations});
      }
    }
  }
  return table;
}

std::vector<double> range_grid(double a, double b, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((b - a) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(a + step * i);
  return out;
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"sv-structured", "sv-generic", "sv-procrustes", "existence-radius", "existence-proportion",
          "procrustes-distances"};
}

ExperimentConfig default_config(const std::string& name) {
  ExperimentConfig c;
  c.experiment = name;
  c.als.restarts = 3;
  if (name == "sv-structured") {
    c.ranks = {4, 10};
    c.snr_grid = range_grid(0, 100, 5);
    c.trials = 20;
  } else if (name == "sv-generic") {
    c.ranks = {4, 10};
    c.snr_grid = range_grid(0, 100, 5);
    c.trials = 50;
  } else if (name == "sv-procrustes") {
    c.ranks = {4, 10};
    c.dims = {10, 20, 100};
    c.snr_grid = range_grid(0, 100, 5);
    c.trials = 20;
  } else if (name == "existence-radius") {
    c.ranks = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    c.trials = 20;
    c.n_unitaries = 1000;
  } else if (name == "existence-proportion") {
    c.ranks = {4};
    c.dims = {20};
    c.snr_grid = range_grid(-8, 6, 2);
    c.trials = 10;
    c.n_unitaries = 1000;
  } else if (name == "procrustes-distances") {
    c.ranks = {4, 10};
    c.dims = {20, 100};
    c.snr_grid = {0, 20, -20, -40};
    c.trials = 10;
  } else {
    throw ArgumentError("unknown experiment '" + name + "'");
  }
  return c;
}

std::uint64_t trial_seed(std::uint64_t master, const std::string& experiment, std::uint64_t grid_index,
                         std::uint64_t trial) {
  return derive_seed(master, fnv1a(experiment), grid_index, trial);
}

Table run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw ArgumentError("experiment: trials must be >= 1");
  if (config.ranks.empty()) throw ArgumentError("experiment: rank list is empty");
  const std::string& n = config.experiment;
  const bool needs_snr = n != "existence-radius";
  if (needs_snr && config.snr_grid.empty()) throw ArgumentError("experiment: SNR grid is empty");
  const bool needs_dims = n == "sv-procrustes" || n == "existence-proportion" || n == "procrustes-distances";
  if (needs_dims && config.dims.empty()) throw ArgumentError("experiment: dimension list is empty");
  if (n == "sv-structured") return sv_structured(config);
  if (n == "sv-generic") return sv_generic(config);
  if (n == "sv-procrustes") return sv_procrustes(config);
  if (n == "existence-radius") {
    if (config.n_unitaries < 1) throw ArgumentError("experiment: existence-radius needs at least one unitary");
    return existence_radius(config);
  }
  if (n == "existence-proportion") return existence_proportion(config);
  if (n == "procrustes-distances") return procrustes_distances(config);
  throw ArgumentError("unknown experiment '" + n + "'");
}

std::string table_to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << io::format_double(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string table_to_json(const Table& t, const ExperimentConfig& c) {
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"experiment", c.experiment},
                   {"seed", c.seed},
                   {"trials", c.trials},
                   {"n_unitaries", c.n_unitaries},
                   {"reorder", c.reorder},
                   {"include_identity", c.include_identity},
                   {"ranks", c.ranks},
                   {"dims", c.dims},
                   {"snr_grid", c.snr_grid},
                   {"tolerances", {{"rank", c.rank_tol}, {"als", c.als.tol}, {"simplicity", c.pencil.simplicity_tol}}},
                   {"columns", t.columns},
                   {"rows", t.rows}};
  return j.dump(2);
}

std::vector<double> parse_grid(const std::string& spec) {
  auto to_num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ArgumentError("bad grid value '" + s + "' in '" + spec + "'");
    }
    if (used != s.size()) throw ArgumentError("bad grid value '" + s + "' in '" + spec + "'");
    return v;
  };
  std::vector<std::string> parts;
  const char sep = spec.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  if (sep == ':') {
    if (parts.size() != 3) throw ArgumentError("range grid must be start:stop:step, got '" + spec + "'");
    const double step = to_num(parts[2]);
    if (!(step > 0.0)) throw ArgumentError("range grid step must be positive");
    return range_grid(to_num(parts[0]), to_num(parts[1]), step);
  }
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(to_num(p));
  if (out.empty()) throw ArgumentError("empty grid");
  return out;
}

}  // namespace jgecert
