#include "jgecert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "jgecert/error.hpp"
#include "jgecert/kernels.hpp"

namespace jgecert {

std::string_view to_string(Verdict v) { return v == Verdict::Certified ? "Certified" : "Inconclusive"; }

double sigma_min(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

namespace {

double balance_objective(const Matrix& a, const Matrix& b) { return sigma_min(a) * sigma_min(b); }

void require_nonzero_columns(const FactorTriple& f) {
  for (Index r = 0; r < f.rank(); ++r)
    if (f.A.col(r).norm() == 0.0 || f.B.col(r).norm() == 0.0)
      throw ArgumentError("balance_factors: column " + std::to_string(r + 1) + " of A or B is zero");
}

// Golden-section search for the log-scale t of column r that maximizes the
// objective; returns the candidate and its value.
std::pair<double, double> best_column_scale(Matrix& a, Matrix& b, Index r) {
  const Vector a0 = a.col(r), b0 = b.col(r);
  auto eval = [&](double t) {
    a.col(r) = std::exp(t) * a0;
    b.col(r) = std::exp(-t) * b0;
    return balance_objective(a, b);
  };
  constexpr double kPhi = 0.6180339887498949;
  double lo = -4.0, hi = 4.0;
  double x1 = hi - kPhi * (hi - lo), x2 = lo + kPhi * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kPhi * (hi - lo);
      f2 = eval(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kPhi * (hi - lo);
      f1 = eval(x1);
    }
  }
  const double t = f1 >= f2 ? x1 : x2;
  const double value = eval(t);
  a.col(r) = a0;
  b.col(r) = b0;
  return {t, value};
}

Tensor3 pencil_from_slices(const Tensor3& s, Index i, Index j) {
  Tensor3 p(s.dim(1), s.dim(2), 2);
  p.slice(0) = s.slice(i);
  p.slice(1) = s.slice(j);
  return p;
}

void search_pairings(const Matrix& eps, std::vector<int>& used, int skips_left, std::vector<std::pair<int, int>>& cur,
                     double value, double& best_value, std::vector<std::pair<int, int>>& best) {
  const int k = static_cast<int>(eps.rows());
  int i = 0;
  while (i < k && used[static_cast<std::size_t>(i)]) ++i;
  if (i == k) {
    if (value > best_value) {
      best_value = value;
      best = cur;
    }
    return;
  }
  used[static_cast<std::size_t>(i)] = 1;
  for (int j = i + 1; j < k; ++j) {
    if (used[static_cast<std::size_t>(j)]) continue;
    used[static_cast<std::size_t>(j)] = 1;
    cur.emplace_back(i, j);
    search_pairings(eps, used, skips_left, cur, value + eps(i, j) * eps(i, j), best_value, best);
    cur.pop_back();
    used[static_cast<std::size_t>(j)] = 0;
  }
  if (skips_left > 0) search_pairings(eps, used, skips_left - 1, cur, value, best_value, best);
  used[static_cast<std::size_t>(i)] = 0;
}

std::vector<std::pair<int, int>> pairing_dp(const Matrix& eps) {
  const int k = static_cast<int>(eps.rows());
  const int skips = k % 2;
  const std::size_t full = std::size_t{1} << k;
  // value[mask * 2 + s]: best sum over the vertices not in mask with s skips left.
  std::vector<double> value(full * 2, -1.0);
  std::function<double(std::size_t, int)> solve = [&](std::size_t mask, int s) -> double {
    if (mask == full - 1) return 0.0;
    double& memo = value[mask * 2 + static_cast<std::size_t>(s)];
    if (memo >= 0.0) return memo;
    int i = 0;
    while (mask >> i & 1U) ++i;
    double best = -1.0;
    const std::size_t mi = mask | (std::size_t{1} << i);
    for (int j = i + 1; j < k; ++j) {
      if (mask >> j & 1U) continue;
      best = std::max(best, eps(i, j) * eps(i, j) + solve(mi | (std::size_t{1} << j), s));
    }
    if (s > 0) best = std::max(best, solve(mi, s - 1));
    if (best < 0.0) best = -2.0;  // infeasible (odd leftover without skips)
    memo = best;
    return best;
  };
  solve(0, skips);
  std::vector<std::pair<int, int>> out;
  std::size_t mask = 0;
  int s = skips;
  while (mask != full - 1) {
    int i = 0;
    while (mask >> i & 1U) ++i;
    const std::size_t mi = mask | (std::size_t{1} << i);
    const double target = solve(mask, s);
    bool moved = false;
    for (int j = i + 1; j < k && !moved; ++j) {
      if (mask >> j & 1U) continue;
      if (eps(i, j) * eps(i, j) + solve(mi | (std::size_t{1} << j), s) == target) {
        out.emplace_back(i, j);
        mask = mi | (std::size_t{1} << j);
        moved = true;
      }
    }
    if (!moved) {
      mask = mi;
      --s;
    }
  }
  return out;
}

std::vector<std::pair<int, int>> pairing_greedy(const Matrix& eps) {
  const int k = static_cast<int>(eps.rows());
  std::vector<std::pair<int, int>> cand;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) cand.emplace_back(i, j);
  std::stable_sort(cand.begin(), cand.end(),
                   [&](const auto& x, const auto& y) { return eps(x.first, x.second) > eps(y.first, y.second); });
  std::vector<int> used(static_cast<std::size_t>(k), 0);
  std::vector<std::pair<int, int>> out;
  for (const auto& [i, j] : cand) {
    if (used[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(j)]) continue;
    used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = 1;
    out.emplace_back(i, j);
    if (static_cast<int>(out.size()) == k / 2) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string singular_values_text(const Tensor3& t) {
  std::ostringstream os;
  for (int mode = 1; mode <= 3; ++mode) {
    Eigen::BDCSVD<Matrix> svd(unfold(t, mode));
    os << " mode " << mode << ": [";
    const Vector& sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i) os << (i ? ", " : "") << sv(i);
    os << "]";
  }
  return os.str();
}

}  // namespace

FactorTriple normalize_c_columns(const FactorTriple& f) {
  f.validate();
  FactorTriple out = f;
  for (Index r = 0; r < f.rank(); ++r) {
    const double n = f.C.col(r).norm();
    if (n == 0.0) throw ArgumentError("normalize_c_columns: column " + std::to_string(r + 1) + " of C is zero");
    out.C.col(r) /= n;
    out.A.col(r) *= n;
  }
  return out;
}

FactorTriple balance_factors(const FactorTriple& f, BalanceMode mode) {
  f.validate();
  require_nonzero_columns(f);
  FactorTriple out = f;
  for (Index r = 0; r < f.rank(); ++r) {
    const double s = std::sqrt(f.B.col(r).norm() / f.A.col(r).norm());
    out.A.col(r) *= s;
    out.B.col(r) /= s;
  }
  if (mode == BalanceMode::Default) return out;

  double value = balance_objective(out.A, out.B);
  for (int sweep = 0; sweep < 100; ++sweep) {
    const double before = value;
    for (Index r = 0; r < f.rank(); ++r) {
      const auto [t, cand] = best_column_scale(out.A, out.B, r);
      if (cand > value) {
        out.A.col(r) *= std::exp(t);
        out.B.col(r) *= std::exp(-t);
        value = balance_objective(out.A, out.B);
      }
    }
    if (value - before <= 1e-6 * std::max(before, 1e-300)) break;
  }
  return out;
}

PencilEpsilon pencil_existence_epsilon(const Tensor3& p, SeededRng& rng, const PencilOptions& opts,
                                       BalanceMode balance) {
  PencilEpsilon out;
  out.diagnosis = pencil_spectrum(p, rng, opts);
  if (out.diagnosis.verdict != PencilVerdict::Simple) return out;
  const FactorTriple f = balance_factors(normalize_c_columns(*out.diagnosis.cpd), balance);
  out.sigma_min_a = sigma_min(f.A);
  out.sigma_min_b = sigma_min(f.B);
  out.min_chordal_gap = min_pairwise_chordal(spectrum_from_columns(f.C));
  out.epsilon = out.sigma_min_a * out.sigma_min_b * out.min_chordal_gap / 2.0;
  return out;
}

MatchingDistanceBound matching_distance_bound(const Tensor3& p, const FactorTriple& f, const Tensor3& w,
                                              ErrorNorm norm, SeededRng& rng) {
  if (p.dims() != w.dims()) throw DimensionError("matching_distance_bound: P and W differ in size");
  const FactorTriple g = normalize_c_columns(f);
  MatchingDistanceBound out;
  const Tensor3 diff = w - p;
  if (norm == ErrorNorm::Frobenius) {
    out.error_norm = frobenius_norm(diff);
  } else {
    out.error_norm = best_rank1_hopm(diff, rng).sigma;
    out.sound = false;
  }
  const double sa = sigma_min(g.A), sb = sigma_min(g.B);
  out.threshold = sa * sb * min_pairwise_chordal(spectrum_from_columns(g.C)) / 2.0;
  out.bound = out.error_norm / (sa * sb);
  out.certified = out.error_norm < out.threshold;
  return out;
}

Tensor3 transformed_error(const FactorTriple& f, const Tensor3& e) {
  const FactorTriple g = normalize_c_columns(f);
  const Index r = g.rank();
  if (g.A.rows() != r || g.B.rows() != r)
    throw PreconditionError("transformed_error: A and B must be square (R x R), got " + std::to_string(g.A.rows()) +
                            "x" + std::to_string(r) + " and " + std::to_string(g.B.rows()) + "x" + std::to_string(r));
  if (e.dim(1) != r || e.dim(2) != r) throw DimensionError("transformed_error: E must be R x R x K");
  auto check = [](const Matrix& m, const char* name) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    if (!(s(s.size() - 1) > 1e-13 * s(0)))
      throw PreconditionError(std::string("transformed_error: factor ") + name + " is numerically singular (sigma_min " +
                              std::to_string(s(s.size() - 1)) + ", sigma_max " + std::to_string(s(0)) + ")");
  };
  check(g.A, "A");
  check(g.B, "B");
  Tensor3 out = kernels::modal_product(e, g.A.inverse(), 1);
  return kernels::modal_product(out, g.B.inverse(), 2);
}

BauerFikeBound bauer_fike_sv_bound(const FactorTriple& f, const Tensor3& e, SpecialCase special, SeededRng& rng,
                                   int hopm_restarts) {
  BauerFikeBound out;
  out.coefficient = special == SpecialCase::None ? std::sqrt(static_cast<double>(f.rank())) : 1.0;
  out.transformed = spectral_norm_bounds(transformed_error(f, e), rng, hopm_restarts);
  out.bound = out.coefficient * out.transformed.lower;
  out.bound_upper = out.coefficient * out.transformed.upper;
  return out;
}

Matrix random_orthogonal(SeededRng& rng, Index k) {
  const Matrix g = rng.normal_matrix(k, k);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(k, k);
  const Matrix& r = qr.matrixQR();
  for (Index i = 0; i < k; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

std::vector<std::pair<int, int>> optimal_pairing(const Matrix& eps) {
  const int k = static_cast<int>(eps.rows());
  if (eps.cols() != k) throw DimensionError("optimal_pairing: epsilon matrix must be square");
  if (k < 2) return {};
  if (k <= 12) {
    std::vector<int> used(static_cast<std::size_t>(k), 0);
    std::vector<std::pair<int, int>> cur, best;
    double best_value = -1.0;
    search_pairings(eps, used, k % 2, cur, 0.0, best_value, best);
    return best;
  }
  if (k <= 20) return pairing_dp(eps);
  return pairing_greedy(eps);
}

BoundReport multi_pencil_epsilon(const Tensor3& t, SeededRng& rng, const BoundOptions& opts) {
  if (t.dim(1) != t.dim(2)) throw DimensionError("multi_pencil_epsilon: frontal slices must be square");
  const Index k = t.dim(3);
  if (k < 2) throw ArgumentError("multi_pencil_epsilon: need at least 2 frontal slices");
  if (opts.n_unitaries < 0 || (opts.n_unitaries == 0 && !opts.include_identity))
    throw ArgumentError("multi_pencil_epsilon: no unitary to try");

  BoundReport report;
  report.options = opts;
  const std::uint64_t base = rng.next_u64();
  report.seed = base;
  report.epsilon = -1.0;

  const int total = opts.n_unitaries + (opts.include_identity ? 1 : 0);
  for (int u = 0; u < total; ++u) {
    const bool identity = opts.include_identity && u == 0;
    const std::uint64_t useed = derive_seed(base, identity ? 0 : 1, static_cast<std::uint64_t>(u));
    SeededRng urng(useed);
    const Matrix q = identity ? Matrix(Matrix::Identity(k, k)) : random_orthogonal(urng, k);
    const Tensor3 s = kernels::modal_product(t, q, 3);

    auto evaluate = [&](int i, int j) {
      SeededRng prng(derive_seed(useed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
      const PencilEpsilon pe = pencil_existence_epsilon(pencil_from_slices(s, i, j), prng, opts.pencil, opts.balance);
      return PerPencil{{i + 1, j + 1}, pe.sigma_min_a, pe.sigma_min_b, pe.min_chordal_gap, pe.epsilon,
                       pe.diagnosis.verdict};
    };

    std::vector<PerPencil> details;
    if (opts.reorder) {
      Matrix eps = Matrix::Zero(k, k);
      std::vector<PerPencil> all(static_cast<std::size_t>(k * k));
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          all[static_cast<std::size_t>(i * k + j)] = evaluate(i, j);
          eps(i, j) = eps(j, i) = all[static_cast<std::size_t>(i * k + j)].epsilon;
        }
      for (const auto& [i, j] : optimal_pairing(eps)) details.push_back(all[static_cast<std::size_t>(i * k + j)]);
    } else {
      for (int i = 0; i + 1 < k; i += 2) details.push_back(evaluate(i, i + 1));
    }

    double sq = 0.0;
    for (const auto& d : details) sq += d.epsilon * d.epsilon;
    const double eps_u = std::sqrt(sq);
    if (eps_u > report.epsilon) {
      report.epsilon = eps_u;
      report.unitary = q;
      report.per_pencil = std::move(details);
    }
    report.best_so_far.push_back(report.epsilon);
  }

  report.epsilon_vector.clear();
  report.pairing.clear();
  for (const auto& d : report.per_pencil) {
    report.epsilon_vector.push_back(d.epsilon);
    report.pairing.push_back(d.pair);
  }
  report.existence_radius = report.epsilon / 2.0;
  report.verdict = report.epsilon > 0.0 ? Verdict::Certified : Verdict::Inconclusive;
  return report;
}

BoundReport certify_neighborhood(const Tensor3& tprime, Index rank, SeededRng& rng, const BoundOptions& opts) {
  if (rank < 1) throw ArgumentError("certify_neighborhood: rank must be positive");
  const auto mr = multilinear_rank(tprime, opts.rank_tol);
  if (mr[0] > rank || mr[1] > rank || mr[2] > rank) {
    throw PreconditionError("certify_neighborhood: numerical multilinear rank (" + std::to_string(mr[0]) + "," +
                            std::to_string(mr[1]) + "," + std::to_string(mr[2]) + ") exceeds (" +
                            std::to_string(rank) + "," + std::to_string(rank) + "," + std::to_string(rank) +
                            ") at tolerance " + std::to_string(opts.rank_tol) + "; singular values:" +
                            singular_values_text(tprime));
  }
  if (tprime.dim(1) < rank || tprime.dim(2) < rank)
    throw DimensionError("certify_neighborhood: tensor is smaller than R x R in the first two modes");

  if (tprime.dim(1) == rank && tprime.dim(2) == rank && tprime.dim(3) <= rank) {
    BoundReport report = multi_pencil_epsilon(tprime, rng, opts);
    report.multilinear_rank = mr;
    return report;
  }
  const Index k = std::min(std::max<Index>(mr[2], 2), std::min(tprime.dim(3), rank));
  const Compression c = mlsvd_truncate(tprime, {rank, rank, k});
  BoundReport report = multi_pencil_epsilon(c.core, rng, opts);
  report.multilinear_rank = mr;
  report.compression_residual = c.residual;
  return report;
}

MeasuredCertificate mlsvd_existence_check(const Tensor3& mprime, Index rank, SeededRng& rng,
                                          const MeasuredOptions& opts) {
  if (rank < 1) throw ArgumentError("mlsvd_existence_check: rank must be positive");
  if (rank > mprime.dim(1) || rank > mprime.dim(2))
    throw DimensionError("mlsvd_existence_check: R exceeds I1 or I2");
  if (mprime.dim(3) < 2) throw ArgumentError("mlsvd_existence_check: need at least 2 frontal slices");

  MeasuredCertificate cert;
  cert.target = opts.target;
  const Index k_max = std::min(rank, mprime.dim(3));
  Compression c = mlsvd_truncate(mprime, {rank, rank, std::max<Index>(k_max, 2)});
  const Vector& sv3 = c.singular_values[2];
  Index r3 = 0;
  while (r3 < sv3.size() && sv3(0) > 0.0 && sv3(r3) > opts.bound.rank_tol * sv3(0)) ++r3;
  const Index k = std::max<Index>(std::min(r3, rank), 2);
  if (k < c.core.dim(3)) {
    Tensor3 core(rank, rank, k);
    for (Index s = 0; s < k; ++s) core.slice(s) = c.core.slice(s);
    c.core = std::move(core);
    c.factors[2] = Matrix(c.factors[2].leftCols(k));
    c.residual = frobenius_norm(mprime - recover(c));
  }
  cert.compressed_ranks = {rank, rank, k};
  cert.mlsvd_error = c.residual;

  cert.report = multi_pencil_epsilon(c.core, rng, opts.bound);
  cert.epsilon = cert.report.epsilon;

  const FitResult fit = cpd_als(c.core, rank, rng, opts.als);
  cert.als_iterations = fit.iterations;
  cert.als_converged = fit.converged;
  cert.core_fit_error = frobenius_norm(c.core - synthesize(fit.factors));
  cert.fit_error = std::hypot(cert.mlsvd_error, cert.core_fit_error);

  if (opts.target == CertificateTarget::Truncated) {
    cert.slack = cert.epsilon - cert.core_fit_error;
    cert.verdict = cert.core_fit_error < cert.epsilon ? Verdict::Certified : Verdict::Inconclusive;
  } else {
    cert.slack = cert.epsilon - cert.mlsvd_error - cert.fit_error;
    cert.verdict = cert.fit_error < cert.epsilon - cert.mlsvd_error ? Verdict::Certified : Verdict::Inconclusive;
  }
  return cert;
}

}  // namespace jgecert
