#include "jgecert/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "jgecert/error.hpp"
#include "jgecert/kernels.hpp"

namespace jgecert {

namespace {

// Minimizer of ||X_(m) - F (KR)^T|| for the Hadamard Gram H = KR^T KR; the
// complete orthogonal decomposition gives the minimum-norm solution when H is
// singular, so every update is an exact block minimization.
Matrix ls_update(const Matrix& mttkrp, const Matrix& hadamard_gram) {
  return hadamard_gram.completeOrthogonalDecomposition().solve(mttkrp.transpose()).transpose();
}

double squared_residual(const Tensor3& t, const FactorTriple& f) {
  return kernels::squared_norm(t - kernels::synthesize(f));
}

void normalize_into_c(FactorTriple& f) {
  for (Index r = 0; r < f.rank(); ++r) {
    const double na = f.A.col(r).norm();
    const double nb = f.B.col(r).norm();
    if (na > 0.0 && nb > 0.0) {
      f.A.col(r) /= na;
      f.B.col(r) /= nb;
      f.C.col(r) *= na * nb;
    }
  }
}

FitResult als_run(const Tensor3& t, Index rank, SeededRng& rng, const AlsOptions& opts, double tnorm) {
  FitResult res;
  FactorTriple& f = res.factors;
  f.A = rng.normal_matrix(t.dim(1), rank);
  f.B = rng.normal_matrix(t.dim(2), rank);
  f.C = rng.normal_matrix(t.dim(3), rank);

  double prev = std::sqrt(squared_residual(t, f)) / tnorm;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const Matrix ata = f.A.transpose() * f.A;
    const Matrix btb = f.B.transpose() * f.B;
    const Matrix ctc = f.C.transpose() * f.C;
    f.A = ls_update(kernels::mttkrp(t, f, 1), ctc.cwiseProduct(btb));
    if (opts.record_objective) res.objective.push_back(squared_residual(t, f));
    const Matrix ata_new = f.A.transpose() * f.A;
    f.B = ls_update(kernels::mttkrp(t, f, 2), ctc.cwiseProduct(ata_new));
    if (opts.record_objective) res.objective.push_back(squared_residual(t, f));
    const Matrix btb_new = f.B.transpose() * f.B;
    f.C = ls_update(kernels::mttkrp(t, f, 3), btb_new.cwiseProduct(ata_new));
    normalize_into_c(f);
    const double sq = squared_residual(t, f);
    if (opts.record_objective) res.objective.push_back(sq);
    (void)ata;

    const double err = std::sqrt(sq) / tnorm;
    res.iterations = it;
    res.rel_error = err;
    if (err < opts.tol || std::abs(prev - err) < opts.tol) {
      res.converged = true;
      break;
    }
    prev = err;
  }
  return res;
}

Vector leading_left_vector(const Tensor3& t, int mode) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(kernels::gram(t, mode));
  return es.eigenvectors().col(es.eigenvectors().cols() - 1);
}

// T x_2 b x_3 c, T x_1 a x_3 c and T x_1 a x_2 b.
Vector contract_23(const Tensor3& t, const Vector& b, const Vector& c) {
  Vector out = Vector::Zero(t.dim(1));
  for (Index k = 0; k < t.dim(3); ++k) out.noalias() += c(k) * (t.slice(k) * b);
  return out;
}
Vector contract_13(const Tensor3& t, const Vector& a, const Vector& c) {
  Vector out = Vector::Zero(t.dim(2));
  for (Index k = 0; k < t.dim(3); ++k) out.noalias() += c(k) * (t.slice(k).transpose() * a);
  return out;
}
Vector contract_12(const Tensor3& t, const Vector& a, const Vector& b) {
  Vector out(t.dim(3));
  for (Index k = 0; k < t.dim(3); ++k) out(k) = a.dot(t.slice(k) * b);
  return out;
}

RankOneResult hopm_run(const Tensor3& t, Vector a, Vector b, Vector c) {
  RankOneResult res;
  constexpr int kMaxIters = 2000;
  double sigma = std::abs(contract_12(t, a, b).dot(c));
  for (int it = 1; it <= kMaxIters; ++it) {
    Vector na = contract_23(t, b, c);
    if (na.norm() > 0.0) a = na.normalized();
    Vector nb = contract_13(t, a, c);
    if (nb.norm() > 0.0) b = nb.normalized();
    Vector nc = contract_12(t, a, b);
    const double s = nc.norm();
    if (s > 0.0) c = nc / s;
    res.trace.push_back(s);
    res.iterations = it;
    const bool done = std::abs(s - sigma) <= 1e-14 * std::max(1.0, s);
    sigma = s;
    if (done) break;
  }
  res.sigma = sigma;
  res.a = std::move(a);
  res.b = std::move(b);
  res.c = std::move(c);
  return res;
}

}  // namespace

FitResult cpd_als(const Tensor3& t, Index rank, SeededRng& rng, const AlsOptions& opts) {
  if (rank <= 0) throw ArgumentError("cpd_als: rank must be positive");
  const double tnorm = frobenius_norm(t);
  if (tnorm == 0.0) {
    FitResult zero;
    zero.factors = {Matrix::Zero(t.dim(1), rank), Matrix::Zero(t.dim(2), rank), Matrix::Zero(t.dim(3), rank)};
    zero.converged = true;
    return zero;
  }
  FitResult best;
  best.rel_error = std::numeric_limits<double>::infinity();
  const int runs = std::max(1, opts.restarts);
  for (int run = 0; run < runs; ++run) {
    FitResult r = als_run(t, rank, rng, opts, tnorm);
    if (r.rel_error < best.rel_error) best = std::move(r);
  }
  return best;
}

RankOneResult best_rank1_hopm(const Tensor3& t, SeededRng& rng, int restarts) {
  if (frobenius_norm(t) == 0.0) {
    RankOneResult zero;
    zero.a = Vector::Unit(t.dim(1), 0);
    zero.b = Vector::Unit(t.dim(2), 0);
    zero.c = Vector::Unit(t.dim(3), 0);
    return zero;
  }
  RankOneResult best = hopm_run(t, leading_left_vector(t, 1), leading_left_vector(t, 2), leading_left_vector(t, 3));
  for (int r = 0; r < restarts; ++r) {
    Vector a = rng.unit_vector(t.dim(1));
    Vector b = rng.unit_vector(t.dim(2));
    Vector c = rng.unit_vector(t.dim(3));
    RankOneResult cand = hopm_run(t, std::move(a), std::move(b), std::move(c));
    if (cand.sigma > best.sigma) best = std::move(cand);
  }
  return best;
}

SpectralNormBounds spectral_norm_bounds(const Tensor3& t, SeededRng& rng, int restarts) {
  SpectralNormBounds out;
  const double fro = frobenius_norm(t);
  if (fro == 0.0) return out;
  out.lower = best_rank1_hopm(t, rng, restarts).sigma;
  double upper = fro;
  for (int mode = 1; mode <= 3; ++mode) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(kernels::gram(t, mode), Eigen::EigenvaluesOnly);
    const double n2 = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    out.unfolding_norms[static_cast<std::size_t>(mode - 1)] = n2;
    upper = std::min(upper, n2);
  }
  // The rank-1 value is attained by unit vectors, so it cannot exceed any
  // unfolding norm except through rounding.
  out.upper = std::max(upper, out.lower);
  return out;
}

}  // namespace jgecert
