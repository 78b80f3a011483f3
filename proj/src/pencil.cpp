#include "jgecert/pencil.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "jgecert/error.hpp"

namespace jgecert {

std::string_view to_string(PencilVerdict v) {
  switch (v) {
    case PencilVerdict::Simple: return "Simple";
    case PencilVerdict::RepeatedEigenvalue: return "RepeatedEigenvalue";
    case PencilVerdict::ComplexSpectrum: return "ComplexSpectrum";
    case PencilVerdict::NotSliceMixInvertible: return "NotSliceMixInvertible";
  }
  return "?";
}

namespace {

void require_square_slices(const Tensor3& t, const char* who) {
  if (t.dim(1) != t.dim(2))
    throw DimensionError(std::string(who) + ": frontal slices must be square, got " + std::to_string(t.dim(1)) +
                         "x" + std::to_string(t.dim(2)));
}

double sigma_min(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

Matrix slice_mix(const Tensor3& t, const Vector& v) {
  if (v.size() != t.dim(3))
    throw DimensionError("slice_mix: weight vector has length " + std::to_string(v.size()) + ", tensor has " +
                         std::to_string(t.dim(3)) + " slices");
  Matrix g = Matrix::Zero(t.dim(1), t.dim(2));
  for (Index k = 0; k < t.dim(3); ++k) g += v(k) * t.slice(k);
  return g;
}

double char_poly_eval(const Tensor3& t, const Vector& gamma) {
  require_square_slices(t, "char_poly_eval");
  return Eigen::PartialPivLU<Matrix>(slice_mix(t, gamma)).determinant();
}

SliceMixProbe slice_mix_probe(const Tensor3& t, SeededRng& rng, int trials, double tol) {
  require_square_slices(t, "slice_mix_probe");
  SliceMixProbe probe;
  const double threshold = tol * frobenius_norm(t);
  const Index k = t.dim(3);
  auto consider = [&](const Vector& v) {
    const double s = sigma_min(slice_mix(t, v));
    if (s > probe.best_sigma_min) probe.best_sigma_min = s;
    if (s > threshold && s > 0.0) {
      probe.invertible = true;
      probe.witness = v;
      return true;
    }
    return false;
  };
  for (Index axis = 0; axis < k; ++axis)
    if (consider(Vector::Unit(k, axis))) return probe;
  for (int trial = 0; trial < trials; ++trial)
    if (consider(rng.unit_vector(k))) return probe;
  return probe;
}

Matrix solve_first_factor(const Tensor3& t, const Matrix& b, const Matrix& c) {
  const Index i2 = t.dim(2), i3 = t.dim(3), rank = b.cols();
  Matrix kr(i2 * i3, rank);
  for (Index r = 0; r < rank; ++r)
    for (Index k = 0; k < i3; ++k) kr.col(r).segment(k * i2, i2) = c(k, r) * b.col(r);
  const Matrix x1 = unfold(t, 1);
  return kr.colPivHouseholderQr().solve(x1.transpose()).transpose();
}

PencilDiagnosis pencil_spectrum(const Tensor3& p, SeededRng& rng, const PencilOptions& opts) {
  require_square_slices(p, "pencil_spectrum");
  if (p.dim(3) != 2) throw DimensionError("pencil_spectrum: expected 2 frontal slices, got " + std::to_string(p.dim(3)));

  PencilDiagnosis diag;
  const double scale = frobenius_norm(p);
  if (scale == 0.0) return diag;

  // Pick the best-conditioned of a few random orthonormal mixes (v, w).
  Vector v(2), w(2);
  Matrix g;
  double best = 0.0;
  for (int attempt = 0; attempt < opts.max_attempts && best <= opts.mix_tol * scale; ++attempt) {
    for (int s = 0; s < opts.mix_samples; ++s) {
      const double theta = 2.0 * std::numbers::pi * rng.uniform();
      Vector vs(2);
      vs << std::cos(theta), std::sin(theta);
      Matrix gs = slice_mix(p, vs);
      const double sm = sigma_min(gs);
      if (sm > best) {
        best = sm;
        v = vs;
        g = std::move(gs);
      }
    }
  }
  diag.mix_sigma_min = best;
  if (best <= opts.mix_tol * scale) return diag;
  w << -v(1), v(0);

  const Matrix h = slice_mix(p, w);
  const Matrix m = Eigen::PartialPivLU<Matrix>(g).solve(h);
  Eigen::EigenSolver<Matrix> es(m, true);
  if (es.info() != Eigen::Success) return diag;

  const Index rank = p.dim(1);
  const auto& mu = es.eigenvalues();
  Spectrum spec;
  spec.all_real = true;
  Matrix lines(2, rank);
  Matrix vectors(rank, rank);
  for (Index r = 0; r < rank; ++r) {
    const std::complex<double> z = mu(r);
    if (std::abs(z.imag()) > opts.realness_tol * (1.0 + std::abs(z.real()))) spec.all_real = false;
    // G x = (v.lambda) y and H x = (w.lambda) y, so lambda is proportional to v + mu w.
    lines.col(r) = v + z.real() * w;
    Vector x = es.eigenvectors().col(r).real();
    if (x.norm() == 0.0) x = es.eigenvectors().col(r).imag();
    vectors.col(r) = x.normalized();
  }
  spec.lines.reserve(static_cast<std::size_t>(rank));
  for (Index r = 0; r < rank; ++r) spec.lines.emplace_back(lines.col(r));
  spec.eigvectors = vectors;

  if (!spec.all_real) {
    diag.verdict = PencilVerdict::ComplexSpectrum;
    diag.spectrum = std::move(spec);
    return diag;
  }
  if (rank > 1 && min_pairwise_chordal(spec) <= opts.simplicity_tol) {
    diag.verdict = PencilVerdict::RepeatedEigenvalue;
    diag.spectrum = std::move(spec);
    return diag;
  }

  FactorTriple f;
  f.B = vectors.transpose().inverse();
  f.C.resize(2, rank);
  for (Index r = 0; r < rank; ++r) f.C.col(r) = spec.lines[static_cast<std::size_t>(r)].rep();
  f.A = solve_first_factor(p, f.B, f.C);
  diag.verdict = PencilVerdict::Simple;
  diag.spectrum = std::move(spec);
  diag.cpd = std::move(f);
  return diag;
}

std::variant<FactorTriple, PencilDiagnosis> jennrich_pencil_cpd(const Tensor3& p, SeededRng& rng,
                                                                const PencilOptions& opts) {
  PencilDiagnosis d = pencil_spectrum(p, rng, opts);
  if (d.verdict == PencilVerdict::Simple) return std::move(*d.cpd);
  return d;
}

}  // namespace jgecert
