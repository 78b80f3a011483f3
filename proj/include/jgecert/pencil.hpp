#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "jgecert/metrics.hpp"
#include "jgecert/rng.hpp"
#include "jgecert/tensor.hpp"

namespace jgecert {

enum class PencilVerdict { Simple, RepeatedEigenvalue, ComplexSpectrum, NotSliceMixInvertible };

std::string_view to_string(PencilVerdict v);

struct PencilOptions {
  /// A slice mix G counts as invertible when sigma_min(G) > mix_tol * ||P||_F.
  double mix_tol = 1e-8;
  /// An eigenvalue mu of G^-1 H is real when |Im mu| <= realness_tol * (1 + |Re mu|).
  double realness_tol = 1e-8;
  /// Two lines are distinct when their chordal distance exceeds this.
  double simplicity_tol = 1e-8;
  /// Random mixes drawn per attempt; the one with the largest sigma_min is used.
  int mix_samples = 4;
  int max_attempts = 8;
};

struct PencilDiagnosis {
  PencilVerdict verdict = PencilVerdict::NotSliceMixInvertible;
  std::optional<Spectrum> spectrum;
  /// Present iff verdict == Simple. Columns of C have unit norm.
  std::optional<FactorTriple> cpd;
  /// sigma_min of the slice mix that was inverted (0 when none qualified).
  double mix_sigma_min = 0.0;
};

/// det(sum_k gamma_k T_k). Throws DimensionError for non-square slices or a
/// gamma of the wrong length.
double char_poly_eval(const Tensor3& t, const Vector& gamma);

/// sum_k v_k T_k.
Matrix slice_mix(const Tensor3& t, const Vector& v);

struct SliceMixProbe {
  bool invertible = false;
  std::optional<Vector> witness;
  double best_sigma_min = 0.0;
};

/// Looks for a unit v with sigma_min(T x_3 v) > tol * ||T||_F. The coordinate
/// axes are tried first, then `trials` random unit vectors.
SliceMixProbe slice_mix_probe(const Tensor3& t, SeededRng& rng, int trials, double tol);

/// Spectrum of an R x R x 2 pencil via the eigendecomposition of G^-1 H for two
/// orthonormal mixes G = P x_3 v, H = P x_3 w. When the verdict is Simple the CPD
/// (Jennrich) is attached as well.
PencilDiagnosis pencil_spectrum(const Tensor3& p, SeededRng& rng, const PencilOptions& opts = {});

/// CPD of a simple R x R x 2 pencil: B = X^-T for the JGE vectors X, unit C columns
/// from the generalized eigenvalues, A by least squares on the mode-1 unfolding.
/// Returns the diagnosis instead when the pencil is not simple.
std::variant<FactorTriple, PencilDiagnosis> jennrich_pencil_cpd(const Tensor3& p, SeededRng& rng,
                                                                const PencilOptions& opts = {});

/// Least-squares A for fixed B and C: minimizes ||unfold(T,1) - A (C kr B)^T||_F.
Matrix solve_first_factor(const Tensor3& t, const Matrix& b, const Matrix& c);

}  // namespace jgecert
