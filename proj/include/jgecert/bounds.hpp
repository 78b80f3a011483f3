#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "jgecert/approx.hpp"
#include "jgecert/compress.hpp"
#include "jgecert/pencil.hpp"

namespace jgecert {

enum class Verdict { Certified, Inconclusive };
std::string_view to_string(Verdict v);

enum class BalanceMode {
  /// Equalize ||a_r|| and ||b_r|| for every r.
  Default,
  /// Coordinate ascent on diag(D) maximizing sigma_min(A D) sigma_min(B D^-1).
  Als,
};

double sigma_min(const Matrix& m);

/// Rescales a_r <- d_r a_r, b_r <- b_r / d_r. The synthesized tensor is unchanged.
/// Throws ArgumentError if some column of A or B is zero.
FactorTriple balance_factors(const FactorTriple& f, BalanceMode mode = BalanceMode::Default);

/// Scales C to unit columns, moving the norms into A.
FactorTriple normalize_c_columns(const FactorTriple& f);

struct PencilEpsilon {
  double epsilon = 0.0;
  double sigma_min_a = 0.0;
  double sigma_min_b = 0.0;
  double min_chordal_gap = 0.0;
  PencilDiagnosis diagnosis;
};

/// sigma_min(A) sigma_min(B) min_{i!=j} chordal(c_i, c_j) / 2 for the (balanced)
/// CPD of a simple R x R x 2 pencil; 0 when the pencil is not simple.
PencilEpsilon pencil_existence_epsilon(const Tensor3& p, SeededRng& rng, const PencilOptions& opts = {},
                                       BalanceMode balance = BalanceMode::Default);

enum class ErrorNorm { Frobenius, SpEstimate };

struct MatchingDistanceBound {
  /// ||W - P|| / (sigma_min(A) sigma_min(B)).
  double bound = 0.0;
  double error_norm = 0.0;
  /// sigma_min(A) sigma_min(B) min gap / 2.
  double threshold = 0.0;
  /// error_norm < threshold (strict).
  bool certified = false;
  /// False when error_norm is a rank-1 estimate, which may underestimate.
  bool sound = true;
};

/// `f` is a CPD of the pencil P; C columns are normalized internally.
MatchingDistanceBound matching_distance_bound(const Tensor3& p, const FactorTriple& f, const Tensor3& w,
                                              ErrorNorm norm, SeededRng& rng);

enum class SpecialCase { None, K2, SharedFactor };

struct BauerFikeBound {
  /// sqrt(R), or 1 for the special cases.
  double coefficient = 1.0;
  /// Bounds on ||E x_1 A^-1 x_2 B^-1||_sp (C normalized to unit columns).
  SpectralNormBounds transformed;
  /// coefficient * transformed.lower: the value reported as the sv bound.
  double bound = 0.0;
  /// coefficient * transformed.upper: a guaranteed upper estimate.
  double bound_upper = 0.0;
};

/// Throws PreconditionError if A or B is not square and well conditioned.
BauerFikeBound bauer_fike_sv_bound(const FactorTriple& f, const Tensor3& e, SpecialCase special, SeededRng& rng,
                                   int hopm_restarts = 10);

/// Tensor E x_1 A^-1 x_2 B^-1 with C of f normalized to unit columns.
Tensor3 transformed_error(const FactorTriple& f, const Tensor3& e);

struct BoundOptions {
  PencilOptions pencil;
  BalanceMode balance = BalanceMode::Default;
  /// Random orthogonal matrices to try.
  int n_unitaries = 1;
  /// Also try U = I (before the random ones).
  bool include_identity = true;
  /// Optimize the slice pairing for every unitary.
  bool reorder = false;
  /// Relative threshold for numerical (multilinear) ranks.
  double rank_tol = 1e-8;
};

struct PerPencil {
  /// 1-based slice indices of S = T x_3 U.
  std::pair<int, int> pair;
  double sigma_min_a = 0.0;
  double sigma_min_b = 0.0;
  double min_chordal_gap = 0.0;
  double epsilon = 0.0;
  PencilVerdict verdict = PencilVerdict::NotSliceMixInvertible;
};

struct BoundReport {
  std::vector<double> epsilon_vector;
  double epsilon = 0.0;
  double existence_radius = 0.0;
  Matrix unitary;
  std::vector<std::pair<int, int>> pairing;
  std::vector<PerPencil> per_pencil;
  Verdict verdict = Verdict::Inconclusive;
  /// Best epsilon after each unitary tried, in order.
  std::vector<double> best_so_far;
  std::uint64_t seed = 0;
  BoundOptions options;
  /// Filled by certify_neighborhood.
  std::array<Index, 3> multilinear_rank{};
  double compression_residual = 0.0;
};

/// Haar-distributed orthogonal K x K matrix (QR of a Gaussian matrix with the
/// signs of diag(R) moved into Q).
Matrix random_orthogonal(SeededRng& rng, Index k);

/// Disjoint pairs (0-based) maximizing sum of eps(i, j)^2 over maximum matchings of
/// the K slices. Exhaustive for K <= 12, dynamic programming over subsets up to
/// K = 20, greedy beyond.
std::vector<std::pair<int, int>> optimal_pairing(const Matrix& eps);

/// Radius certificate for an R x R x K tensor with K >= 2: every tensor within
/// Frobenius distance epsilon / 2 has a best rank-R approximation.
BoundReport multi_pencil_epsilon(const Tensor3& t, SeededRng& rng, const BoundOptions& opts = {});

/// Compresses T' to R x R x K (K = numerical rank of the mode-3 unfolding) and
/// applies multi_pencil_epsilon. Throws PreconditionError (listing the singular
/// values) when the multilinear rank exceeds (R, R, R).
BoundReport certify_neighborhood(const Tensor3& tprime, Index rank, SeededRng& rng, const BoundOptions& opts = {});

enum class CertificateTarget {
  /// Decide existence for the truncated MLSVD W': fit error ||W - T~|| < epsilon.
  Truncated,
  /// Decide existence for M' itself: ||M' - T~'|| < epsilon - ||M' - W'||.
  Measured,
};

struct MeasuredOptions {
  BoundOptions bound;
  AlsOptions als;
  CertificateTarget target = CertificateTarget::Measured;
};

struct MeasuredCertificate {
  double mlsvd_error = 0.0;
  /// ||W - T~||_F on the core.
  double core_fit_error = 0.0;
  /// ||M' - T~'||_F = sqrt(mlsvd_error^2 + core_fit_error^2).
  double fit_error = 0.0;
  double epsilon = 0.0;
  /// Measured: epsilon - mlsvd_error - fit_error. Truncated: epsilon - core_fit_error.
  double slack = 0.0;
  CertificateTarget target = CertificateTarget::Measured;
  Verdict verdict = Verdict::Inconclusive;
  Ranks compressed_ranks{};
  int als_iterations = 0;
  bool als_converged = false;
  BoundReport report;
};

MeasuredCertificate mlsvd_existence_check(const Tensor3& mprime, Index rank, SeededRng& rng,
                                          const MeasuredOptions& opts = {});

}  // namespace jgecert
