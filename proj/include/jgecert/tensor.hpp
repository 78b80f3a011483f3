#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "jgecert/rng.hpp"

namespace jgecert {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::array<Index, 3>;

/// Dense real I1 x I2 x I3 array.
///
/// Layout: mode-1 fastest, i.e. entry (i, j, k) lives at i + I1 * (j + I2 * k).
/// Consequently frontal slice k is a contiguous column-major I1 x I2 block.
class Tensor3 {
public:
  using SliceMap = Eigen::Map<Matrix>;
  using ConstSliceMap = Eigen::Map<const Matrix>;

  Tensor3() = default;
  /// Zero tensor. Throws DimensionError unless every dim is positive.
  explicit Tensor3(Dims dims);
  Tensor3(Index i1, Index i2, Index i3) : Tensor3(Dims{i1, i2, i3}) {}
  Tensor3(Dims dims, std::vector<double> values);

  const Dims& dims() const { return dims_; }
  Index dim(int mode) const { return dims_[static_cast<std::size_t>(mode - 1)]; }
  Index size() const { return static_cast<Index>(values_.size()); }

  double& operator()(Index i, Index j, Index k) { return values_[offset(i, j, k)]; }
  double operator()(Index i, Index j, Index k) const { return values_[offset(i, j, k)]; }

  const std::vector<double>& values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  SliceMap slice(Index k);
  ConstSliceMap slice(Index k) const;
  /// The whole array as an (I1*I2) x I3 column-major matrix (columns are vec(T_k)).
  Eigen::Map<const Matrix> as_slice_columns() const;
  Eigen::Map<Matrix> as_slice_columns();

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double s);

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

private:
  std::size_t offset(Index i, Index j, Index k) const {
    return static_cast<std::size_t>(i + dims_[0] * (j + dims_[1] * k));
  }

  Dims dims_{0, 0, 0};
  std::vector<double> values_;
};

/// CPD factors [[A, B, C]]; all three share the column count R.
struct FactorTriple {
  Matrix A;
  Matrix B;
  Matrix C;

  Index rank() const { return A.cols(); }
  Dims dims() const { return {A.rows(), B.rows(), C.rows()}; }
  /// Throws DimensionError when column counts disagree or R = 0.
  void validate() const;
};

Tensor3 outer3(const Vector& a, const Vector& b, const Vector& c);

/// Sum_r a_r (x) b_r (x) c_r; frontal slice k equals A * diag(C(k, :)) * B^T.
Tensor3 synthesize(const FactorTriple& f);

/// Mode-m product T x_m M, M of size J x I_m; mode-m fibers are mapped by M.
Tensor3 modal_product(const Tensor3& t, const Matrix& m, int mode);

/// Mode-m unfolding, I_m rows. Column order is lexicographic in the two remaining
/// modes with the lower mode running fastest:
///   mode 1: column j + I2*k,   mode 2: column i + I1*k,   mode 3: column i + I1*j.
Matrix unfold(const Tensor3& t, int mode);
/// Inverse of unfold for the given target dims.
Tensor3 refold(const Matrix& m, int mode, Dims dims);

double frobenius_norm(const Tensor3& t);
double frobenius_inner(const Tensor3& a, const Tensor3& b);

/// Numerical rank of a matrix: count of singular values > rel_tol * sigma_max.
Index numerical_rank(const Matrix& m, double rel_tol);
/// Per-mode numerical ranks of the unfoldings.
std::array<Index, 3> multilinear_rank(const Tensor3& t, double rel_tol);

struct RandomRankR {
  Tensor3 tensor;
  FactorTriple factors;
};

/// I.i.d. standard-normal factors, scaled jointly so the synthesized tensor has
/// unit Frobenius norm (each factor is multiplied by ||T||^(-1/3)).
/// Throws ArgumentError for R = 0. R > min(dims) is allowed.
RandomRankR random_rank_r(SeededRng& rng, Dims dims, Index rank);

struct NoisyTensor {
  Tensor3 noisy;
  Tensor3 noise;
};

/// Adds i.i.d. normal noise scaled so that 20 log10(||T|| / ||N||) = snr_db.
/// Throws ArgumentError for a zero tensor.
NoisyTensor add_noise_at_snr(const Tensor3& t, SeededRng& rng, double snr_db);

/// Tensor with i.i.d. standard-normal entries.
Tensor3 random_normal_tensor(SeededRng& rng, Dims dims);

/// Noise norm that realises the given SNR against a signal of norm signal_norm.
double noise_norm_for_snr(double signal_norm, double snr_db);

}  // namespace jgecert
