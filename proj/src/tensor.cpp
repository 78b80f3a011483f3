#include "jgecert/tensor.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "jgecert/error.hpp"
#include "jgecert/kernels.hpp"

namespace jgecert {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) throw DimensionError("mode must be 1, 2 or 3, got " + std::to_string(mode));
}

std::string dims_str(const Dims& d) {
  return "(" + std::to_string(d[0]) + "," + std::to_string(d[1]) + "," + std::to_string(d[2]) + ")";
}

}  // namespace

Tensor3::Tensor3(Dims dims) : dims_(dims) {
  for (Index d : dims)
    if (d <= 0) throw DimensionError("tensor dims must be positive, got " + dims_str(dims));
  values_.assign(static_cast<std::size_t>(dims[0] * dims[1] * dims[2]), 0.0);
}

Tensor3::Tensor3(Dims dims, std::vector<double> values) : Tensor3(dims) {
  if (values.size() != values_.size())
    throw DimensionError("expected " + std::to_string(values_.size()) + " entries for dims " +
                         dims_str(dims) + ", got " + std::to_string(values.size()));
  values_ = std::move(values);
}

Tensor3::SliceMap Tensor3::slice(Index k) {
  return SliceMap(values_.data() + k * dims_[0] * dims_[1], dims_[0], dims_[1]);
}

Tensor3::ConstSliceMap Tensor3::slice(Index k) const {
  return ConstSliceMap(values_.data() + k * dims_[0] * dims_[1], dims_[0], dims_[1]);
}

Eigen::Map<const Matrix> Tensor3::as_slice_columns() const {
  return Eigen::Map<const Matrix>(values_.data(), dims_[0] * dims_[1], dims_[2]);
}

Eigen::Map<Matrix> Tensor3::as_slice_columns() {
  return Eigen::Map<Matrix>(values_.data(), dims_[0] * dims_[1], dims_[2]);
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  if (other.dims_ != dims_) throw DimensionError("tensor sum: dims " + dims_str(dims_) + " vs " + dims_str(other.dims_));
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other.values_[n];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  if (other.dims_ != dims_) throw DimensionError("tensor difference: dims " + dims_str(dims_) + " vs " + dims_str(other.dims_));
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other.values_[n];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

void FactorTriple::validate() const {
  if (A.cols() == 0) throw DimensionError("factor rank must be positive");
  if (B.cols() != A.cols() || C.cols() != A.cols())
    throw DimensionError("factor column counts differ: A " + std::to_string(A.cols()) + ", B " +
                         std::to_string(B.cols()) + ", C " + std::to_string(C.cols()));
  if (A.rows() == 0 || B.rows() == 0 || C.rows() == 0) throw DimensionError("factor with zero rows");
}

Tensor3 outer3(const Vector& a, const Vector& b, const Vector& c) {
  if (a.size() == 0 || b.size() == 0 || c.size() == 0) throw DimensionError("outer3: zero-length vector");
  Tensor3 t(a.size(), b.size(), c.size());
  for (Index k = 0; k < c.size(); ++k) t.slice(k).noalias() = c(k) * a * b.transpose();
  return t;
}

Tensor3 synthesize(const FactorTriple& f) {
  f.validate();
  return kernels::synthesize(f);
}

Tensor3 modal_product(const Tensor3& t, const Matrix& m, int mode) {
  check_mode(mode);
  if (m.cols() != t.dim(mode))
    throw DimensionError("modal_product: matrix has " + std::to_string(m.cols()) + " columns, mode-" +
                         std::to_string(mode) + " dim is " + std::to_string(t.dim(mode)));
  if (m.rows() == 0) throw DimensionError("modal_product: matrix with zero rows");
  return kernels::modal_product(t, m, mode);
}

Matrix unfold(const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [i1, i2, i3] = t.dims();
  switch (mode) {
    case 1:
      return Eigen::Map<const Matrix>(t.data(), i1, i2 * i3);
    case 2: {
      Matrix out(i2, i1 * i3);
      for (Index k = 0; k < i3; ++k) out.middleCols(k * i1, i1) = t.slice(k).transpose();
      return out;
    }
    default:
      return t.as_slice_columns().transpose();
  }
}

Tensor3 refold(const Matrix& m, int mode, Dims dims) {
  check_mode(mode);
  Tensor3 t(dims);
  const auto [i1, i2, i3] = dims;
  const Index rows = dims[static_cast<std::size_t>(mode - 1)];
  if (m.rows() != rows || m.size() != t.size()) throw DimensionError("refold: matrix shape does not match dims");
  switch (mode) {
    case 1:
      Eigen::Map<Matrix>(t.data(), i1, i2 * i3) = m;
      break;
    case 2:
      for (Index k = 0; k < i3; ++k) t.slice(k) = m.middleCols(k * i1, i1).transpose();
      break;
    default:
      t.as_slice_columns() = m.transpose();
  }
  return t;
}

double frobenius_norm(const Tensor3& t) { return std::sqrt(kernels::squared_norm(t)); }

double frobenius_inner(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims()) throw DimensionError("frobenius_inner: dims " + dims_str(a.dims()) + " vs " + dims_str(b.dims()));
  double s = 0.0;
  for (Index n = 0; n < a.size(); ++n) s += a.data()[n] * b.data()[n];
  return s;
}

Index numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

std::array<Index, 3> multilinear_rank(const Tensor3& t, double rel_tol) {
  return {numerical_rank(unfold(t, 1), rel_tol), numerical_rank(unfold(t, 2), rel_tol),
          numerical_rank(unfold(t, 3), rel_tol)};
}

RandomRankR random_rank_r(SeededRng& rng, Dims dims, Index rank) {
  if (rank <= 0) throw ArgumentError("random_rank_r: rank must be positive");
  FactorTriple f{rng.normal_matrix(dims[0], rank), rng.normal_matrix(dims[1], rank),
                 rng.normal_matrix(dims[2], rank)};
  const double nrm = frobenius_norm(synthesize(f));
  if (nrm == 0.0) throw ArgumentError("random_rank_r: sampled a zero tensor");
  const double s = std::cbrt(1.0 / nrm);
  f.A *= s;
  f.B *= s;
  f.C *= s;
  Tensor3 t = synthesize(f);
  return {std::move(t), std::move(f)};
}

Tensor3 random_normal_tensor(SeededRng& rng, Dims dims) {
  Tensor3 t(dims);
  for (Index n = 0; n < t.size(); ++n) t.data()[n] = rng.normal();
  return t;
}

double noise_norm_for_snr(double signal_norm, double snr_db) {
  return signal_norm * std::pow(10.0, -snr_db / 20.0);
}

NoisyTensor add_noise_at_snr(const Tensor3& t, SeededRng& rng, double snr_db) {
  const double tn = frobenius_norm(t);
  if (tn == 0.0) throw ArgumentError("add_noise_at_snr: signal tensor is zero");
  Tensor3 noise = random_normal_tensor(rng, t.dims());
  noise *= noise_norm_for_snr(tn, snr_db) / frobenius_norm(noise);
  Tensor3 noisy = t + noise;
  return {std::move(noisy), std::move(noise)};
}

}  // namespace jgecert
