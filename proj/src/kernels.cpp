#include "jgecert/kernels.hpp"

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jgecert::kernels {

namespace {

// Reductions are split into a fixed number of chunks (independent of the thread
// count) and the partials are summed serially, so results do not depend on
// how many threads ran.
constexpr Index kReduceChunks = 16;

struct ChunkRange {
  Index begin;
  Index end;
};

ChunkRange chunk(Index n, Index c, Index chunks) {
  const Index base = n / chunks;
  const Index extra = n % chunks;
  const Index begin = c * base + std::min(c, extra);
  return {begin, begin + base + (c < extra ? 1 : 0)};
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Tensor3 modal_product(const Tensor3& t, const Matrix& m, int mode) {
  const auto [i1, i2, i3] = t.dims();
  if (mode == 1) {
    Tensor3 out(m.rows(), i2, i3);
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < i3; ++k) out.slice(k).noalias() = m * t.slice(k);
    return out;
  }
  if (mode == 2) {
    Tensor3 out(i1, m.rows(), i3);
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < i3; ++k) out.slice(k).noalias() = t.slice(k) * m.transpose();
    return out;
  }
  Tensor3 out(i1, i2, m.rows());
  const auto src = t.as_slice_columns();
  auto dst = out.as_slice_columns();
  const Index rows = i1 * i2;
  const Index chunks = std::min<Index>(rows, kReduceChunks);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const auto r = chunk(rows, c, chunks);
    dst.middleRows(r.begin, r.end - r.begin).noalias() =
        src.middleRows(r.begin, r.end - r.begin) * m.transpose();
  }
  return out;
}

Tensor3 synthesize(const FactorTriple& f) {
  Tensor3 out(f.A.rows(), f.B.rows(), f.C.rows());
  const Matrix bt = f.B.transpose();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < f.C.rows(); ++k)
    out.slice(k).noalias() = f.A * f.C.row(k).asDiagonal() * bt;
  return out;
}

Matrix gram(const Tensor3& t, int mode) {
  const auto [i1, i2, i3] = t.dims();
  if (mode == 3) {
    const auto s = t.as_slice_columns();
    Matrix g(i3, i3);
#pragma omp parallel for schedule(dynamic)
    for (Index k = 0; k < i3; ++k)
      for (Index l = 0; l <= k; ++l) g(k, l) = s.col(k).dot(s.col(l));
    for (Index k = 0; k < i3; ++k)
      for (Index l = k + 1; l < i3; ++l) g(k, l) = g(l, k);
    return g;
  }
  const Index n = mode == 1 ? i1 : i2;
  const Index chunks = std::min<Index>(i3, kReduceChunks);
  std::vector<Matrix> partial(static_cast<std::size_t>(chunks), Matrix::Zero(n, n));
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const auto r = chunk(i3, c, chunks);
    Matrix& acc = partial[static_cast<std::size_t>(c)];
    for (Index k = r.begin; k < r.end; ++k) {
      if (mode == 1)
        acc.noalias() += t.slice(k) * t.slice(k).transpose();
      else
        acc.noalias() += t.slice(k).transpose() * t.slice(k);
    }
  }
  Matrix g = Matrix::Zero(n, n);
  for (const Matrix& p : partial) g += p;
  return g;
}

double squared_norm(const Tensor3& t) {
  const Index n = t.size();
  const Index chunks = std::min<Index>(n, kReduceChunks);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  const double* v = t.data();
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const auto r = chunk(n, c, chunks);
    double s = 0.0;
    for (Index i = r.begin; i < r.end; ++i) s += v[i] * v[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

Matrix mttkrp(const Tensor3& t, const FactorTriple& f, int mode) {
  const auto [i1, i2, i3] = t.dims();
  const Index rank = f.rank();
  if (mode == 3) {
    Matrix out(i3, rank);
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < i3; ++k) {
      const Matrix tb = t.slice(k) * f.B;
      out.row(k) = f.A.cwiseProduct(tb).colwise().sum();
    }
    return out;
  }
  const Index rows = mode == 1 ? i1 : i2;
  const Index chunks = std::min<Index>(i3, kReduceChunks);
  std::vector<Matrix> partial(static_cast<std::size_t>(chunks), Matrix::Zero(rows, rank));
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const auto r = chunk(i3, c, chunks);
    Matrix& acc = partial[static_cast<std::size_t>(c)];
    for (Index k = r.begin; k < r.end; ++k) {
      if (mode == 1)
        acc.noalias() += t.slice(k) * (f.B * f.C.row(k).asDiagonal());
      else
        acc.noalias() += t.slice(k).transpose() * (f.A * f.C.row(k).asDiagonal());
    }
  }
  Matrix out = Matrix::Zero(rows, rank);
  for (const Matrix& p : partial) out += p;
  return out;
}

namespace reference {

Tensor3 modal_product(const Tensor3& t, const Matrix& m, int mode) {
  Dims d = t.dims();
  d[static_cast<std::size_t>(mode - 1)] = m.rows();
  Tensor3 out(d);
  const auto [i1, i2, i3] = t.dims();
  for (Index k = 0; k < i3; ++k)
    for (Index j = 0; j < i2; ++j)
      for (Index i = 0; i < i1; ++i) {
        const double v = t(i, j, k);
        for (Index p = 0; p < m.rows(); ++p) {
          if (mode == 1) out(p, j, k) += m(p, i) * v;
          else if (mode == 2) out(i, p, k) += m(p, j) * v;
          else out(i, j, p) += m(p, k) * v;
        }
      }
  return out;
}

Tensor3 synthesize(const FactorTriple& f) {
  Tensor3 out(f.A.rows(), f.B.rows(), f.C.rows());
  for (Index r = 0; r < f.rank(); ++r)
    for (Index k = 0; k < f.C.rows(); ++k)
      for (Index j = 0; j < f.B.rows(); ++j)
        for (Index i = 0; i < f.A.rows(); ++i) out(i, j, k) += f.A(i, r) * f.B(j, r) * f.C(k, r);
  return out;
}

Matrix gram(const Tensor3& t, int mode) {
  const auto [i1, i2, i3] = t.dims();
  const Index n = t.dim(mode);
  Matrix g = Matrix::Zero(n, n);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      double s = 0.0;
      if (mode == 1) {
        for (Index k = 0; k < i3; ++k)
          for (Index j = 0; j < i2; ++j) s += t(p, j, k) * t(q, j, k);
      } else if (mode == 2) {
        for (Index k = 0; k < i3; ++k)
          for (Index i = 0; i < i1; ++i) s += t(i, p, k) * t(i, q, k);
      } else {
        for (Index j = 0; j < i2; ++j)
          for (Index i = 0; i < i1; ++i) s += t(i, j, p) * t(i, j, q);
      }
      g(p, q) = s;
    }
  return g;
}

double squared_norm(const Tensor3& t) {
  double s = 0.0;
  for (double v : t.values()) s += v * v;
  return s;
}

Matrix mttkrp(const Tensor3& t, const FactorTriple& f, int mode) {
  const auto [i1, i2, i3] = t.dims();
  Matrix out = Matrix::Zero(t.dim(mode), f.rank());
  for (Index r = 0; r < f.rank(); ++r)
    for (Index k = 0; k < i3; ++k)
      for (Index j = 0; j < i2; ++j)
        for (Index i = 0; i < i1; ++i) {
          const double v = t(i, j, k);
          if (mode == 1) out(i, r) += v * f.B(j, r) * f.C(k, r);
          else if (mode == 2) out(j, r) += v * f.A(i, r) * f.C(k, r);
          else out(k, r) += v * f.A(i, r) * f.B(j, r);
        }
  return out;
}

}  // namespace reference

}  // namespace jgecert::kernels
