#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "jgecert/tensor.hpp"

namespace jgecert::fixtures {

// Builds a tensor from row-major frontal slices.
inline Tensor3 from_slices(std::initializer_list<std::initializer_list<std::initializer_list<double>>> slices) {
  const Index k = static_cast<Index>(slices.size());
  const Index i = static_cast<Index>(slices.begin()->size());
  const Index j = static_cast<Index>(slices.begin()->begin()->size());
  Tensor3 t(i, j, k);
  Index s = 0;
  for (const auto& slice : slices) {
    Index r = 0;
    for (const auto& row : slice) {
      Index c = 0;
      for (double v : row) t(r, c++, s) = v;
      ++r;
    }
    ++s;
  }
  return t;
}

// 3x3x3 tensor whose slice mixes are all singular.
inline Tensor3 singular_mix_tensor() {
  return from_slices({{{1, 0, 0}, {0, 0, 0}, {0, 0, 1}},
                      {{0, 2, 0}, {0, 0, -2}, {0, 0, 0}},
                      {{0, 0, -1}, {0, 0, 0}, {0, 0, 0}}});
}

// 3x3x3 lower-triangular slices; det of the mix factors into three linear forms.
inline Tensor3 triangular_tensor() {
  return from_slices({{{1, 0, 0}, {1, 1, 0}, {3, 4, 1}},
                      {{1, 0, 0}, {1, 2, 0}, {4, 5, -1}},
                      {{1, 0, 0}, {5, 3, 0}, {7, 8, 5}}});
}

inline double triangular_char_poly(const Vector& g) {
  return (g(0) + g(1) + g(2)) * (g(0) + 2 * g(1) + 3 * g(2)) * (g(0) - g(1) + 5 * g(2));
}

// Rank-3 pair showing that the coefficient of the spectral-variation bound cannot
// be dropped in general: T = [[I, I, C]], W = [[A~, A~, C~]].
struct BauerFikePair {
  FactorTriple t;
  FactorTriple w;
};

inline BauerFikePair bauer_fike_pair() {
  const double h = std::sqrt(2.0) / 2.0;
  const double s3 = std::sqrt(3.0);
  BauerFikePair p;
  p.t.A = Matrix::Identity(3, 3);
  p.t.B = Matrix::Identity(3, 3);
  p.t.C.resize(3, 3);
  p.t.C << 1, 0, h, 0, 1, h, 0, 0, 0;
  Matrix a(3, 3);
  a << 1 / (10 * s3), 1 / s3, 0, 1 / (10 * s3), -1 / (2 * s3), -1 / std::sqrt(2.0), 1 / (10 * s3), -1 / (2 * s3),
      1 / std::sqrt(2.0);
  p.w.A = a;
  p.w.B = a;
  p.w.C.resize(3, 3);
  p.w.C << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  return p;
}

}  // namespace jgecert::fixtures
