#pragma once

// Data-parallel tensor kernels.
//
// Every kernel has two implementations: the OpenMP one used by the library and
// a plain index-loop version in kernels::reference that follows the defining
// formula literally. The reference versions exist for tests and benchmarks only.

#include "jgecert/tensor.hpp"

namespace jgecert::kernels {

Tensor3 modal_product(const Tensor3& t, const Matrix& m, int mode);
Tensor3 synthesize(const FactorTriple& f);
/// unfold(t, mode) * unfold(t, mode)^T without forming the unfolding.
Matrix gram(const Tensor3& t, int mode);
double squared_norm(const Tensor3& t);
/// Matricized tensor times Khatri-Rao product for mode 1, 2 or 3:
///   mode 1: X_(1) (C kr B), mode 2: X_(2) (C kr A), mode 3: X_(3) (B kr A).
Matrix mttkrp(const Tensor3& t, const FactorTriple& f, int mode);

namespace reference {

Tensor3 modal_product(const Tensor3& t, const Matrix& m, int mode);
Tensor3 synthesize(const FactorTriple& f);
Matrix gram(const Tensor3& t, int mode);
double squared_norm(const Tensor3& t);
Matrix mttkrp(const Tensor3& t, const FactorTriple& f, int mode);

}  // namespace reference

/// Threads used by the OpenMP kernels (omp_get_max_threads, or 1 without OpenMP).
int max_threads();

}  // namespace jgecert::kernels
