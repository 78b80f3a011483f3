#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "jgecert/tensor.hpp"

namespace jgecert {

using Ranks = std::array<Index, 3>;

/// Orthogonal compression: T' ~ core x_1 V1 x_2 V2 x_3 V3 with column-orthonormal Vi.
struct Compression {
  Tensor3 core;
  std::array<Matrix, 3> factors;
  /// ||original - recover(*this)||_F.
  double residual = 0.0;
  /// Singular values of each unfolding of the original tensor.
  std::array<Vector, 3> singular_values;
};

/// Truncated multilinear SVD: Vi are the leading Ri left singular vectors of the
/// mode-i unfolding. Throws DimensionError if some Ri exceeds Ii or is < 1.
Compression mlsvd_truncate(const Tensor3& t, Ranks ranks);

/// core x_1 V1 x_2 V2 x_3 V3.
Tensor3 recover(const Compression& c);

/// Orthogonal U minimizing ||M - U N||_F (M, N of equal shape). When
/// rank(M) >= rank(N) the minimizer is chosen so that ran(U N) lies in ran(M).
Matrix orthogonal_procrustes(const Matrix& m, const Matrix& n);

/// Same problem, but with a prescribed column-orthonormal basis `target` whose
/// range contains ran(M); the result maps ran(N) into ran(target). Requires
/// rank(N) <= target.cols().
Matrix orthogonal_procrustes_into(const Matrix& m, const Matrix& n, const Matrix& target);

struct PairCompressOptions {
  /// Relative singular-value threshold for the multilinear-rank precondition.
  double rank_tol = 1e-8;
  bool refine = true;
  int max_sweeps = 50;
  /// Refinement stops once a sweep improves the distance by less than this (relative).
  double refine_tol = 1e-8;
};

struct PairCompression {
  Tensor3 w;
  Tensor3 w_hat;
  std::array<Matrix, 3> factors;
  std::array<Matrix, 3> factors_hat;
  double original_distance = 0.0;
  /// ||w - w_hat||_F after the mode-by-mode construction (before refinement).
  double initial_distance = 0.0;
  double compressed_distance = 0.0;
  /// Distance after each refinement sweep.
  std::vector<double> sweep_distances;
};

/// Joint orthogonal compression of W' and W_hat' to cores of size `ranks` whose
/// distance does not exceed ||W' - W_hat'||_F. The mode-by-mode construction is run
/// once per starting mode (1, 2, 3, visited cyclically), each followed by the
/// refinement sweeps; the closest pair of cores is returned. Throws
/// PreconditionError if either tensor has a numerical multilinear rank exceeding `ranks`.
PairCompression procrustes_pair_compress(const Tensor3& w, const Tensor3& w_hat, Ranks ranks,
                                         const PairCompressOptions& opts = {});

/// Writes manifest.txt, core.txt and V1.txt..V3.txt into `dir` (created if needed).
void save_compression(const std::filesystem::path& dir, const Compression& c);
Compression load_compression(const std::filesystem::path& dir);

}  // namespace jgecert
