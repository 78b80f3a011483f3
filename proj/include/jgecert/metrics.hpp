#pragma once

#include <optional>
#include <vector>

#include "jgecert/tensor.hpp"

namespace jgecert {

/// One-dimensional subspace of R^K, stored as a unit representative whose first
/// nonzero coordinate is positive.
class Line {
public:
  /// Normalizes and sign-canonicalizes v. Throws ArgumentError for v = 0.
  explicit Line(const Vector& v);

  const Vector& rep() const { return rep_; }
  Index dim() const { return rep_.size(); }

private:
  Vector rep_;
};

struct Spectrum {
  std::vector<Line> lines;
  bool all_real = true;
  /// Optional JGE vectors, one unit column per line.
  std::optional<Matrix> eigvectors;

  Index size() const { return static_cast<Index>(lines.size()); }
};

/// Lines spanned by the columns of m.
Spectrum spectrum_from_columns(const Matrix& m);

/// Sine of the angle between the lines: sqrt(1 - <l1, l2>^2), evaluated through
/// the Lagrange identity so small angles keep full relative accuracy.
double chordal(const Line& l1, const Line& l2);

/// sv[from, to] = max over lines of `to` of the distance to the nearest line of `from`.
double spectral_variation(const Spectrum& from, const Spectrum& to);

/// min over permutations pi of max_k chordal(s1_k, s2_pi(k)).
double matching_distance(const Spectrum& s1, const Spectrum& s2);

/// Smallest chordal distance between two distinct members (1 for a singleton).
double min_pairwise_chordal(const Spectrum& s);

namespace detail {
/// Exhaustive search over all permutations; used for R <= 8.
double matching_distance_exhaustive(const Matrix& dist);
/// Bottleneck assignment: binary search over the distinct entries of `dist`
/// with a bipartite perfect-matching feasibility test.
double matching_distance_bottleneck(const Matrix& dist);
Matrix chordal_matrix(const Spectrum& s1, const Spectrum& s2);
}  // namespace detail

}  // namespace jgecert
