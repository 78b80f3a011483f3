#include "jgecert/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "jgecert/error.hpp"

namespace jgecert {

Line::Line(const Vector& v) {
  const double n = v.norm();
  if (v.size() == 0 || n == 0.0 || !std::isfinite(n)) throw ArgumentError("Line: representative must be a nonzero finite vector");
  rep_ = v / n;
  for (Index i = 0; i < rep_.size(); ++i) {
    if (rep_(i) != 0.0) {
      if (rep_(i) < 0.0) rep_ = -rep_;
      break;
    }
  }
}

Spectrum spectrum_from_columns(const Matrix& m) {
  Spectrum s;
  s.lines.reserve(static_cast<std::size_t>(m.cols()));
  for (Index r = 0; r < m.cols(); ++r) s.lines.emplace_back(m.col(r));
  return s;
}

double chordal(const Line& l1, const Line& l2) {
  if (l1.dim() != l2.dim())
    throw DimensionError("chordal: lines live in R^" + std::to_string(l1.dim()) + " and R^" + std::to_string(l2.dim()));
  const Vector& x = l1.rep();
  const Vector& y = l2.rep();
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i)
    for (Index j = i + 1; j < x.size(); ++j) {
      const double w = x(i) * y(j) - x(j) * y(i);
      s += w * w;
    }
  return std::min(1.0, std::sqrt(s));
}

namespace detail {

Matrix chordal_matrix(const Spectrum& s1, const Spectrum& s2) {
  Matrix d(s1.size(), s2.size());
  for (Index i = 0; i < s1.size(); ++i)
    for (Index j = 0; j < s2.size(); ++j)
      d(i, j) = chordal(s1.lines[static_cast<std::size_t>(i)], s2.lines[static_cast<std::size_t>(j)]);
  return d;
}

double matching_distance_exhaustive(const Matrix& dist) {
  const Index n = dist.rows();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (Index k = 0; k < n && worst < best; ++k) worst = std::max(worst, dist(k, perm[static_cast<std::size_t>(k)]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

// Kuhn's augmenting-path search restricted to edges with dist <= threshold.
bool augment(const Matrix& dist, double threshold, Index row, std::vector<char>& seen,
             std::vector<Index>& match_of_col) {
  for (Index c = 0; c < dist.cols(); ++c) {
    if (dist(row, c) > threshold || seen[static_cast<std::size_t>(c)]) continue;
    seen[static_cast<std::size_t>(c)] = 1;
    Index& owner = match_of_col[static_cast<std::size_t>(c)];
    if (owner < 0 || augment(dist, threshold, owner, seen, match_of_col)) {
      owner = row;
      return true;
    }
  }
  return false;
}

bool has_perfect_matching(const Matrix& dist, double threshold) {
  std::vector<Index> match_of_col(static_cast<std::size_t>(dist.cols()), -1);
  for (Index r = 0; r < dist.rows(); ++r) {
    std::vector<char> seen(static_cast<std::size_t>(dist.cols()), 0);
    if (!augment(dist, threshold, r, seen, match_of_col)) return false;
  }
  return true;
}

}  // namespace

double matching_distance_bottleneck(const Matrix& dist) {
  std::vector<double> values(dist.data(), dist.data() + dist.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::size_t lo = 0;
  std::size_t hi = values.size() - 1;  // the largest entry is always feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (has_perfect_matching(dist, values[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return values[lo];
}

}  // namespace detail

double spectral_variation(const Spectrum& from, const Spectrum& to) {
  if (from.lines.empty() || to.lines.empty()) throw ArgumentError("spectral_variation: empty spectrum");
  const Matrix d = detail::chordal_matrix(from, to);
  return d.colwise().minCoeff().maxCoeff();
}

double matching_distance(const Spectrum& s1, const Spectrum& s2) {
  if (s1.size() != s2.size())
    throw DimensionError("matching_distance: spectra have " + std::to_string(s1.size()) + " and " +
                         std::to_string(s2.size()) + " lines");
  if (s1.lines.empty()) throw ArgumentError("matching_distance: empty spectrum");
  const Matrix d = detail::chordal_matrix(s1, s2);
  return s1.size() <= 8 ? detail::matching_distance_exhaustive(d) : detail::matching_distance_bottleneck(d);
}

double min_pairwise_chordal(const Spectrum& s) {
  double best = 1.0;
  for (std::size_t i = 0; i < s.lines.size(); ++i)
    for (std::size_t j = i + 1; j < s.lines.size(); ++j) best = std::min(best, chordal(s.lines[i], s.lines[j]));
  return best;
}

}  // namespace jgecert
