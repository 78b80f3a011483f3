#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace jgecert {

/// Reproducible random source.
///
/// Uniform bits come from SplitMix64 (a counter-based generator: the n-th
/// output is a pure function of seed and n), normals from the Box-Muller
/// transform using both outputs of each pair. Nothing here depends on
/// std::*_distribution, whose output is implementation defined.
///
/// Child streams for parallel trials are derived with derive(), which mixes
/// the parent seed with up to three indices; see derive_seed().
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  /// Uniform in the open interval (0, 1).
  double uniform();
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Uniformly distributed point on the unit sphere in R^n.
  Eigen::VectorXd unit_vector(Eigen::Index n);

  SeededRng derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const;

private:
  std::uint64_t seed_;
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Child seed = mix64 chain over (seed, a, b, c). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// 64-bit FNV-1a of a string, used to fold experiment names into seeds.
std::uint64_t fnv1a(std::string_view s);

}  // namespace jgecert
