#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace lgae {

/// Seeded generator with a portable draw sequence: the engine is
/// std::mt19937_64 (fully specified by the standard) and every distribution
/// on top of it is implemented here rather than through <random>'s
/// implementation-defined distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer on [0, bound), rejection sampled. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal by the Box-Muller transform; the second value of each
  /// pair is cached for the next call.
  double normal();

  /// Full engine state including the cached normal, as text.
  [[nodiscard]] std::string state() const;
  void set_state(const std::string& text);

  friend bool operator==(const Rng& a, const Rng& b);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<double> gaussian_draws(Rng& rng, std::size_t count);

/// Deterministically derives an independent seed from a base seed and a
/// stream id (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace lgae
