#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace dwreg {

/// Mixes a master seed and an index into an independent child seed
/// (splitmix64 finalizer applied twice). Used for per-replicate substreams so
/// results never depend on execution order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Seeded random stream. Every stochastic operation takes one explicitly;
/// there is no global or time-based seeding anywhere in the library.
///
/// Uniform variates are built from the top 53 bits of a mt19937_64 draw, so
/// the streams are bit-reproducible across standard library implementations.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Child stream seeded by derive_seed(seed(), index); independent of how
  /// much of this stream has been consumed.
  RandomStream substream(std::uint64_t index) const { return RandomStream(derive_seed(seed_, index)); }

  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Uniform on (0, 1]; the lower endpoint is never produced.
  double uniform_left_open();
  double uniform(double lo, double hi);
  /// Standard normal by inversion.
  double standard_normal();

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dwreg
