#include "dwreg/random.hpp"

#include "dwreg/normal.hpp"

namespace dwreg {

namespace {

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double RandomStream::uniform_open() {
  std::uint64_t k = 0;
  do {
    k = engine_() >> 11;
  } while (k == 0);
  return static_cast<double>(k) * kTwoPowMinus53;
}

double RandomStream::uniform_left_open() {
  return static_cast<double>((engine_() >> 11) + 1) * kTwoPowMinus53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

double RandomStream::standard_normal() { return normal_quantile(uniform_open()); }

}  // namespace dwreg
