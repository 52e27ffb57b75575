#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wsens {

/// Identifier of the (seed, path index) -> normal sequence mapping below.
/// Bump it whenever the mapping changes so stale dumps are detectable.
inline constexpr std::uint64_t kStreamScheme = 1;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based standard normal stream. Stream `index` of `seed` is a pure
/// function of the two, so any path can be regenerated independently of the
/// others and of how work is split between threads.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t index) noexcept
      : key_(splitmix64(seed ^ splitmix64(index + 1))) {}

  double next() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const std::uint64_t a = uniform_bits(counter_++);
    const std::uint64_t b = uniform_bits(counter_++);
    constexpr double scale = 0x1.0p-53;
    const double u1 = static_cast<double>((a >> 11) + 1) * scale;  // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * scale;        // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::uint64_t uniform_bits(std::uint64_t k) const noexcept {
    return splitmix64(key_ + (k + 1) * 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wsens
