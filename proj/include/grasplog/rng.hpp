#pragma once

#include <cstdint>
#include <string_view>

namespace grasplog {

/// One step of the splitmix64 generator; also used as a 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed for sub-task `index` of a run seeded with `base`. Independent of
/// scheduling, so parallel and sequential runs see identical streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// FNV-1a, used to turn sample identifiers into noise seeds.
std::uint64_t hash_string(std::string_view text) noexcept;

/// PCG32 (XSH-RR, 64-bit state) seeded through splitmix64.
///
/// Floating-point helpers are built only from integer output plus
/// basic IEEE arithmetic and libm, so sequences are reproducible across
/// platforms. std::*_distribution is deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound) without modulo bias. bound must be > 0.
  std::uint32_t below(std::uint32_t bound) noexcept;

  /// Gaussian via Box-Muller; the second variate is cached.
  double normal(double mean, double stddev) noexcept;

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace grasplog
