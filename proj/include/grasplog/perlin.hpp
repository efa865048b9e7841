#pragma once

#include <array>
#include <cstdint>

namespace grasplog {

/// Seeded 2D gradient noise with fractal (octave) summation.
///
/// Gradients are the 8 compass directions scaled to length sqrt(2), which
/// bounds a single octave to [-1, 1]. Octave k has frequency 2^k / scale and
/// amplitude amplitude * 2^-k.
class PerlinNoise {
 public:
  explicit PerlinNoise(std::uint64_t seed);

  /// Single octave at lattice coordinates.
  double noise(double x, double y) const noexcept;

  double fractal(double x, double y, int octaves, double amplitude, double scale) const noexcept;

 private:
  std::array<std::uint8_t, 512> perm_{};
};

/// amplitude * sum_{k<octaves} 2^-k: the bound on |fractal|.
double fractal_bound(int octaves, double amplitude) noexcept;

/// Convenience wrapper; builds the permutation table on every call.
/// Throws std::invalid_argument unless scale > 0.
double perlin2(double x, double y, int octaves, double amplitude, double scale, std::uint64_t seed);

}  // namespace grasplog
