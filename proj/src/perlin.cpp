#include "grasplog/perlin.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "grasplog/rng.hpp"

namespace grasplog {

namespace {

constexpr double kDiag = 1.0;
constexpr double kAxis = 1.4142135623730951;

double fade(double t) noexcept { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
double lerp(double a, double b, double t) noexcept { return a + t * (b - a); }

double grad(std::uint8_t hash, double x, double y) noexcept {
  switch (hash & 7u) {
    case 0: return kDiag * (x + y);
    case 1: return kDiag * (-x + y);
    case 2: return kDiag * (x - y);
    case 3: return kDiag * (-x - y);
    case 4: return kAxis * x;
    case 5: return -kAxis * x;
    case 6: return kAxis * y;
    default: return -kAxis * y;
  }
}

}  // namespace

PerlinNoise::PerlinNoise(std::uint64_t seed) {
  std::array<std::uint8_t, 256> p{};
  std::iota(p.begin(), p.end(), std::uint8_t{0});
  Rng rng(seed);
  for (std::uint32_t i = 255; i > 0; --i) {
    const std::uint32_t j = rng.below(i + 1);
    std::swap(p[i], p[j]);
  }
  for (std::size_t i = 0; i < 512; ++i) perm_[i] = p[i & 255u];
}

double PerlinNoise::noise(double x, double y) const noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto xi = static_cast<std::uint8_t>(static_cast<long long>(fx) & 255);
  const auto yi = static_cast<std::uint8_t>(static_cast<long long>(fy) & 255);
  const double dx = x - fx;
  const double dy = y - fy;
  const double u = fade(dx);
  const double v = fade(dy);

  const std::uint8_t aa = perm_[perm_[xi] + yi];
  const std::uint8_t ab = perm_[perm_[xi] + yi + 1];
  const std::uint8_t ba = perm_[perm_[xi + 1] + yi];
  const std::uint8_t bb = perm_[perm_[xi + 1] + yi + 1];

  const double x1 = lerp(grad(aa, dx, dy), grad(ba, dx - 1.0, dy), u);
  const double x2 = lerp(grad(ab, dx, dy - 1.0), grad(bb, dx - 1.0, dy - 1.0), u);
  return lerp(x1, x2, v);
}

double PerlinNoise::fractal(double x, double y, int octaves, double amplitude,
                            double scale) const noexcept {
  double sum = 0.0;
  double freq = 1.0 / scale;
  double amp = amplitude;
  for (int k = 0; k < octaves; ++k) {
    sum += amp * noise(x * freq, y * freq);
    freq *= 2.0;
    amp *= 0.5;
  }
  return sum;
}

double fractal_bound(int octaves, double amplitude) noexcept {
  double b = 0.0;
  double a = std::abs(amplitude);
  for (int k = 0; k < octaves; ++k, a *= 0.5) b += a;
  return b;
}

double perlin2(double x, double y, int octaves, double amplitude, double scale,
               std::uint64_t seed) {
  if (!(scale > 0.0)) throw std::invalid_argument("perlin2: scale must be positive");
  return PerlinNoise(seed).fractal(x, y, octaves, amplitude, scale);
}

}  // namespace grasplog
