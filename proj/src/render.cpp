#include "grasplog/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "grasplog/perlin.hpp"
#include "grasplog/rng.hpp"

namespace grasplog {

namespace {

// Light 45 degrees above the horizon, arriving from the north-west.
constexpr double kLightX = -0.5;
constexpr double kLightY = 0.5;
constexpr double kLightZ = 0.7071067811865476;
constexpr double kAmbient = 0.3;

double lambert(double nx, double ny, double nz) {
  return kAmbient + (1.0 - kAmbient) * std::max(0.0, nx * kLightX + ny * kLightY + nz * kLightZ);
}

struct Rgb {
  double r, g, b;
};

Rgb wood_tone(int id, std::uint64_t pile_seed) {
  Rng rng(derive_seed(pile_seed, 0x5700D000ull + static_cast<std::uint64_t>(id)));
  const double v = rng.uniform(-0.08, 0.08);
  return {0.62 + v, 0.45 + 0.8 * v, 0.28 + 0.5 * v};
}

}  // namespace

const Mask& InstanceMasks::of(int id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return masks[i];
  throw std::invalid_argument("unknown log id " + std::to_string(id));
}

RenderResult render(const Pile& pile, const ImageGrid& grid) {
  const std::size_t n = grid.n;
  RenderResult out;
  out.rgbd.r = FloatImage(n, n);
  out.rgbd.g = FloatImage(n, n);
  out.rgbd.b = FloatImage(n, n);
  out.rgbd.depth = FloatImage(n, n);
  out.masks.ids = pile.ids();
  out.masks.masks.assign(pile.logs.size(), Mask(n, n, 0));

  const Heightfield& terrain = *pile.terrain;
  const PerlinNoise mottle(derive_seed(terrain.params().seed, 1));
  std::vector<Rgb> tones;
  for (const Log& l : pile.logs) tones.push_back(wood_tone(l.id, pile.seed));

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 p = grid.center(j, k);
      double top = terrain.height(p.x, p.y);
      int owner = -1;
      for (std::size_t i = 0; i < pile.logs.size(); ++i) {
        const double z = pile.logs[i].top_surface_at(p);
        if (z > top) {
          top = z;
          owner = static_cast<int>(i);
        }
      }

      Rgb c;
      if (owner < 0) {
        const auto nrm = terrain.normal(p.x, p.y);
        const double t = 0.5 + 0.5 * mottle.fractal(p.x, p.y, 3, 1.0, 0.6) / 1.75;
        const double shade = lambert(nrm[0], nrm[1], nrm[2]);
        c = {shade * (0.42 - 0.12 * t), shade * (0.33 + 0.07 * t), shade * (0.22 - 0.02 * t)};
      } else {
        const Log& l = pile.logs[static_cast<std::size_t>(owner)];
        const Vec2 u = l.axis();
        const Vec2 side{-u.y, u.x};
        const double r = std::clamp(dot(p - l.center, side) / l.radius(), -1.0, 1.0);
        const double up = std::sqrt(1.0 - r * r);
        const double shade = lambert(r * side.x, r * side.y, up);
        const Rgb& tone = tones[static_cast<std::size_t>(owner)];
        c = {shade * tone.r, shade * tone.g, shade * tone.b};
        out.masks.masks[static_cast<std::size_t>(owner)](j, k) = 1;
      }
      out.rgbd.r(j, k) = static_cast<float>(std::clamp(c.r, 0.0, 1.0));
      out.rgbd.g(j, k) = static_cast<float>(std::clamp(c.g, 0.0, 1.0));
      out.rgbd.b(j, k) = static_cast<float>(std::clamp(c.b, 0.0, 1.0));
      out.rgbd.depth(j, k) = static_cast<float>(kCameraHeight - top);
    }
  }
  return out;
}

Mask make_target_mask(const InstanceMasks& masks, std::span<const int> targets) {
  if (masks.masks.empty()) {
    if (!targets.empty()) throw std::invalid_argument("make_target_mask: unknown log id");
    return {};
  }
  Mask out(masks.masks.front().rows(), masks.masks.front().cols(), 0);
  for (int id : targets) {
    const Mask& m = masks.of(id);
    auto dst = out.values();
    auto src = m.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<std::uint8_t>(dst[i] | src[i]);
  }
  return out;
}

}  // namespace grasplog
