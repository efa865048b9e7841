#pragma once

#include <span>
#include <vector>

#include "grasplog/image.hpp"
#include "grasplog/scene.hpp"

namespace grasplog {

inline constexpr double kCameraHeight = 5.0;  // m above z = 0

struct RgbdImage {
  FloatImage r, g, b;  // [0, 1]
  FloatImage depth;    // distance below the camera plane, m
};

struct InstanceMasks {
  std::vector<int> ids;
  std::vector<Mask> masks;  // masks[i] belongs to ids[i]

  const Mask& of(int id) const;
};

struct RenderResult {
  RgbdImage rgbd;
  InstanceMasks masks;
};

/// Orthographic top-down z-buffer rasterization, sampling pixel centres.
RenderResult render(const Pile& pile, const ImageGrid& grid = {});

/// Union of the member masks. Throws std::invalid_argument on unknown ids.
Mask make_target_mask(const InstanceMasks& masks, std::span<const int> targets);

}  // namespace grasplog
