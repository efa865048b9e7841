#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "grasplog/geometry.hpp"
#include "grasplog/planner.hpp"
#include "grasplog/scene.hpp"

namespace testing {

using namespace grasplog;

inline std::shared_ptr<const Heightfield> flat_terrain() {
  TerrainParams tp;
  tp.amplitude = 0.0;
  return std::make_shared<const Heightfield>(tp);
}

inline Log make_log(int id, Vec2 c, double yaw, double length = 2.5, double diameter = 0.16) {
  Log l;
  l.id = id;
  l.center = c;
  l.yaw = yaw;
  l.length = length;
  l.diameter = diameter;
  return l;
}

/// Drops the logs in order onto flat ground.
inline Pile settled_pile(const std::vector<Log>& logs, std::shared_ptr<const Heightfield> terrain = flat_terrain()) {
  Pile p;
  p.terrain = std::move(terrain);
  for (const Log& l : logs) p.logs.push_back(settle_log(l, p.logs, *p.terrain));
  return p;
}

/// Closest distance between two 3D segments, by dense sampling of one and
/// exact projection onto the other.
struct P3 {
  double x, y, z;
};

inline P3 axis_point(const Log& l, double t) {
  const Vec2 u = l.axis();
  return {l.center.x + u.x * t, l.center.y + u.y * t, l.z_center + t * std::tan(l.tilt)};
}

inline double point_segment3(P3 p, P3 a, P3 b) {
  const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
  const double len2 = dx * dx + dy * dy + dz * dz;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy + (p.z - a.z) * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y, ez = a.z + t * dz - p.z;
  return std::sqrt(ex * ex + ey * ey + ez * ez);
}

inline double axis_distance3(const Log& a, const Log& b, int samples = 2000) {
  const double ha = a.half_extent(), hb = b.half_extent();
  const P3 b0 = axis_point(b, -hb), b1 = axis_point(b, hb);
  double best = 1e300;
  for (int i = 0; i <= samples; ++i) {
    const double t = -ha + 2.0 * ha * i / samples;
    best = std::min(best, point_segment3(axis_point(a, t), b0, b1));
  }
  return best;
}

/// Sign of the cross product decides which side; used for a plain
/// point-in-convex-quad test independent of OrientedRect::contains.
inline bool inside_quad(Vec2 p, const std::array<Vec2, 4>& q) {
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 a = q[i], b = q[(i + 1) % 4];
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0) return false;
  }
  return true;
}

/// Straightforward reading of the reduction: take the narrowest remaining
/// candidate (earliest on ties), simulate it, and on success drop every
/// remaining candidate whose rectangle overlaps it by more than the threshold.
struct BruteStep {
  std::size_t candidate;
  bool success;
  std::vector<std::size_t> discarded;
};

inline std::vector<BruteStep> brute_force_reduction(const std::vector<Grasp>& cands, const Pile& pile,
                                                    const IdSet& targets, const ReduceOptions& opt,
                                                    std::vector<std::size_t>& kept) {
  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < cands.size(); ++i) remaining.push_back(i);
  std::vector<BruteStep> trace;
  while (!remaining.empty()) {
    std::size_t pick = 0;
    for (std::size_t r = 1; r < remaining.size(); ++r)
      if (cands[remaining[r]].w < cands[remaining[pick]].w) pick = r;
    const std::size_t g = remaining[pick];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    BruteStep step{g, verify_candidate(pile, cands[g], targets, opt).success, {}};
    if (step.success) {
      kept.push_back(g);
      const OrientedRect rg = capture_rect(cands[g], opt.planner);
      std::vector<std::size_t> next;
      for (std::size_t r : remaining) {
        if (rect_overlap_area(rg, capture_rect(cands[r], opt.planner)) > opt.planner.overlap_threshold)
          step.discarded.push_back(r);
        else
          next.push_back(r);
      }
      remaining = std::move(next);
    }
    trace.push_back(std::move(step));
  }
  return trace;
}

}  // namespace testing
