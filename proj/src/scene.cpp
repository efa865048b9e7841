#include "grasplog/scene.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "grasplog/perlin.hpp"

namespace grasplog {

namespace {

constexpr double kSettleStep = 0.01;        // support profile sampling along the log, m
constexpr std::uint64_t kTerrainStream = 0x7E44A1Full;

bool footprint_inside(const Log& log, double extent) {
  const Segment2 s = log.axis2d();
  const double r = log.radius();
  for (Vec2 p : {s.a, s.b}) {
    if (p.x - r < 0.0 || p.x + r > extent || p.y - r < 0.0 || p.y + r > extent) return false;
  }
  return true;
}

}  // namespace

double quantize6(double v) noexcept { return std::round(v * 1e6) / 1e6; }

Segment2 Log::axis2d() const noexcept {
  const Vec2 h = axis() * half_extent();
  return {center - h, center + h};
}

double Log::axis_height_at(double t) const noexcept {
  const double h = half_extent();
  return z_center + std::clamp(t, -h, h) * std::tan(tilt);
}

double Log::top_surface_at(Vec2 p) const noexcept {
  const Vec2 d = p - center;
  const Vec2 u = axis();
  const double t = dot(d, u);
  const double r = cross(u, d);
  const double rad = radius();
  if (std::abs(t) > half_extent() || std::abs(r) > rad) {
    return -std::numeric_limits<double>::infinity();
  }
  return z_center + t * std::tan(tilt) + std::sqrt(rad * rad - r * r) / std::cos(tilt);
}

double Log::mass() const noexcept {
  return density * kPi * radius() * radius() * length;
}

Heightfield::Heightfield(const TerrainParams& params)
    : params_(params), samples_(params.resolution, params.resolution) {
  if (params.resolution < 2) throw std::invalid_argument("Heightfield: resolution < 2");
  const PerlinNoise noise(params.seed);
  const double offset = fractal_bound(params.octaves, params.amplitude);
  const double step = params.extent / static_cast<double>(params.resolution - 1);
  for (std::size_t iy = 0; iy < params.resolution; ++iy) {
    for (std::size_t ix = 0; ix < params.resolution; ++ix) {
      const double x = static_cast<double>(ix) * step;
      const double y = static_cast<double>(iy) * step;
      samples_(iy, ix) =
          offset + noise.fractal(x, y, params.octaves, params.amplitude, params.scale);
    }
  }
}

double Heightfield::height(double x, double y) const noexcept {
  const std::size_t last = params_.resolution - 1;
  const double step = params_.extent / static_cast<double>(last);
  const double gx = std::clamp(x / step, 0.0, static_cast<double>(last));
  const double gy = std::clamp(y / step, 0.0, static_cast<double>(last));
  const std::size_t ix = std::min(static_cast<std::size_t>(gx), last - 1);
  const std::size_t iy = std::min(static_cast<std::size_t>(gy), last - 1);
  const double fx = gx - static_cast<double>(ix);
  const double fy = gy - static_cast<double>(iy);
  const double h00 = samples_(iy, ix);
  const double h10 = samples_(iy, ix + 1);
  const double h01 = samples_(iy + 1, ix);
  const double h11 = samples_(iy + 1, ix + 1);
  return (h00 * (1 - fx) + h10 * fx) * (1 - fy) + (h01 * (1 - fx) + h11 * fx) * fy;
}

std::array<double, 3> Heightfield::normal(double x, double y) const noexcept {
  constexpr double h = 0.01;
  const double dx = (height(x + h, y) - height(x - h, y)) / (2 * h);
  const double dy = (height(x, y + h) - height(x, y - h)) / (2 * h);
  const double len = std::sqrt(dx * dx + dy * dy + 1.0);
  return {-dx / len, -dy / len, 1.0 / len};
}

const Log& Pile::log(int id) const {
  for (const Log& l : logs)
    if (l.id == id) return l;
  throw std::out_of_range("Pile: unknown log id " + std::to_string(id));
}

bool Pile::has(int id) const noexcept {
  return std::any_of(logs.begin(), logs.end(), [id](const Log& l) { return l.id == id; });
}

std::vector<int> Pile::ids() const {
  std::vector<int> out;
  out.reserve(logs.size());
  for (const Log& l : logs) out.push_back(l.id);
  return out;
}

Log sample_log(Rng& rng, const LogDistribution& dist) {
  Log log;
  log.length = quantize6(
      std::clamp(rng.normal(dist.length_mean, dist.length_sd), dist.length_min, dist.length_max));
  log.diameter = quantize6(std::clamp(rng.normal(dist.diameter_mean, dist.diameter_sd),
                                      dist.diameter_min, dist.diameter_max));
  log.density = dist.density;
  return log;
}

namespace {

struct ProfilePoint {
  double s;
  double h;
};

/// Upper convex hull of points sorted by s.
std::vector<ProfilePoint> upper_hull(const std::vector<ProfilePoint>& pts) {
  std::vector<ProfilePoint> hull;
  for (const ProfilePoint& p : pts) {
    while (hull.size() >= 2) {
      const ProfilePoint& a = hull[hull.size() - 2];
      const ProfilePoint& b = hull.back();
      const double turn = (b.s - a.s) * (p.h - a.h) - (b.h - a.h) * (p.s - a.s);
      if (turn >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return hull;
}

/// Resting line z(s) = z0 + slope * s over the hull, with the mass centre at s = 0.
std::pair<double, double> resting_line(const std::vector<ProfilePoint>& hull) {
  auto line_of = [](const ProfilePoint& a, const ProfilePoint& b) {
    const double slope = (b.h - a.h) / (b.s - a.s);
    return std::make_pair(a.h - slope * a.s, slope);
  };
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const ProfilePoint& a = hull[i];
    const ProfilePoint& b = hull[i + 1];
    if (a.s < 0.0 && b.s > 0.0) return line_of(a, b);
    if (b.s == 0.0 && i + 2 < hull.size()) {
      // Balanced exactly on a vertex: keep the smaller tilt, left on ties.
      auto left = line_of(a, b);
      auto right = line_of(b, hull[i + 2]);
      return std::abs(right.second) < std::abs(left.second) ? right : left;
    }
  }
  // Degenerate hull (single vertex at s = 0 cannot happen with >= 3 samples).
  return line_of(hull.front(), hull.back());
}

}  // namespace

double support_height(Vec2 p, double radius, double cos_tilt, std::span<const Log> placed,
                      const Heightfield& terrain) {
  double h = terrain.height(p.x, p.y) + radius / cos_tilt;
  for (const Log& other : placed) {
    const double reach = other.radius() + radius;
    const double delta = point_segment_distance(p, other.axis2d());
    if (delta >= reach) continue;
    const double t = dot(p - other.center, other.axis());
    const double need =
        other.axis_height_at(t) + std::sqrt(reach * reach - delta * delta) / std::cos(other.tilt);
    h = std::max(h, need);
  }
  return h;
}

double support_gap(const Log& log, std::span<const Log> placed, const Heightfield& terrain) {
  const int k = std::max(1, static_cast<int>(std::ceil(0.5 * log.length / kSettleStep)));
  const double half = log.half_extent();
  const double cos_t = std::cos(log.tilt);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = -k; i <= k; ++i) {
    const double s = half * i / k;
    const Vec2 p = log.center + log.axis() * s;
    gap = std::min(gap, log.axis_height_at(s) - support_height(p, log.radius(), cos_t, placed, terrain));
  }
  return gap;
}

std::vector<std::string> pile_violations(const Pile& pile, double max_tilt) {
  std::vector<std::string> out;
  const double e = pile.terrain->extent();
  std::span<const Log> all(pile.logs);
  for (std::size_t i = 0; i < pile.logs.size(); ++i) {
    const Log& l = pile.logs[i];
    const std::string tag = "log " + std::to_string(l.id) + ": ";
    if (!(l.length > 0.0) || !(l.diameter > 0.0)) out.push_back(tag + "non-positive dimensions");
    if (!(std::abs(l.tilt) < max_tilt)) out.push_back(tag + "tilt out of range");
    if (!footprint_inside(l, e)) out.push_back(tag + "footprint outside the terrain");
    const double gap = support_gap(l, all.first(i), *pile.terrain);
    if (gap < -kPenetrationTolerance) out.push_back(tag + "interpenetrates its support");
    if (gap > kFloatTolerance) out.push_back(tag + "floats above its support");
  }
  return out;
}

Log settle_log(Log log, std::span<const Log> placed, const Heightfield& terrain) {
  const double rad = log.radius();
  const Vec2 u = log.axis();
  const int k = std::max(1, static_cast<int>(std::ceil(0.5 * log.length / kSettleStep)));

  double tilt = 0.0;
  double z0 = 0.0;
  for (int iter = 0; iter < 12; ++iter) {
    const double cos_t = std::cos(tilt);
    const double half = 0.5 * log.length * cos_t;
    const double ds = half / k;

    std::vector<ProfilePoint> pts;
    pts.reserve(2 * k + 1);
    for (int i = -k; i <= k; ++i) {
      const double s = i * ds;
      const Vec2 p = log.center + u * s;
      pts.push_back({s, support_height(p, rad, cos_t, placed, terrain)});
    }

    const auto [intercept, slope] = resting_line(upper_hull(pts));
    const double next_tilt = std::atan(slope);
    z0 = intercept;
    const bool converged = std::abs(next_tilt - tilt) < 1e-12;
    tilt = next_tilt;
    if (converged) break;
  }
  log.tilt = tilt;
  log.z_center = z0;
  return log;
}

Pile generate_pile(int n_logs, std::uint64_t seed, const PileParams& params) {
  if (n_logs < 1 || n_logs > 16) throw std::invalid_argument("generate_pile: n_logs must be in [1, 16]");
  Rng rng(seed);
  TerrainParams tp = params.terrain;
  tp.seed = derive_seed(seed, kTerrainStream);

  Pile pile;
  pile.seed = seed;
  pile.terrain = std::make_shared<const Heightfield>(tp);

  const double lo = 0.5 * (tp.extent - params.drop_zone);
  const double hi = lo + params.drop_zone;
  const double base_yaw = rng.uniform(0.0, kPi);

  for (int i = 0; i < n_logs; ++i) {
    Log log = sample_log(rng, params.logs);
    log.id = i;
    bool placed = false;
    for (int attempt = 0; attempt < params.placement_retries && !placed; ++attempt) {
      log.center = {quantize6(rng.uniform(lo, hi)), quantize6(rng.uniform(lo, hi))};
      const double dev = rng.uniform(-params.yaw_spread, params.yaw_spread);
      log.yaw = quantize6(normalize_angle_pi(base_yaw + dev));
      if (log.yaw >= kPi) log.yaw = 0.0;
      Log settled = settle_log(log, pile.logs, *pile.terrain);
      settled.tilt = quantize6(settled.tilt);
      settled.z_center = quantize6(settled.z_center);
      if (std::abs(settled.tilt) < params.max_tilt && footprint_inside(settled, tp.extent)) {
        pile.logs.push_back(settled);
        placed = true;
      }
    }
    if (!placed) throw std::runtime_error("pile generation failed");
  }
  return pile;
}

Pile resettle(const Pile& pile) {
  Pile out;
  out.seed = pile.seed;
  out.terrain = pile.terrain;
  out.logs.reserve(pile.logs.size());
  for (const Log& l : pile.logs) {
    Log s = settle_log(l, out.logs, *pile.terrain);
    s.tilt = quantize6(s.tilt);
    s.z_center = quantize6(s.z_center);
    out.logs.push_back(s);
  }
  return out;
}

Pile remove_logs(const Pile& pile, std::span<const int> ids) {
  Pile kept = pile;
  std::erase_if(kept.logs, [&](const Log& l) {
    return std::find(ids.begin(), ids.end(), l.id) != ids.end();
  });
  return resettle(kept);
}

Pile scale_diameters(const Pile& pile, double factor) {
  Pile scaled = pile;
  for (Log& l : scaled.logs) l.diameter = quantize6(l.diameter * factor);
  return resettle(scaled);
}

Pile rotated90(const Pile& pile) {
  Pile out = pile;
  const double e = pile.terrain->extent();
  for (Log& l : out.logs) {
    l.center = {e - l.center.y, l.center.x};
    double yaw = l.yaw + kPi / 2.0;
    if (yaw >= kPi) {
      yaw -= kPi;
      l.tilt = -l.tilt;
    }
    l.yaw = yaw;
  }
  return out;
}

}  // namespace grasplog
