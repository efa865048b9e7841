#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "grasplog/geometry.hpp"
#include "grasplog/image.hpp"
#include "grasplog/rng.hpp"

namespace grasplog {

struct LogDistribution {
  double length_mean = 2.5;
  double length_sd = 0.2;
  double length_min = 1.8;
  double length_max = 3.2;
  double diameter_mean = 0.16;
  double diameter_sd = 0.01;
  double diameter_min = 0.12;
  double diameter_max = 0.20;
  double density = 700.0;  // kg/m^3
};

/// A rigid cylindrical log. Horizontal quantities (center, yaw) describe the
/// projection of the centerline; `tilt` raises the +axis end.
struct Log {
  int id = 0;
  Vec2 center;
  double yaw = 0.0;       // [0, pi)
  double tilt = 0.0;      // rad, |tilt| < pi/4
  double z_center = 0.0;  // height of the centerline midpoint, m
  double length = 2.5;
  double diameter = 0.16;
  double density = 700.0;

  double radius() const noexcept { return 0.5 * diameter; }
  Vec2 axis() const noexcept { return unit_from_angle(yaw); }
  /// Half length of the horizontal projection of the centerline.
  double half_extent() const noexcept { return 0.5 * length * std::cos(tilt); }
  Segment2 axis2d() const noexcept;
  /// Centerline height at horizontal coordinate t along the axis (clamped to the log).
  double axis_height_at(double t) const noexcept;
  /// Height of the top surface above point p, or -inf when p is outside the footprint.
  double top_surface_at(Vec2 p) const noexcept;
  double mass() const noexcept;
};

struct TerrainParams {
  std::uint64_t seed = 0;
  int octaves = 4;
  double amplitude = 0.05;  // m
  double scale = 1.0;       // m
  double extent = 5.0;      // m
  std::size_t resolution = 201;
};

/// Perlin terrain sampled on a regular vertex grid, offset so that the
/// lowest attainable height is zero. Bilinear between vertices.
class Heightfield {
 public:
  explicit Heightfield(const TerrainParams& params);

  double height(double x, double y) const noexcept;
  /// Surface normal from central differences of the interpolant.
  std::array<double, 3> normal(double x, double y) const noexcept;
  const TerrainParams& params() const noexcept { return params_; }
  double extent() const noexcept { return params_.extent; }

 private:
  TerrainParams params_;
  Grid<double> samples_;
};

struct PileParams {
  double drop_zone = 3.0;
  /// Logs share a random base heading; each deviates by at most this much.
  /// pi/2 gives fully uniform headings.
  double yaw_spread = kPi / 2.0;
  int placement_retries = 50;
  double max_tilt = kPi / 4.0;
  TerrainParams terrain;
  LogDistribution logs;
};

struct Pile {
  std::vector<Log> logs;  // in drop order
  std::shared_ptr<const Heightfield> terrain;
  std::uint64_t seed = 0;

  const Log& log(int id) const;
  bool has(int id) const noexcept;
  std::vector<int> ids() const;
  std::vector<int> drop_order() const { return ids(); }
};

Log sample_log(Rng& rng, const LogDistribution& dist = {});

/// Rests `log` (its x, y, yaw and dimensions are kept) on the terrain and the
/// already placed logs: the centerline takes the lowest position above the
/// support profile, i.e. the upper-hull edge below the centre of mass.
Log settle_log(Log log, std::span<const Log> placed, const Heightfield& terrain);

inline constexpr double kPenetrationTolerance = 0.01;  // m
inline constexpr double kFloatTolerance = 0.001;        // m

/// Lowest admissible centerline height at p for a log of the given radius and tilt.
double support_height(Vec2 p, double radius, double cos_tilt, std::span<const Log> placed,
                      const Heightfield& terrain);
/// Minimum over the log of centerline height minus admissible height;
/// negative means interpenetration, positive means the log floats.
double support_gap(const Log& log, std::span<const Log> placed, const Heightfield& terrain);
/// Human-readable list of broken pile invariants (empty when valid).
std::vector<std::string> pile_violations(const Pile& pile, double max_tilt = kPi / 4.0);

/// Throws std::invalid_argument unless 1 <= n_logs <= 16 and
/// std::runtime_error("pile generation failed") when retries run out.
Pile generate_pile(int n_logs, std::uint64_t seed, const PileParams& params = {});

/// Re-runs the support rule for every log in drop order.
Pile resettle(const Pile& pile);
/// Removes the given ids and lets the remainder settle.
Pile remove_logs(const Pile& pile, std::span<const int> ids);
/// Multiplies every diameter and re-settles.
Pile scale_diameters(const Pile& pile, double factor);

/// Quarter turn counter-clockwise about the terrain centre (geometry only,
/// heights and tilts kept). Intended for flat terrain.
Pile rotated90(const Pile& pile);

/// Rounds to 6 decimals so that text serialization is exact.
double quantize6(double v) noexcept;

}  // namespace grasplog
