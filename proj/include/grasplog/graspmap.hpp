#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "grasplog/image.hpp"
#include "grasplog/planner.hpp"

namespace grasplog {

inline constexpr double kEncodeLength = 0.20;   // along the closing direction, m
inline constexpr double kEncodeBreadth = 0.25;  // along the log axis, m

/// Five co-registered channels. Off-grasp pixels hold the sentinels
/// C = 1, S = 0, W = 0.30, U = 0, B = 1, which nothing reads.
struct GraspMap {
  FloatImage c, s, w, u, b;

  GraspMap() = default;
  explicit GraspMap(std::size_t n);

  std::size_t size() const noexcept { return u.rows(); }
  bool operator==(const GraspMap&) const = default;
};

enum class QualityKind { F1, F2, F3 };

std::string_view to_string(QualityKind k) noexcept;
/// Accepts "f1", "f2", "f3"; throws std::invalid_argument otherwise.
QualityKind quality_kind_from_string(std::string_view s);

struct QualityParams {
  QualityKind kind = QualityKind::F1;
  double mu = 0.25;
  double b_opt = 1.0;
  double sigma_b = 0.25;
  double q_min = 0.5;  // below this no grasp is declared
};

/// Per-pixel quality f(u, tau, b).
double quality(double u, int tau, double b, const QualityParams& p);

/// Rectangle marked in the map for a grasp.
OrientedRect encoding_rect(const Grasp& g);

/// Rasterizes successful grasps. Where rectangles overlap the narrower grasp
/// wins; equal widths go to the earlier entry.
GraspMap encode(const std::vector<AnnotatedGrasp>& grasps, const ImageGrid& grid);

Grid<double> quality_map(const GraspMap& map, int tau, const QualityParams& p);

struct Selection {
  std::size_t j = 0;
  std::size_t k = 0;
  Grasp grasp;
  double q = 0.0;
  double b = 1.0;  // balance read from the map
};

/// Global argmax of Q, ties to the smallest row then column.
std::optional<Selection> select_best(const GraspMap& map, int tau, const QualityParams& p,
                                     const ImageGrid& grid);

struct SubsetMap {
  const GraspMap* map = nullptr;
  int tau = 1;
};

struct SubsetSelection {
  std::size_t subset = 0;
  Selection selection;
};

/// Best selection over several maps, ties to the lowest index.
/// Throws std::invalid_argument on an empty list.
std::optional<SubsetSelection> select_over_subsets(const std::vector<SubsetMap>& maps,
                                                   const QualityParams& p, const ImageGrid& grid);

/// Quarter turn of all channels with the orientation rotated along.
GraspMap rotate90(const GraspMap& m);

}  // namespace grasplog
