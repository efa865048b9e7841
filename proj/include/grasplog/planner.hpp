#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "grasplog/geometry.hpp"
#include "grasplog/image.hpp"
#include "grasplog/scene.hpp"

namespace grasplog {

/// Sorted, duplicate-free set of log ids.
using IdSet = std::vector<int>;

/// Constants of the quasi-static grapple model.
struct PlannerParams {
  double min_width = 0.30;      // m
  double max_width = 1.55;      // m
  double clearance = 0.05;      // per side, m
  double claw_breadth = 0.25;   // capture/corridor extent along the log axis, m
  double corridor_width = 0.06; // claw corridor extent along the closing direction, m
  double position_step = 0.10;  // candidate spacing along the mean axis, m
  std::vector<double> angle_offsets_deg{0.0, -10.0, 10.0, -20.0, 20.0};
  double closure_capacity = 0.12;  // m^2 of log cross-section
  double pendulum_length = 0.8;    // m
  double overlap_threshold = 0.04; // m^2, candidate reduction
};

/// Top-down grasp: claws close along `phi`, opened `w` apart.
struct Grasp {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;  // [0, pi)
  double w = 0.30;
  int tau = 1;

  Vec2 position() const noexcept { return {x, y}; }
  bool operator==(const Grasp&) const = default;
};

enum class FailureReason { None, WrongSetCaptured, ClawCollision, InsufficientClosure, OutOfRange };

std::string_view to_string(FailureReason r) noexcept;
FailureReason failure_reason_from_string(std::string_view s);

struct TrialResult {
  bool success = false;
  IdSet captured;
  double beta = 0.0;  // rad, meaningful on success
  double b = 0.0;     // cos(beta), meaningful on success
  FailureReason failure_reason = FailureReason::None;
};

struct AnnotatedGrasp {
  Grasp grasp;
  TrialResult trial;
};

IdSet make_id_set(std::vector<int> ids);

/// Region whose crossing centerlines end up inside the grapple.
OrientedRect capture_rect(const Grasp& g, const PlannerParams& p = {});
/// Swept volumes of the two claws at +-w/2 about `center`.
std::array<OrientedRect, 2> claw_corridors(Vec2 center, double phi, double w,
                                           const PlannerParams& p = {});

/// Logs whose 2D centerline crosses the capture rectangle.
IdSet captured_logs(const Pile& pile, const Grasp& g, const PlannerParams& p = {});

struct Balance {
  double beta = 0.0;
  double b = 1.0;
};
/// Pendulum balance of the lifted bundle about the grasp point.
Balance balance_of(const Grasp& g, std::span<const Log> captured, const PlannerParams& p = {});

/// Quasi-static trial:
///  1. the grapple descends at (x, y); logs crossing the capture rectangle are inside;
///  2. the compliant grapple centres itself on the captured bundle along the
///     closing direction;
///  3. claws must not touch any log footprint at the centred pose;
///  4. the bundle cross-section must fit the closure capacity.
TrialResult simulate_grasp(const Pile& pile, const Grasp& g, const IdSet& targets,
                           const PlannerParams& p = {});

/// Rule-based candidate search; sorted narrowest first.
/// Throws std::invalid_argument when targets is empty or names unknown logs.
std::vector<Grasp> generate_candidates(const Pile& pile, const IdSet& targets,
                                       const PlannerParams& p = {});

/// One step of candidate reduction, for auditing.
struct ReductionEvent {
  std::size_t candidate = 0;  // index into the input list
  bool success = false;
  std::vector<std::size_t> discarded;  // removed for overlapping a kept grasp
};

struct ReduceOptions {
  PlannerParams planner;
  /// When set, a candidate only counts as successful if the trial also
  /// succeeds from every pixel centre of its encoded rectangle, using the
  /// orientation and width as they read back from the stored map.
  std::optional<ImageGrid> footprint_grid;
  std::vector<ReductionEvent>* trace = nullptr;
};

/// Narrowest-first simulate-and-prune reduction of a candidate list.
std::vector<AnnotatedGrasp> reduce_candidates(const std::vector<Grasp>& candidates,
                                              const Pile& pile, const IdSet& targets,
                                              const ReduceOptions& options = {});

/// Trial used by reduce_candidates: plain trial, plus the footprint check when a grid is given.
TrialResult verify_candidate(const Pile& pile, const Grasp& g, const IdSet& targets,
                             const ReduceOptions& options);

/// Grasp as decoded from a float32 grasp map holding g.
Grasp as_stored(const Grasp& g);

}  // namespace grasplog
