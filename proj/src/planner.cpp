#include "grasplog/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "grasplog/graspmap.hpp"

namespace grasplog {

std::string_view to_string(FailureReason r) noexcept {
  switch (r) {
    case FailureReason::None: return "None";
    case FailureReason::WrongSetCaptured: return "WrongSetCaptured";
    case FailureReason::ClawCollision: return "ClawCollision";
    case FailureReason::InsufficientClosure: return "InsufficientClosure";
    case FailureReason::OutOfRange: return "OutOfRange";
  }
  return "None";
}

FailureReason failure_reason_from_string(std::string_view s) {
  for (FailureReason r : {FailureReason::None, FailureReason::WrongSetCaptured,
                          FailureReason::ClawCollision, FailureReason::InsufficientClosure,
                          FailureReason::OutOfRange}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown failure reason: " + std::string(s));
}

IdSet make_id_set(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

OrientedRect capture_rect(const Grasp& g, const PlannerParams& p) {
  return OrientedRect(g.position(), g.phi, g.w, p.claw_breadth);
}

std::array<OrientedRect, 2> claw_corridors(Vec2 center, double phi, double w,
                                           const PlannerParams& p) {
  const Vec2 c = unit_from_angle(phi) * (0.5 * w);
  return {OrientedRect(center - c, phi, p.corridor_width, p.claw_breadth),
          OrientedRect(center + c, phi, p.corridor_width, p.claw_breadth)};
}

IdSet captured_logs(const Pile& pile, const Grasp& g, const PlannerParams& p) {
  const OrientedRect rect = capture_rect(g, p);
  IdSet out;
  for (const Log& l : pile.logs)
    if (segment_intersects_rect(l.axis2d(), rect)) out.push_back(l.id);
  return make_id_set(std::move(out));
}

Balance balance_of(const Grasp& g, std::span<const Log> captured, const PlannerParams& p) {
  if (captured.empty()) throw std::invalid_argument("balance_of: no captured logs");
  const Vec2 along = unit_from_angle(g.phi + kPi / 2.0);
  double mass = 0.0;
  double moment = 0.0;
  for (const Log& l : captured) {
    const double m = l.mass();
    mass += m;
    moment += m * dot(l.center - g.position(), along);
  }
  const double offset = moment / mass;
  Balance out;
  out.beta = std::atan(std::abs(offset) / p.pendulum_length);
  out.b = std::cos(out.beta);
  return out;
}

namespace {

struct Span {
  double lo = 0.0;
  double hi = 0.0;
  bool valid = false;
};

/// Extent along the closing direction (relative to `origin`) of the given
/// logs' footprints inside the claw-breadth band through `origin`.
Span band_span(std::span<const Log* const> logs, Vec2 origin, double phi, double breadth) {
  const Vec2 c = unit_from_angle(phi);
  const Vec2 e = unit_from_angle(phi + kPi / 2.0);
  Span s;
  for (const Log* l : logs) {
    Segment2 seg = l->axis2d();
    if (!clip_segment_to_slab(seg, origin, e, 0.5 * breadth)) continue;
    const double a = dot(seg.a - origin, c);
    const double b = dot(seg.b - origin, c);
    const double lo = std::min(a, b) - l->radius();
    const double hi = std::max(a, b) + l->radius();
    if (!s.valid) {
      s = {lo, hi, true};
    } else {
      s.lo = std::min(s.lo, lo);
      s.hi = std::max(s.hi, hi);
    }
  }
  return s;
}

bool corridors_clear(const Pile& pile, Vec2 center, double phi, double w, const PlannerParams& p) {
  const auto corridors = claw_corridors(center, phi, w, p);
  for (const Log& l : pile.logs) {
    const Segment2 seg = l.axis2d();
    for (const OrientedRect& r : corridors)
      if (segment_rect_distance(seg, r) < l.radius()) return false;
  }
  return true;
}

bool in_range(const Pile& pile, const Grasp& g, const PlannerParams& p) {
  const double e = pile.terrain ? pile.terrain->extent() : 5.0;
  return g.w >= p.min_width && g.w <= p.max_width && g.x >= 0.0 && g.x <= e && g.y >= 0.0 &&
         g.y <= e && std::isfinite(g.phi);
}

std::vector<const Log*> logs_of(const Pile& pile, const IdSet& ids) {
  std::vector<const Log*> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(&pile.log(id));
  return out;
}

}  // namespace

TrialResult simulate_grasp(const Pile& pile, const Grasp& g, const IdSet& targets,
                           const PlannerParams& p) {
  TrialResult r;
  if (!in_range(pile, g, p)) {
    r.failure_reason = FailureReason::OutOfRange;
    return r;
  }
  r.captured = captured_logs(pile, g, p);
  if (r.captured != targets) {
    r.failure_reason = FailureReason::WrongSetCaptured;
    return r;
  }

  const auto inside = logs_of(pile, r.captured);
  const Span span = band_span(inside, g.position(), g.phi, p.claw_breadth);
  const Vec2 centred = g.position() + unit_from_angle(g.phi) * (0.5 * (span.lo + span.hi));
  if (!corridors_clear(pile, centred, g.phi, g.w, p)) {
    r.failure_reason = FailureReason::ClawCollision;
    return r;
  }

  double section = 0.0;
  for (const Log* l : inside) section += kPi * l->radius() * l->radius();
  if (section > p.closure_capacity) {
    r.failure_reason = FailureReason::InsufficientClosure;
    return r;
  }

  std::vector<Log> bundle;
  bundle.reserve(inside.size());
  for (const Log* l : inside) bundle.push_back(*l);
  const Balance bal = balance_of(g, bundle, p);
  r.success = true;
  r.beta = bal.beta;
  r.b = bal.b;
  return r;
}

std::vector<Grasp> generate_candidates(const Pile& pile, const IdSet& targets,
                                       const PlannerParams& p) {
  if (targets.empty()) throw std::invalid_argument("generate_candidates: empty target set");
  for (int id : targets)
    if (!pile.has(id)) throw std::invalid_argument("generate_candidates: unknown log id");
  const auto tlogs = logs_of(pile, targets);

  // Mean axis by doubled-angle averaging; mass-weighted midpoint.
  double sc = 0.0, ss = 0.0, mass = 0.0;
  Vec2 mid{0.0, 0.0};
  for (const Log* l : tlogs) {
    sc += std::cos(2.0 * l->yaw);
    ss += std::sin(2.0 * l->yaw);
    mass += l->mass();
    mid = mid + l->center * l->mass();
  }
  mid = mid * (1.0 / mass);
  const double alpha = 0.5 * std::atan2(ss, sc);
  const Vec2 axis = unit_from_angle(alpha);

  struct Keyed {
    Grasp g;
    long step;
    std::size_t offset;
  };
  std::vector<Keyed> found;

  for (std::size_t oi = 0; oi < p.angle_offsets_deg.size(); ++oi) {
    const double phi = normalize_angle_pi(alpha + kPi / 2.0 + p.angle_offsets_deg[oi] * kPi / 180.0);
    const Vec2 normal = unit_from_angle(phi + kPi / 2.0);
    const double denom = dot(normal, axis);
    if (std::abs(denom) < 1e-9) continue;

    // Positions t along the axis where the closing line crosses every target.
    double t_lo = -1e300, t_hi = 1e300;
    for (const Log* l : tlogs) {
      const Segment2 s = l->axis2d();
      const double ta = dot(normal, s.a - mid) / denom;
      const double tb = dot(normal, s.b - mid) / denom;
      t_lo = std::max(t_lo, std::min(ta, tb));
      t_hi = std::min(t_hi, std::max(ta, tb));
    }
    if (t_lo > t_hi) continue;

    const long k_lo = static_cast<long>(std::ceil(t_lo / p.position_step - 1e-9));
    const long k_hi = static_cast<long>(std::floor(t_hi / p.position_step + 1e-9));
    for (long k = k_lo; k <= k_hi; ++k) {
      const double t = std::clamp(static_cast<double>(k) * p.position_step, t_lo, t_hi);
      const Vec2 on_axis = mid + axis * t;
      const Span span = band_span(tlogs, on_axis, phi, p.claw_breadth);
      if (!span.valid) continue;
      const double raw = (span.hi - span.lo) + 2.0 * p.clearance;
      if (raw > p.max_width) continue;

      Grasp g;
      const Vec2 centre = on_axis + unit_from_angle(phi) * (0.5 * (span.lo + span.hi));
      g.x = centre.x;
      g.y = centre.y;
      g.phi = phi;
      // Stored maps hold W as float32; keep the candidate width representable.
      g.w = static_cast<double>(static_cast<float>(std::max(raw, p.min_width)));
      g.tau = static_cast<int>(targets.size());
      if (g.w > p.max_width || !in_range(pile, g, p)) continue;
      if (captured_logs(pile, g, p) != targets) continue;
      if (!corridors_clear(pile, g.position(), g.phi, g.w, p)) continue;
      found.push_back({g, k, oi});
    }
  }

  std::stable_sort(found.begin(), found.end(), [](const Keyed& a, const Keyed& b) {
    if (a.g.w != b.g.w) return a.g.w < b.g.w;
    if (std::labs(a.step) != std::labs(b.step)) return std::labs(a.step) < std::labs(b.step);
    if (a.step != b.step) return a.step < b.step;
    return a.offset < b.offset;
  });
  std::vector<Grasp> out;
  out.reserve(found.size());
  for (const Keyed& k : found) out.push_back(k.g);
  return out;
}

Grasp as_stored(const Grasp& g) {
  const Angle2Enc enc = encode_angle(g.phi);
  Grasp s = g;
  const Angle2Enc stored{static_cast<double>(static_cast<float>(enc.c)),
                         static_cast<double>(static_cast<float>(enc.s))};
  s.phi = decode_angle(stored);
  s.w = static_cast<double>(static_cast<float>(g.w));
  return s;
}

TrialResult verify_candidate(const Pile& pile, const Grasp& g, const IdSet& targets,
                             const ReduceOptions& options) {
  TrialResult nominal = simulate_grasp(pile, g, targets, options.planner);
  if (!nominal.success || !options.footprint_grid) return nominal;

  const Grasp stored = as_stored(g);
  for (const auto& [j, k] : pixels_in_rect(*options.footprint_grid, encoding_rect(g))) {
    Grasp shifted = stored;
    const Vec2 c = options.footprint_grid->center(j, k);
    shifted.x = c.x;
    shifted.y = c.y;
    TrialResult r = simulate_grasp(pile, shifted, targets, options.planner);
    if (!r.success) return r;
  }
  return nominal;
}

std::vector<AnnotatedGrasp> reduce_candidates(const std::vector<Grasp>& candidates,
                                              const Pile& pile, const IdSet& targets,
                                              const ReduceOptions& options) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].w < candidates[b].w;
  });

  std::vector<OrientedRect> rects;
  rects.reserve(candidates.size());
  for (const Grasp& g : candidates) rects.push_back(capture_rect(g, options.planner));

  std::vector<bool> alive(candidates.size(), true);
  std::vector<AnnotatedGrasp> kept;
  for (std::size_t idx : order) {
    if (!alive[idx]) continue;
    alive[idx] = false;
    TrialResult r = verify_candidate(pile, candidates[idx], targets, options);
    ReductionEvent ev{idx, r.success, {}};
    if (r.success) {
      for (std::size_t j : order) {
        if (alive[j] && rect_overlap_area(rects[idx], rects[j]) > options.planner.overlap_threshold) {
          alive[j] = false;
          ev.discarded.push_back(j);
        }
      }
      kept.push_back({candidates[idx], std::move(r)});
    }
    if (options.trace) options.trace->push_back(std::move(ev));
  }
  return kept;
}

}  // namespace grasplog
