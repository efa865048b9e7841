#include "grasplog/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace grasplog {

double normalize_angle_pi(double angle) noexcept {
  double a = std::fmod(angle, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;  // fmod rounding can land exactly on pi
  return a;
}

double angle_distance_pi(double a, double b) noexcept {
  const double d = normalize_angle_pi(a - b);
  return std::min(d, kPi - d);
}

Angle2Enc encode_angle(double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("encode_angle: non-finite angle");
  return {std::cos(2.0 * phi), std::sin(2.0 * phi)};
}

double decode_angle(Angle2Enc enc) {
  if (enc.c == 0.0 && enc.s == 0.0) throw std::invalid_argument("undefined angle");
  // atan2 returns (-pi, pi]; the branch-cut value pi halves to pi/2.
  double half = 0.5 * std::atan2(enc.s, enc.c);
  if (half < 0.0) half += kPi;
  if (half >= kPi) half -= kPi;
  return half;
}

OrientedRect::OrientedRect(Vec2 center, double angle, double length, double breadth)
    : center_(center), angle_(normalize_angle_pi(angle)), length_(length), breadth_(breadth) {
  if (!(length > 0.0) || !(breadth > 0.0)) {
    throw std::invalid_argument("OrientedRect: length and breadth must be positive");
  }
}

std::array<Vec2, 4> OrientedRect::corners() const noexcept {
  const Vec2 u = length_axis() * (0.5 * length_);
  const Vec2 v = breadth_axis() * (0.5 * breadth_);
  return {center_ - u - v, center_ + u - v, center_ + u + v, center_ - u + v};
}

bool OrientedRect::contains(Vec2 p) const noexcept {
  const Vec2 d = p - center_;
  return std::abs(dot(d, length_axis())) <= 0.5 * length_ &&
         std::abs(dot(d, breadth_axis())) <= 0.5 * breadth_;
}

double signed_area(std::span<const Vec2> poly) noexcept {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) twice += cross(poly[j], poly[i]);
  return 0.5 * twice;
}

Polygon clip_convex(const Polygon& subject, std::span<const Vec2> clip) {
  Polygon out = subject;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % m];
    const Vec2 edge = b - a;
    // Inside means on the left of the directed clip edge.
    auto side = [&](Vec2 p) { return cross(edge, p - a); };

    Polygon in;
    in.swap(out);
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 cur = in[i];
      const Vec2 prev = in[(i + n - 1) % n];
      const double sc = side(cur);
      const double sp = side(prev);
      if (sc >= 0.0) {
        if (sp < 0.0) out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
        out.push_back(cur);
      } else if (sp >= 0.0) {
        out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
      }
    }
  }
  return out;
}

double rect_overlap_area(const OrientedRect& a, const OrientedRect& b) {
  // Cheap rejection on circumscribed circles.
  const double ra = 0.5 * std::hypot(a.length(), a.breadth());
  const double rb = 0.5 * std::hypot(b.length(), b.breadth());
  if (norm(a.center() - b.center()) > ra + rb) return 0.0;

  const auto ca = a.corners();
  const auto cb = b.corners();
  const Polygon subject(ca.begin(), ca.end());
  const Polygon clipped = clip_convex(subject, cb);
  const double area = std::abs(signed_area(clipped));
  return std::min(area, std::min(a.area(), b.area()));
}

double closest_param(Vec2 p, const Segment2& s) noexcept {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 <= 0.0) return 0.0;
  return std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
}

double point_segment_distance(Vec2 p, const Segment2& s) noexcept {
  const double t = closest_param(p, s);
  return norm(p - (s.a + (s.b - s.a) * t));
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) noexcept {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 p, const Segment2& s) noexcept {
  return std::min(s.a.x, s.b.x) <= p.x && p.x <= std::max(s.a.x, s.b.x) &&
         std::min(s.a.y, s.b.y) <= p.y && p.y <= std::max(s.a.y, s.b.y);
}

}  // namespace

bool segments_intersect(const Segment2& s, const Segment2& t) noexcept {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(t.a, s)) return true;
  if (o2 == 0 && on_segment(t.b, s)) return true;
  if (o3 == 0 && on_segment(s.a, t)) return true;
  if (o4 == 0 && on_segment(s.b, t)) return true;
  return false;
}

double segment_segment_distance(const Segment2& s, const Segment2& t) noexcept {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                   point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

bool segment_intersects_rect(const Segment2& s, const OrientedRect& r) noexcept {
  return segment_rect_distance(s, r) == 0.0;
}

double segment_rect_distance(const Segment2& s, const OrientedRect& r) noexcept {
  // Work in the rectangle frame, where it is axis aligned.
  const Vec2 u = r.length_axis();
  const Vec2 v = r.breadth_axis();
  const double hx = 0.5 * r.length();
  const double hy = 0.5 * r.breadth();
  auto local = [&](Vec2 p) {
    const Vec2 d = p - r.center();
    return Vec2{dot(d, u), dot(d, v)};
  };
  Vec2 a = local(s.a);
  Vec2 b = local(s.b);

  // Liang-Barsky against the box.
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x + hx, hx - a.x, a.y + hy, hy - a.y};
  bool inside = true;
  for (int i = 0; i < 4 && inside; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) inside = false;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) {
        t0 = std::max(t0, t);
      } else {
        t1 = std::min(t1, t);
      }
      if (t0 > t1) inside = false;
    }
  }
  if (inside) return 0.0;

  const Segment2 ls{a, b};
  const Vec2 box[4] = {{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}};
  auto point_box = [&](Vec2 p) {
    const double dx = std::max(std::abs(p.x) - hx, 0.0);
    const double dy = std::max(std::abs(p.y) - hy, 0.0);
    return std::hypot(dx, dy);
  };
  double best = std::min(point_box(a), point_box(b));
  for (const Vec2& corner : box) best = std::min(best, point_segment_distance(corner, ls));
  return best;
}

bool clip_segment_to_slab(Segment2& s, Vec2 origin, Vec2 normal, double half_width) noexcept {
  const double da = dot(s.a - origin, normal);
  const double db = dot(s.b - origin, normal);
  double t0 = 0.0, t1 = 1.0;
  const double dd = db - da;
  if (dd == 0.0) {
    if (std::abs(da) > half_width) return false;
  } else {
    double lo = (-half_width - da) / dd;
    double hi = (half_width - da) / dd;
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) return false;
  }
  const Vec2 dir = s.b - s.a;
  s = Segment2{s.a + dir * t0, s.a + dir * t1};
  return true;
}

}  // namespace grasplog
