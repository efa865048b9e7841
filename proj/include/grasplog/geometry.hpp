#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace grasplog {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const noexcept { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const noexcept { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
inline Vec2 unit_from_angle(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }

/// Wraps any finite angle into [0, pi).
double normalize_angle_pi(double angle) noexcept;

/// Smallest distance between two orientations modulo pi, in [0, pi/2].
double angle_distance_pi(double a, double b) noexcept;

/// Doubled-angle representation of a pi-periodic orientation.
struct Angle2Enc {
  double c = 1.0;
  double s = 0.0;
};

/// (cos 2phi, sin 2phi). Throws std::invalid_argument for non-finite input.
Angle2Enc encode_angle(double phi);

/// Inverse of encode_angle, in [0, pi). Throws std::invalid_argument
/// ("undefined angle") when both components are zero.
double decode_angle(Angle2Enc enc);

/// Rectangle with its "length" side along `angle` (CCW from +x).
class OrientedRect {
 public:
  OrientedRect(Vec2 center, double angle, double length, double breadth);

  Vec2 center() const noexcept { return center_; }
  double angle() const noexcept { return angle_; }
  double length() const noexcept { return length_; }
  double breadth() const noexcept { return breadth_; }
  double area() const noexcept { return length_ * breadth_; }

  /// Unit vector along the length side.
  Vec2 length_axis() const noexcept { return unit_from_angle(angle_); }
  /// Unit vector along the breadth side.
  Vec2 breadth_axis() const noexcept { return unit_from_angle(angle_ + kPi / 2.0); }

  /// Counter-clockwise corners.
  std::array<Vec2, 4> corners() const noexcept;
  bool contains(Vec2 p) const noexcept;

 private:
  Vec2 center_;
  double angle_;
  double length_;
  double breadth_;
};

using Polygon = std::vector<Vec2>;

/// Signed shoelace area (positive for CCW).
double signed_area(std::span<const Vec2> poly) noexcept;

/// Sutherland-Hodgman: clips `subject` against the convex CCW polygon `clip`.
Polygon clip_convex(const Polygon& subject, std::span<const Vec2> clip);

/// Area of the intersection of two oriented rectangles, m^2.
double rect_overlap_area(const OrientedRect& a, const OrientedRect& b);

struct Segment2 {
  Vec2 a;
  Vec2 b;
};

double point_segment_distance(Vec2 p, const Segment2& s) noexcept;
/// Parameter in [0,1] of the point on `s` closest to `p`.
double closest_param(Vec2 p, const Segment2& s) noexcept;
bool segments_intersect(const Segment2& s, const Segment2& t) noexcept;
double segment_segment_distance(const Segment2& s, const Segment2& t) noexcept;

/// True when the segment has at least one point inside or on the rectangle.
bool segment_intersects_rect(const Segment2& s, const OrientedRect& r) noexcept;
/// Euclidean distance between a segment and a (solid) rectangle; 0 on contact.
double segment_rect_distance(const Segment2& s, const OrientedRect& r) noexcept;

/// Portion of `s` within the slab |dot(p - origin, normal)| <= half_width, if any.
bool clip_segment_to_slab(Segment2& s, Vec2 origin, Vec2 normal, double half_width) noexcept;

}  // namespace grasplog
