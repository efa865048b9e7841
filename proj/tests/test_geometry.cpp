#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "grasplog/geometry.hpp"
#include "grasplog/perlin.hpp"
#include "grasplog/rng.hpp"
#include "support.hpp"

using namespace grasplog;

TEST_CASE("encode_angle examples") {
  const Angle2Enc a = encode_angle(0.0);
  CHECK(a.c == doctest::Approx(1.0));
  CHECK(a.s == doctest::Approx(0.0));
  const Angle2Enc b = encode_angle(kPi / 4.0);
  CHECK(std::abs(b.c) < 1e-15);
  CHECK(b.s == doctest::Approx(1.0));
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double phi = rng.uniform(-10.0, 10.0);
    const Angle2Enc p = encode_angle(phi), q = encode_angle(phi + kPi);
    CHECK(std::abs(p.c - q.c) < 1e-12);
    CHECK(std::abs(p.s - q.s) < 1e-12);
    CHECK(std::abs(p.c * p.c + p.s * p.s - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(encode_angle(std::nan("")), std::invalid_argument);
}

TEST_CASE("decode_angle examples and errors") {
  CHECK(decode_angle({1.0, 0.0}) == 0.0);
  CHECK(decode_angle({0.0, -1.0}) == doctest::Approx(3.0 * kPi / 4.0).epsilon(1e-15));
  CHECK_THROWS_WITH_AS(decode_angle({0.0, 0.0}), "undefined angle", std::invalid_argument);
}

TEST_CASE("angle round trip over random orientations") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double phi = rng.uniform(0.0, kPi);
    const double back = decode_angle(encode_angle(phi));
    CHECK(back >= 0.0);
    CHECK(back < kPi);
    CHECK(angle_distance_pi(back, phi) < 1e-12);
  }
}

TEST_CASE("rect_overlap_area examples") {
  const OrientedRect a({1.0, 1.0}, 0.0, 0.2, 1.0);
  CHECK(rect_overlap_area(a, a) == doctest::Approx(0.2).epsilon(1e-12));
  const OrientedRect b({1.0, 1.0}, kPi / 2.0, 0.2, 1.0);
  CHECK(rect_overlap_area(a, b) == doctest::Approx(0.04).epsilon(1e-12));
  const OrientedRect far({5.0, 5.0}, 0.3, 0.2, 1.0);
  CHECK(rect_overlap_area(a, far) == 0.0);
}

TEST_CASE("rect_overlap_area agrees with Monte Carlo area estimate") {
  Rng rng(3);
  for (int pair = 0; pair < 5; ++pair) {
    const OrientedRect a({0.0, 0.0}, rng.uniform(0.0, kPi), rng.uniform(0.2, 1.2), rng.uniform(0.2, 1.2));
    const OrientedRect b({rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)}, rng.uniform(0.0, kPi),
                         rng.uniform(0.2, 1.2), rng.uniform(0.2, 1.2));
    const auto qa = a.corners(), qb = b.corners();
    double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
    for (Vec2 c : qa) {
      x0 = std::min(x0, c.x);
      x1 = std::max(x1, c.x);
      y0 = std::min(y0, c.y);
      y1 = std::max(y1, c.y);
    }
    const int samples = 1'000'000;
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
      const Vec2 p{rng.uniform(x0, x1), rng.uniform(y0, y1)};
      if (testing::inside_quad(p, qa) && testing::inside_quad(p, qb)) ++hits;
    }
    const double box = (x1 - x0) * (y1 - y0);
    const double estimate = box * hits / samples;
    // Four standard errors of a binomial proportion at worst case p = 1/2.
    const double tol = 4.0 * box * 0.5 / std::sqrt(static_cast<double>(samples));
    CHECK(std::abs(rect_overlap_area(a, b) - estimate) < tol);
  }
}

TEST_CASE("rect_overlap_area is symmetric and bounded") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const OrientedRect a({rng.uniform(0, 1), rng.uniform(0, 1)}, rng.uniform(0, kPi), rng.uniform(0.05, 1),
                         rng.uniform(0.05, 1));
    const OrientedRect b({rng.uniform(0, 1), rng.uniform(0, 1)}, rng.uniform(0, kPi), rng.uniform(0.05, 1),
                         rng.uniform(0.05, 1));
    const double ab = rect_overlap_area(a, b), ba = rect_overlap_area(b, a);
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= std::min(a.area(), b.area()) + 1e-12);
  }
}

TEST_CASE("segment helpers") {
  const Segment2 s{{0, 0}, {2, 0}};
  CHECK(point_segment_distance({1, 1}, s) == doctest::Approx(1.0));
  CHECK(point_segment_distance({3, 0}, s) == doctest::Approx(1.0));
  CHECK(segments_intersect(s, {{1, -1}, {1, 1}}));
  CHECK_FALSE(segments_intersect(s, {{3, -1}, {3, 1}}));
  const OrientedRect r({1.0, 0.5}, 0.0, 0.4, 0.4);
  CHECK_FALSE(segment_intersects_rect(s, r));
  CHECK(segment_rect_distance(s, r) == doctest::Approx(0.3));
  Segment2 c = s;
  REQUIRE(clip_segment_to_slab(c, {1, 0}, {1, 0}, 0.25));
  CHECK(c.a.x == doctest::Approx(0.75));
  CHECK(c.b.x == doctest::Approx(1.25));
}

TEST_CASE("Rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  CHECK(derive_seed(7, 1) != derive_seed(7, 2));
}

TEST_CASE("Perlin noise determinism, zero amplitude and bound") {
  CHECK(perlin2(1.3, 2.7, 4, 0.05, 1.0, 9) == perlin2(1.3, 2.7, 4, 0.05, 1.0, 9));
  Rng rng(5);
  const PerlinNoise noise(11);
  const double bound = fractal_bound(4, 0.05);
  CHECK(bound == doctest::Approx(0.05 * (1 + 0.5 + 0.25 + 0.125)));
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.uniform(0, 5), y = rng.uniform(0, 5);
    CHECK(noise.fractal(x, y, 4, 0.0, 1.0) == 0.0);
    const double v = noise.fractal(x, y, 4, 0.05, 1.0);
    if (std::abs(v) > bound) FAIL("fractal value outside bound at " << x << ", " << y);
  }
  CHECK_THROWS_AS(perlin2(0, 0, 4, 0.05, 0.0, 1), std::invalid_argument);
}
