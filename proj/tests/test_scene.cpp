#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "grasplog/io.hpp"
#include "grasplog/parallel.hpp"
#include "grasplog/perlin.hpp"
#include "grasplog/scene.hpp"
#include "support.hpp"

using namespace grasplog;
using testing::flat_terrain;
using testing::make_log;
using testing::settled_pile;

TEST_CASE("sample_log matches the log distribution") {
  Rng rng(17);
  double len = 0.0, dia = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Log l = sample_log(rng);
    CHECK(l.length >= 1.8);
    CHECK(l.length <= 3.2);
    len += l.length;
    dia += l.diameter;
  }
  CHECK(std::abs(len / n - 2.5) < 0.01);
  CHECK(std::abs(dia / n - 0.16) < 0.001);

  Rng a(5), b(5);
  const Log la = sample_log(a), lb = sample_log(b);
  CHECK(la.length == lb.length);
  CHECK(la.diameter == lb.diameter);
}

TEST_CASE("single log on flat terrain lies flat at half its diameter") {
  PileParams p;
  p.terrain.amplitude = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Pile pile = generate_pile(1, seed, p);
    REQUIRE(pile.logs.size() == 1);
    const Log& l = pile.logs[0];
    CHECK(l.tilt == 0.0);
    CHECK(std::abs(l.z_center - l.diameter / 2.0) <= 1e-6);
  }
}

namespace {

/// Perpendicular crossing: the upper log touches the lower one at its apex
/// and the ground at its far end. In the vertical plane of the upper log the
/// admissible region above the lower log is a disc of radius R_a + R_b, so
/// the resting axis is the line through the ground-contact end that is
/// tangent to that disc.
struct CrossingOracle {
  double tilt;
  double z_center;
};

CrossingOracle crossing_oracle(double r_low, double r_up, double len_up, double s_cross) {
  const double rho = r_low + r_up;
  auto f = [&](double th) {
    const double c = std::cos(th);
    const double se = 0.5 * len_up * c;
    return r_up / c + std::tan(th) * (s_cross - se) - r_low - rho / c;
  };
  double lo = -kPi / 4.0, hi = 0.0;  // f(lo) > 0 > f(hi) for these dimensions
  REQUIRE(f(lo) * f(hi) < 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  const double th = 0.5 * (lo + hi);
  const double se = 0.5 * len_up * std::cos(th);
  return {th, r_up / std::cos(th) - std::tan(th) * se};
}

}  // namespace

TEST_CASE("log dropped across a perpendicular log tilts onto the ground") {
  for (double offset : {0.2, 0.3, 0.5}) {
    CAPTURE(offset);
    const Log lower = make_log(0, {2.5, 2.5}, 0.0, 2.5, 0.16);
    // Upper log crosses the lower one `offset` behind its own midpoint.
    const Log upper = make_log(1, {2.5, 2.5 + offset}, kPi / 2.0, 2.4, 0.15);
    const Pile pile = settled_pile({lower, upper});
    const Log& a = pile.logs[0];
    const Log& b = pile.logs[1];
    CHECK(a.tilt == 0.0);
    CHECK(a.z_center == doctest::Approx(0.08));

    const CrossingOracle o = crossing_oracle(0.08, 0.075, 2.4, -offset);
    CHECK(b.tilt < 0.0);
    CHECK(std::abs(b.tilt - o.tilt) < 1e-3);
    CHECK(std::abs(b.z_center - o.z_center) < 1e-3);
    // Midpoint of the contact: axis height at the crossing is d_lower + d_upper / 2.
    CHECK(std::abs(b.axis_height_at(-offset) - (0.16 + 0.075)) < 0.01);
    // The +axis end is on the ground.
    const double h = b.half_extent();
    CHECK(std::abs(b.axis_height_at(h) - 0.075 / std::cos(b.tilt)) < 1e-3);
  }
}

TEST_CASE("pile invariants hold over 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CAPTURE(seed);
    const Pile pile = generate_pile(4, seed);
    REQUIRE(pile.logs.size() == 4);
    CHECK(pile_violations(pile).empty());
    const double e = pile.terrain->extent();
    for (std::size_t i = 0; i < pile.logs.size(); ++i) {
      const Log& l = pile.logs[i];
      CHECK(l.length > 0.0);
      CHECK(l.diameter > 0.0);
      CHECK(std::abs(l.tilt) < kPi / 4.0);
      const Segment2 s = l.axis2d();
      for (Vec2 p : {s.a, s.b}) {
        CHECK(p.x - l.radius() >= 0.0);
        CHECK(p.x + l.radius() <= e);
        CHECK(p.y - l.radius() >= 0.0);
        CHECK(p.y + l.radius() <= e);
      }
      // Bottom of the log never sinks into the terrain by more than 1 cm.
      for (int k = -50; k <= 50; ++k) {
        const double t = l.half_extent() * k / 50.0;
        const Vec2 p = l.center + l.axis() * t;
        const double bottom = l.axis_height_at(t) - l.radius() / std::cos(l.tilt);
        CHECK(bottom >= pile.terrain->height(p.x, p.y) - kPenetrationTolerance);
      }
      // Touches something: the model's clearance is within 1 mm somewhere.
      CHECK(support_gap(l, std::span<const Log>(pile.logs).first(i), *pile.terrain) <= kFloatTolerance);
      for (std::size_t j = 0; j < i; ++j) {
        const Log& o = pile.logs[j];
        CHECK(testing::axis_distance3(l, o) >= l.radius() + o.radius() - kPenetrationTolerance);
        // Earlier logs stay below later ones where their centerlines cross.
        const Segment2 so = o.axis2d();
        if (segments_intersect(s, so)) {
          const Vec2 d = so.b - so.a;
          const double den = cross(s.b - s.a, d);
          if (std::abs(den) < 1e-9) continue;
          const double t = cross(so.a - s.a, d) / den;
          const Vec2 x = s.a + (s.b - s.a) * t;
          const double h_l = l.axis_height_at(dot(x - l.center, l.axis()));
          const double h_o = o.axis_height_at(dot(x - o.center, o.axis()));
          CHECK(h_o < h_l);
        }
      }
    }
  }
}

TEST_CASE("generate_pile is deterministic across runs and threads") {
  std::vector<std::string> seq(12), par(12);
  for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = pile_to_json(generate_pile(5, 100 + i)).dump();
  parallel_for(par.size(), 6, [&](std::size_t i) { par[i] = pile_to_json(generate_pile(5, 100 + i)).dump(); });
  CHECK(seq == par);
  CHECK(seq[0] != seq[1]);
}

TEST_CASE("generate_pile errors") {
  CHECK_THROWS_AS(generate_pile(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_pile(17, 1), std::invalid_argument);
  PileParams bad;
  bad.drop_zone = 5.0;  // logs centred near the border cannot fit
  bad.placement_retries = 1;
  bad.logs.length_min = bad.logs.length_max = 3.2;
  CHECK_THROWS_WITH_AS(
      [&] {
        for (std::uint64_t s = 0; s < 50; ++s) generate_pile(16, s, bad);
      }(),
      "pile generation failed", std::runtime_error);
}

TEST_CASE("heightfield is non-negative and bounded") {
  TerrainParams tp;
  tp.seed = 3;
  const Heightfield h(tp);
  const double bound = 2.0 * fractal_bound(tp.octaves, tp.amplitude);
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = h.height(rng.uniform(0, 5), rng.uniform(0, 5));
    CHECK(v >= 0.0);
    CHECK(v <= bound);
  }
  const auto n = h.normal(2.5, 2.5);
  CHECK(n[2] > 0.0);
  CHECK(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] == doctest::Approx(1.0));
}

TEST_CASE("pile.json round trip is exact") {
  const Pile pile = generate_pile(4, 77);
  const std::string text = pile_to_json(pile).dump();
  const Pile back = pile_from_json(nlohmann::json::parse(text));
  CHECK(pile_to_json(back).dump() == text);
  REQUIRE(back.logs.size() == pile.logs.size());
  for (std::size_t i = 0; i < pile.logs.size(); ++i) {
    CHECK(back.logs[i].center == pile.logs[i].center);
    CHECK(back.logs[i].z_center == pile.logs[i].z_center);
    CHECK(back.logs[i].tilt == pile.logs[i].tilt);
  }
  CHECK(back.terrain->height(1.234, 3.21) == pile.terrain->height(1.234, 3.21));
  nlohmann::json broken = pile_to_json(pile);
  broken["schema"] = "other";
  CHECK_THROWS_AS(pile_from_json(broken), IoError);
  broken.erase("schema");
  CHECK_THROWS_AS(pile_from_json(broken), IoError);
}

TEST_CASE("remove_logs and resettle keep the pile valid") {
  const Pile pile = generate_pile(6, 9);
  const std::vector<int> gone{0, 2};
  const Pile rest = remove_logs(pile, gone);
  CHECK(rest.logs.size() == 4);
  CHECK_FALSE(rest.has(0));
  CHECK_FALSE(rest.has(2));
  CHECK(pile_violations(rest).empty());
  const Pile thick = scale_diameters(pile, 2.0);
  for (std::size_t i = 0; i < pile.logs.size(); ++i)
    CHECK(thick.logs[i].diameter == doctest::Approx(2.0 * pile.logs[i].diameter));
}
