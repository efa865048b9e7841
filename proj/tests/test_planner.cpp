#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "grasplog/dataset.hpp"
#include "grasplog/planner.hpp"
#include "support.hpp"

using namespace grasplog;
using testing::make_log;
using testing::settled_pile;

TEST_CASE("single flat log: candidate across the log at the minimum width") {
  const double yaw = 0.3;
  const Pile pile = settled_pile({make_log(0, {2.5, 2.5}, yaw)});
  const IdSet t{0};
  const auto cands = generate_candidates(pile, t);
  REQUIRE_FALSE(cands.empty());
  bool found = false;
  for (const Grasp& g : cands) {
    if (angle_distance_pi(g.phi, yaw + kPi / 2.0) < 1e-6 && std::abs(g.w - 0.30) < 1e-7) found = true;
    CHECK(g.tau == 1);
  }
  CHECK(found);

  // Thick enough that the clamp does not apply: w = d + 2 * clearance.
  const Pile thick = settled_pile({make_log(0, {2.5, 2.5}, yaw, 2.5, 0.35)});
  const auto tc = generate_candidates(thick, t);
  REQUIRE_FALSE(tc.empty());
  CHECK(angle_distance_pi(tc.front().phi, yaw + kPi / 2.0) < 1e-6);
  CHECK(std::abs(tc.front().w - 0.45) < 1e-7);
}

TEST_CASE("two parallel touching logs: width spans both") {
  const Pile pile = settled_pile({make_log(0, {2.5, 2.5}, 0.0), make_log(1, {2.5, 2.66}, 0.0)});
  CHECK(pile.logs[1].tilt == 0.0);
  const IdSet both{0, 1};
  const auto cands = generate_candidates(pile, both);
  REQUIRE_FALSE(cands.empty());
  CHECK(std::abs(cands.front().w - (2 * 0.16 + 0.10)) < 1e-6);
  CHECK(angle_distance_pi(cands.front().phi, kPi / 2.0) < 1e-6);
}

TEST_CASE("targets separated by a non-target give no candidates") {
  const Pile pile = settled_pile({make_log(0, {2.5, 2.0}, 0.0), make_log(1, {2.5, 2.5}, 0.0),
                                  make_log(2, {2.5, 3.0}, 0.0)});
  CHECK(generate_candidates(pile, IdSet{0, 2}).empty());
  CHECK_FALSE(generate_candidates(pile, IdSet{0, 1, 2}).empty());
  CHECK_THROWS_AS(generate_candidates(pile, IdSet{}), std::invalid_argument);
  CHECK_THROWS_AS(generate_candidates(pile, IdSet{7}), std::invalid_argument);
}

TEST_CASE("candidates pass the geometric filter and are sorted by width") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Pile pile = generate_pile(4, seed);
    for (const IdSet& t : enumerate_subsets(pile.ids())) {
      const auto cands = generate_candidates(pile, t);
      for (std::size_t i = 0; i < cands.size(); ++i) {
        const Grasp& g = cands[i];
        if (i > 0) CHECK(cands[i - 1].w <= g.w);
        CHECK(g.w >= 0.30);
        CHECK(g.w <= 1.55);
        CHECK(captured_logs(pile, g) == t);
        for (const OrientedRect& r : claw_corridors(g.position(), g.phi, g.w))
          for (const Log& l : pile.logs) CHECK(segment_rect_distance(l.axis2d(), r) >= l.radius());
      }
    }
  }
}

TEST_CASE("simulate_grasp examples") {
  const Pile pile = settled_pile({make_log(0, {2.5, 2.5}, 0.7)});
  const IdSet t{0};
  const Grasp g = generate_candidates(pile, t).front();
  const TrialResult ok = simulate_grasp(pile, g, t);
  CHECK(ok.success);
  CHECK(ok.captured == t);
  CHECK(ok.beta < 1e-9);
  CHECK(ok.b == doctest::Approx(1.0));
  CHECK(ok.failure_reason == FailureReason::None);

  Grasp wide = g;
  wide.w = 2.0;
  CHECK(simulate_grasp(pile, wide, t).failure_reason == FailureReason::OutOfRange);
  Grasp outside = g;
  outside.x = -0.5;
  CHECK(simulate_grasp(pile, outside, t).failure_reason == FailureReason::OutOfRange);
}

TEST_CASE("too narrow a grasp collides with the target") {
  const Pile pile = settled_pile({make_log(0, {2.5, 2.5}, 0.0, 2.5, 0.30)});
  const IdSet t{0};
  const Grasp g = generate_candidates(pile, t).front();
  CHECK(std::abs(g.w - 0.40) < 1e-7);
  CHECK(simulate_grasp(pile, g, t).success);
  Grasp narrow = g;
  narrow.w = 0.30;
  const TrialResult r = simulate_grasp(pile, narrow, t);
  CHECK_FALSE(r.success);
  CHECK(r.failure_reason == FailureReason::ClawCollision);
}

TEST_CASE("neighbour inside the capture rectangle is the wrong set") {
  const Pile pile = settled_pile({make_log(0, {2.5, 2.5}, 0.0), make_log(1, {2.5, 2.7}, 0.0)});
  Grasp g;
  g.x = 2.5;
  g.y = 2.5;
  g.phi = kPi / 2.0;
  g.w = 0.6;
  const TrialResult r = simulate_grasp(pile, g, IdSet{0});
  CHECK_FALSE(r.success);
  CHECK(r.failure_reason == FailureReason::WrongSetCaptured);
  CHECK(r.captured == IdSet{0, 1});
}

TEST_CASE("bundle over the closure capacity fails") {
  const Pile pile = settled_pile(
      {make_log(0, {2.5, 2.5}, 0.0, 2.5, 0.30), make_log(1, {2.5, 2.8}, 0.0, 2.5, 0.30)});
  const IdSet both{0, 1};
  const auto cands = generate_candidates(pile, both);
  REQUIRE_FALSE(cands.empty());
  CHECK(simulate_grasp(pile, cands.front(), both).failure_reason == FailureReason::InsufficientClosure);
}

TEST_CASE("balance examples") {
  Grasp g;
  g.x = 2.5;
  g.y = 2.5;
  g.phi = 0.0;
  const Log mid = make_log(0, {2.5, 2.5}, kPi / 2.0);
  const Balance zero = balance_of(g, std::vector<Log>{mid});
  CHECK(zero.beta == 0.0);
  CHECK(zero.b == 1.0);
  const Log off = make_log(1, {2.5, 3.3}, kPi / 2.0);
  const Balance b45 = balance_of(g, std::vector<Log>{off});
  CHECK(b45.beta == doctest::Approx(kPi / 4.0).epsilon(1e-12));
  CHECK(b45.b == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(balance_of(g, std::vector<Log>{}), std::invalid_argument);
}

TEST_CASE("balance agrees with potential energy minimisation") {
  // The bundle hangs rigidly from the pivot with every mass a pendulum length
  // below it; the grapple turns by beta about the pivot until the potential
  // energy is minimal.
  const double h = 0.8;
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Grasp g;
    g.x = 2.5;
    g.y = 2.5;
    g.phi = rng.uniform(0.0, kPi);
    const Vec2 along = unit_from_angle(g.phi + kPi / 2.0);
    std::vector<Log> logs;
    const int n = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < n; ++i) {
      const Vec2 c = g.position() + along * rng.uniform(-1.0, 1.0) +
                     unit_from_angle(g.phi) * rng.uniform(-0.3, 0.3);
      logs.push_back(make_log(i, c, rng.uniform(0, kPi), rng.uniform(1.8, 3.2), rng.uniform(0.12, 0.2)));
    }
    auto energy = [&](double beta) {
      double v = 0.0;
      for (const Log& l : logs) {
        const double s = dot(l.center - g.position(), along);
        v += l.mass() * (-s * std::sin(beta) - h * std::cos(beta));
      }
      return v;
    };
    double lo = -kPi / 2.0, hi = kPi / 2.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
      const double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
      (energy(a) < energy(b) ? hi : lo) = energy(a) < energy(b) ? b : a;
    }
    const double beta_oracle = std::abs(0.5 * (lo + hi));
    const Balance bal = balance_of(g, logs);
    CHECK(std::abs(bal.beta - beta_oracle) < 1e-6);
    CHECK(bal.b == doctest::Approx(std::cos(bal.beta)));
  }
}

TEST_CASE("reduction examples") {
  const Pile pile = settled_pile({make_log(0, {2.5, 2.5}, 0.0)});
  const IdSet t{0};
  Grasp miss;
  miss.x = 1.0;
  miss.y = 1.0;
  miss.w = 0.4;
  CHECK(reduce_candidates({miss, miss}, pile, t).empty());

  const Grasp g = generate_candidates(pile, t).front();
  const auto kept = reduce_candidates({g, g}, pile, t);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].grasp == g);
  CHECK(kept[0].trial.success);
}

namespace {

struct Case {
  Pile pile;
  IdSet targets;
};

std::vector<Case> random_cases(int count, std::uint64_t seed) {
  std::vector<Case> out;
  Rng rng(seed);
  while (static_cast<int>(out.size()) < count) {
    const int n = 2 + static_cast<int>(rng.below(5));
    Pile pile = generate_pile(n, rng.next_u64());
    const auto subsets = enumerate_subsets(pile.ids());
    const IdSet t = subsets[rng.below(static_cast<std::uint32_t>(subsets.size()))];
    out.push_back({std::move(pile), t});
  }
  return out;
}

}  // namespace

TEST_CASE("reduction matches a brute-force replay") {
  for (bool footprint : {false, true}) {
    CAPTURE(footprint);
    for (const Case& c : random_cases(25, footprint ? 2 : 1)) {
      const auto cands = generate_candidates(c.pile, c.targets);
      ReduceOptions opt;
      if (footprint) opt.footprint_grid = ImageGrid{};
      std::vector<ReductionEvent> trace;
      opt.trace = &trace;
      const auto kept = reduce_candidates(cands, c.pile, c.targets, opt);

      std::vector<std::size_t> brute_kept;
      const auto brute = testing::brute_force_reduction(cands, c.pile, c.targets, opt, brute_kept);
      REQUIRE(kept.size() == brute_kept.size());
      for (std::size_t i = 0; i < kept.size(); ++i) CHECK(kept[i].grasp == cands[brute_kept[i]]);
      REQUIRE(trace.size() == brute.size());
      for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(trace[i].candidate == brute[i].candidate);
        CHECK(trace[i].success == brute[i].success);
        CHECK(std::set<std::size_t>(trace[i].discarded.begin(), trace[i].discarded.end()) ==
              std::set<std::size_t>(brute[i].discarded.begin(), brute[i].discarded.end()));
      }
    }
  }
}

TEST_CASE("reduction output properties") {
  for (const Case& c : random_cases(30, 3)) {
    const auto cands = generate_candidates(c.pile, c.targets);
    std::vector<ReductionEvent> trace;
    ReduceOptions opt;
    opt.trace = &trace;
    const auto kept = reduce_candidates(cands, c.pile, c.targets, opt);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const TrialResult again = simulate_grasp(c.pile, kept[i].grasp, c.targets);
      CHECK(again.success);
      CHECK(again.captured == c.targets);
      CHECK(again.b > 0.0);
      CHECK(again.b <= 1.0);
      for (std::size_t j = i + 1; j < kept.size(); ++j)
        CHECK(rect_overlap_area(capture_rect(kept[i].grasp), capture_rect(kept[j].grasp)) <= 0.04);
    }
    // Narrow priority: nothing discarded was narrower than the grasp that removed it.
    for (const ReductionEvent& ev : trace)
      for (std::size_t d : ev.discarded) CHECK(cands[d].w >= cands[ev.candidate].w);
  }
}

TEST_CASE("trial outcome is invariant under translation and quarter turns") {
  Rng rng(12);
  PileParams flat;
  flat.terrain.amplitude = 0.0;
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Pile pile = generate_pile(4, seed, flat);
    const Vec2 shift{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
    Pile moved = pile;
    for (Log& l : moved.logs) l.center = l.center + shift;
    const Pile turned = rotated90(pile);
    for (const IdSet& t : enumerate_subsets(pile.ids(), 2)) {
      std::vector<Grasp> probes = generate_candidates(pile, t);
      for (int i = 0; i < 5; ++i) {
        Grasp g;
        g.x = rng.uniform(1.5, 3.5);
        g.y = rng.uniform(1.5, 3.5);
        g.phi = rng.uniform(0, kPi);
        g.w = rng.uniform(0.3, 1.2);
        probes.push_back(g);
      }
      for (const Grasp& g : probes) {
        const TrialResult base = simulate_grasp(pile, g, t);
        successes += base.success;
        Grasp gm = g;
        gm.x += shift.x;
        gm.y += shift.y;
        const TrialResult rm = simulate_grasp(moved, gm, t);
        CHECK(rm.success == base.success);
        CHECK(rm.failure_reason == base.failure_reason);
        CHECK(rm.captured == base.captured);
        CHECK(std::abs(rm.beta - base.beta) < 1e-9);

        Grasp gt = g;
        gt.x = 5.0 - g.y;
        gt.y = g.x;
        gt.phi = normalize_angle_pi(g.phi + kPi / 2.0);
        const TrialResult rt = simulate_grasp(turned, gt, t);
        CHECK(rt.success == base.success);
        CHECK(rt.failure_reason == base.failure_reason);
        CHECK(rt.captured == base.captured);
        CHECK(std::abs(rt.beta - base.beta) < 1e-9);
      }
    }
  }
  CHECK(successes > 0);
}

TEST_CASE("failure reason names round trip") {
  for (FailureReason r : {FailureReason::None, FailureReason::WrongSetCaptured, FailureReason::ClawCollision,
                          FailureReason::InsufficientClosure, FailureReason::OutOfRange})
    CHECK(failure_reason_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(failure_reason_from_string("Bogus"), std::invalid_argument);
}
