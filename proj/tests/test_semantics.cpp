#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "samp/semantics.hpp"

using namespace samp;
using K = Violation::Kind;

namespace {

OsProblem writer_problem() {
  OsProblem os;
  os.fluents.push_back({"f", {"init", "v1", "v2"}, 0});
  for (int i = 0; i < 2; ++i) {
    Activity a;
    a.name = "w" + std::to_string(i);
    a.optional = true;
    a.duration_lb = 1;
    a.duration_ub = 5;
    a.effects.push_back({TimingExpr::end(i), 0, static_cast<std::size_t>(i + 1)});
    os.activities.push_back(a);
  }
  return os;
}

Schedule sched(std::vector<bool> p, std::vector<Tick> s, std::vector<Tick> e) {
  Schedule out;
  out.present = std::move(p);
  out.start = std::move(s);
  out.end = std::move(e);
  return out;
}

/// Straight line from a to b between t0 and t1 with constant speed.
Trajectory line(Configuration a, Configuration b, double t0, double t1, int pieces = 10) {
  Trajectory tr;
  for (int k = 0; k <= pieces; ++k) {
    double w = static_cast<double>(k) / pieces;
    tr.samples.push_back({t0 + w * (t1 - t0), {a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), 0}});
  }
  return tr;
}

}  // namespace

TEST(Fluents, InitialValueAtZero) {
  auto os = writer_problem();
  auto s = sched({false, false}, {0, 0}, {0, 0});
  EXPECT_EQ(evaluate_fluent(s, os, 0, 0), 0u);
  EXPECT_EQ(evaluate_fluent(s, os, 0, 9), 0u);
}

TEST(Fluents, EffectVisibleFromItsTick) {
  auto os = writer_problem();
  auto s = sched({true, false}, {2, 0}, {5, 0});
  EXPECT_EQ(evaluate_fluent(s, os, 0, 5), 1u);
  EXPECT_EQ(evaluate_fluent(s, os, 0, 4), 0u);
}

TEST(Fluents, SequentialWrites) {
  auto os = writer_problem();
  auto s = sched({true, true}, {1, 4}, {3, 7});
  EXPECT_EQ(evaluate_fluent(s, os, 0, 5), 1u);
  EXPECT_EQ(evaluate_fluent(s, os, 0, 9), 2u);
}

TEST(Fluents, UnchangedWithoutEffect) {
  auto os = writer_problem();
  auto s = sched({true, true}, {1, 4}, {3, 7});
  for (Tick t = 1; t <= 10; ++t) {
    if (t != 3 && t != 7) {
      EXPECT_EQ(evaluate_fluent(s, os, 0, t), evaluate_fluent(s, os, 0, t - 1));
    }
  }
}

TEST(NonConflict, CoTemporalWritesConflict) {
  auto os = writer_problem();
  EXPECT_EQ(check_non_conflicting(sched({true, true}, {1, 2}, {4, 4}), os).size(), 1u);
  EXPECT_TRUE(check_non_conflicting(sched({true, false}, {1, 2}, {4, 4}), os).empty());
  os.fluents.push_back({"g", {"a", "b"}, 0});
  os.activities[1].effects[0] = {TimingExpr::end(1), 1, 1};
  EXPECT_TRUE(check_non_conflicting(sched({true, true}, {1, 2}, {4, 4}), os).empty());
}

TEST(Validate, UnaryResourceOverlapAtOneTick) {
  OsProblem os;
  os.resources.push_back({"m", 1});
  for (int i = 0; i < 2; ++i) {
    Activity a;
    a.name = "a" + std::to_string(i);
    a.duration_lb = a.duration_ub = 2;
    a.resource_usage.push_back({0, 1});
    os.activities.push_back(a);
  }
  auto v = validate_schedule(sched({true, true}, {0, 2}, {2, 4}), os);
  EXPECT_TRUE(has_kind(v, K::ResourceOveruse));
  EXPECT_TRUE(validate_schedule(sched({true, true}, {0, 3}, {2, 5}), os).empty());
}

TEST(Validate, AbsentActivitySatisfiesNegatedPresence) {
  auto os = writer_problem();
  os.temporal_constraints.push_back(Formula::negate(Formula::present(0)));
  EXPECT_TRUE(validate_schedule(sched({false, false}, {0, 0}, {0, 0}), os).empty());
  EXPECT_TRUE(has_kind(validate_schedule(sched({true, false}, {0, 0}, {2, 0}), os), K::TemporalConstraint));
}

TEST(Validate, FluentConditionOverWindow) {
  auto os = writer_problem();
  Activity r;
  r.name = "reader";
  r.duration_lb = 1;
  r.duration_ub = 3;
  r.conditions.push_back({TimingExpr::start(2), TimingExpr::end(2), 0, 1});
  os.activities.push_back(r);
  // w0 writes v1 at 3; reader over [3, 5] holds, over [2, 4] fails at 2.
  auto ok = sched({true, false, true}, {1, 0, 3}, {3, 0, 5});
  auto bad = sched({true, false, true}, {1, 0, 2}, {3, 0, 4});
  EXPECT_TRUE(validate_schedule(ok, os).empty());
  EXPECT_NE(evaluate_fluent(bad, os, 0, 2), 1u);
  EXPECT_TRUE(has_kind(validate_schedule(bad, os), K::FluentCondition));
}

TEST(Validate, DurationBoundsAndMandatory) {
  auto os = writer_problem();
  os.activities[0].optional = false;
  EXPECT_TRUE(has_kind(validate_schedule(sched({true, false}, {0, 0}, {6, 0}), os), K::DurationBounds));
  EXPECT_FALSE(validate_schedule(sched({false, false}, {0, 0}, {0, 0}), os).empty());
}

TEST(Makespan, Basics) {
  EXPECT_EQ(makespan(sched({false, false}, {0, 0}, {3, 4})), 0);
  EXPECT_EQ(makespan(sched({true, true}, {0, 1}, {5, 9})), 9);
}

TEST(Config, FourCases) {
  auto p = fixtures::two_robots();
  fixtures::add_motion(p, "r0-back", 0, {5, 1}, {1, 1}, 6, 12);
  SampSchedule pi;
  pi.schedule = sched({true, false, true}, {2, 0, 10}, {8, 0, 16});
  pi.trajectories[0] = line({1, 1}, {5, 1}, 2, 6);
  pi.trajectories[2] = line({5, 1}, {1, 1}, 10, 14);
  EXPECT_DOUBLE_EQ(evaluate_config(pi, p, 0, 1.0).x, 1.0);
  EXPECT_NEAR(evaluate_config(pi, p, 0, 4.0).x, 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(evaluate_config(pi, p, 0, 9.0).x, 5.0);
  EXPECT_DOUBLE_EQ(evaluate_config(pi, p, 0, 20.0).x, 1.0);
  EXPECT_DOUBLE_EQ(evaluate_config(pi, p, 1, 5.0).y, 3.0);
}

TEST(SampValidate, ParallelLanesAreValid) {
  auto p = fixtures::two_robots();
  SampSchedule pi;
  pi.schedule = sched({true, true}, {0, 0}, {8, 8});
  // 4 m in 8 s at 0.5 m/s; the sampled start/stop accelerations stay below 1 m/s^2.
  pi.trajectories[0] = line({1, 1}, {5, 1}, 0, 8, 80);
  pi.trajectories[1] = line({1, 3}, {5, 3}, 0, 8, 80);
  auto v = validate_samp_schedule(pi, p);
  for (const auto& x : v) ADD_FAILURE() << format_violation(x);
}

TEST(SampValidate, CrossingRobotsCollide) {
  auto p = fixtures::two_robots();
  p.os.activities[0].motion->goal = {5, 3};
  p.os.activities[1].motion->goal = {5, 1};
  SampSchedule pi;
  pi.schedule = sched({true, true}, {0, 0}, {8, 8});
  pi.trajectories[0] = line({1, 1}, {5, 3}, 0, 8, 80);
  pi.trajectories[1] = line({1, 3}, {5, 1}, 0, 8, 80);
  auto v = validate_samp_schedule(pi, p);
  EXPECT_TRUE(has_kind(v, K::Collision));
  for (const auto& x : v)
    if (x.kind == K::Collision) {
      EXPECT_EQ(x.subjects.size(), 2u);
    }
}

TEST(SampValidate, CollisionSymmetricInObjectOrder) {
  auto p = fixtures::two_robots();
  p.os.activities[0].motion->goal = {5, 3};
  p.os.activities[1].motion->goal = {5, 1};
  SampSchedule pi;
  pi.schedule = sched({true, true}, {0, 0}, {8, 8});
  pi.trajectories[0] = line({1, 1}, {5, 3}, 0, 8, 80);
  pi.trajectories[1] = line({1, 3}, {5, 1}, 0, 8, 80);
  auto swapped = p;
  std::swap(swapped.objects[0], swapped.objects[1]);
  swapped.os.activities[0].motion->object = 1;
  swapped.os.activities[1].motion->object = 0;
  EXPECT_EQ(has_kind(validate_samp_schedule(pi, p), K::Collision),
            has_kind(validate_samp_schedule(pi, swapped), K::Collision));
}

TEST(SampValidate, TooFastIsDynamicInfeasible) {
  auto p = fixtures::two_robots();
  SampSchedule pi;
  pi.schedule = sched({true, false}, {0, 0}, {8, 0});
  pi.trajectories[0] = line({1, 1}, {5, 1}, 0, 2, 4);  // 2 m/s
  EXPECT_TRUE(has_kind(validate_samp_schedule(pi, p), K::DynamicInfeasible));
}

TEST(SampValidate, BrokenChainIsDiscontinuity) {
  auto p = fixtures::two_robots();
  fixtures::add_motion(p, "r0-more", 0, {5.5, 1}, {7, 1}, 4, 12);
  SampSchedule pi;
  pi.schedule = sched({true, false, true}, {0, 0, 10}, {8, 0, 16});
  pi.trajectories[0] = line({1, 1}, {5, 1}, 0, 8, 80);
  pi.trajectories[2] = line({5.5, 1}, {7, 1}, 10, 16, 60);
  EXPECT_TRUE(has_kind(validate_samp_schedule(pi, p), K::Discontinuity));
}

TEST(SampValidate, ObstacleHit) {
  auto p = fixtures::two_robots();
  p.workspace.obstacles.push_back({{2.8, 0.5}, {3.2, 0.5}, {3.2, 1.5}, {2.8, 1.5}});
  SampSchedule pi;
  pi.schedule = sched({true, false}, {0, 0}, {8, 0});
  pi.trajectories[0] = line({1, 1}, {5, 1}, 0, 8, 80);
  EXPECT_TRUE(has_kind(validate_samp_schedule(pi, p), K::Collision));
}
