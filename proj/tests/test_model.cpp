#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "samp/io.hpp"

using namespace samp;

TEST(Model, HorizonSumsUpperBounds) {
  OsProblem os;
  EXPECT_EQ(horizon(os), 0);
  Activity a;
  a.name = "a";
  a.duration_lb = a.duration_ub = 2;
  Activity b;
  b.name = "b";
  b.duration_lb = 3;
  b.duration_ub = 5;
  os.activities = {a, b};
  EXPECT_EQ(horizon(os), 7);
  os.activities.push_back(a);
  EXPECT_GE(horizon(os), 7);
  EXPECT_EQ(schedule_bound(os), horizon(os) + 3);
}

TEST(Model, NormalizeAngleRange) {
  for (double a : {-10.0, -M_PI, 0.0, M_PI, 3 * M_PI, 7.5}) {
    double n = normalize_angle(a);
    EXPECT_GE(n, -M_PI);
    EXPECT_LT(n, M_PI);
    EXPECT_NEAR(std::cos(n), std::cos(a), 1e-12);
    EXPECT_NEAR(std::sin(n), std::sin(a), 1e-12);
  }
}

TEST(Model, FormulaFactoriesFoldConstants) {
  auto t = Formula::constant(true), f = Formula::constant(false);
  auto p = Formula::present(0);
  EXPECT_EQ(Formula::all({t, p}).kind, Formula::Kind::Present);
  EXPECT_EQ(Formula::all({f, p}).kind, Formula::Kind::False);
  EXPECT_EQ(Formula::any({t, p}).kind, Formula::Kind::True);
  EXPECT_EQ(Formula::any({}).kind, Formula::Kind::False);
  EXPECT_EQ(Formula::implies(f, p).kind, Formula::Kind::True);
}

TEST(Model, FormulaEvaluation) {
  Schedule s(2);
  s.present = {true, false};
  s.start = {2, 0};
  s.end = {4, 0};
  EXPECT_TRUE(eval_formula(Formula::present(0), s));
  EXPECT_FALSE(eval_formula(Formula::present(1), s));
  // end(0) - start(0) <= 2
  EXPECT_TRUE(eval_formula(Formula::diff(TimingExpr::end(0), TimingExpr::start(0), 2), s));
  EXPECT_FALSE(eval_formula(Formula::diff(TimingExpr::end(0), TimingExpr::start(0), 1), s));
  // start(0) + 1 = 3; end(0) - 1 = 3
  EXPECT_TRUE(eval_formula(Formula::equal(TimingExpr::start(0, 1), TimingExpr::end(0, 1)), s));
  EXPECT_TRUE(eval_formula(Formula::before(TimingExpr::origin(1), TimingExpr::start(0)), s));
}

TEST(Model, ValidLogisticsLikeProblemHasNoErrors) {
  auto p = fixtures::two_robots();
  EXPECT_TRUE(validate_problem(p).empty());
}

TEST(Model, DurationBoundsErrorNamesActivity) {
  auto p = fixtures::two_robots();
  p.os.activities[1].duration_lb = 20;
  auto errs = validate_problem(p);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_NE(errs[0].find("r1-go"), std::string::npos);
}

TEST(Model, MotionOnUndeclaredObjectIsReported) {
  auto p = fixtures::two_robots();
  p.os.activities[0].motion->object = 7;
  auto errs = validate_problem(p);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_NE(errs[0].find("r0-go"), std::string::npos);
}

TEST(Model, MotionWithoutObjectResourceIsReported) {
  auto p = fixtures::two_robots();
  p.os.activities[0].resource_usage.clear();
  EXPECT_FALSE(validate_problem(p).empty());
}

TEST(Model, FluentFreeProblemMustHaveNoFluents) {
  auto p = fixtures::two_robots();
  p.os.use_fluents = false;
  EXPECT_TRUE(validate_problem(p).empty());
  p.os.fluents.push_back({"f", {"a"}, 0});
  EXPECT_FALSE(validate_problem(p).empty());
}

TEST(Model, RelevantConfigurationsIncludeStartsAndGoals) {
  auto p = fixtures::two_robots();
  auto q = relevant_configurations(p);
  EXPECT_EQ(q.size(), 4u);
  auto r0 = object_configurations(p, 0);
  ASSERT_EQ(r0.size(), 2u);
  EXPECT_TRUE(same_config(r0[0], p.objects[0].initial));
}

TEST(Model, TrajectoryInterpolation) {
  Trajectory tr;
  tr.samples = {{0.0, {0, 0, 0}}, {2.0, {2, 4, 0}}};
  auto q = tr.at(0.5);
  EXPECT_DOUBLE_EQ(q.x, 0.5);
  EXPECT_DOUBLE_EQ(q.y, 1.0);
  EXPECT_DOUBLE_EQ(tr.at(-1).x, 0.0);
  EXPECT_DOUBLE_EQ(tr.at(9).y, 4.0);
}

TEST(Io, ProblemRoundTrip) {
  auto p = fixtures::two_robots();
  p.os.fluents.push_back({"door", {"open", "closed"}, 1});
  p.os.activities[0].conditions.push_back({TimingExpr::start(0), TimingExpr::end(0), 0, 0});
  p.os.activities[1].effects.push_back({TimingExpr::end(1), 0, 0});
  p.os.temporal_constraints.push_back(
      Formula::implies(Formula::present(0), Formula::before(TimingExpr::end(0), TimingExpr::start(1, 2))));
  p.workspace.obstacles.push_back({{4, 4}, {6, 4}, {6, 6}, {4, 6}});
  p.metadata["family"] = "test";
  auto text = serialize_problem(p);
  auto q = parse_problem(text);
  EXPECT_EQ(serialize_problem(q), text);
  EXPECT_EQ(q.os.activities.size(), 2u);
  EXPECT_TRUE(validate_problem(q).empty());
}

TEST(Io, EmptyInputIsSyntaxError) { EXPECT_THROW(parse_problem(""), ParseError); }

TEST(Io, UnknownFieldIsNamed) {
  auto p = fixtures::two_robots();
  auto j = nlohmann::json::parse(serialize_problem(p));
  j["activities"][0]["colour"] = "red";
  try {
    parse_problem(j.dump());
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(Io, PlanRoundTrip) {
  auto p = fixtures::two_robots();
  SampSchedule pi;
  pi.schedule = Schedule(2);
  pi.schedule.present = {true, false};
  pi.schedule.start = {0, 0};
  pi.schedule.end = {6, 0};
  pi.trajectories[0].samples = {{0.0, {1, 1, 0}}, {6.0, {5, 1, 0}}};
  auto back = parse_plan(serialize_plan(pi, p), p);
  EXPECT_EQ(back.schedule, pi.schedule);
  ASSERT_EQ(back.trajectories.count(0), 1u);
  EXPECT_DOUBLE_EQ(back.trajectories[0].samples.back().q.x, 5.0);
}
