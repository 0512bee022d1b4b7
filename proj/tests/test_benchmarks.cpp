#include <gtest/gtest.h>

#include "grid_oracle.hpp"
#include "samp/benchmarks.hpp"
#include "samp/engine.hpp"
#include "samp/io.hpp"

using namespace samp;
using namespace samp::oracle;

namespace {

std::optional<ObjectId> object_named(const SampProblem& p, const std::string& name) {
  for (ObjectId o = 0; o < p.objects.size(); ++o)
    if (p.objects[o].name == name) return o;
  return std::nullopt;
}

const Activity* activity_named(const SampProblem& p, const std::string& name) {
  for (const auto& a : p.os.activities)
    if (a.name == name) return &a;
  return nullptr;
}

std::vector<const Activity*> gotos(const SampProblem& p) {
  std::vector<const Activity*> out;
  for (const auto& a : p.os.activities)
    if (a.name.rfind("goto-", 0) == 0) out.push_back(&a);
  return out;
}

double robot_radius(const SampProblem& p) { return std::get<Disk>(p.objects[0].geometry).radius; }

}  // namespace

TEST(Benchmarks, GridSizes) {
  EXPECT_EQ(logistics_grid().size(), 24u);
  EXPECT_EQ(jsp_grid().size(), 36u);
  EXPECT_EQ(logistics_desk_grid().size(), 16u);
  EXPECT_EQ(jsp_desk_grid().size(), 8u);
}

TEST(Benchmarks, EveryInstanceValidates) {
  std::set<std::string> names;
  for (const auto& q : logistics_grid()) {
    auto p = gen_logistics(q);
    for (const auto& e : validate_problem(p)) ADD_FAILURE() << p.name << ": " << e;
    names.insert(p.name);
  }
  for (const auto& q : jsp_grid()) {
    auto p = gen_jsp(q);
    for (const auto& e : validate_problem(p)) ADD_FAILURE() << p.name << ": " << e;
    names.insert(p.name);
  }
  for (const auto& q : logistics_desk_grid())
    EXPECT_TRUE(validate_problem(gen_logistics(q)).empty()) << logistics_name(q);
  for (const auto& q : jsp_desk_grid()) EXPECT_TRUE(validate_problem(gen_jsp(q)).empty()) << jsp_name(q);
  EXPECT_EQ(names.size(), 60u);
}

TEST(Benchmarks, RejectsBadParameters) {
  EXPECT_THROW(gen_logistics({0, 1, 1, Door::Open, Pick::CorridorOnly}), std::invalid_argument);
  EXPECT_THROW(gen_logistics({1, 1, 5, Door::Open, Pick::CorridorOnly}), std::invalid_argument);
  EXPECT_THROW(gen_jsp({1, 1, 7}), std::invalid_argument);
  EXPECT_THROW(gen_jsp({1, 0, 1}), std::invalid_argument);
}

TEST(Benchmarks, SmallestLogisticsHasOneChain) {
  auto p = gen_logistics({1, 1, 1, Door::Open, Pick::CorridorOnly});
  EXPECT_EQ(p.objects.size(), 1u);
  EXPECT_EQ(p.os.activities.size(), 4u);
  EXPECT_EQ(gotos(p).size(), 1u);
  EXPECT_EQ(p.metadata.at("generator_version"), kGeneratorVersion);
  EXPECT_EQ(p.metadata.at("robot_radius"), "0.3");
}

TEST(Benchmarks, OptionsPerItem) {
  // One option per robot and accessible side.
  auto p = gen_logistics({2, 2, 1, Door::Closed, Pick::AllSides});
  EXPECT_EQ(gotos(p).size(), 2u * 2u * 2u);
  for (const auto* a : gotos(p)) EXPECT_TRUE(a->optional);
  ASSERT_TRUE(activity_named(p, "door-open"));
  EXPECT_TRUE(activity_named(p, "door-open")->optional);
  auto j = gen_jsp({3, 3, 2});
  EXPECT_EQ(gotos(j).size(), 9u);
  EXPECT_EQ(j.os.resource_index("machine1") < j.os.resources.size(), true);
}

TEST(Benchmarks, CorridorWidthIsOnePointTwoDiameters) {
  auto p = gen_logistics({1, 2, 1, Door::Open, Pick::CorridorOnly});
  ASSERT_GE(p.workspace.obstacles.size(), 2u);
  const Box lower = aabb(p.workspace.obstacles[0]), upper = aabb(p.workspace.obstacles[1]);
  EXPECT_NEAR(upper.y0 - lower.y1, 1.2 * 2 * robot_radius(p), 1e-12);
}

TEST(Benchmarks, DoorCrossesCorridorEntrance) {
  auto p = gen_logistics({2, 2, 1, Door::Closed, Pick::AllSides});
  auto d = object_named(p, "door");
  ASSERT_TRUE(d);
  const Box door = rect_at(p.objects[*d], p.objects[*d].initial);
  const Box lower = aabb(p.workspace.obstacles[0]), upper = aabb(p.workspace.obstacles[1]);
  // The entrance is the segment joining the two shelf ends at the open side.
  const double ex = std::min(lower.x0, upper.x0);
  EXPECT_LE(door.x0, ex);
  EXPECT_GE(door.x1, ex);
  EXPECT_LT(door.y0, lower.y1 + 2 * robot_radius(p));
  EXPECT_GT(door.y1, upper.y0 - 2 * robot_radius(p));
  // The closed door does not touch the shelves.
  EXPECT_GT(door.y0, lower.y1);
  EXPECT_LT(door.y1, upper.y0);
  EXPECT_FALSE(object_named(gen_logistics({2, 2, 1, Door::Open, Pick::AllSides}), "door"));
}

TEST(Benchmarks, ClosedDoorSealsCorridorPicks) {
  for (const auto& q : logistics_grid()) {
    if (q.door != Door::Closed) continue;
    auto p = gen_logistics(q);
    auto d = object_named(p, "door");
    ASSERT_TRUE(d) << p.name;
    const auto* open = activity_named(p, "door-open");
    ASSERT_TRUE(open && open->motion);
    const GridOracle closed(p.workspace, robot_radius(p), 0, {rect_at(p.objects[*d], p.objects[*d].initial)});
    const GridOracle opened(p.workspace, robot_radius(p), 0, {rect_at(p.objects[*d], open->motion->goal)});
    for (const auto* g : gotos(p)) {
      const Vec2 from{g->motion->start.x, g->motion->start.y}, to{g->motion->goal.x, g->motion->goal.y};
      const bool corridor = g->name.find("-in-") != std::string::npos;
      EXPECT_EQ(closed.reachable(from, to), !corridor) << p.name << " " << g->name;
      EXPECT_TRUE(opened.reachable(from, to)) << p.name << " " << g->name;
    }
  }
}

TEST(Benchmarks, ClosedDoorsSealMachines) {
  for (const auto& q : jsp_grid()) {
    if (q.robots != 1 && q.robots != 3) continue;
    auto p = gen_jsp(q);
    std::vector<Box> closed, opened;
    for (int m = 0; m < q.machines; ++m) {
      auto d = object_named(p, "door" + std::to_string(m));
      ASSERT_TRUE(d);
      closed.push_back(rect_at(p.objects[*d], p.objects[*d].initial));
      const auto* open = activity_named(p, "open-" + std::to_string(m));
      ASSERT_TRUE(open && open->motion);
      opened.push_back(rect_at(p.objects[*d], open->motion->goal));
    }
    const GridOracle shut(p.workspace, robot_radius(p), 0, closed), free(p.workspace, robot_radius(p), 0, opened);
    for (const auto* g : gotos(p)) {
      const Vec2 from{g->motion->start.x, g->motion->start.y}, to{g->motion->goal.x, g->motion->goal.y};
      EXPECT_FALSE(shut.reachable(from, to)) << p.name << " " << g->name;
      EXPECT_TRUE(free.reachable(from, to)) << p.name << " " << g->name;
    }
  }
}

TEST(Benchmarks, JspItemsRoundRobinMachines) {
  auto p = gen_jsp({1, 3, 2});
  const auto* t0 = activity_named(p, "treat-i0-r0");
  const auto* t1 = activity_named(p, "treat-i1-r0");
  const auto* t2 = activity_named(p, "treat-i2-r0");
  ASSERT_TRUE(t0 && t1 && t2);
  EXPECT_EQ(t0->resource_usage[0].first, p.os.resource_index("machine0"));
  EXPECT_EQ(t1->resource_usage[0].first, p.os.resource_index("machine1"));
  EXPECT_EQ(t2->resource_usage[0].first, p.os.resource_index("machine0"));
}

TEST(Benchmarks, SerializedInstanceRoundTrips) {
  for (auto p : {gen_logistics({2, 1, 2, Door::Closed, Pick::AllSides}), gen_jsp({2, 2, 2})}) {
    auto text = serialize_problem(p);
    auto back = parse_problem(text);
    EXPECT_EQ(serialize_problem(back), text);
    EXPECT_EQ(back.metadata, p.metadata);
  }
}

TEST(Benchmarks, MinimalJspNeedsTheDoor) {
  auto p = gen_jsp({1, 1, 1});
  EngineConfig c;
  c.seed = 1;
  c.timeout = 60;
  auto r = solve(p, c);
  ASSERT_EQ(r.outcome, Outcome::Plan);
  EXPECT_TRUE(r.violations.empty());
  const auto& s = r.plan->schedule;
  for (ActivityId a = 0; a < p.os.activities.size(); ++a)
    if (p.os.activities[a].name == "open-0") {
      EXPECT_TRUE(s.present[a]);
    }
}
