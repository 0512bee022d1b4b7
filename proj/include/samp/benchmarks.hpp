#pragma once

// Instance generators: shelf logistics and job shop with transport.
//
// All geometry below is generator-defined. Robots are disks of radius 0.3 with
// v = 1 m/s and a = 1 m/s^2; doors are 0.1 m panels that slide 1 m.

#include <cmath>
#include <string>
#include <vector>

#include "samp/model.hpp"
#include "samp/motion.hpp"

namespace samp {

inline constexpr const char* kGeneratorVersion = "1";

enum class Door { Open, Closed };
enum class Pick { CorridorOnly, AllSides };

struct LogisticsParams {
  int robots = 1;
  int shelves = 2;  // 1: lower shelf holds items, 2: both shelves do
  int items = 1;    // per shelf, at most 4
  Door door = Door::Open;
  Pick pick = Pick::CorridorOnly;
};

struct JspParams {
  int robots = 1;
  int items = 1;
  int machines = 1;  // at most 6
};

namespace bench_detail {

inline constexpr double kRobotRadius = 0.3;
inline constexpr double kCorridorY = 4.0;
inline constexpr double kCorridorHalf = 0.36;  // 1.2 robot diameters wide
inline constexpr double kShelfX0 = 4.0, kShelfX1 = 10.0;
inline constexpr double kPickSpacing = 1.4;
inline constexpr Tick kTreatTicks = 3;

inline Polygon box(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

inline MovableObject robot(int r, Configuration home) {
  MovableObject o;
  o.name = "robot" + std::to_string(r);
  o.geometry = Disk{kRobotRadius};
  o.control = {1.0, 1.0, "holonomic"};
  o.initial = home;
  return o;
}

inline MovableObject door_panel(const std::string& name, double w, double h, Configuration closed) {
  MovableObject o;
  o.name = name;
  o.geometry = Rectangle{w, h};
  o.control = {1.0, 4.0, "slider"};
  o.initial = closed;
  return o;
}

/// Duration bounds for a move: the straight-line trapezoid time, rounded up, and
/// enough slack for detours and waiting.
inline std::pair<Tick, Tick> move_bounds(const Configuration& a, const Configuration& b, const ControlModel& c,
                                         double tick) {
  const Tick lb = std::max<Tick>(1, static_cast<Tick>(std::ceil(estimate_duration(distance(a, b), c) / tick - 1e-9)));
  return {lb, 2 * lb + 6};
}

class Builder {
 public:
  explicit Builder(SampProblem& p) : p_(p) {}

  ObjectId object(MovableObject o) {
    p_.os.resources.push_back({o.name, 1});
    p_.objects.push_back(std::move(o));
    return p_.objects.size() - 1;
  }

  ActivityId move(const std::string& name, ObjectId o, Configuration from, Configuration to, bool optional) {
    auto [lb, ub] = move_bounds(from, to, p_.objects[o].control, p_.tick_seconds);
    Activity a;
    a.name = name;
    a.optional = optional;
    a.duration_lb = lb;
    a.duration_ub = ub;
    a.resource_usage.push_back({own(o), 1});
    a.motion = MotionConstraint{o, from, to};
    p_.os.activities.push_back(std::move(a));
    return p_.os.activities.size() - 1;
  }

  ActivityId task(const std::string& name, std::vector<ResourceId> uses, Tick d, bool optional) {
    Activity a;
    a.name = name;
    a.optional = optional;
    a.duration_lb = a.duration_ub = d;
    for (ResourceId r : uses) a.resource_usage.push_back({r, 1});
    p_.os.activities.push_back(std::move(a));
    return p_.os.activities.size() - 1;
  }

  /// The unary resource registered for object `o`.
  ResourceId own(ObjectId o) const { return p_.os.resource_index(p_.objects[o].name); }

  ResourceId resource(const std::string& name) {
    p_.os.resources.push_back({name, 1});
    return p_.os.resources.size() - 1;
  }

  /// All-or-nothing chain: every step is present together and runs strictly in order.
  void chain(const std::vector<ActivityId>& steps) {
    auto& tc = p_.os.temporal_constraints;
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
      const ActivityId a = steps[i], b = steps[i + 1];
      tc.push_back(Formula::implies(Formula::present(a), Formula::present(b)));
      tc.push_back(Formula::implies(Formula::present(b), Formula::present(a)));
      tc.push_back(Formula::implies(Formula::present(a),
                                    Formula::before(TimingExpr::end(a), TimingExpr::start(b))));
    }
  }

  /// Exactly one of `options` is present.
  void exactly_one(const std::vector<ActivityId>& options) {
    auto& tc = p_.os.temporal_constraints;
    std::vector<Formula> any;
    for (ActivityId a : options) any.push_back(Formula::present(a));
    tc.push_back(Formula::any(std::move(any)));
    for (std::size_t i = 0; i < options.size(); ++i)
      for (std::size_t j = i + 1; j < options.size(); ++j)
        tc.push_back(Formula::negate(Formula::all({Formula::present(options[i]), Formula::present(options[j])})));
  }

 private:
  SampProblem& p_;
};

}  // namespace bench_detail

inline std::string logistics_name(const LogisticsParams& q) {
  return "log-" + std::string(q.pick == Pick::CorridorOnly ? "OC" : "ALL") + "-" +
         (q.door == Door::Open ? "DO" : "DC") + "-r" + std::to_string(q.robots) + "-s" + std::to_string(q.shelves) +
         "-i" + std::to_string(q.items);
}

inline std::string jsp_name(const JspParams& q) {
  return "jsp-r" + std::to_string(q.robots) + "-i" + std::to_string(q.items) + "-m" + std::to_string(q.machines);
}

/// Two shelf blocks along x in [4, 10] form a dead-end corridor at y = 4 that opens
/// to the left. Robots start (and unload) at their home spots left of the shelves.
/// With a closed door, a panel seals the corridor mouth and slides left to open.
inline SampProblem gen_logistics(const LogisticsParams& q) {
  using namespace bench_detail;
  if (q.robots < 1 || q.shelves < 1 || q.shelves > 2 || q.items < 1 || q.items > 4)
    throw std::invalid_argument("logistics parameters out of range");
  SampProblem p;
  p.name = logistics_name(q);
  p.tick_seconds = 1.0;
  p.workspace.min = {0, 0};
  p.workspace.max = {12, std::max(8.0, 2.0 + q.robots)};
  const double lo = kCorridorY - kCorridorHalf, hi = kCorridorY + kCorridorHalf;
  p.workspace.obstacles.push_back(box(kShelfX0, lo - 1.0, kShelfX1, lo));  // lower shelf
  p.workspace.obstacles.push_back(box(kShelfX0, hi, kShelfX1, hi + 1.0));  // upper shelf
  p.workspace.obstacles.push_back(box(kShelfX1, lo - 1.0, kShelfX1 + 0.2, hi + 1.0));  // dead end
  p.metadata = {{"generator", "logistics"},
                {"generator_version", kGeneratorVersion},
                {"robots", std::to_string(q.robots)},
                {"shelves", std::to_string(q.shelves)},
                {"items_per_shelf", std::to_string(q.items)},
                {"door", q.door == Door::Open ? "open" : "closed"},
                {"pick", q.pick == Pick::CorridorOnly ? "corridor" : "all"},
                {"robot_radius", "0.3"},
                {"corridor_width", "0.72"}};

  Builder b(p);
  std::vector<ObjectId> robots;
  std::vector<Configuration> homes;
  for (int r = 0; r < q.robots; ++r) {
    homes.push_back({1.5, 2.5 + r, 0});
    robots.push_back(b.object(robot(r, homes.back())));
  }
  if (q.door == Door::Closed) {
    // Straddles the mouth line x = kShelfX0 with a small gap to both shelves; it
    // slides left, away from the shelves, to open.
    const Configuration closed{kShelfX0 - 0.05, kCorridorY, 0}, open{kShelfX0 - 1.4, kCorridorY, 0};
    ObjectId d = b.object(door_panel("door", 0.2, 2 * kCorridorHalf - 0.08, closed));
    b.move("door-open", d, closed, open, true);
    b.move("door-close", d, open, closed, true);
  }

  for (int s = 0; s < q.shelves; ++s)
    for (int i = 0; i < q.items; ++i) {
      const std::string item = "s" + std::to_string(s) + "i" + std::to_string(i);
      const double x = (s == 0 ? 4.8 : 5.4) + kPickSpacing * i;
      std::vector<std::pair<std::string, Configuration>> sides{{"in", {x, kCorridorY, 0}}};
      if (q.pick == Pick::AllSides) sides.push_back({"out", {x, s == 0 ? lo - 1.44 : hi + 1.44, 0}});
      std::vector<ActivityId> options;
      for (int r = 0; r < q.robots; ++r)
        for (const auto& [side, at] : sides) {
          const std::string tag = item + "-" + side + "-r" + std::to_string(r);
          const ObjectId o = robots[r];
          ActivityId go = b.move("goto-" + tag, o, homes[r], at, true);
          ActivityId load = b.task("load-" + tag, {b.own(o)}, 1, true);
          ActivityId back = b.move("return-" + tag, o, at, homes[r], true);
          ActivityId unload = b.task("unload-" + tag, {b.own(o)}, 1, true);
          b.chain({go, load, back, unload});
          options.push_back(go);
        }
      b.exactly_one(options);
    }
  return p;
}

/// Machines sit in alcoves along the top wall, each sealed by a door panel that
/// slides sideways. Robots bring each item from their pallet spot to its machine,
/// wait for the treatment and bring it back.
inline SampProblem gen_jsp(const JspParams& q) {
  using namespace bench_detail;
  if (q.robots < 1 || q.items < 1 || q.machines < 1 || q.machines > 6)
    throw std::invalid_argument("jsp parameters out of range");
  SampProblem p;
  p.name = jsp_name(q);
  p.tick_seconds = 1.0;
  p.workspace.min = {0, 0};
  p.workspace.max = {std::max(15.0, 2.0 + q.robots), 8};
  p.metadata = {{"generator", "jsp"},
                {"generator_version", kGeneratorVersion},
                {"robots", std::to_string(q.robots)},
                {"items", std::to_string(q.items)},
                {"machines", std::to_string(q.machines)},
                {"robot_radius", "0.3"},
                {"treat_ticks", std::to_string(kTreatTicks)}};
  Builder b(p);
  std::vector<ObjectId> robots;
  std::vector<Configuration> homes;
  for (int r = 0; r < q.robots; ++r) {
    homes.push_back({1.0 + r, 1.0, 0});
    robots.push_back(b.object(robot(r, homes.back())));
  }
  std::vector<Configuration> stations;
  std::vector<ResourceId> machines;
  for (int m = 0; m < q.machines; ++m) {
    const double cx = 2.5 + 2.2 * m;
    p.workspace.obstacles.push_back(box(cx - 0.6, 6.0, cx - 0.5, 8.0));
    p.workspace.obstacles.push_back(box(cx + 0.5, 6.0, cx + 0.6, 8.0));
    p.workspace.obstacles.push_back(box(cx - 0.5, 7.6, cx + 0.5, 8.0));  // the machine
    stations.push_back({cx, 7.0, 0});
    const std::string name = "machine" + std::to_string(m);
    machines.push_back(b.resource(name));
    const Configuration closed{cx, 5.9, 0}, open{cx + 1.0, 5.9, 0};
    ObjectId d = b.object(door_panel("door" + std::to_string(m), 1.0, 0.1, closed));
    b.move("open-" + std::to_string(m), d, closed, open, true);
    b.move("close-" + std::to_string(m), d, open, closed, true);
  }
  for (int i = 0; i < q.items; ++i) {
    const int m = i % q.machines;
    std::vector<ActivityId> options;
    for (int r = 0; r < q.robots; ++r) {
      const std::string tag = "i" + std::to_string(i) + "-r" + std::to_string(r);
      const ObjectId o = robots[r];
      ActivityId go = b.move("goto-" + tag, o, homes[r], stations[m], true);
      ActivityId treat = b.task("treat-" + tag, {machines[m]}, kTreatTicks, true);
      ActivityId back = b.move("return-" + tag, o, stations[m], homes[r], true);
      ActivityId drop = b.task("drop-" + tag, {b.own(o)}, 1, true);
      b.chain({go, treat, back, drop});
      options.push_back(go);
    }
    b.exactly_one(options);
  }
  return p;
}

/// 3 robot counts x 2 item counts x 4 variants.
inline std::vector<LogisticsParams> logistics_grid() {
  std::vector<LogisticsParams> out;
  for (int r : {1, 2, 3})
    for (int i : {2, 4})
      for (Door d : {Door::Open, Door::Closed})
        for (Pick k : {Pick::CorridorOnly, Pick::AllSides}) out.push_back({r, 2, i, d, k});
  return out;
}

/// 3 robot counts x 3 item counts x 4 machine counts.
inline std::vector<JspParams> jsp_grid() {
  std::vector<JspParams> out;
  for (int r : {1, 2, 3})
    for (int i : {1, 2, 3})
      for (int m : {1, 2, 4, 6}) out.push_back({r, i, m});
  return out;
}

/// The desk-scale subset used for the soundness and encoding checks.
inline std::vector<LogisticsParams> logistics_desk_grid() {
  std::vector<LogisticsParams> out;
  for (int r : {1, 2})
    for (int i : {1, 2})
      for (Door d : {Door::Open, Door::Closed})
        for (Pick k : {Pick::CorridorOnly, Pick::AllSides}) out.push_back({r, 1, i, d, k});
  return out;
}

inline std::vector<JspParams> jsp_desk_grid() {
  std::vector<JspParams> out;
  for (int r : {1, 2})
    for (int i : {1, 2})
      for (int m : {1, 2}) out.push_back({r, i, m});
  return out;
}

}  // namespace samp
