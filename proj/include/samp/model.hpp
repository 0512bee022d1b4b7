#pragma once

// Problem and solution data types shared by every module.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace samp {

using Tick = std::int64_t;
using ActivityId = std::size_t;
using ObjectId = std::size_t;
using FluentId = std::size_t;
using ResourceId = std::size_t;

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Configuration {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

inline double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0) a += two_pi;
  return a - std::numbers::pi;
}

inline constexpr double kConfigTolerance = 1e-6;

inline bool same_config(const Configuration& a, const Configuration& b,
                        double tol = kConfigTolerance) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(normalize_angle(a.heading - b.heading)) <= tol;
}

inline double distance(const Configuration& a, const Configuration& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Stable symbolic name of a configuration, used as a fluent value.
inline std::string config_name(const Configuration& q) {
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << (std::abs(v) < 5e-7 ? 0.0 : v);
    std::string s = os.str();
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  return "q(" + fmt(q.x) + "," + fmt(q.y) + "," + fmt(normalize_angle(q.heading)) + ")";
}

// ---------------------------------------------------------------------------
// Timing expressions and temporal formulas

enum class Anchor { Start, End, Origin };

/// `activity.start + offset`, `activity.end - offset`, or the constant `offset`.
struct TimingExpr {
  ActivityId activity = kNone;
  Anchor anchor = Anchor::Start;
  Tick offset = 0;

  static TimingExpr start(ActivityId a, Tick k = 0) { return {a, Anchor::Start, k}; }
  static TimingExpr end(ActivityId a, Tick k = 0) { return {a, Anchor::End, k}; }
  static TimingExpr origin(Tick k = 0) { return {kNone, Anchor::Origin, k}; }

  friend bool operator==(const TimingExpr&, const TimingExpr&) = default;
};

/// Boolean combination of presence and difference atoms.
///
/// A `Diff` atom holds iff `value(lhs) - value(rhs) <= bound`.
struct Formula {
  enum class Kind { True, False, Present, Diff, Not, And, Or, Implies };

  Kind kind = Kind::True;
  ActivityId activity = kNone;  // Present
  TimingExpr lhs, rhs;          // Diff
  Tick bound = 0;               // Diff
  std::vector<Formula> children;

  static Formula constant(bool v) {
    Formula f;
    f.kind = v ? Kind::True : Kind::False;
    return f;
  }
  static Formula present(ActivityId a) {
    Formula f;
    f.kind = Kind::Present;
    f.activity = a;
    return f;
  }
  static Formula diff(TimingExpr l, TimingExpr r, Tick b) {
    Formula f;
    f.kind = Kind::Diff;
    f.lhs = l;
    f.rhs = r;
    f.bound = b;
    return f;
  }
  /// `l < r`
  static Formula before(TimingExpr l, TimingExpr r) { return diff(l, r, -1); }
  /// `l <= r`
  static Formula not_after(TimingExpr l, TimingExpr r) { return diff(l, r, 0); }
  /// `l - r >= b`
  static Formula at_least(TimingExpr l, TimingExpr r, Tick b) {
    return negate(diff(l, r, b - 1));
  }
  static Formula equal(TimingExpr l, TimingExpr r) {
    return all({diff(l, r, 0), diff(r, l, 0)});
  }
  static Formula negate(Formula g) {
    if (g.kind == Kind::True) return constant(false);
    if (g.kind == Kind::False) return constant(true);
    if (g.kind == Kind::Not) return std::move(g.children.front());
    Formula f;
    f.kind = Kind::Not;
    f.children.push_back(std::move(g));
    return f;
  }
  static Formula all(std::vector<Formula> cs) {
    std::vector<Formula> kept;
    for (auto& c : cs) {
      if (c.kind == Kind::False) return constant(false);
      if (c.kind != Kind::True) kept.push_back(std::move(c));
    }
    if (kept.empty()) return constant(true);
    if (kept.size() == 1) return std::move(kept.front());
    Formula f;
    f.kind = Kind::And;
    f.children = std::move(kept);
    return f;
  }
  static Formula any(std::vector<Formula> cs) {
    std::vector<Formula> kept;
    for (auto& c : cs) {
      if (c.kind == Kind::True) return constant(true);
      if (c.kind != Kind::False) kept.push_back(std::move(c));
    }
    if (kept.empty()) return constant(false);
    if (kept.size() == 1) return std::move(kept.front());
    Formula f;
    f.kind = Kind::Or;
    f.children = std::move(kept);
    return f;
  }
  static Formula implies(Formula a, Formula b) {
    if (a.kind == Kind::False || b.kind == Kind::True) return constant(true);
    if (a.kind == Kind::True) return b;
    Formula f;
    f.kind = Kind::Implies;
    f.children.push_back(std::move(a));
    f.children.push_back(std::move(b));
    return f;
  }

  friend bool operator==(const Formula&, const Formula&) = default;
};

using TemporalConstraint = Formula;

// ---------------------------------------------------------------------------
// OS problem

struct FluentDef {
  std::string name;
  std::vector<std::string> domain;
  std::size_t initial = 0;  // index into domain

  std::size_t value_index(const std::string& v) const {
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (domain[i] == v) return i;
    return kNone;
  }
};

struct ResourceDef {
  std::string name;
  int capacity = 1;
};

/// Condition `fluent == value` over `[from, to]`, both anchored on the owning activity.
struct FluentCondition {
  TimingExpr from, to;
  FluentId fluent = 0;
  std::size_t value = 0;
};

/// Effect `fluent := value` at `at`, anchored on the owning activity.
struct FluentEffect {
  TimingExpr at;
  FluentId fluent = 0;
  std::size_t value = 0;
};

struct MotionConstraint {
  ObjectId object = 0;
  Configuration start, goal;
};

struct Activity {
  std::string name;
  bool optional = false;
  Tick duration_lb = 1;
  Tick duration_ub = 1;
  std::vector<std::pair<ResourceId, int>> resource_usage;
  std::vector<FluentCondition> conditions;
  std::vector<FluentEffect> effects;
  std::optional<MotionConstraint> motion;

  int usage_of(ResourceId r) const {
    for (const auto& [res, units] : resource_usage)
      if (res == r) return units;
    return 0;
  }
};

struct OsProblem {
  std::vector<FluentDef> fluents;
  std::vector<Activity> activities;
  std::vector<ResourceDef> resources;
  std::vector<TemporalConstraint> temporal_constraints;
  bool use_fluents = true;

  ActivityId activity_index(const std::string& n) const {
    for (std::size_t i = 0; i < activities.size(); ++i)
      if (activities[i].name == n) return i;
    return kNone;
  }
  ResourceId resource_index(const std::string& n) const {
    for (std::size_t i = 0; i < resources.size(); ++i)
      if (resources[i].name == n) return i;
    return kNone;
  }
  FluentId fluent_index(const std::string& n) const {
    for (std::size_t i = 0; i < fluents.size(); ++i)
      if (fluents[i].name == n) return i;
    return kNone;
  }
};

// ---------------------------------------------------------------------------
// SAMP problem

struct Disk {
  double radius = 0.3;
  friend bool operator==(const Disk&, const Disk&) = default;
};
struct Rectangle {
  double width = 1.0;
  double height = 1.0;
  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};
using GeometryModel = std::variant<Disk, Rectangle>;

struct ControlModel {
  double max_speed = 1.0;
  double max_accel = 1.0;
  std::string model_id = "holonomic";
  friend bool operator==(const ControlModel&, const ControlModel&) = default;
};

struct MovableObject {
  std::string name;
  GeometryModel geometry = Disk{};
  ControlModel control;
  Configuration initial;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};
using Polygon = std::vector<Vec2>;

struct Workspace {
  Vec2 min{0.0, 0.0};
  Vec2 max{10.0, 10.0};
  std::vector<Polygon> obstacles;
};

struct SampProblem {
  std::string name;
  OsProblem os;
  std::vector<MovableObject> objects;
  Workspace workspace;
  double tick_seconds = 1.0;
  std::map<std::string, std::string> metadata;

  ObjectId object_index(const std::string& n) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].name == n) return i;
    return kNone;
  }
};

// ---------------------------------------------------------------------------
// Solutions

struct Schedule {
  std::vector<bool> present;
  std::vector<Tick> start;
  std::vector<Tick> end;

  Schedule() = default;
  explicit Schedule(std::size_t n) : present(n, false), start(n, 0), end(n, 0) {}
  std::size_t size() const { return present.size(); }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct TrajectorySample {
  double t = 0.0;  // seconds
  Configuration q;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  bool empty() const { return samples.empty(); }
  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }

  /// Linear interpolation, clamped to the first/last sample.
  Configuration at(double t) const {
    if (samples.empty()) return {};
    if (t <= samples.front().t) return samples.front().q;
    if (t >= samples.back().t) return samples.back().q;
    std::size_t lo = 0, hi = samples.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (samples[mid].t <= t ? lo : hi) = mid;
    }
    const auto& a = samples[lo];
    const auto& b = samples[hi];
    double w = (t - a.t) / (b.t - a.t);
    return {a.q.x + w * (b.q.x - a.q.x), a.q.y + w * (b.q.y - a.q.y),
            a.q.heading + w * normalize_angle(b.q.heading - a.q.heading)};
  }
};

struct SampSchedule {
  Schedule schedule;
  std::map<ActivityId, Trajectory> trajectories;
};

// ---------------------------------------------------------------------------
// Evaluation helpers

inline Tick eval_timing(const TimingExpr& k, const Schedule& s) {
  switch (k.anchor) {
    case Anchor::Start: return s.start[k.activity] + k.offset;
    case Anchor::End: return s.end[k.activity] - k.offset;
    case Anchor::Origin: return k.offset;
  }
  return 0;
}

inline bool eval_formula(const Formula& f, const Schedule& s) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True: return true;
    case K::False: return false;
    case K::Present: return s.present[f.activity];
    case K::Diff: return eval_timing(f.lhs, s) - eval_timing(f.rhs, s) <= f.bound;
    case K::Not: return !eval_formula(f.children[0], s);
    case K::And:
      for (const auto& c : f.children)
        if (!eval_formula(c, s)) return false;
      return true;
    case K::Or:
      for (const auto& c : f.children)
        if (eval_formula(c, s)) return true;
      return false;
    case K::Implies:
      return !eval_formula(f.children[0], s) || eval_formula(f.children[1], s);
  }
  return false;
}

inline void collect_activities(const Formula& f, std::set<ActivityId>& out) {
  if (f.kind == Formula::Kind::Present) out.insert(f.activity);
  if (f.kind == Formula::Kind::Diff) {
    if (f.lhs.anchor != Anchor::Origin) out.insert(f.lhs.activity);
    if (f.rhs.anchor != Anchor::Origin) out.insert(f.rhs.activity);
  }
  for (const auto& c : f.children) collect_activities(c, out);
}

inline std::string to_string(const TimingExpr& k, const OsProblem& os) {
  if (k.anchor == Anchor::Origin) return std::to_string(k.offset);
  std::string s = os.activities[k.activity].name +
                  (k.anchor == Anchor::Start ? ".start" : ".end");
  if (k.offset != 0) s += (k.anchor == Anchor::Start ? "+" : "-") + std::to_string(k.offset);
  return s;
}

inline std::string to_string(const Formula& f, const OsProblem& os) {
  using K = Formula::Kind;
  auto join = [&](const char* op) {
    std::string s = "(";
    for (std::size_t i = 0; i < f.children.size(); ++i) {
      if (i) s += op;
      s += to_string(f.children[i], os);
    }
    return s + ")";
  };
  switch (f.kind) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Present: return os.activities[f.activity].name + ".present";
    case K::Diff:
      return to_string(f.lhs, os) + " - " + to_string(f.rhs, os) + " <= " +
             std::to_string(f.bound);
    case K::Not: return "!" + to_string(f.children[0], os);
    case K::And: return join(" & ");
    case K::Or: return join(" | ");
    case K::Implies: return join(" -> ");
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Problem-level operations

/// Sum of duration upper bounds.
inline Tick horizon(const OsProblem& os) {
  Tick h = 0;
  for (const auto& a : os.activities) h += a.duration_ub;
  return h;
}

/// Upper bound on every schedule variable searched by the schedulers.
/// Closed resource intervals force a one-tick gap between sequenced activities
/// and writes at tick 0 are lost, so a fully sequential plan needs one spare
/// tick per activity on top of horizon().
inline Tick schedule_bound(const OsProblem& os) {
  return horizon(os) + static_cast<Tick>(os.activities.size());
}

/// The finite set of configurations named by motion constraints.
inline std::vector<Configuration> relevant_configurations(const SampProblem& p) {
  std::vector<Configuration> out;
  auto add = [&](const Configuration& q) {
    for (const auto& e : out)
      if (same_config(e, q)) return;
    out.push_back(q);
  };
  for (const auto& a : p.os.activities) {
    if (!a.motion) continue;
    add(a.motion->start);
    add(a.motion->goal);
  }
  return out;
}

/// Configurations relevant to one object: its initial one plus its motion endpoints.
inline std::vector<Configuration> object_configurations(const SampProblem& p, ObjectId o) {
  std::vector<Configuration> out{p.objects[o].initial};
  auto add = [&](const Configuration& q) {
    for (const auto& e : out)
      if (same_config(e, q)) return;
    out.push_back(q);
  };
  for (const auto& a : p.os.activities) {
    if (!a.motion || a.motion->object != o) continue;
    add(a.motion->start);
    add(a.motion->goal);
  }
  return out;
}

namespace detail {

inline bool finite(const Configuration& q) {
  return std::isfinite(q.x) && std::isfinite(q.y) && std::isfinite(q.heading);
}

inline void check_formula(const Formula& f, const OsProblem& os, const std::string& where,
                          std::vector<std::string>& errors) {
  using K = Formula::Kind;
  auto check_expr = [&](const TimingExpr& k) {
    if (k.anchor != Anchor::Origin && k.activity >= os.activities.size())
      errors.push_back(where + ": timing expression references an unknown activity");
  };
  if (f.kind == K::Present && f.activity >= os.activities.size())
    errors.push_back(where + ": presence atom references an unknown activity");
  if (f.kind == K::Diff) {
    check_expr(f.lhs);
    check_expr(f.rhs);
  }
  if ((f.kind == K::Not && f.children.size() != 1) ||
      (f.kind == K::Implies && f.children.size() != 2))
    errors.push_back(where + ": malformed formula node");
  for (const auto& c : f.children) check_formula(c, os, where, errors);
}

}  // namespace detail

/// Structural validation; an empty result means every data-model invariant holds.
inline std::vector<std::string> validate_problem(const SampProblem& p) {
  std::vector<std::string> errors;
  const OsProblem& os = p.os;

  if (!(p.tick_seconds > 0.0)) errors.push_back("tick_seconds must be positive");
  if (!(p.workspace.min.x < p.workspace.max.x && p.workspace.min.y < p.workspace.max.y))
    errors.push_back("workspace bounds are degenerate");
  for (std::size_t i = 0; i < p.workspace.obstacles.size(); ++i) {
    const auto& poly = p.workspace.obstacles[i];
    if (poly.size() < 3) errors.push_back("obstacle #" + std::to_string(i) + ": fewer than 3 vertices");
    for (const auto& v : poly)
      if (v.x < p.workspace.min.x - 1e-9 || v.x > p.workspace.max.x + 1e-9 ||
          v.y < p.workspace.min.y - 1e-9 || v.y > p.workspace.max.y + 1e-9) {
        errors.push_back("obstacle #" + std::to_string(i) + ": vertex outside workspace bounds");
        break;
      }
  }

  std::set<std::string> fluent_names;
  for (const auto& f : os.fluents) {
    if (!fluent_names.insert(f.name).second) errors.push_back("fluent '" + f.name + "': duplicate name");
    if (f.domain.empty()) errors.push_back("fluent '" + f.name + "': empty domain");
    else if (f.initial >= f.domain.size())
      errors.push_back("fluent '" + f.name + "': initial value not in domain");
  }
  if (!os.use_fluents && !os.fluents.empty())
    errors.push_back("fluent-free problem declares fluents");

  std::set<std::string> resource_names;
  for (const auto& r : os.resources) {
    if (!resource_names.insert(r.name).second)
      errors.push_back("resource '" + r.name + "': duplicate name");
    if (r.capacity < 1) errors.push_back("resource '" + r.name + "': capacity must be >= 1");
  }

  std::set<std::string> object_names;
  for (const auto& o : p.objects) {
    if (!object_names.insert(o.name).second) errors.push_back("object '" + o.name + "': duplicate name");
    ResourceId r = os.resource_index(o.name);
    if (r == kNone) errors.push_back("object '" + o.name + "': not registered as a resource");
    else if (os.resources[r].capacity != 1)
      errors.push_back("object '" + o.name + "': resource capacity must be 1");
    bool ok_geom = std::visit(
        [](const auto& g) {
          if constexpr (std::is_same_v<std::decay_t<decltype(g)>, Disk>) return g.radius > 0;
          else return g.width > 0 && g.height > 0;
        },
        o.geometry);
    if (!ok_geom) errors.push_back("object '" + o.name + "': geometry dimensions must be positive");
    if (!(o.control.max_speed > 0 && o.control.max_accel > 0))
      errors.push_back("object '" + o.name + "': control bounds must be positive");
    if (!detail::finite(o.initial)) errors.push_back("object '" + o.name + "': non-finite initial configuration");
  }

  auto in_bounds = [&](const Configuration& q) {
    return detail::finite(q) && q.x >= p.workspace.min.x && q.x <= p.workspace.max.x &&
           q.y >= p.workspace.min.y && q.y <= p.workspace.max.y;
  };

  std::set<std::string> activity_names;
  for (std::size_t i = 0; i < os.activities.size(); ++i) {
    const Activity& a = os.activities[i];
    const std::string where = "activity '" + a.name + "'";
    if (!activity_names.insert(a.name).second) errors.push_back(where + ": duplicate name");
    if (a.duration_lb < 1) errors.push_back(where + ": duration_lb must be >= 1");
    if (a.duration_lb > a.duration_ub) errors.push_back(where + ": duration_lb > duration_ub");
    for (const auto& [r, units] : a.resource_usage) {
      if (r >= os.resources.size()) errors.push_back(where + ": unknown resource");
      if (units < 0) errors.push_back(where + ": negative resource usage");
    }
    for (const auto& c : a.conditions) {
      if (c.fluent >= os.fluents.size() || c.value >= os.fluents[c.fluent].domain.size())
        errors.push_back(where + ": condition on unknown fluent or value");
      if (c.from.offset < 0 || c.to.offset < 0) errors.push_back(where + ": negative timing offset");
      if (c.from.activity != i || c.to.activity != i)
        errors.push_back(where + ": condition not anchored on its activity");
    }
    for (const auto& e : a.effects) {
      if (e.fluent >= os.fluents.size() || e.value >= os.fluents[e.fluent].domain.size())
        errors.push_back(where + ": effect on unknown fluent or value");
      if (e.at.offset < 0) errors.push_back(where + ": negative timing offset");
      if (e.at.activity != i) errors.push_back(where + ": effect not anchored on its activity");
    }
    if (a.motion) {
      if (a.motion->object >= p.objects.size()) {
        errors.push_back(where + ": motion constraint on undeclared object");
      } else {
        const auto& obj = p.objects[a.motion->object];
        ResourceId r = os.resource_index(obj.name);
        if (r != kNone && a.usage_of(r) != 1)
          errors.push_back(where + ": motion activity must use one unit of '" + obj.name + "'");
        if (!in_bounds(a.motion->start) || !in_bounds(a.motion->goal))
          errors.push_back(where + ": motion configuration outside workspace bounds");
      }
    }
  }
  for (std::size_t i = 0; i < os.temporal_constraints.size(); ++i)
    detail::check_formula(os.temporal_constraints[i], os, "constraint #" + std::to_string(i), errors);
  return errors;
}

}  // namespace samp
