#pragma once

// Independent checker for schedules and SAMP schedules.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "samp/geometry.hpp"
#include "samp/model.hpp"

namespace samp {

struct Violation {
  enum class Kind {
    ConflictingEffects,
    DurationBounds,
    ResourceOveruse,
    TemporalConstraint,
    FluentCondition,
    ObjectOverlapInTime,
    Collision,
    DynamicInfeasible,
    Discontinuity,
  };
  Kind kind;
  std::vector<std::string> subjects;
  double time = 0.0;
  std::string detail;
};

inline const char* kind_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::ConflictingEffects: return "CONFLICTING_EFFECTS";
    case Violation::Kind::DurationBounds: return "DURATION_BOUNDS";
    case Violation::Kind::ResourceOveruse: return "RESOURCE_OVERUSE";
    case Violation::Kind::TemporalConstraint: return "TEMPORAL_CONSTRAINT";
    case Violation::Kind::FluentCondition: return "FLUENT_CONDITION";
    case Violation::Kind::ObjectOverlapInTime: return "OBJECT_OVERLAP_IN_TIME";
    case Violation::Kind::Collision: return "COLLISION";
    case Violation::Kind::DynamicInfeasible: return "DYNAMIC_INFEASIBLE";
    case Violation::Kind::Discontinuity: return "DISCONTINUITY";
  }
  return "?";
}

/// One machine-parsable line: `KIND subject[,subject...] t=<time> <detail>`.
inline std::string format_violation(const Violation& v) {
  std::string s = kind_name(v.kind);
  s += ' ';
  for (std::size_t i = 0; i < v.subjects.size(); ++i) s += (i ? "," : "") + v.subjects[i];
  if (v.subjects.empty()) s += '-';
  std::ostringstream t;
  t << v.time;
  s += " t=" + t.str();
  if (!v.detail.empty()) s += ' ' + v.detail;
  return s;
}

inline bool has_kind(const std::vector<Violation>& vs, Violation::Kind k) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.kind == k; });
}

// ---------------------------------------------------------------------------
// OS semantics

inline Tick makespan(const Schedule& s) {
  Tick m = 0;
  for (std::size_t a = 0; a < s.size(); ++a)
    if (s.present[a]) m = std::max(m, s.end[a]);
  return m;
}

inline std::vector<Violation> check_non_conflicting(const Schedule& s, const OsProblem& os) {
  std::vector<Violation> out;
  // (fluent, time) -> activities whose effects fire there
  std::map<std::pair<FluentId, Tick>, std::vector<ActivityId>> fired;
  for (ActivityId a = 0; a < os.activities.size(); ++a) {
    if (!s.present[a]) continue;
    for (const auto& e : os.activities[a].effects) fired[{e.fluent, eval_timing(e.at, s)}].push_back(a);
  }
  for (const auto& [key, acts] : fired) {
    for (std::size_t i = 0; i < acts.size(); ++i)
      for (std::size_t j = i + 1; j < acts.size(); ++j)
        out.push_back({Violation::Kind::ConflictingEffects,
                       {os.activities[acts[i]].name, os.activities[acts[j]].name},
                       static_cast<double>(key.second),
                       "fluent " + os.fluents[key.first].name});
  }
  return out;
}

/// Per-fluent value changes of a non-conflicting schedule, sorted by time.
class FluentTimeline {
 public:
  FluentTimeline(const Schedule& s, const OsProblem& os) : os_(&os), changes_(os.fluents.size()) {
    if (!check_non_conflicting(s, os).empty())
      throw std::invalid_argument("fluent timeline requires a non-conflicting schedule");
    for (ActivityId a = 0; a < os.activities.size(); ++a) {
      if (!s.present[a]) continue;
      for (const auto& e : os.activities[a].effects) {
        Tick t = eval_timing(e.at, s);
        // Time 0 always reads the initial state.
        if (t >= 1) changes_[e.fluent].push_back({t, e.value});
      }
    }
    for (auto& c : changes_) std::sort(c.begin(), c.end());
  }

  std::size_t value(FluentId f, Tick t) const {
    if (f >= changes_.size()) throw std::out_of_range("undefined fluent");
    std::size_t v = os_->fluents[f].initial;
    for (const auto& [tc, val] : changes_[f]) {
      if (tc > t) break;
      v = val;
    }
    return v;
  }

  /// True iff the fluent equals `v` at every tick of [t1, t2].
  bool holds(FluentId f, std::size_t v, Tick t1, Tick t2) const {
    if (t1 > t2) return true;
    if (value(f, t1) != v) return false;
    for (const auto& [tc, val] : changes_[f])
      if (tc > t1 && tc <= t2 && val != v) return false;
    return true;
  }

 private:
  const OsProblem* os_;
  std::vector<std::vector<std::pair<Tick, std::size_t>>> changes_;
};

inline std::size_t evaluate_fluent(const Schedule& s, const OsProblem& os, FluentId f, Tick t) {
  if (f >= os.fluents.size()) throw std::out_of_range("undefined fluent");
  return FluentTimeline(s, os).value(f, t);
}

inline std::vector<Violation> validate_schedule(const Schedule& s, const OsProblem& os) {
  std::vector<Violation> out = check_non_conflicting(s, os);
  const bool conflicting = !out.empty();
  const auto& acts = os.activities;

  for (ActivityId a = 0; a < acts.size(); ++a) {
    if (!s.present[a]) {
      if (!acts[a].optional)
        out.push_back({Violation::Kind::TemporalConstraint, {acts[a].name}, 0.0,
                       "mandatory activity absent"});
      continue;
    }
    Tick d = s.end[a] - s.start[a];
    if (s.start[a] < 0 || d < acts[a].duration_lb || d > acts[a].duration_ub)
      out.push_back({Violation::Kind::DurationBounds, {acts[a].name}, static_cast<double>(s.start[a]),
                     "duration " + std::to_string(d) + " outside [" +
                         std::to_string(acts[a].duration_lb) + "," +
                         std::to_string(acts[a].duration_ub) + "]"});
  }

  for (ResourceId r = 0; r < os.resources.size(); ++r) {
    // The load only grows at activity starts, so those are the points to check.
    std::set<Tick> points;
    for (ActivityId a = 0; a < acts.size(); ++a)
      if (s.present[a] && acts[a].usage_of(r) > 0) points.insert(s.start[a]);
    for (Tick t : points) {
      int load = 0;
      std::vector<std::string> users;
      for (ActivityId a = 0; a < acts.size(); ++a) {
        int u = acts[a].usage_of(r);
        if (s.present[a] && u > 0 && s.start[a] <= t && t <= s.end[a]) {
          load += u;
          users.push_back(acts[a].name);
        }
      }
      if (load > os.resources[r].capacity) {
        users.insert(users.begin(), os.resources[r].name);
        out.push_back({Violation::Kind::ResourceOveruse, users, static_cast<double>(t),
                       "load " + std::to_string(load) + " > " +
                           std::to_string(os.resources[r].capacity)});
        break;
      }
    }
  }

  for (std::size_t i = 0; i < os.temporal_constraints.size(); ++i)
    if (!eval_formula(os.temporal_constraints[i], s))
      out.push_back({Violation::Kind::TemporalConstraint, {"constraint#" + std::to_string(i)}, 0.0,
                     to_string(os.temporal_constraints[i], os)});

  if (!conflicting) {
    FluentTimeline tl(s, os);
    for (ActivityId a = 0; a < acts.size(); ++a) {
      if (!s.present[a]) continue;
      for (const auto& c : acts[a].conditions) {
        Tick t1 = eval_timing(c.from, s), t2 = eval_timing(c.to, s);
        if (!tl.holds(c.fluent, c.value, t1, t2))
          out.push_back({Violation::Kind::FluentCondition, {acts[a].name}, static_cast<double>(t1),
                         os.fluents[c.fluent].name + " == " +
                             os.fluents[c.fluent].domain[c.value] + " over [" +
                             std::to_string(t1) + "," + std::to_string(t2) + "]"});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SAMP semantics

inline constexpr double kContinuityTolerance = 1e-6;
inline constexpr double kDynamicTolerance = 0.01;
inline constexpr double kCollisionStep = 0.05;

namespace detail {

/// Present motion activities of object `o`, ordered by start.
inline std::vector<ActivityId> motions_of(const SampSchedule& pi, const SampProblem& p, ObjectId o) {
  std::vector<ActivityId> out;
  for (ActivityId a = 0; a < p.os.activities.size(); ++a) {
    const auto& m = p.os.activities[a].motion;
    if (m && m->object == o && pi.schedule.present[a]) out.push_back(a);
  }
  std::sort(out.begin(), out.end(), [&](ActivityId x, ActivityId y) {
    return std::pair(pi.schedule.start[x], x) < std::pair(pi.schedule.start[y], y);
  });
  return out;
}

inline Configuration final_config(const SampSchedule& pi, const SampProblem& p, ActivityId a) {
  auto it = pi.trajectories.find(a);
  if (it != pi.trajectories.end() && !it->second.empty()) return it->second.samples.back().q;
  return p.os.activities[a].motion->goal;
}

}  // namespace detail

/// Configuration of object `o` at time `t` (seconds).
inline Configuration evaluate_config(const SampSchedule& pi, const SampProblem& p, ObjectId o, double t) {
  const auto ms = detail::motions_of(pi, p, o);
  const double tick = p.tick_seconds;
  const ActivityId* last = nullptr;
  for (const auto& a : ms)
    if (static_cast<double>(pi.schedule.start[a]) * tick <= t) last = &a;
  if (!last) return p.objects[o].initial;
  ActivityId a = *last;
  if (t <= static_cast<double>(pi.schedule.end[a]) * tick) {
    auto it = pi.trajectories.find(a);
    if (it != pi.trajectories.end() && !it->second.empty()) return it->second.at(t);
    return p.os.activities[a].motion->start;
  }
  return detail::final_config(pi, p, a);
}

namespace detail {

/// Fastest segment speed of `o` whose time span meets [t0, t1]; 0 while resting.
inline double speed_in_window(const SampSchedule& pi, const std::vector<ActivityId>& ms, double t0,
                              double t1) {
  double v = 0.0;
  for (ActivityId a : ms) {
    auto it = pi.trajectories.find(a);
    if (it == pi.trajectories.end()) continue;
    const auto& smp = it->second.samples;
    if (smp.empty() || smp.back().t < t0 || smp.front().t > t1) continue;
    for (std::size_t k = 0; k + 1 < smp.size(); ++k) {
      if (smp[k + 1].t < t0 || smp[k].t > t1) continue;
      double dt = smp[k + 1].t - smp[k].t;
      if (dt <= 0) continue;
      v = std::max(v, distance(smp[k].q, smp[k + 1].q) / dt);
    }
  }
  return v;
}

}  // namespace detail

inline std::vector<Violation> validate_samp_schedule(const SampSchedule& pi, const SampProblem& p,
                                                     double collision_step = kCollisionStep) {
  using K = Violation::Kind;
  std::vector<Violation> out = validate_schedule(pi.schedule, p.os);
  const auto& acts = p.os.activities;
  const auto& sch = pi.schedule;
  const double tick = p.tick_seconds;

  for (const auto& [a, tr] : pi.trajectories)
    if (a >= acts.size() || !acts[a].motion || !sch.present[a])
      out.push_back({K::Discontinuity, {a < acts.size() ? acts[a].name : std::to_string(a)}, 0.0,
                     "trajectory attached to an activity that moves nothing"});

  // Per-activity trajectory shape, timing and dynamics.
  for (ActivityId a = 0; a < acts.size(); ++a) {
    if (!acts[a].motion || !sch.present[a]) continue;
    const auto& mc = *acts[a].motion;
    const auto& obj = p.objects[mc.object];
    auto it = pi.trajectories.find(a);
    if (it == pi.trajectories.end() || it->second.empty()) {
      out.push_back({K::Discontinuity, {acts[a].name}, sch.start[a] * tick, "missing trajectory"});
      continue;
    }
    const auto& smp = it->second.samples;
    double s0 = static_cast<double>(sch.start[a]) * tick, e0 = static_cast<double>(sch.end[a]) * tick;
    if (std::abs(smp.front().t - s0) > kContinuityTolerance || smp.back().t > e0 + kContinuityTolerance)
      out.push_back({K::Discontinuity, {acts[a].name}, smp.front().t,
                     "trajectory time span outside the scheduled window"});
    if (!same_config(smp.front().q, mc.start, kContinuityTolerance) ||
        !same_config(smp.back().q, mc.goal, kContinuityTolerance))
      out.push_back({K::Discontinuity, {acts[a].name}, smp.front().t,
                     "trajectory does not join its start and goal configurations"});
    bool monotone = true;
    for (std::size_t k = 0; k + 1 < smp.size(); ++k)
      if (!(smp[k + 1].t > smp[k].t)) monotone = false;
    if (!monotone) {
      out.push_back({K::Discontinuity, {acts[a].name}, smp.front().t, "sample times not increasing"});
      continue;
    }
    const double vmax = obj.control.max_speed * (1 + kDynamicTolerance) + 1e-9;
    const double amax = obj.control.max_accel * (1 + kDynamicTolerance) + 1e-9;
    double prev_v_x = 0, prev_v_y = 0, prev_dt = 0;
    for (std::size_t k = 0; k + 1 < smp.size(); ++k) {
      double dt = smp[k + 1].t - smp[k].t;
      double vx = (smp[k + 1].q.x - smp[k].q.x) / dt, vy = (smp[k + 1].q.y - smp[k].q.y) / dt;
      if (std::hypot(vx, vy) > vmax) {
        out.push_back({K::DynamicInfeasible, {acts[a].name}, smp[k].t,
                       "speed " + std::to_string(std::hypot(vx, vy)) + " exceeds bound"});
        break;
      }
      if (k > 0) {
        double acc = std::hypot(vx - prev_v_x, vy - prev_v_y) / ((dt + prev_dt) / 2);
        if (acc > amax) {
          out.push_back({K::DynamicInfeasible, {acts[a].name}, smp[k].t,
                         "acceleration " + std::to_string(acc) + " exceeds bound"});
          break;
        }
      }
      prev_v_x = vx, prev_v_y = vy, prev_dt = dt;
    }
  }

  // Per-object chains.
  for (ObjectId o = 0; o < p.objects.size(); ++o) {
    const auto ms = detail::motions_of(pi, p, o);
    Configuration cur = p.objects[o].initial;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      ActivityId a = ms[i];
      if (i > 0 && sch.start[a] <= sch.end[ms[i - 1]])
        out.push_back({K::ObjectOverlapInTime, {acts[ms[i - 1]].name, acts[a].name},
                       sch.start[a] * tick, "object " + p.objects[o].name});
      auto it = pi.trajectories.find(a);
      Configuration first = (it != pi.trajectories.end() && !it->second.empty())
                                ? it->second.samples.front().q
                                : acts[a].motion->start;
      if (!same_config(first, cur, kContinuityTolerance))
        out.push_back({K::Discontinuity, {p.objects[o].name, acts[a].name}, sch.start[a] * tick,
                       "starts " + std::to_string(distance(first, cur)) +
                           " m away from the previous configuration"});
      cur = detail::final_config(pi, p, a);
    }
  }

  // Collisions by conservative time sampling.
  Tick horizon_end = 0;
  for (ActivityId a = 0; a < acts.size(); ++a)
    if (sch.present[a] && acts[a].motion) horizon_end = std::max(horizon_end, sch.end[a]);
  const double t_end = static_cast<double>(horizon_end) * tick;
  const auto obstacles = obstacle_polygons(p.workspace);
  const std::size_t n_obj = p.objects.size();
  std::vector<std::vector<ActivityId>> motions(n_obj);
  for (ObjectId o = 0; o < n_obj; ++o) motions[o] = detail::motions_of(pi, p, o);
  std::set<std::pair<std::size_t, std::size_t>> reported;  // object pairs / object-obstacle pairs
  const double h = collision_step;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / h));
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = std::min(t_end, static_cast<double>(k) * h);
    std::vector<Footprint> fp(n_obj);
    std::vector<double> sweep(n_obj);
    for (ObjectId o = 0; o < n_obj; ++o) {
      fp[o] = occ(p.objects[o], evaluate_config(pi, p, o, t));
      sweep[o] = detail::speed_in_window(pi, motions[o], t - h / 2, t + h / 2) * h / 2;
    }
    for (ObjectId o = 0; o < n_obj; ++o) {
      for (std::size_t j = 0; j < obstacles.size(); ++j) {
        if (reported.count({o, n_obj + j})) continue;
        const Footprint ob = obstacles[j];
        if (collides(fp[o], ob) || (sweep[o] > 0 && clearance(fp[o], ob) < sweep[o])) {
          reported.insert({o, n_obj + j});
          out.push_back({K::Collision, {p.objects[o].name, "obstacle#" + std::to_string(j)}, t, ""});
        }
      }
      if (!reported.count({o, o}) && bounds_clearance(fp[o], p.workspace) < sweep[o] - 1e-12) {
        reported.insert({o, o});
        out.push_back({K::Collision, {p.objects[o].name, "workspace-bounds"}, t, ""});
      }
      for (ObjectId q = o + 1; q < n_obj; ++q) {
        if (reported.count({o, q})) continue;
        double infl = sweep[o] + sweep[q];
        if (collides(fp[o], fp[q]) || (infl > 0 && clearance(fp[o], fp[q]) < infl)) {
          reported.insert({o, q});
          out.push_back({K::Collision, {p.objects[o].name, p.objects[q].name}, t, ""});
        }
      }
    }
  }
  return out;
}

}  // namespace samp
