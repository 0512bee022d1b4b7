#pragma once

// Motion groups, refinement constraints, configuration-continuity encodings and
// the trajectory cache.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "samp/motion.hpp"
#include "samp/model.hpp"

namespace samp {

// ---------------------------------------------------------------------------
// Parallel motion groups

struct MotionGroup {
  std::vector<ActivityId> activities;  // ascending start, then id
  Tick s_min = 0;
};

inline bool overlaps(const Schedule& s, ActivityId a, ActivityId b) {
  return s.start[a] <= s.end[b] && s.start[b] <= s.end[a];
}

/// Present motion activities split into overlap-connected components, ordered by s_min.
inline std::vector<MotionGroup> compute_groups(const Schedule& s, const SampProblem& p) {
  std::vector<ActivityId> moving;
  for (ActivityId a = 0; a < p.os.activities.size(); ++a)
    if (p.os.activities[a].motion && a < s.size() && s.present[a]) moving.push_back(a);
  std::sort(moving.begin(), moving.end(),
            [&](ActivityId a, ActivityId b) { return std::tie(s.start[a], a) < std::tie(s.start[b], b); });
  // Sweep in start order: a new component begins when nothing so far reaches the next start.
  std::vector<MotionGroup> out;
  Tick reach = -1;
  for (ActivityId a : moving) {
    if (out.empty() || s.start[a] > reach) {
      out.push_back({{}, s.start[a]});
      reach = s.end[a];
    }
    out.back().activities.push_back(a);
    reach = std::max(reach, s.end[a]);
  }
  return out;
}

inline std::set<ObjectId> moved_objects(const std::vector<ActivityId>& g, const SampProblem& p) {
  std::set<ObjectId> out;
  for (ActivityId a : g) out.insert(p.os.activities[a].motion->object);
  return out;
}

/// Guard shared by every refinement of group `g`: its members are present, each
/// object's first move in the group precedes its later ones, and no other motion
/// activity overlaps the group.
inline Formula rcond(const std::vector<ActivityId>& g, const Schedule& rho, const SampProblem& p) {
  std::vector<Formula> conj;
  std::set<ActivityId> in(g.begin(), g.end());
  for (ActivityId a : g) conj.push_back(Formula::present(a));
  std::map<ObjectId, std::vector<ActivityId>> per_object;
  for (ActivityId a : g) per_object[p.os.activities[a].motion->object].push_back(a);
  for (auto& [o, acts] : per_object) {
    ActivityId first = *std::min_element(acts.begin(), acts.end(), [&](ActivityId a, ActivityId b) {
      return std::tie(rho.start[a], a) < std::tie(rho.start[b], b);
    });
    for (ActivityId a : acts)
      if (a != first) conj.push_back(Formula::not_after(TimingExpr::end(first), TimingExpr::start(a)));
  }
  for (ActivityId r = 0; r < p.os.activities.size(); ++r) {
    if (!p.os.activities[r].motion || in.count(r)) continue;
    std::vector<Formula> before, after;
    for (ActivityId a : g) {
      before.push_back(Formula::before(TimingExpr::end(r), TimingExpr::start(a)));
      after.push_back(Formula::before(TimingExpr::end(a), TimingExpr::start(r)));
    }
    conj.push_back(Formula::implies(Formula::present(r),
                                    Formula::any({Formula::all(std::move(before)), Formula::all(std::move(after))})));
  }
  return Formula::all(std::move(conj));
}

// ---------------------------------------------------------------------------
// Configuration change

/// Configuration of `o` at tick `t` implied by the motion chain of schedule `s`.
inline Configuration scheduled_config(const Schedule& s, const SampProblem& p, ObjectId o, Tick t) {
  Configuration q = p.objects[o].initial;
  Tick best = 0;
  for (ActivityId a = 0; a < p.os.activities.size() && a < s.size(); ++a) {
    const auto& m = p.os.activities[a].motion;
    if (!m || m->object != o || !s.present[a]) continue;
    if (s.end[a] > best && s.end[a] <= t) best = s.end[a], q = m->goal;
  }
  return q;
}

/// Fluent-free ChConf: `o` has been moved away from `blocked` by some helper before
/// `b` starts and no deleter puts it back before `b` ends.
inline Formula chconf_fluent_free(ActivityId b, ObjectId o, const Configuration& blocked, const SampProblem& p) {
  std::vector<ActivityId> helpers, deleters;
  for (ActivityId a = 0; a < p.os.activities.size(); ++a) {
    const auto& m = p.os.activities[a].motion;
    if (!m || m->object != o) continue;
    (same_config(m->goal, blocked) ? deleters : helpers).push_back(a);
  }
  auto start_b = TimingExpr::start(b), end_b = TimingExpr::end(b);
  std::vector<Formula> options;
  if (!same_config(blocked, p.objects[o].initial)) {
    std::vector<Formula> del;
    for (ActivityId x : deleters)
      del.push_back(Formula::implies(Formula::present(x), Formula::before(end_b, TimingExpr::start(x))));
    options.push_back(Formula::all(std::move(del)));
  }
  for (ActivityId h : helpers) {
    std::vector<Formula> conj{Formula::present(h), Formula::before(TimingExpr::end(h), start_b)};
    for (ActivityId x : deleters)
      conj.push_back(Formula::implies(
          Formula::present(x), Formula::any({Formula::before(TimingExpr::end(x), TimingExpr::start(h)),
                                             Formula::before(end_b, TimingExpr::start(x))})));
    options.push_back(Formula::all(std::move(conj)));
  }
  return Formula::any(std::move(options));
}

// ---------------------------------------------------------------------------
// Refinements

enum class RefinementKind { Geometric, Temporal };
enum class Layer { Single, Group };

inline const char* kind_name(RefinementKind k) { return k == RefinementKind::Geometric ? "GEOMETRIC" : "TEMPORAL"; }
inline const char* layer_name(Layer l) { return l == Layer::Single ? "single" : "group"; }

/// `b` may only run while `object` is away from `blocked`.
struct ChConfTerm {
  ActivityId activity = 0;
  ObjectId object = 0;
  Configuration blocked;
};

/// guard -> (ChConf terms ∨ timing literals)
struct Refinement {
  RefinementKind kind = RefinementKind::Geometric;
  Layer layer = Layer::Group;
  std::vector<ActivityId> group;
  Formula guard;
  std::vector<ChConfTerm> chconf;
  std::vector<Formula> timing;
  bool generalized = false;  // emitted for an equivalent activity, not the candidate's own group
};

/// Truth of the refinement under a schedule of the original activities. In fluent
/// mode ChConf is read from the motion chain; otherwise the compiled formula is used.
inline bool holds(const ChConfTerm& c, const Schedule& s, const SampProblem& p) {
  if (!p.os.use_fluents) return eval_formula(chconf_fluent_free(c.activity, c.object, c.blocked, p), s);
  for (Tick t = s.start[c.activity]; t <= s.end[c.activity]; ++t)
    if (same_config(scheduled_config(s, p, c.object, t), c.blocked)) return false;
  return true;
}

inline bool holds(const Refinement& r, const Schedule& s, const SampProblem& p) {
  if (!eval_formula(r.guard, s)) return true;
  for (const auto& f : r.timing)
    if (eval_formula(f, s)) return true;
  for (const auto& c : r.chconf)
    if (holds(c, s, p)) return true;
  return false;
}

inline std::string describe(const Refinement& r, const SampProblem& p) {
  std::ostringstream os;
  os << kind_name(r.kind) << ' ' << layer_name(r.layer) << " [";
  for (std::size_t i = 0; i < r.group.size(); ++i) os << (i ? "," : "") << p.os.activities[r.group[i]].name;
  os << "]";
  if (r.generalized) os << " generalized";
  os << " ->";
  bool first = true;
  for (const auto& c : r.chconf) {
    os << (first ? " " : " | ") << "chconf(" << p.os.activities[c.activity].name << ','
       << p.objects[c.object].name << ',' << config_name(c.blocked) << ')';
    first = false;
  }
  for (const auto& f : r.timing) {
    os << (first ? " " : " | ") << to_string(f, p.os);
    first = false;
  }
  if (first) os << " false";
  return os.str();
}

/// Geometric refinement for a failed path of the activities in `report`.
/// Throws when no activity names a blocking object.
inline Refinement geometric_refinement(const std::vector<ActivityId>& g, Formula guard, const ConflictReport& report,
                                       const std::map<ObjectId, Configuration>& conf, const SampProblem& p,
                                       Layer layer) {
  bool any = false;
  for (const auto& [a, w] : report.omega) any |= !w.empty();
  if (!any) throw std::invalid_argument("geometric refinement needs at least one blocking object");
  Refinement r;
  r.kind = RefinementKind::Geometric;
  r.layer = layer;
  r.group = g;
  r.guard = std::move(guard);
  const auto moved = moved_objects(g, p);
  for (const auto& [b, w] : report.omega)
    for (ObjectId o : w)
      if (!moved.count(o)) r.chconf.push_back({b, o, conf.at(o)});
  return r;
}

/// The group can never run as scheduled: guard -> false.
inline Refinement exclusion_refinement(const std::vector<ActivityId>& g, Formula guard, Layer layer) {
  Refinement r;
  r.kind = RefinementKind::Geometric;
  r.layer = layer;
  r.group = g;
  r.guard = std::move(guard);
  return r;
}

/// The order of the starts of `g` (ties included) as in `rho`.
inline Formula same_start_order(const std::vector<ActivityId>& g, const Schedule& rho) {
  std::vector<Formula> conj;
  for (ActivityId a : g)
    for (ActivityId b : g) {
      if (a >= b) continue;
      const auto sa = TimingExpr::start(a), sb = TimingExpr::start(b);
      if (rho.start[a] < rho.start[b]) conj.push_back(Formula::before(sa, sb));
      else if (rho.start[b] < rho.start[a]) conj.push_back(Formula::before(sb, sa));
      else conj.push_back(Formula::equal(sa, sb));
    }
  return Formula::all(std::move(conj));
}

/// Objects equivalent for planning: same shape and the same control model.
inline bool equivalent_objects(const MovableObject& a, const MovableObject& b) {
  return a.geometry == b.geometry && a.control == b.control;
}

/// Copies of a singleton geometric refinement for every equivalent activity whose
/// start the failed tree reached and whose goal it could not.
inline std::vector<Refinement> generalize(const Refinement& r, const PathResult& path, const Schedule& rho,
                                          const SampProblem& p) {
  std::vector<Refinement> out;
  if (r.group.size() != 1) return out;
  const ActivityId a = r.group.front();
  const ObjectId mover = p.os.activities[a].motion->object;
  auto listed = [](const std::vector<Configuration>& qs, const Configuration& q) {
    return std::any_of(qs.begin(), qs.end(), [&](const Configuration& c) { return same_config(c, q); });
  };
  for (ActivityId b = 0; b < p.os.activities.size(); ++b) {
    const auto& m = p.os.activities[b].motion;
    if (b == a || !m) continue;
    if (!equivalent_objects(p.objects[m->object], p.objects[mover])) continue;
    const bool start_reached = same_config(m->start, p.os.activities[a].motion->start) || listed(path.reachable, m->start);
    if (!start_reached || !listed(path.unreachable, m->goal)) continue;
    Refinement c;
    c.kind = r.kind;
    c.layer = r.layer;
    c.group = {b};
    c.guard = rcond({b}, rho, p);
    c.generalized = true;
    bool self_blocked = false;
    for (const auto& t : r.chconf) {
      if (t.object == m->object) self_blocked = true;
      c.chconf.push_back({b, t.object, t.blocked});
    }
    if (!self_blocked) out.push_back(std::move(c));
  }
  return out;
}

/// Whether `o` at `q` can matter for a motion from `s` to `g` of length at most
/// `reach` by an object of bounding radius `r` (ellipse test, conservative).
inline bool may_obstruct(const SampProblem& p, ObjectId o, const Configuration& q, const Configuration& s,
                         const Configuration& g, double reach, double r, double margin) {
  const double rho = bounding_radius(p.objects[o].geometry) + r + margin;
  const double via = std::hypot(q.x - s.x, q.y - s.y) + std::hypot(q.x - g.x, q.y - g.y);
  return via - 2 * rho <= reach;
}

/// Temporal refinement for group `g` where the planner achieved `arrival[a]`
/// (seconds after the group start) for the planned prefix `planned`.
inline Refinement temporal_refinement(const std::vector<ActivityId>& g, Formula guard,
                                      const std::vector<ActivityId>& planned,
                                      const std::map<ActivityId, double>& arrival, const Schedule& rho,
                                      const std::map<ObjectId, Configuration>& conf, const SampProblem& p,
                                      Layer layer, const PlannerConfig& cfg) {
  Refinement r;
  r.kind = RefinementKind::Temporal;
  r.layer = layer;
  r.group = g;
  r.guard = std::move(guard);
  if (layer == Layer::Group && g.size() > 1) {
    // The planner only saw the members running together; once one of them is
    // disjoint from all the others the group is a different one.
    std::vector<Formula> conj{r.guard};
    for (ActivityId a : g) {
      std::vector<Formula> any;
      for (ActivityId b : g)
        if (b != a)
          any.push_back(Formula::all({Formula::not_after(TimingExpr::start(a), TimingExpr::end(b)),
                                      Formula::not_after(TimingExpr::start(b), TimingExpr::end(a))}));
      conj.push_back(Formula::any(std::move(any)));
    }
    r.guard = Formula::all(std::move(conj));
  }
  const double tick = p.tick_seconds;
  Tick s_min = rho.start[g.front()];
  for (ActivityId a : g) s_min = std::min(s_min, rho.start[a]);
  Tick m = rho.start[planned.front()];
  for (ActivityId a : planned) m = std::min(m, rho.start[a]);

  // Start advance.
  for (ActivityId a : planned) {
    Tick lag = rho.start[a] - m;
    if (lag <= 0) continue;
    std::vector<Formula> conj;
    for (ActivityId b : planned)
      if (b != a) conj.push_back(Formula::diff(TimingExpr::start(a), TimingExpr::start(b), lag - 1));
    r.timing.push_back(Formula::all(std::move(conj)));
  }
  // Duration extension, and the window the late activities need.
  Tick window = 0;
  for (ActivityId a : planned) {
    auto it = arrival.find(a);
    if (it == arrival.end()) continue;
    if (it->second <= static_cast<double>(rho.end[a] - s_min) * tick + 1e-6) continue;
    Tick need = static_cast<Tick>(std::ceil(it->second / tick - static_cast<double>(m - s_min) - 1e-9));
    window = std::max(window, need);
    std::vector<Formula> disj;
    for (ActivityId b : planned) disj.push_back(Formula::at_least(TimingExpr::end(a), TimingExpr::start(b), need));
    r.timing.push_back(Formula::any(std::move(disj)));
  }
  // Configuration changes of objects outside the group that could be in the way.
  const auto moved = moved_objects(g, p);
  for (ActivityId b : planned) {
    const auto& mc = *p.os.activities[b].motion;
    const auto& obj = p.objects[mc.object];
    const bool late = arrival.count(b) && arrival.at(b) > static_cast<double>(rho.end[b] - s_min) * tick + 1e-6;
    const Tick lag = rho.start[b] - m;
    const double avail = std::max<double>(0, static_cast<double>((late ? window - 1 : window) - lag)) * tick;
    const double reach = reachable_distance(avail, obj.control);
    for (const auto& [o, q] : conf) {
      if (moved.count(o)) continue;
      const bool matters = window == 0 ? true
                           : late      ? may_obstruct(p, o, q, mc.start, mc.goal, reach, bounding_radius(obj.geometry),
                                               cfg.static_margin)
                                : may_obstruct(p, o, q, mc.start, mc.start, 2 * reach,
                                               bounding_radius(obj.geometry), cfg.static_margin);
      if (matters) r.chconf.push_back({b, o, q});
    }
    // Objects moved by other group members: running b after such a move (or
    // before it) changes the scene too. Terms already true on the candidate are
    // left out so that the candidate stays excluded.
    for (ObjectId o : moved) {
      if (o == mc.object || !conf.count(o)) continue;
      ChConfTerm t{b, o, conf.at(o)};
      if (!holds(t, rho, p)) r.chconf.push_back(t);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Continuity encodings and the working problem

/// The scheduler's view of a SAMP problem: the original activities followed by
/// auxiliary ones, plus continuity constraints and accumulated refinements.
struct EncodedProblem {
  OsProblem os;
  std::size_t original = 0;             // number of original activities
  std::vector<FluentId> object_fluent;  // fluent mode: configuration fluent of each object
  std::vector<std::vector<Configuration>> object_domain;
  std::map<std::tuple<ActivityId, ObjectId, std::size_t>, ActivityId> aux;  // (b, o, value) -> b'
};

/// Adds configuration continuity to `p.os`: a configuration fluent per object when
/// the problem uses fluents, or ordering constraints between chained moves otherwise.
inline EncodedProblem encode_continuity(const SampProblem& p) {
  EncodedProblem e;
  e.os = p.os;
  e.original = p.os.activities.size();
  e.object_fluent.assign(p.objects.size(), kNone);
  for (ObjectId o = 0; o < p.objects.size(); ++o) e.object_domain.push_back(object_configurations(p, o));
  auto index_in = [](const std::vector<Configuration>& d, const Configuration& q) {
    for (std::size_t i = 0; i < d.size(); ++i)
      if (same_config(d[i], q)) return i;
    return kNone;
  };

  if (p.os.use_fluents) {
    for (ObjectId o = 0; o < p.objects.size(); ++o) {
      FluentDef f{"conf:" + p.objects[o].name, {}, 0};
      for (const auto& q : e.object_domain[o]) f.domain.push_back(config_name(q));
      e.object_fluent[o] = e.os.fluents.size();
      e.os.fluents.push_back(std::move(f));
    }
    for (ActivityId a = 0; a < e.original; ++a) {
      auto& act = e.os.activities[a];
      if (!act.motion) continue;
      const ObjectId o = act.motion->object;
      act.conditions.push_back({TimingExpr::start(a), TimingExpr::start(a), e.object_fluent[o],
                                index_in(e.object_domain[o], act.motion->start)});
      act.effects.push_back({TimingExpr::end(a), e.object_fluent[o], index_in(e.object_domain[o], act.motion->goal)});
    }
    return e;
  }

  std::map<ObjectId, std::vector<ActivityId>> chain;
  for (ActivityId a = 0; a < e.original; ++a)
    if (p.os.activities[a].motion) chain[p.os.activities[a].motion->object].push_back(a);
  for (const auto& [o, acts] : chain) {
    for (ActivityId b : acts) {
      const auto& mb = *p.os.activities[b].motion;
      if (!same_config(mb.start, p.objects[o].initial)) {
        std::vector<Formula> pred;
        for (ActivityId a : acts)
          if (a != b)
            pred.push_back(Formula::all(
                {Formula::present(a), Formula::not_after(TimingExpr::end(a), TimingExpr::start(b))}));
        e.os.temporal_constraints.push_back(Formula::implies(Formula::present(b), Formula::any(std::move(pred))));
      }
      for (ActivityId a : acts) {
        if (a == b || same_config(p.os.activities[a].motion->goal, mb.start)) continue;
        // a must not be b's immediate predecessor.
        std::vector<Formula> between;
        for (ActivityId c : acts)
          if (c != a && c != b)
            between.push_back(Formula::all({Formula::present(c),
                                            Formula::not_after(TimingExpr::end(a), TimingExpr::start(c)),
                                            Formula::not_after(TimingExpr::end(c), TimingExpr::start(b))}));
        e.os.temporal_constraints.push_back(Formula::implies(
            Formula::all({Formula::present(a), Formula::present(b),
                          Formula::not_after(TimingExpr::end(a), TimingExpr::start(b))}),
            Formula::any(std::move(between))));
      }
    }
  }
  return e;
}

/// Fluent-mode ChConf: one auxiliary copy of `b` per other value of the object's
/// configuration fluent, each holding that value over b's span; at most one present.
inline Formula chconf_fluent(EncodedProblem& e, ActivityId b, ObjectId o, const Configuration& blocked) {
  const FluentId f = e.object_fluent.at(o);
  const auto& dom = e.object_domain[o];
  std::vector<Formula> variants;
  for (std::size_t v = 0; v < dom.size(); ++v) {
    if (same_config(dom[v], blocked)) continue;
    auto key = std::make_tuple(b, o, v);
    auto it = e.aux.find(key);
    if (it == e.aux.end()) {
      const ActivityId id = e.os.activities.size();
      const auto& base = e.os.activities[b];
      Activity aux;
      aux.name = base.name + "~" + e.os.fluents[f].name + "=" + e.os.fluents[f].domain[v];
      aux.optional = true;
      aux.duration_lb = base.duration_lb;
      aux.duration_ub = base.duration_ub;
      aux.conditions.push_back({TimingExpr::start(id), TimingExpr::end(id), f, v});
      e.os.activities.push_back(std::move(aux));
      e.os.temporal_constraints.push_back(Formula::implies(
          Formula::present(id),
          Formula::all({Formula::present(b), Formula::equal(TimingExpr::start(id), TimingExpr::start(b)),
                        Formula::equal(TimingExpr::end(id), TimingExpr::end(b))})));
      for (const auto& [k, other] : e.aux)
        if (std::get<0>(k) == b && std::get<1>(k) == o)
          e.os.temporal_constraints.push_back(
              Formula::negate(Formula::all({Formula::present(id), Formula::present(other)})));
      it = e.aux.emplace(key, id).first;
    }
    variants.push_back(Formula::present(it->second));
  }
  return Formula::any(std::move(variants));
}

/// Appends `r` to the working problem in the problem's encoding.
inline void apply_refinement(EncodedProblem& e, const Refinement& r, const SampProblem& p) {
  std::vector<Formula> body = r.timing;
  for (const auto& c : r.chconf)
    body.push_back(p.os.use_fluents ? chconf_fluent(e, c.activity, c.object, c.blocked)
                                    : chconf_fluent_free(c.activity, c.object, c.blocked, p));
  e.os.temporal_constraints.push_back(Formula::implies(r.guard, Formula::any(std::move(body))));
}

/// Schedule restricted to the original activities.
inline Schedule original_part(const Schedule& s, std::size_t n) {
  Schedule out(n);
  for (std::size_t a = 0; a < n; ++a) {
    out.present[a] = s.present[a];
    out.start[a] = s.start[a];
    out.end[a] = s.end[a];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory cache

/// Planner queries in canonical form: equivalent objects with equal configurations
/// map to the same key, and results are stored by canonical position.
class MotionCache {
 public:
  struct PathValue {
    PathResult result;          // blockers hold canonical scene positions
    double t_p = 0.0;
  };
  struct MotionValue {
    MotionResult result;        // activity keys hold canonical entry positions, blocker ids canonical scene positions
    double t_p = 0.0;
  };

  std::optional<PathValue> find_path(const std::string& key, double t_p) const {
    std::shared_lock lock(mutex_);
    auto it = paths_.find(key);
    if (it == paths_.end() || (!it->second.result.found && it->second.t_p < t_p)) return std::nullopt;
    ++hits_;
    return it->second;
  }
  void store_path(const std::string& key, PathValue v) {
    std::unique_lock lock(mutex_);
    paths_[key] = std::move(v);
  }
  std::optional<MotionValue> find_motion(const std::string& key, double t_p) const {
    std::shared_lock lock(mutex_);
    auto it = motions_.find(key);
    if (it == motions_.end()) return std::nullopt;
    if (it->second.result.status != MotionResult::Status::Solved && it->second.t_p < t_p) return std::nullopt;
    ++hits_;
    return it->second;
  }
  void store_motion(const std::string& key, MotionValue v) {
    std::unique_lock lock(mutex_);
    motions_[key] = std::move(v);
  }
  std::size_t hits() const { return hits_; }
  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return paths_.size() + motions_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, PathValue> paths_;
  std::map<std::string, MotionValue> motions_;
  mutable std::atomic<std::size_t> hits_{0};
};

inline std::string object_class(const MovableObject& o) {
  std::ostringstream os;
  os.precision(9);
  if (const auto* d = std::get_if<Disk>(&o.geometry)) os << "disk:" << d->radius;
  else {
    const auto& r = std::get<Rectangle>(o.geometry);
    os << "rect:" << r.width << 'x' << r.height;
  }
  os << '/' << o.control.model_id << '/' << o.control.max_speed << '/' << o.control.max_accel;
  return os.str();
}

/// A group query rewritten over canonically ordered objects.
struct CanonicalQuery {
  std::string key;
  SampProblem world;                      // workspace plus objects in canonical order
  GroupQuery query;                       // over canonical object ids; entry names are canonical ranks
  std::vector<ObjectId> object_of;        // canonical id -> real id
  std::vector<ActivityId> activity_of;    // canonical entry -> real activity
  std::vector<Configuration> targets;     // sorted
};

inline CanonicalQuery canonicalize(const SampProblem& p, const GroupQuery& q, const std::string& kind,
                                   const std::vector<Configuration>& targets) {
  auto entry_text = [&](const MotionEntry& e) {
    std::ostringstream os;
    os.precision(9);
    os << config_name(e.start) << '>' << config_name(e.goal) << '@' << e.delay << '+' << e.duration;
    return os.str();
  };
  std::vector<std::pair<std::string, ObjectId>> objs;
  for (const auto& [o, c] : q.conf) {
    std::vector<std::string> es;
    for (const auto& e : q.entries)
      if (e.object == o) es.push_back(entry_text(e));
    std::sort(es.begin(), es.end());
    std::string t = object_class(p.objects[o]) + '|' + config_name(c);
    for (auto& s : es) t += '|' + s;
    objs.push_back({t, o});
  }
  std::sort(objs.begin(), objs.end());

  CanonicalQuery cq;
  cq.world.workspace = p.workspace;
  cq.world.tick_seconds = p.tick_seconds;
  std::map<ObjectId, ObjectId> to_canon;
  std::ostringstream key;
  key << kind << '#';
  for (const auto& [t, o] : objs) {
    to_canon[o] = cq.object_of.size();
    cq.object_of.push_back(o);
    cq.world.objects.push_back(p.objects[o]);
    cq.query.conf[to_canon[o]] = q.conf.at(o);
    key << t << ';';
  }
  std::vector<std::pair<std::string, std::size_t>> order;
  for (std::size_t i = 0; i < q.entries.size(); ++i) {
    std::ostringstream os;
    os << to_canon.at(q.entries[i].object) << ':' << entry_text(q.entries[i]);
    order.push_back({os.str(), i});
  }
  std::sort(order.begin(), order.end());
  for (std::size_t k = 0; k < order.size(); ++k) {
    MotionEntry e = q.entries[order[k].second];
    cq.activity_of.push_back(e.activity);
    e.activity = k;
    e.object = to_canon.at(e.object);
    char rank[24];
    std::snprintf(rank, sizeof rank, "#%04zu", k);
    e.name = rank;
    cq.query.entries.push_back(e);
    key << order[k].first << ';';
  }
  cq.targets = targets;
  std::sort(cq.targets.begin(), cq.targets.end(), [](const Configuration& a, const Configuration& b) {
    return std::tie(a.x, a.y, a.heading) < std::tie(b.x, b.y, b.heading);
  });
  cq.key = key.str();
  return cq;
}

inline std::uint64_t key_seed(const std::string& key, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : key) h = (h ^ c) * 1099511628211ULL;
  return h;
}

}  // namespace samp
