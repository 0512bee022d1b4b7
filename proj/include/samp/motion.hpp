#pragma once

// Single-object path finding, rest-to-rest trajectory timing and prioritized
// space-time planning for motion groups.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "samp/geometry.hpp"
#include "samp/model.hpp"

namespace samp {

// ---------------------------------------------------------------------------
// Trapezoidal profiles

/// Rest-to-rest travel time over `d` meters with a symmetric trapezoidal velocity profile.
inline double estimate_duration(double d, const ControlModel& c) {
  if (d <= 0) return 0.0;
  const double v = c.max_speed, a = c.max_accel;
  if (d >= v * v / a) return d / v + v / a;
  return 2.0 * std::sqrt(d / a);
}

/// Longest rest-to-rest distance coverable in `t` seconds (inverse of estimate_duration).
inline double reachable_distance(double t, const ControlModel& c) {
  if (t <= 0) return 0.0;
  const double v = c.max_speed, a = c.max_accel;
  if (t >= 2 * v / a) return v * (t - v / a);
  return a * t * t / 4;
}

/// Distance covered `t` seconds into a rest-to-rest move of length `d`.
inline double trapezoid_position(double d, const ControlModel& c, double t) {
  const double T = estimate_duration(d, c);
  if (t <= 0) return 0.0;
  if (t >= T) return d;
  const double v = c.max_speed, a = c.max_accel;
  const double ta = d >= v * v / a ? v / a : T / 2;
  if (t < ta) return 0.5 * a * t * t;
  if (t > T - ta) {
    double r = T - t;
    return d - 0.5 * a * r * r;
  }
  return 0.5 * a * ta * ta + v * (t - ta);
}

// ---------------------------------------------------------------------------
// Configuration

struct PlannerConfig {
  double static_margin = 0.03;   // clearance kept from walls and frozen objects
  double dynamic_margin = 0.08;  // clearance kept from moving objects
  double check_dt = 0.02;        // time resolution of dynamic collision checks
  double goal_bias = 0.05;
  double config_bias = 0.2;  // probability of sampling a problem configuration
  double step = 0.25;
  double max_extend = 3.0;
  double node_spacing = 0.5;
  double dedupe = 0.12;
  double goal_tolerance = 0.05;
  double iterations_per_second = 1500;  // tree iterations granted per second of t_p
  int saturation = 150;                 // stop after this many iterations without new coverage
  double eps_move = 1e-3;
  double sample_dt = 0.05;
  double wait_step = 0.2;
  double time_slot = 0.1;
  double piece_length = 1.0;
  int max_orders = 6;
  bool minimize_blockers = true;
};

// ---------------------------------------------------------------------------
// Scenes and swept collision tests

struct SceneItem {
  ObjectId object = kNone;  // kNone for static obstacles
  Footprint fp;
};

struct Scene {
  Vec2 min, max;
  std::vector<SceneItem> items;
};

inline Scene make_scene(const SampProblem& p, const std::map<ObjectId, Configuration>& frozen) {
  Scene s{p.workspace.min, p.workspace.max, {}};
  for (auto& poly : obstacle_polygons(p.workspace)) s.items.push_back({kNone, std::move(poly)});
  for (const auto& [o, q] : frozen) s.items.push_back({o, occ(p.objects[o], q)});
  return s;
}

namespace motion_detail {

inline Configuration lerp(const Configuration& a, const Configuration& b, double w) {
  return {a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), normalize_angle(a.heading + w * normalize_angle(b.heading - a.heading))};
}

inline double segment_polygon_distance(Vec2 a, Vec2 b, const ConvexPolygon& p) {
  if (geo::point_strictly_inside(a, p) || geo::point_strictly_inside(b, p)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.v.size(); ++i)
    d = std::min(d, geo::segment_segment_distance(a, b, p.v[i], p.v[(i + 1) % p.v.size()]));
  return d;
}

inline bool separated(const Footprint& a, const Footprint& b, double margin) {
  if (const auto* ca = std::get_if<Circle>(&a))
    if (const auto* cb = std::get_if<Circle>(&b)) {
      double rr = ca->r + cb->r + margin;
      double dx = ca->c.x - cb->c.x, dy = ca->c.y - cb->c.y;
      return dx * dx + dy * dy >= rr * rr;
    }
  return !collides(a, b) && clearance(a, b) >= margin;
}

/// True iff the footprint of `g` swept along q0 -> q1 keeps `margin` from `ob`.
/// Disks use the exact capsule; other shapes are sampled with the margin widened
/// by the largest translation between samples.
inline bool sweep_clear(const GeometryModel& g, const Configuration& q0, const Configuration& q1,
                        const Footprint& ob, double margin) {
  if (const auto* d = std::get_if<Disk>(&g)) {
    Vec2 a{q0.x, q0.y}, b{q1.x, q1.y};
    if (const auto* c = std::get_if<Circle>(&ob))
      return geo::point_segment_distance(c->c, a, b) >= d->radius + c->r + margin;
    double xmin, ymin, xmax, ymax;
    footprint_bounds(ob, xmin, ymin, xmax, ymax);
    const double pad = d->radius + margin;
    if (std::max(a.x, b.x) + pad <= xmin || std::min(a.x, b.x) - pad >= xmax || std::max(a.y, b.y) + pad <= ymin ||
        std::min(a.y, b.y) - pad >= ymax)
      return true;
    return segment_polygon_distance(a, b, std::get<ConvexPolygon>(ob)) >= pad;
  }
  const double len = distance(q0, q1);
  const int n = std::max(1, static_cast<int>(std::ceil(len / 0.02)));
  const double need = margin + (len / n) / 2;
  for (int k = 0; k <= n; ++k) {
    Footprint f = occ(g, lerp(q0, q1, static_cast<double>(k) / n));
    if (!separated(f, ob, need)) return false;
  }
  return true;
}

inline bool in_bounds(const GeometryModel& g, const Configuration& q, Vec2 lo, Vec2 hi, double margin) {
  double xmin, ymin, xmax, ymax;
  footprint_bounds(occ(g, q), xmin, ymin, xmax, ymax);
  return xmin >= lo.x + margin && ymin >= lo.y + margin && xmax <= hi.x - margin && ymax <= hi.y - margin;
}

}  // namespace motion_detail

/// Swept collision test against a scene. Static obstacles are checked first so a
/// blocked step is only blamed on a movable object when no wall blocks it too.
inline bool sweep_free(const GeometryModel& g, const Configuration& q0, const Configuration& q1,
                       const Scene& s, double margin, ObjectId* blocker = nullptr) {
  using namespace motion_detail;
  if (!in_bounds(g, q0, s.min, s.max, margin) || !in_bounds(g, q1, s.min, s.max, margin)) return false;
  for (const auto& it : s.items)
    if (it.object == kNone && !sweep_clear(g, q0, q1, it.fp, margin)) return false;
  for (const auto& it : s.items)
    if (it.object != kNone && !sweep_clear(g, q0, q1, it.fp, margin)) {
      if (blocker) *blocker = it.object;
      return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Layer 1: exploration tree

struct PathQuery {
  GeometryModel geometry;
  Configuration start, goal;
  std::vector<Configuration> targets;  // relevant configurations, for the reachability report
};

struct PathResult {
  bool found = false;
  std::vector<Configuration> path;         // polyline from start to goal
  std::vector<Configuration> unreachable;  // σ: targets the tree could not reach (failure only)
  std::vector<Configuration> reachable;    // targets the tree reached (failure only)
  std::set<ObjectId> blockers;             // ω: movable objects that rejected an extension
  std::size_t iterations = 0;
};

namespace motion_detail {

/// Uniform bucket grid over tree nodes.
class NodeGrid {
 public:
  explicit NodeGrid(double cell) : cell_(cell) {}

  void insert(int id, Vec2 p) {
    auto [cx, cy] = cell_of(p);
    cells_[key(cx, cy)].push_back(id);
    lo_x_ = std::min(lo_x_, cx), hi_x_ = std::max(hi_x_, cx);
    lo_y_ = std::min(lo_y_, cy), hi_y_ = std::max(hi_y_, cy);
  }

  int nearest(Vec2 p, const std::vector<Configuration>& pts) const {
    auto [cx, cy] = cell_of(p);
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    const long reach = std::max({std::labs(cx - lo_x_), std::labs(cx - hi_x_), std::labs(cy - lo_y_),
                                 std::labs(cy - hi_y_)});
    for (long r = 0; r <= reach; ++r) {
      for (long x = cx - r; x <= cx + r; ++x)
        for (long y = cy - r; y <= cy + r; ++y) {
          if (std::max(std::labs(x - cx), std::labs(y - cy)) != r) continue;
          auto it = cells_.find(key(x, y));
          if (it == cells_.end()) continue;
          for (int id : it->second) {
            double d = std::hypot(pts[id].x - p.x, pts[id].y - p.y);
            if (d < bd) bd = d, best = id;
          }
        }
      if (best >= 0 && bd <= static_cast<double>(r) * cell_) break;
    }
    return best;
  }

  /// Ids within radius `rad` of `p`, nearest first.
  std::vector<int> within(Vec2 p, double rad, const std::vector<Configuration>& pts) const {
    std::vector<std::pair<double, int>> hits;
    auto [cx, cy] = cell_of(p);
    long r = static_cast<long>(std::ceil(rad / cell_));
    for (long x = cx - r; x <= cx + r; ++x)
      for (long y = cy - r; y <= cy + r; ++y) {
        auto it = cells_.find(key(x, y));
        if (it == cells_.end()) continue;
        for (int id : it->second) {
          double d = std::hypot(pts[id].x - p.x, pts[id].y - p.y);
          if (d <= rad) hits.push_back({d, id});
        }
      }
    std::sort(hits.begin(), hits.end());
    std::vector<int> out;
    for (auto& h : hits) out.push_back(h.second);
    return out;
  }

 private:
  std::pair<long, long> cell_of(Vec2 p) const {
    return {static_cast<long>(std::floor(p.x / cell_)), static_cast<long>(std::floor(p.y / cell_))};
  }
  static long long key(long x, long y) { return (static_cast<long long>(x) << 32) ^ (y & 0xffffffffLL); }

  double cell_;
  std::unordered_map<long long, std::vector<int>> cells_;
  long lo_x_ = std::numeric_limits<long>::max(), hi_x_ = std::numeric_limits<long>::min();
  long lo_y_ = std::numeric_limits<long>::max(), hi_y_ = std::numeric_limits<long>::min();
};

/// Candidate routes from `a` towards `b`: straight, x-first and y-first.
inline std::vector<std::vector<Configuration>> routes(const Configuration& a, const Configuration& b) {
  std::vector<std::vector<Configuration>> out{{b}};
  Configuration c1{b.x, a.y, a.heading}, c2{a.x, b.y, a.heading};
  auto degenerate = [&](const Configuration& c) {
    return std::hypot(c.x - a.x, c.y - a.y) < 1e-9 || std::hypot(c.x - b.x, c.y - b.y) < 1e-9;
  };
  if (!degenerate(c1)) out.push_back({c1, b});
  if (!degenerate(c2)) out.push_back({c2, b});
  return out;
}

inline bool route_free(const GeometryModel& g, const Configuration& from,
                       const std::vector<Configuration>& wps, const Scene& s, double margin) {
  Configuration p = from;
  for (const auto& w : wps) {
    if (!sweep_free(g, p, w, s, margin)) return false;
    p = w;
  }
  return true;
}

/// Shortens a shortcut path by sliding its corners (and dropping the ones that
/// become unnecessary) while every leg stays free.
inline void relax_path(const GeometryModel& g, std::vector<Configuration>& path, const Scene& s, double margin) {
  constexpr int kMaxPasses = 200;
  int passes = 0;
  for (double step = 0.2; step > 0.005 && passes < kMaxPasses; step /= 2) {
    for (bool improved = true; improved && passes < kMaxPasses; ++passes) {
      improved = false;
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const Configuration &a = path[i - 1], &b = path[i + 1];
        if (sweep_free(g, a, b, s, margin)) {
          path.erase(path.begin() + static_cast<std::ptrdiff_t>(i));
          improved = true;
          break;
        }
        const double now = distance(a, path[i]) + distance(path[i], b);
        for (int k = 0; k < 8; ++k) {
          const double ang = k * std::numbers::pi / 4;
          Configuration c = path[i];
          c.x += step * std::cos(ang);
          c.y += step * std::sin(ang);
          if (distance(a, c) + distance(c, b) < now - 1e-9 && sweep_free(g, a, c, s, margin) &&
              sweep_free(g, c, b, s, margin)) {
            path[i] = c;
            improved = true;
            break;
          }
        }
      }
    }
  }
}

}  // namespace motion_detail

/// Grows an exploration tree from q.start; stops when the goal is connected, the
/// iteration budget is spent, or the explored region stops growing.
inline PathResult find_path(const PathQuery& q, const Scene& scene, std::size_t max_iterations,
                            const PlannerConfig& cfg, std::uint64_t seed) {
  using namespace motion_detail;
  const auto& g = q.geometry;
  const double margin = cfg.static_margin;
  PathResult res;

  std::vector<Configuration> nodes;
  std::vector<int> parent;
  NodeGrid grid(0.5);
  std::unordered_set<long long> coverage;
  std::size_t last_growth = 0, iter = 0;
  int goal_id = -1;

  auto add_node = [&](const Configuration& c, int par) {
    int id = static_cast<int>(nodes.size());
    nodes.push_back(c);
    parent.push_back(par);
    grid.insert(id, {c.x, c.y});
    long long cell = (static_cast<long long>(std::floor(c.x / 0.25)) << 32) ^
                     (static_cast<long long>(std::floor(c.y / 0.25)) & 0xffffffffLL);
    if (coverage.insert(cell).second) last_growth = iter;
    return id;
  };
  auto try_goal = [&](int id) {
    if (distance(nodes[id], q.goal) > cfg.max_extend) return false;
    ObjectId b = kNone;
    if (sweep_free(g, nodes[id], q.goal, scene, margin, &b)) {
      goal_id = add_node(q.goal, id);
      return true;
    }
    if (b != kNone) res.blockers.insert(b);
    return false;
  };
  auto duplicate = [&](const Configuration& c) {
    return !grid.within({c.x, c.y}, cfg.dedupe, nodes).empty();
  };

  {
    ObjectId b = kNone;
    if (!sweep_free(g, q.start, q.start, scene, margin, &b)) {
      if (b != kNone) res.blockers.insert(b);
      for (const auto& t : q.targets) res.unreachable.push_back(t);
      return res;
    }
  }
  add_node(q.start, -1);
  if (same_config(q.start, q.goal)) {
    res.found = true;
    res.path = {q.start};
    return res;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> ux(scene.min.x, scene.max.x), uy(scene.min.y, scene.max.y);

  bool found = try_goal(0);
  for (iter = 1; !found && iter <= max_iterations; ++iter) {
    if (iter - last_growth > static_cast<std::size_t>(cfg.saturation)) break;
    Configuration target;
    double u = unit(rng);
    if (u < cfg.goal_bias) target = q.goal;
    else if (u < cfg.goal_bias + cfg.config_bias && !q.targets.empty())
      target = q.targets[static_cast<std::size_t>(unit(rng) * q.targets.size()) % q.targets.size()];
    else target = {ux(rng), uy(rng), q.start.heading};
    target.heading = q.start.heading;
    const int from = grid.nearest({target.x, target.y}, nodes);
    const auto candidates = routes(nodes[from], target);
    for (std::size_t r = 0; r < candidates.size() && !found; ++r) {
      int cur = from;
      Configuration p = nodes[from];
      double budget = cfg.max_extend, since = 0.0;
      bool stop = false, reached = false;
      for (std::size_t w = 0; w < candidates[r].size() && !stop; ++w) {
        const Configuration wp = candidates[r][w];
        while (budget > 1e-9) {
          double rem = distance(p, wp);
          if (rem < 1e-9) break;
          double len = std::min({cfg.step, rem, budget});
          Configuration nx = lerp(p, wp, len / rem);
          ObjectId b = kNone;
          if (!sweep_free(g, p, nx, scene, margin, &b)) {
            if (b != kNone) res.blockers.insert(b);
            if (since > cfg.dedupe && !duplicate(p)) {
              cur = add_node(p, cur);
              found = try_goal(cur);
            }
            stop = true;
            break;
          }
          p = nx;
          budget -= len;
          since += len;
          bool at_wp = distance(p, wp) < 1e-9;
          if (since >= cfg.node_spacing - 1e-9 || at_wp || budget <= 1e-9) {
            if (duplicate(p)) {
              stop = true;
              break;
            }
            cur = add_node(p, cur);
            since = 0.0;
            if ((found = try_goal(cur))) {
              stop = true;
              break;
            }
          }
        }
        if (budget <= 1e-9) stop = true;
        if (!stop && w + 1 == candidates[r].size()) reached = true;
      }
      if (r == 0 && reached) break;
    }
  }
  res.iterations = iter;

  if (found) {
    std::vector<Configuration> raw;
    for (int id = goal_id; id >= 0; id = parent[id]) raw.push_back(nodes[id]);
    std::reverse(raw.begin(), raw.end());
    res.path.push_back(raw.front());
    for (std::size_t i = 0; i + 1 < raw.size();) {
      std::size_t j = raw.size() - 1;
      while (j > i + 1 && !sweep_free(g, raw[i], raw[j], scene, margin)) --j;
      res.path.push_back(raw[j]);
      i = j;
    }
    relax_path(g, res.path, scene, margin);
    res.found = true;
    res.blockers.clear();
    return res;
  }

  for (const auto& t : q.targets) {
    bool ok = false;
    Configuration tq = t;
    tq.heading = q.start.heading;
    if (sweep_free(g, tq, tq, scene, margin)) {
      auto near = grid.within({t.x, t.y}, cfg.max_extend, nodes);
      if (near.size() > 40) near.resize(40);
      for (int id : near) {
        if (distance(nodes[id], tq) <= cfg.goal_tolerance) {
          ok = true;
          break;
        }
        for (const auto& r : routes(nodes[id], tq))
          if (route_free(g, nodes[id], r, scene, margin)) {
            ok = true;
            break;
          }
        if (ok) break;
      }
    }
    (ok ? res.reachable : res.unreachable).push_back(t);
  }
  return res;
}

/// find_path plus a greedy reduction of the blocker set: an object is dropped when
/// the goal stays unreachable with it and every already-dropped object removed.
inline PathResult plan_path(const PathQuery& q, const Scene& scene, std::size_t max_iterations,
                            const PlannerConfig& cfg, std::uint64_t seed) {
  PathResult res = find_path(q, scene, max_iterations, cfg, seed);
  if (res.found || !cfg.minimize_blockers || res.blockers.empty()) return res;
  std::set<ObjectId> dropped;
  for (ObjectId o : std::set<ObjectId>(res.blockers)) {
    Scene reduced{scene.min, scene.max, {}};
    for (const auto& it : scene.items)
      if (it.object == kNone || (res.blockers.count(it.object) && it.object != o && !dropped.count(it.object)))
        reduced.items.push_back(it);
    PathResult probe = find_path(q, reduced, max_iterations, cfg, seed);
    res.iterations += probe.iterations;
    if (!probe.found) dropped.insert(o);
  }
  for (ObjectId o : dropped) res.blockers.erase(o);
  return res;
}

// ---------------------------------------------------------------------------
// Trajectory timing

/// (δ̄, d̄) of a trajectory relative to `s_min`: start of the first moving segment and
/// the span until the end of the last moving one. A trajectory that never moves gives (0, 0).
inline std::pair<double, double> extract_timing(const Trajectory& tr, double s_min, double eps_move = 1e-3) {
  const auto& s = tr.samples;
  std::optional<std::size_t> first, last;
  for (std::size_t k = 0; k + 1 < s.size(); ++k)
    if (distance(s[k].q, s[k + 1].q) > eps_move) {
      if (!first) first = k;
      last = k + 1;
    }
  if (!first) return {0.0, 0.0};
  return {s[*first].t - s_min, s[*last].t - s[*first].t};
}

struct Leg {
  Configuration from, to;
  double t0 = 0.0, t1 = 0.0;  // a wait when from == to
};

/// Samples legs into a trajectory starting at (t_start, from of the first leg).
inline Trajectory sample_legs(const Configuration& start, double t_start, const std::vector<Leg>& legs,
                              const ControlModel& c, double sample_dt) {
  Trajectory tr;
  tr.samples.push_back({t_start, start});
  for (const auto& l : legs) {
    const double T = l.t1 - l.t0;
    if (T <= 0) continue;
    const double len = distance(l.from, l.to);
    if (len < 1e-12) {
      tr.samples.push_back({l.t1, l.to});
      continue;
    }
    const int n = std::max(1, static_cast<int>(std::floor(T / sample_dt)));
    for (int k = 1; k <= n; ++k) {
      double dt = T * k / n;
      double w = k == n ? 1.0 : trapezoid_position(len, c, dt) / len;
      tr.samples.push_back({l.t0 + dt, motion_detail::lerp(l.from, l.to, w)});
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Layer 2: group planning

struct MotionEntry {
  ActivityId activity = 0;
  std::string name;
  ObjectId object = 0;
  Configuration start, goal;
  double delay = 0.0;     // δ: seconds after the group start
  double duration = 0.0;  // d: scheduled seconds
};

struct GroupQuery {
  std::vector<MotionEntry> entries;
  std::map<ObjectId, Configuration> conf;  // every object's configuration at the group start
};

struct ConflictReport {
  std::map<ActivityId, std::vector<Configuration>> sigma;
  std::map<ActivityId, std::set<ObjectId>> omega;
};

struct MotionResult {
  enum class Status { Solved, TimingViolation, Blocked };
  Status status = Status::Blocked;
  std::vector<ActivityId> planned;                // Ḡ, in planning order
  std::map<ActivityId, Trajectory> trajectories;  // times relative to the group start
  std::map<ActivityId, double> delay, duration;   // δ̄, d̄
  ActivityId failed = kNone;                      // the blocked activity
  bool parked = false;  // blocked only once other group objects rest at their goals
  ConflictReport report;
  std::size_t iterations = 0;  // tree iterations spent
};

namespace motion_detail {

/// A moving or resting object as seen by the planner, known up to `known_until`.
struct DynamicObstacle {
  GeometryModel geometry;
  Configuration rest;
  std::vector<const Trajectory*> moves;  // ordered
  double known_until = std::numeric_limits<double>::infinity();

  Configuration at(double t) const {
    Configuration cur = rest;
    for (const auto* m : moves) {
      if (t < m->start_time()) return cur;
      if (t <= m->end_time()) return m->at(t);
      cur = m->samples.back().q;
    }
    return cur;
  }
  double settle_time() const {
    double t = moves.empty() ? 0.0 : moves.back()->end_time();
    return std::isfinite(known_until) ? std::max(t, known_until) : t;
  }
};

struct TimingSearch {
  const GeometryModel& g;
  const ControlModel& c;
  const std::vector<DynamicObstacle>& dyn;
  const PlannerConfig& cfg;

  bool clear_at(const Configuration& q, double t) const {
    const double r = bounding_radius(g);
    std::optional<Footprint> f;
    for (const auto& d : dyn) {
      if (t > d.known_until) continue;
      const Configuration o = d.at(t);
      const double reach = r + bounding_radius(d.geometry) + cfg.dynamic_margin;
      if (std::hypot(q.x - o.x, q.y - o.y) >= reach) continue;
      if (!f) f = occ(g, q);
      if (!separated(*f, occ(d.geometry, o), cfg.dynamic_margin)) return false;
    }
    return true;
  }

  bool rest_clear(const Configuration& q, double t0, double t1) const {
    for (double t = t0;; t += cfg.check_dt) {
      if (!clear_at(q, std::min(t, t1))) return false;
      if (t >= t1) return true;
    }
  }

  bool move_clear(const Configuration& a, const Configuration& b, double t0, double T) const {
    const double len = distance(a, b);
    for (double dt = 0;; dt += cfg.check_dt) {
      double tt = std::min(dt, T);
      if (!clear_at(lerp(a, b, trapezoid_position(len, c, tt) / len), t0 + tt)) return false;
      if (dt >= T) return true;
    }
  }

  /// Earliest-arrival timing of `path` departing no earlier than `depart`, with
  /// rest-to-rest moves along straight runs and waits in between.
  std::optional<std::vector<Leg>> solve(const std::vector<Configuration>& path, double depart,
                                        double t_max) const {
    // Split runs into short pieces so the object can stop part-way.
    std::vector<Configuration> v{path.front()};
    std::vector<std::pair<int, int>> runs;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      int first = static_cast<int>(v.size()) - 1;
      double len = distance(path[i], path[i + 1]);
      int n = std::max(1, static_cast<int>(std::ceil(len / cfg.piece_length - 1e-9)));
      for (int k = 1; k <= n; ++k) v.push_back(lerp(path[i], path[i + 1], static_cast<double>(k) / n));
      runs.push_back({first, static_cast<int>(v.size()) - 1});
    }
    const int goal = static_cast<int>(v.size()) - 1;
    double settle = 0.0;
    for (const auto& d : dyn) settle = std::max(settle, d.settle_time());
    // An object that comes to rest on the goal for good makes the search pointless.
    const Footprint goal_fp = occ(g, v[goal]);
    for (const auto& d : dyn)
      if (!std::isfinite(d.known_until) &&
          !separated(goal_fp, occ(d.geometry, d.at(std::numeric_limits<double>::max())), cfg.dynamic_margin))
        return std::nullopt;

    struct Node {
      int vertex;
      double t;
      int parent;
    };
    std::vector<Node> nodes{{0, depart, -1}};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    open.push({depart, 0});
    std::unordered_set<long long> closed;
    while (!open.empty()) {
      auto [t, id] = open.top();
      open.pop();
      const int at = nodes[id].vertex;
      long long key = static_cast<long long>(at) * 1000003LL + static_cast<long long>(t / cfg.time_slot);
      if (!closed.insert(key).second) continue;
      if (at == goal && rest_clear(v[at], t, std::max(t, settle))) {
        std::vector<Leg> legs;
        for (int k = id; nodes[k].parent >= 0; k = nodes[k].parent) {
          const auto& a = nodes[nodes[k].parent];
          legs.push_back({v[a.vertex], v[nodes[k].vertex], a.t, nodes[k].t});
        }
        std::reverse(legs.begin(), legs.end());
        return legs;
      }
      if (t + cfg.wait_step <= t_max && rest_clear(v[at], t, t + cfg.wait_step)) {
        nodes.push_back({at, t + cfg.wait_step, id});
        open.push({t + cfg.wait_step, static_cast<int>(nodes.size()) - 1});
      }
      for (const auto& [lo, hi] : runs) {
        if (at < lo || at > hi) continue;
        // Neighbouring pieces, or straight to either end of the run.
        for (int j : {at - 1, at + 1, lo, hi}) {
          if (j == at || j < lo || j > hi) continue;
          double T = estimate_duration(distance(v[at], v[j]), c);
          if (t + T > t_max || !move_clear(v[at], v[j], t, T)) continue;
          nodes.push_back({j, t + T, id});
          open.push({t + T, static_cast<int>(nodes.size()) - 1});
        }
      }
    }
    return std::nullopt;
  }
};

inline double path_length(const std::vector<Configuration>& path) {
  double l = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) l += distance(path[i], path[i + 1]);
  return l;
}

}  // namespace motion_detail

/// Prioritized planning of a motion group: entries are planned one at a time in
/// ascending δ (ties by name) against static obstacles, objects outside the group
/// frozen at `conf`, and the trajectories committed so far. Returns as soon as an
/// entry cannot meet its scheduled window, with Ḡ = the entries planned so far.
/// `targets` overrides the relevant configurations of `p` used for the reachability report.
inline MotionResult get_motion(const SampProblem& p, const GroupQuery& query, double t_p,
                               const PlannerConfig& cfg, std::uint64_t seed,
                               const std::vector<Configuration>* targets_override = nullptr) {
  using namespace motion_detail;
  MotionResult out;
  const std::size_t n = query.entries.size();
  const auto max_iter = static_cast<std::size_t>(std::max(1.0, t_p * cfg.iterations_per_second));
  const auto targets = targets_override ? *targets_override : relevant_configurations(p);

  std::set<ObjectId> moved;
  for (const auto& e : query.entries) moved.insert(e.object);
  std::map<ObjectId, Configuration> frozen;
  for (const auto& [o, q] : query.conf)
    if (!moved.count(o)) frozen[o] = q;
  const Scene scene = make_scene(p, frozen);

  // Static paths do not depend on the priority order.
  std::vector<PathResult> paths(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = query.entries[i];
    PathQuery pq{p.objects[e.object].geometry, e.start, e.goal, targets};
    paths[i] = plan_path(pq, scene, max_iter, cfg, seed + 7919 * (i + 1));
    out.iterations += paths[i].iterations;
    if (!paths[i].found) {
      out.status = MotionResult::Status::Blocked;
      out.failed = e.activity;
      out.report.sigma[e.activity] = paths[i].unreachable;
      out.report.omega[e.activity] = paths[i].blockers;
      return out;
    }
  }

  std::vector<std::size_t> base(n);
  std::iota(base.begin(), base.end(), 0);
  std::sort(base.begin(), base.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = query.entries[a];
    const auto& y = query.entries[b];
    return std::tie(x.delay, x.name) < std::tie(y.delay, y.name);
  });
  auto respects_objects = [&](const std::vector<std::size_t>& order) {
    std::map<ObjectId, std::size_t> last_rank;
    std::vector<std::size_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[base[k]] = k;
    for (std::size_t i : order) {
      auto o = query.entries[i].object;
      auto it = last_rank.find(o);
      if (it != last_rank.end() && it->second > rank[i]) return false;
      last_rank[o] = rank[i];
    }
    return true;
  };

  std::optional<MotionResult> first_violation;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int tried = 0;
  do {
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = base[perm[k]];
    if (!respects_objects(order)) continue;
    ++tried;

    MotionResult r;
    r.iterations = out.iterations;
    std::map<ActivityId, std::size_t> committed;  // activity -> entry index
    bool violated = false, blocked = false;
    for (std::size_t i : order) {
      const auto& e = query.entries[i];
      const auto& obj = p.objects[e.object];

      // Every other group object: rest at conf, committed moves, unknown after its next uncommitted δ.
      std::vector<DynamicObstacle> dyn;
      for (ObjectId o : moved) {
        if (o == e.object) continue;
        DynamicObstacle d{p.objects[o].geometry, query.conf.at(o), {}, std::numeric_limits<double>::infinity()};
        std::vector<std::size_t> mine;
        for (std::size_t k = 0; k < n; ++k)
          if (query.entries[k].object == o) mine.push_back(k);
        std::sort(mine.begin(), mine.end(), [&](std::size_t a, std::size_t b) {
          return query.entries[a].delay < query.entries[b].delay;
        });
        for (std::size_t k : mine) {
          ActivityId a = query.entries[k].activity;
          if (!committed.count(a)) {
            d.known_until = query.entries[k].delay;
            break;
          }
          d.moves.push_back(&r.trajectories.at(a));
        }
        dyn.push_back(d);
      }

      TimingSearch ts{obj.geometry, obj.control, dyn, cfg};
      const double est = estimate_duration(path_length(paths[i].path), obj.control);
      const double t_max = e.delay + std::max(e.duration, 3 * est) + 30.0;
      std::vector<Configuration> path = paths[i].path;
      auto legs = ts.solve(path, e.delay, t_max);
      if (!legs) {
        // Committed objects end up resting somewhere; route around those spots.
        Scene rest_scene = scene;
        for (const auto& [a, k] : committed)
          rest_scene.items.push_back(
              {query.entries[k].object, occ(p.objects[query.entries[k].object], r.trajectories.at(a).samples.back().q)});
        PathQuery pq{obj.geometry, e.start, e.goal, targets};
        PathResult alt = plan_path(pq, rest_scene, max_iter, cfg, seed + 104729 * (i + 1));
        r.iterations += alt.iterations;
        if (alt.found) {
          path = alt.path;
          legs = ts.solve(path, e.delay, t_max);
          if (!legs) {
            // Last resort: leave once everything else has settled.
            double settle = e.delay;
            for (const auto& d : dyn) settle = std::max(settle, d.settle_time());
            std::vector<DynamicObstacle> none;
            TimingSearch late{obj.geometry, obj.control, none, cfg};
            // The wait at the start must itself be clear of everything that moves meanwhile.
            if (ts.rest_clear(e.start, e.delay, settle)) legs = late.solve(path, settle, settle + 3 * est + 30.0);
            if (legs && e.delay < settle) legs->insert(legs->begin(), Leg{e.start, e.start, e.delay, settle});
          }
        }
        if (!legs) {
          r.status = MotionResult::Status::Blocked;
          r.failed = e.activity;
          r.parked = true;
          r.report.sigma[e.activity] = alt.unreachable;
          r.report.omega[e.activity] = alt.blockers;
          blocked = true;
          if (!first_violation) first_violation = r;
          break;
        }
      }
      Trajectory tr = sample_legs(e.start, e.delay, *legs, obj.control, cfg.sample_dt);
      auto [db, dd] = extract_timing(tr, 0.0, cfg.eps_move);
      if (dd == 0.0 && db == 0.0) db = e.delay;
      const double arrival = std::max(db + dd, tr.end_time());
      r.trajectories[e.activity] = std::move(tr);
      r.delay[e.activity] = db;
      r.duration[e.activity] = arrival - db;
      r.planned.push_back(e.activity);
      committed[e.activity] = i;
      if (arrival > e.delay + e.duration + 1e-6) {
        violated = true;
        break;
      }
    }
    if (blocked) continue;
    if (!violated) {
      r.status = MotionResult::Status::Solved;
      return r;
    }
    r.status = MotionResult::Status::TimingViolation;
    if (!first_violation || first_violation->status == MotionResult::Status::Blocked) first_violation = r;
  } while (tried < cfg.max_orders && std::next_permutation(perm.begin(), perm.end()));

  return *first_violation;
}

}  // namespace samp
