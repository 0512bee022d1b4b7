#pragma once

// Hand-picked valid plans built without the engine: activities run one after another
// in a fixed order, robots follow shortcut grid paths with a rest-to-rest trapezoid
// on every straight piece, and door panels slide straight.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "grid_oracle.hpp"
#include "samp/benchmarks.hpp"

namespace samp::reference {

/// Time to cover `d` from rest to rest with speed and acceleration bounds.
inline double rest_to_rest_time(double d, double v, double a) {
  if (d >= v * v / a) return d / v + v / a;
  return 2 * std::sqrt(d / a);
}

inline double rest_to_rest_position(double d, double v, double a, double t) {
  const double T = rest_to_rest_time(d, v, a);
  t = std::clamp(t, 0.0, T);
  const double ramp = std::min(v / a, T / 2);
  const double peak = a * ramp;
  if (t <= ramp) return 0.5 * a * t * t;
  if (t >= T - ramp) return d - 0.5 * a * (T - t) * (T - t);
  return 0.5 * a * ramp * ramp + peak * (t - ramp);
}

/// Samples `pts` as a chain of rest-to-rest pieces starting at `t0`.
inline Trajectory timed_polyline(const std::vector<Vec2>& pts, double heading, const ControlModel& c, double t0) {
  constexpr double kDt = 0.05;
  Trajectory tr;
  tr.samples.push_back({t0, {pts[0].x, pts[0].y, heading}});
  double t = t0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d = std::hypot(pts[i + 1].x - pts[i].x, pts[i + 1].y - pts[i].y);
    if (d < 1e-12) continue;
    const double T = rest_to_rest_time(d, c.max_speed, c.max_accel);
    const int n = std::max(1, static_cast<int>(std::ceil(T / kDt)));
    for (int k = 1; k <= n; ++k) {
      const double tk = T * k / n;
      const double w = rest_to_rest_position(d, c.max_speed, c.max_accel, tk) / d;
      tr.samples.push_back(
          {t + tk, {pts[i].x + w * (pts[i + 1].x - pts[i].x), pts[i].y + w * (pts[i + 1].y - pts[i].y), heading}});
    }
    t += T;
  }
  return tr;
}

/// Runs `steps` (activity names) back to back; every other activity is absent.
inline SampSchedule build_plan(const SampProblem& p, const std::vector<std::string>& steps) {
  constexpr double kMargin = 0.04;
  SampSchedule pi;
  pi.schedule = Schedule(p.os.activities.size());
  std::vector<Configuration> at;
  for (const auto& o : p.objects) at.push_back(o.initial);
  Tick now = 0;
  for (const auto& name : steps) {
    const ActivityId a = p.os.activity_index(name);
    if (a == kNone) throw std::invalid_argument("no activity " + name);
    const Activity& act = p.os.activities[a];
    Tick d = act.duration_lb;
    if (act.motion) {
      const ObjectId o = act.motion->object;
      const auto& obj = p.objects[o];
      std::vector<Vec2> pts{{act.motion->start.x, act.motion->start.y}, {act.motion->goal.x, act.motion->goal.y}};
      if (const auto* disk = std::get_if<Disk>(&obj.geometry)) {
        std::vector<oracle::Box> boxes;
        std::vector<oracle::Disc> discs;
        for (ObjectId k = 0; k < p.objects.size(); ++k) {
          if (k == o) continue;
          if (const auto* other = std::get_if<Disk>(&p.objects[k].geometry))
            discs.push_back({at[k].x, at[k].y, other->radius});
          else
            boxes.push_back(oracle::rect_at(p.objects[k], at[k]));
        }
        oracle::GridOracle grid(p.workspace, disk->radius, kMargin, boxes, discs);
        auto path = grid.path(pts.front(), pts.back());
        if (!path) throw std::runtime_error("no reference path for " + name);
        pts = *path;
      }
      Trajectory tr = timed_polyline(pts, act.motion->goal.heading, obj.control, now * p.tick_seconds);
      const double T = tr.end_time() - tr.start_time();
      d = std::max<Tick>(d, static_cast<Tick>(std::ceil(T / p.tick_seconds - 1e-9)));
      pi.trajectories[a] = std::move(tr);
      at[o] = act.motion->goal;
    }
    if (d > act.duration_ub) throw std::runtime_error("reference step too slow: " + name);
    pi.schedule.present[a] = true;
    pi.schedule.start[a] = now;
    pi.schedule.end[a] = now + d;
    now += d + 1;
  }
  return pi;
}

struct ReferenceCase {
  SampProblem problem;
  SampSchedule plan;
};

inline std::vector<std::string> chain(const std::string& tag, const std::string& work, const std::string& drop) {
  return {"goto-" + tag, work + "-" + tag, "return-" + tag, drop + "-" + tag};
}

inline std::vector<std::string> concat(std::vector<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

/// Twelve problems, each with a plan built as above.
inline std::vector<ReferenceCase> reference_cases() {
  using namespace fixtures;
  std::vector<std::pair<SampProblem, std::vector<std::string>>> steps_for;

  steps_for.push_back({two_robots(), {"r0-go", "r1-go"}});
  {
    auto p = walled_door();
    add_motion(p, "door-open", 1, {4.1, 3.0}, {4.1, 4.2}, 2, 10, true);
    steps_for.push_back({p, {"door-open", "r0-go"}});
  }
  {
    SampProblem p;
    p.name = "crossing";
    p.workspace.max = {6, 6};
    auto a = add_object(p, disk_robot("ra", {1, 3}));
    auto b = add_object(p, disk_robot("rb", {3, 1}));
    add_motion(p, "ra-go", a, {1, 3}, {5, 3}, 5, 20);
    add_motion(p, "rb-go", b, {3, 1}, {3, 5}, 5, 20);
    steps_for.push_back({p, {"rb-go", "ra-go"}});
  }
  {
    SampProblem p;
    p.name = "long-move";
    p.workspace.max = {10, 4};
    auto o = add_object(p, disk_robot("r", {1, 2}));
    add_motion(p, "go", o, {1, 2}, {7.5, 2}, 1, 20);
    steps_for.push_back({p, {"go"}});
  }
  const auto log = [](int r, int i, Door d, Pick k) { return gen_logistics({r, 1, i, d, k}); };
  steps_for.push_back({log(1, 1, Door::Open, Pick::CorridorOnly), chain("s0i0-in-r0", "load", "unload")});
  steps_for.push_back({log(1, 1, Door::Closed, Pick::CorridorOnly),
                  concat({{"door-open"}, chain("s0i0-in-r0", "load", "unload")})});
  steps_for.push_back({log(2, 1, Door::Closed, Pick::CorridorOnly),
                  concat({{"door-open"}, chain("s0i0-in-r1", "load", "unload")})});
  steps_for.push_back({log(1, 2, Door::Closed, Pick::AllSides),
                  concat({chain("s0i0-out-r0", "load", "unload"), chain("s0i1-out-r0", "load", "unload")})});
  steps_for.push_back({log(2, 2, Door::Open, Pick::CorridorOnly),
                  concat({chain("s0i0-in-r0", "load", "unload"), chain("s0i1-in-r1", "load", "unload")})});
  steps_for.push_back({log(2, 2, Door::Closed, Pick::AllSides),
                  concat({{"door-open"}, chain("s0i1-in-r0", "load", "unload"), chain("s0i0-out-r1", "load", "unload")})});
  steps_for.push_back({gen_jsp({1, 1, 1}), concat({{"open-0"}, chain("i0-r0", "treat", "drop")})});
  steps_for.push_back({gen_jsp({2, 2, 2}),
                  concat({{"open-0", "open-1"}, chain("i0-r0", "treat", "drop"), chain("i1-r1", "treat", "drop")})});

  std::vector<ReferenceCase> out;
  for (auto& [p, steps] : steps_for) out.push_back({p, build_plan(p, steps)});
  return out;
}

}  // namespace samp::reference
