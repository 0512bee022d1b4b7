#pragma once

// Hand-built problems shared by several test files.

#include "samp/model.hpp"

namespace samp::fixtures {

inline MovableObject disk_robot(const std::string& name, Configuration at, double r = 0.3) {
  MovableObject o;
  o.name = name;
  o.geometry = Disk{r};
  o.control = {1.0, 1.0, "holonomic"};
  o.initial = at;
  return o;
}

/// Registers `o` as an object plus its unary resource and returns the object id.
inline ObjectId add_object(SampProblem& p, MovableObject o) {
  p.os.resources.push_back({o.name, 1});
  p.objects.push_back(std::move(o));
  return p.objects.size() - 1;
}

inline ActivityId add_motion(SampProblem& p, const std::string& name, ObjectId o, Configuration from,
                             Configuration to, Tick lb, Tick ub, bool optional = false) {
  Activity a;
  a.name = name;
  a.optional = optional;
  a.duration_lb = lb;
  a.duration_ub = ub;
  a.resource_usage.push_back({p.os.resource_index(p.objects[o].name), 1});
  a.motion = MotionConstraint{o, from, to};
  p.os.activities.push_back(a);
  return p.os.activities.size() - 1;
}

/// Empty 10 x 10 workspace with two disk robots each holding one motion.
inline SampProblem two_robots() {
  SampProblem p;
  p.name = "two-robots";
  p.workspace.min = {0, 0};
  p.workspace.max = {10, 10};
  auto r0 = add_object(p, disk_robot("r0", {1, 1}));
  auto r1 = add_object(p, disk_robot("r1", {1, 3}));
  add_motion(p, "r0-go", r0, {1, 1}, {5, 1}, 6, 12);
  add_motion(p, "r1-go", r1, {1, 3}, {5, 3}, 6, 12);
  return p;
}


inline MovableObject door_panel(const std::string& name, Configuration at) {
  MovableObject o;
  o.name = name;
  o.geometry = Rectangle{0.1, 1.0};
  o.control = {1.0, 4.0, "slider"};
  o.initial = at;
  return o;
}

/// 10 x 6 workspace split by a wall at x in [4, 4.2] with a 1.1 m gap around y = 3,
/// closed by a door panel that slides up into a channel in the wall (open at y = 4.2).
/// The robot goes from the left room to the right one.
inline SampProblem walled_door() {
  SampProblem p;
  p.name = "walled-door";
  p.workspace.min = {0, 0};
  p.workspace.max = {10, 6};
  p.workspace.obstacles.push_back({{4, 0}, {4.2, 0}, {4.2, 2.45}, {4, 2.45}});
  p.workspace.obstacles.push_back({{3.9, 3.55}, {4.0, 3.55}, {4.0, 4.8}, {3.9, 4.8}});
  p.workspace.obstacles.push_back({{4.2, 3.55}, {4.3, 3.55}, {4.3, 4.8}, {4.2, 4.8}});
  p.workspace.obstacles.push_back({{3.9, 4.8}, {4.3, 4.8}, {4.3, 6}, {3.9, 6}});
  auto r = add_object(p, disk_robot("r0", {1, 3}));
  add_object(p, door_panel("door", {4.1, 3.0}));
  add_motion(p, "r0-go", r, {1, 3}, {8, 3}, 9, 30);
  return p;
}

}  // namespace samp::fixtures
