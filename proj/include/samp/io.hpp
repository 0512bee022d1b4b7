#pragma once

// JSON problem and plan files.

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "samp/model.hpp"

namespace samp {

inline constexpr int kFormatVersion = 1;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace io_detail {

using json = nlohmann::json;

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
}

inline void check_fields(const json& j, const std::string& path, std::set<std::string> allowed,
                         std::set<std::string> required) {
  require_object(j, path);
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ParseError(path + ": unknown field '" + k + "'");
  for (const auto& k : required)
    if (!j.contains(k)) throw ParseError(path + ": missing field '" + k + "'");
}

template <class T>
T get(const json& j, const std::string& key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(path + "." + key + ": wrong type or missing");
  }
}

inline std::string anchor_name(Anchor a) {
  switch (a) {
    case Anchor::Start: return "start";
    case Anchor::End: return "end";
    case Anchor::Origin: return "origin";
  }
  return "?";
}

inline Anchor parse_anchor(const std::string& s, const std::string& path) {
  if (s == "start") return Anchor::Start;
  if (s == "end") return Anchor::End;
  if (s == "origin") return Anchor::Origin;
  throw ParseError(path + ": unknown anchor '" + s + "'");
}

inline json config_json(const Configuration& q) { return {{"x", q.x}, {"y", q.y}, {"heading", q.heading}}; }

inline Configuration parse_config(const json& j, const std::string& path) {
  check_fields(j, path, {"x", "y", "heading"}, {"x", "y"});
  Configuration q{get<double>(j, "x", path), get<double>(j, "y", path), 0.0};
  if (j.contains("heading")) q.heading = get<double>(j, "heading", path);
  return q;
}

inline json own_timing_json(const TimingExpr& k) {
  return {{"anchor", anchor_name(k.anchor)}, {"offset", k.offset}};
}

inline TimingExpr parse_own_timing(const json& j, ActivityId self, const std::string& path) {
  check_fields(j, path, {"anchor", "offset"}, {"anchor"});
  TimingExpr k;
  k.activity = self;
  k.anchor = parse_anchor(get<std::string>(j, "anchor", path), path + ".anchor");
  if (k.anchor == Anchor::Origin) throw ParseError(path + ": must be anchored on the activity");
  k.offset = j.contains("offset") ? get<Tick>(j, "offset", path) : 0;
  return k;
}

inline json timing_json(const TimingExpr& k, const OsProblem& os) {
  json j = {{"anchor", anchor_name(k.anchor)}, {"offset", k.offset}};
  if (k.anchor != Anchor::Origin) j["activity"] = os.activities[k.activity].name;
  return j;
}

inline TimingExpr parse_timing(const json& j, const OsProblem& os, const std::string& path) {
  check_fields(j, path, {"activity", "anchor", "offset"}, {"anchor"});
  TimingExpr k;
  k.anchor = parse_anchor(get<std::string>(j, "anchor", path), path + ".anchor");
  k.offset = j.contains("offset") ? get<Tick>(j, "offset", path) : 0;
  if (k.anchor != Anchor::Origin) {
    auto name = get<std::string>(j, "activity", path);
    k.activity = os.activity_index(name);
    if (k.activity == kNone) throw ParseError(path + ".activity: unknown activity '" + name + "'");
  }
  return k;
}

inline json formula_json(const Formula& f, const OsProblem& os) {
  using K = Formula::Kind;
  auto kids = [&] {
    json a = json::array();
    for (const auto& c : f.children) a.push_back(formula_json(c, os));
    return a;
  };
  switch (f.kind) {
    case K::True: return {{"const", true}};
    case K::False: return {{"const", false}};
    case K::Present: return {{"present", os.activities[f.activity].name}};
    case K::Diff:
      return {{"diff", {{"lhs", timing_json(f.lhs, os)}, {"rhs", timing_json(f.rhs, os)}, {"bound", f.bound}}}};
    case K::Not: return {{"not", formula_json(f.children[0], os)}};
    case K::And: return {{"and", kids()}};
    case K::Or: return {{"or", kids()}};
    case K::Implies: return {{"implies", kids()}};
  }
  return {};
}

inline Formula parse_formula(const json& j, const OsProblem& os, const std::string& path) {
  require_object(j, path);
  if (j.size() != 1) throw ParseError(path + ": a formula node has exactly one key");
  const auto& [key, v] = *j.items().begin();
  const std::string sub = path + "." + key;
  auto list = [&](std::size_t min_size) {
    if (!v.is_array() || v.size() < min_size) throw ParseError(sub + ": expected a list");
    std::vector<Formula> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(parse_formula(v[i], os, sub + "[" + std::to_string(i) + "]"));
    return out;
  };
  Formula f;
  if (key == "const") {
    if (!v.is_boolean()) throw ParseError(sub + ": expected a boolean");
    return Formula::constant(v.get<bool>());
  } else if (key == "present") {
    if (!v.is_string()) throw ParseError(sub + ": expected an activity name");
    ActivityId a = os.activity_index(v.get<std::string>());
    if (a == kNone) throw ParseError(sub + ": unknown activity '" + v.get<std::string>() + "'");
    return Formula::present(a);
  } else if (key == "diff") {
    check_fields(v, sub, {"lhs", "rhs", "bound"}, {"lhs", "rhs", "bound"});
    f.kind = Formula::Kind::Diff;
    f.lhs = parse_timing(v["lhs"], os, sub + ".lhs");
    f.rhs = parse_timing(v["rhs"], os, sub + ".rhs");
    f.bound = get<Tick>(v, "bound", sub);
    return f;
  } else if (key == "not") {
    f.kind = Formula::Kind::Not;
    f.children.push_back(parse_formula(v, os, sub));
    return f;
  } else if (key == "and" || key == "or") {
    f.kind = key == "and" ? Formula::Kind::And : Formula::Kind::Or;
    f.children = list(0);
    return f;
  } else if (key == "implies") {
    f.kind = Formula::Kind::Implies;
    f.children = list(2);
    if (f.children.size() != 2) throw ParseError(sub + ": expected two operands");
    return f;
  }
  throw ParseError(path + ": unknown field '" + key + "'");
}

inline json geometry_json(const GeometryModel& g) {
  if (const auto* d = std::get_if<Disk>(&g)) return {{"shape", "disk"}, {"radius", d->radius}};
  const auto& r = std::get<Rectangle>(g);
  return {{"shape", "rectangle"}, {"width", r.width}, {"height", r.height}};
}

inline GeometryModel parse_geometry(const json& j, const std::string& path) {
  require_object(j, path);
  auto shape = get<std::string>(j, "shape", path);
  if (shape == "disk") {
    check_fields(j, path, {"shape", "radius"}, {"shape", "radius"});
    return Disk{get<double>(j, "radius", path)};
  }
  if (shape == "rectangle") {
    check_fields(j, path, {"shape", "width", "height"}, {"shape", "width", "height"});
    return Rectangle{get<double>(j, "width", path), get<double>(j, "height", path)};
  }
  throw ParseError(path + ".shape: unknown shape '" + shape + "'");
}

}  // namespace io_detail

inline std::string serialize_problem(const SampProblem& p) {
  using io_detail::json;
  using namespace io_detail;
  const OsProblem& os = p.os;
  json j;
  j["format_version"] = kFormatVersion;
  j["name"] = p.name;
  j["metadata"] = json::object();
  for (const auto& [k, v] : p.metadata) j["metadata"][k] = v;
  j["tick_seconds"] = p.tick_seconds;
  j["use_fluents"] = os.use_fluents;

  j["fluents"] = json::array();
  for (const auto& f : os.fluents)
    j["fluents"].push_back({{"name", f.name}, {"domain", f.domain}, {"initial", f.domain.at(f.initial)}});

  j["resources"] = json::array();
  for (const auto& r : os.resources) j["resources"].push_back({{"name", r.name}, {"capacity", r.capacity}});

  j["objects"] = json::array();
  for (const auto& o : p.objects)
    j["objects"].push_back({{"name", o.name},
                            {"geometry", geometry_json(o.geometry)},
                            {"control",
                             {{"max_speed", o.control.max_speed},
                              {"max_accel", o.control.max_accel},
                              {"model_id", o.control.model_id}}},
                            {"initial", config_json(o.initial)}});

  json obstacles = json::array();
  for (const auto& poly : p.workspace.obstacles) {
    json vs = json::array();
    for (const auto& v : poly) vs.push_back({v.x, v.y});
    obstacles.push_back(vs);
  }
  j["workspace"] = {{"bounds",
                     {{"min", {p.workspace.min.x, p.workspace.min.y}},
                      {"max", {p.workspace.max.x, p.workspace.max.y}}}},
                    {"obstacles", obstacles}};

  j["activities"] = json::array();
  for (const auto& a : os.activities) {
    json ja = {{"name", a.name}, {"optional", a.optional}, {"duration", {a.duration_lb, a.duration_ub}}};
    ja["resources"] = json::object();
    for (const auto& [r, u] : a.resource_usage) ja["resources"][os.resources.at(r).name] = u;
    ja["conditions"] = json::array();
    for (const auto& c : a.conditions)
      ja["conditions"].push_back({{"from", own_timing_json(c.from)},
                                  {"to", own_timing_json(c.to)},
                                  {"fluent", os.fluents.at(c.fluent).name},
                                  {"value", os.fluents.at(c.fluent).domain.at(c.value)}});
    ja["effects"] = json::array();
    for (const auto& e : a.effects)
      ja["effects"].push_back({{"at", own_timing_json(e.at)},
                               {"fluent", os.fluents.at(e.fluent).name},
                               {"value", os.fluents.at(e.fluent).domain.at(e.value)}});
    if (a.motion)
      ja["motion"] = {{"object", p.objects.at(a.motion->object).name},
                      {"start", config_json(a.motion->start)},
                      {"goal", config_json(a.motion->goal)}};
    j["activities"].push_back(ja);
  }

  j["constraints"] = json::array();
  for (const auto& c : os.temporal_constraints) j["constraints"].push_back(formula_json(c, os));
  return j.dump(1) + "\n";
}

/// Strict parse: unknown fields, unknown references and malformed syntax all throw ParseError.
inline SampProblem parse_problem(const std::string& text) {
  using io_detail::json;
  using namespace io_detail;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  check_fields(j, "$",
               {"format_version", "name", "metadata", "tick_seconds", "use_fluents", "fluents",
                "resources", "objects", "workspace", "activities", "constraints"},
               {"format_version", "activities"});
  if (get<int>(j, "format_version", "$") != kFormatVersion)
    throw ParseError("$.format_version: unsupported version");

  SampProblem p;
  OsProblem& os = p.os;
  if (j.contains("name")) p.name = get<std::string>(j, "name", "$");
  if (j.contains("metadata")) {
    require_object(j["metadata"], "$.metadata");
    for (const auto& [k, v] : j["metadata"].items()) {
      if (!v.is_string()) throw ParseError("$.metadata." + k + ": expected a string");
      p.metadata[k] = v.get<std::string>();
    }
  }
  if (j.contains("tick_seconds")) p.tick_seconds = get<double>(j, "tick_seconds", "$");
  if (j.contains("use_fluents")) os.use_fluents = get<bool>(j, "use_fluents", "$");

  auto array_at = [&](const char* key) -> json {
    if (!j.contains(key)) return json::array();
    if (!j[key].is_array()) throw ParseError(std::string("$.") + key + ": expected a list");
    return j[key];
  };

  json fl = array_at("fluents");
  for (std::size_t i = 0; i < fl.size(); ++i) {
    std::string path = "$.fluents[" + std::to_string(i) + "]";
    check_fields(fl[i], path, {"name", "domain", "initial"}, {"name", "domain", "initial"});
    FluentDef f;
    f.name = get<std::string>(fl[i], "name", path);
    f.domain = get<std::vector<std::string>>(fl[i], "domain", path);
    f.initial = f.value_index(get<std::string>(fl[i], "initial", path));
    if (f.initial == kNone) throw ParseError(path + ".initial: value not in domain");
    os.fluents.push_back(std::move(f));
  }

  json rs = array_at("resources");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    std::string path = "$.resources[" + std::to_string(i) + "]";
    check_fields(rs[i], path, {"name", "capacity"}, {"name", "capacity"});
    os.resources.push_back({get<std::string>(rs[i], "name", path), get<int>(rs[i], "capacity", path)});
  }

  json ob = array_at("objects");
  for (std::size_t i = 0; i < ob.size(); ++i) {
    std::string path = "$.objects[" + std::to_string(i) + "]";
    check_fields(ob[i], path, {"name", "geometry", "control", "initial"},
                 {"name", "geometry", "control", "initial"});
    MovableObject o;
    o.name = get<std::string>(ob[i], "name", path);
    o.geometry = parse_geometry(ob[i]["geometry"], path + ".geometry");
    const json& c = ob[i]["control"];
    check_fields(c, path + ".control", {"max_speed", "max_accel", "model_id"},
                 {"max_speed", "max_accel", "model_id"});
    o.control = {get<double>(c, "max_speed", path + ".control"),
                 get<double>(c, "max_accel", path + ".control"),
                 get<std::string>(c, "model_id", path + ".control")};
    o.initial = parse_config(ob[i]["initial"], path + ".initial");
    p.objects.push_back(std::move(o));
  }

  if (j.contains("workspace")) {
    const json& w = j["workspace"];
    check_fields(w, "$.workspace", {"bounds", "obstacles"}, {"bounds"});
    const json& b = w["bounds"];
    check_fields(b, "$.workspace.bounds", {"min", "max"}, {"min", "max"});
    auto mn = get<std::vector<double>>(b, "min", "$.workspace.bounds");
    auto mx = get<std::vector<double>>(b, "max", "$.workspace.bounds");
    if (mn.size() != 2 || mx.size() != 2) throw ParseError("$.workspace.bounds: expected 2D points");
    p.workspace.min = {mn[0], mn[1]};
    p.workspace.max = {mx[0], mx[1]};
    p.workspace.obstacles.clear();
    if (w.contains("obstacles")) {
      auto polys = get<std::vector<std::vector<std::vector<double>>>>(w, "obstacles", "$.workspace");
      for (std::size_t i = 0; i < polys.size(); ++i) {
        Polygon poly;
        for (const auto& v : polys[i]) {
          if (v.size() != 2)
            throw ParseError("$.workspace.obstacles[" + std::to_string(i) + "]: expected 2D points");
          poly.push_back({v[0], v[1]});
        }
        p.workspace.obstacles.push_back(std::move(poly));
      }
    }
  }

  // Names first so constraints can refer forward.
  json as = array_at("activities");
  for (std::size_t i = 0; i < as.size(); ++i) {
    std::string path = "$.activities[" + std::to_string(i) + "]";
    require_object(as[i], path);
    Activity a;
    a.name = get<std::string>(as[i], "name", path);
    os.activities.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < as.size(); ++i) {
    std::string path = "$.activities[" + std::to_string(i) + "]";
    const json& ja = as[i];
    check_fields(ja, path, {"name", "optional", "duration", "resources", "conditions", "effects", "motion"},
                 {"name", "duration"});
    Activity& a = os.activities[i];
    a.optional = ja.contains("optional") ? get<bool>(ja, "optional", path) : false;
    auto d = get<std::vector<Tick>>(ja, "duration", path);
    if (d.size() != 2) throw ParseError(path + ".duration: expected [lb, ub]");
    a.duration_lb = d[0];
    a.duration_ub = d[1];
    if (ja.contains("resources")) {
      require_object(ja["resources"], path + ".resources");
      for (const auto& [rn, u] : ja["resources"].items()) {
        ResourceId r = os.resource_index(rn);
        if (r == kNone) throw ParseError(path + ".resources: unknown resource '" + rn + "'");
        if (!u.is_number_integer()) throw ParseError(path + ".resources." + rn + ": expected an integer");
        a.resource_usage.push_back({r, u.get<int>()});
      }
    }
    auto fluent_value = [&](const json& jc, const std::string& cp, FluentId& f, std::size_t& v) {
      auto fn = get<std::string>(jc, "fluent", cp);
      f = os.fluent_index(fn);
      if (f == kNone) throw ParseError(cp + ".fluent: unknown fluent '" + fn + "'");
      v = os.fluents[f].value_index(get<std::string>(jc, "value", cp));
      if (v == kNone) throw ParseError(cp + ".value: value not in domain of '" + fn + "'");
    };
    if (ja.contains("conditions")) {
      for (std::size_t k = 0; k < ja["conditions"].size(); ++k) {
        std::string cp = path + ".conditions[" + std::to_string(k) + "]";
        const json& jc = ja["conditions"][k];
        check_fields(jc, cp, {"from", "to", "fluent", "value"}, {"from", "to", "fluent", "value"});
        FluentCondition c;
        c.from = parse_own_timing(jc["from"], i, cp + ".from");
        c.to = parse_own_timing(jc["to"], i, cp + ".to");
        fluent_value(jc, cp, c.fluent, c.value);
        a.conditions.push_back(c);
      }
    }
    if (ja.contains("effects")) {
      for (std::size_t k = 0; k < ja["effects"].size(); ++k) {
        std::string cp = path + ".effects[" + std::to_string(k) + "]";
        const json& je = ja["effects"][k];
        check_fields(je, cp, {"at", "fluent", "value"}, {"at", "fluent", "value"});
        FluentEffect e;
        e.at = parse_own_timing(je["at"], i, cp + ".at");
        fluent_value(je, cp, e.fluent, e.value);
        a.effects.push_back(e);
      }
    }
    if (ja.contains("motion")) {
      const json& jm = ja["motion"];
      std::string mp = path + ".motion";
      check_fields(jm, mp, {"object", "start", "goal"}, {"object", "start", "goal"});
      MotionConstraint mc;
      auto on = get<std::string>(jm, "object", mp);
      mc.object = p.object_index(on);
      // Undeclared objects are reported by validate_problem.
      if (mc.object == kNone) mc.object = p.objects.size() + 1000;
      mc.start = parse_config(jm["start"], mp + ".start");
      mc.goal = parse_config(jm["goal"], mp + ".goal");
      a.motion = mc;
    }
  }

  json cs = array_at("constraints");
  for (std::size_t i = 0; i < cs.size(); ++i)
    os.temporal_constraints.push_back(
        parse_formula(cs[i], os, "$.constraints[" + std::to_string(i) + "]"));
  return p;
}

inline std::string serialize_plan(const SampSchedule& pi, const SampProblem& p) {
  using io_detail::json;
  json j;
  j["format_version"] = kFormatVersion;
  j["activities"] = json::array();
  for (ActivityId a = 0; a < p.os.activities.size(); ++a) {
    json ja = {{"name", p.os.activities[a].name},
               {"present", static_cast<bool>(pi.schedule.present[a])},
               {"start", pi.schedule.start[a]},
               {"end", pi.schedule.end[a]}};
    auto it = pi.trajectories.find(a);
    if (it != pi.trajectories.end()) {
      json tr = json::array();
      for (const auto& s : it->second.samples) tr.push_back({s.t, s.q.x, s.q.y, s.q.heading});
      ja["trajectory"] = tr;
    }
    j["activities"].push_back(ja);
  }
  return j.dump(1) + "\n";
}

/// Activities missing from the file are read as absent.
inline SampSchedule parse_plan(const std::string& text, const SampProblem& p) {
  using io_detail::json;
  using namespace io_detail;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  check_fields(j, "$", {"format_version", "activities"}, {"format_version", "activities"});
  if (get<int>(j, "format_version", "$") != kFormatVersion)
    throw ParseError("$.format_version: unsupported version");
  SampSchedule pi;
  pi.schedule = Schedule(p.os.activities.size());
  const json& as = j["activities"];
  if (!as.is_array()) throw ParseError("$.activities: expected a list");
  for (std::size_t i = 0; i < as.size(); ++i) {
    std::string path = "$.activities[" + std::to_string(i) + "]";
    check_fields(as[i], path, {"name", "present", "start", "end", "trajectory"},
                 {"name", "present", "start", "end"});
    auto name = get<std::string>(as[i], "name", path);
    ActivityId a = p.os.activity_index(name);
    if (a == kNone) throw ParseError(path + ".name: unknown activity '" + name + "'");
    pi.schedule.present[a] = get<bool>(as[i], "present", path);
    pi.schedule.start[a] = get<Tick>(as[i], "start", path);
    pi.schedule.end[a] = get<Tick>(as[i], "end", path);
    if (as[i].contains("trajectory")) {
      auto rows = get<std::vector<std::vector<double>>>(as[i], "trajectory", path);
      Trajectory tr;
      for (const auto& r : rows) {
        if (r.size() != 4) throw ParseError(path + ".trajectory: expected [t, x, y, heading] rows");
        tr.samples.push_back({r[0], {r[1], r[2], r[3]}});
      }
      pi.trajectories[a] = std::move(tr);
    }
  }
  return pi;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << data;
}

}  // namespace samp
