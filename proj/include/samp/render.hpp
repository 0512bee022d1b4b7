#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>

#include "samp/geometry.hpp"
#include "samp/model.hpp"
#include "samp/semantics.hpp"

namespace samp {

namespace render_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  return out;
}

/// Blue at t = 0 through red at t = horizon.
inline std::string time_color(double t, double horizon) {
  const double f = horizon > 0 ? std::clamp(t / horizon, 0.0, 1.0) : 0.0;
  return "hsl(" + num(240 * (1 - f)) + ",80%,45%)";
}

}  // namespace render_detail

/// SVG with a top-down workspace view on the left and a Gantt chart on the right.
/// Trajectory samples are drawn as dots colored by time, so a robot that waits
/// leaves several dots of different colors at one spot.
inline std::string render_svg(const SampProblem& p, const SampSchedule& pi) {
  using namespace render_detail;
  constexpr double kScale = 50, kPad = 20, kRow = 18, kLabel = 180, kGanttW = 520;
  const auto& ws = p.workspace;
  const double ww = (ws.max.x - ws.min.x) * kScale, wh = (ws.max.y - ws.min.y) * kScale;
  const std::size_t n = p.os.activities.size();
  const double gh = kRow * (n + 2);
  const double width = ww + kLabel + kGanttW + 4 * kPad, height = std::max(wh, gh) + 2 * kPad;
  const Schedule& s = pi.schedule;
  const double horizon = std::max<double>(1, makespan(s)) * p.tick_seconds;

  auto X = [&](double x) { return num(kPad + (x - ws.min.x) * kScale); };
  auto Y = [&](double y) { return num(kPad + (ws.max.y - y) * kScale); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<title>" << escape(p.name) << "</title>\n";

  o << "<g class=\"workspace\">\n";
  o << "<rect x=\"" << X(ws.min.x) << "\" y=\"" << Y(ws.max.y) << "\" width=\"" << num(ww) << "\" height=\""
    << num(wh) << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& poly : ws.obstacles) {
    o << "<polygon class=\"obstacle\" fill=\"#777\" points=\"";
    for (const auto& v : poly) o << X(v.x) << "," << Y(v.y) << " ";
    o << "\"/>\n";
  }
  auto footprint = [&](const MovableObject& ob, const Configuration& q, const std::string& cls) {
    const Footprint f = occ(ob, q);
    if (const auto* c = std::get_if<Circle>(&f))
      o << "<circle class=\"" << cls << "\" data-object=\"" << escape(ob.name) << "\" cx=\"" << X(c->c.x)
        << "\" cy=\"" << Y(c->c.y) << "\" r=\"" << num(c->r * kScale)
        << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"3,2\"/>\n";
    else {
      o << "<polygon class=\"" << cls << "\" data-object=\"" << escape(ob.name)
        << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"3,2\" points=\"";
      for (const auto& v : std::get<ConvexPolygon>(f).v) o << X(v.x) << "," << Y(v.y) << " ";
      o << "\"/>\n";
    }
  };
  for (const auto& ob : p.objects) {
    footprint(ob, ob.initial, "initial");
    o << "<text x=\"" << X(ob.initial.x) << "\" y=\"" << Y(ob.initial.y) << "\" text-anchor=\"middle\">"
      << escape(ob.name) << "</text>\n";
  }
  for (const auto& [a, tr] : pi.trajectories) {
    if (a >= n || !s.present[a] || tr.empty()) continue;
    o << "<g class=\"trajectory\" data-activity=\"" << escape(p.os.activities[a].name) << "\">\n";
    o << "<polyline fill=\"none\" stroke=\"#bbb\" points=\"";
    for (const auto& smp : tr.samples) o << X(smp.q.x) << "," << Y(smp.q.y) << " ";
    o << "\"/>\n";
    for (const auto& smp : tr.samples)
      o << "<circle class=\"sample\" cx=\"" << X(smp.q.x) << "\" cy=\"" << Y(smp.q.y) << "\" r=\"2\" data-t=\""
        << num(smp.t) << "\" fill=\"" << time_color(smp.t, horizon) << "\"/>\n";
    o << "</g>\n";
  }
  o << "</g>\n";

  const double gx = ww + 3 * kPad, bar0 = gx + kLabel;
  const double tick_w = kGanttW / std::max<double>(1, makespan(s) + 1);
  o << "<g class=\"gantt\">\n";
  for (std::size_t a = 0; a < n; ++a) {
    const double y = kPad + kRow * a;
    o << "<g class=\"gantt-row\" data-activity=\"" << escape(p.os.activities[a].name) << "\">";
    o << "<text x=\"" << num(gx) << "\" y=\"" << num(y + kRow * 0.7) << "\">" << escape(p.os.activities[a].name)
      << "</text>";
    if (a < s.size() && s.present[a])
      o << "<rect class=\"bar\" data-start=\"" << s.start[a] << "\" data-end=\"" << s.end[a] << "\" x=\""
        << num(bar0 + s.start[a] * tick_w) << "\" y=\"" << num(y + 2) << "\" width=\""
        << num(std::max(1.0, (s.end[a] - s.start[a]) * tick_w)) << "\" height=\"" << num(kRow - 4) << "\" fill=\""
        << (p.os.activities[a].motion ? "#4a7fd0" : "#d09a4a") << "\"><title>[" << s.start[a] << ", "
        << s.end[a] << "]</title></rect>";
    o << "</g>\n";
  }
  const double axis = kPad + kRow * n + 4;
  o << "<line x1=\"" << num(bar0) << "\" y1=\"" << num(axis) << "\" x2=\"" << num(bar0 + kGanttW) << "\" y2=\""
    << num(axis) << "\" stroke=\"black\"/>\n";
  const Tick ms = makespan(s), step = std::max<Tick>(1, ms / 10);
  for (Tick t = 0; t <= ms; t += step)
    o << "<text x=\"" << num(bar0 + t * tick_w) << "\" y=\"" << num(axis + 12) << "\" text-anchor=\"middle\">" << t
      << "</text>\n";
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace samp
