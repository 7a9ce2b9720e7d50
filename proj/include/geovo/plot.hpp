#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "geovo/simulation.hpp"
#include "geovo/trace_io.hpp"

namespace geovo {

namespace detail {

struct Frame {
  double x0, y0, x1, y1, scale;
  double px(double x) const { return (x - x0) * scale; }
  double py(double y) const { return (y1 - y) * scale; }
};

inline std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

/// Index of the first row with negative clearance, or -1.
inline long first_collision(const SimTrace& t) {
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (double c : t.rows[i].clearances)
      if (c < 0.0) return static_cast<long>(i);
  return -1;
}

inline double trace_end_time(const SimTrace& t) { return t.rows.empty() ? 0.0 : t.rows.back().t; }

} // namespace detail

/// SVG overlay of one or more traces: a path per trace, obstacles sampled once
/// per second with opacity growing with time, start and goal markers per
/// scenario, and the first collision of each trace. Output depends only on
/// the traces, so identical input gives identical bytes.
inline std::string render_plot(const std::vector<SimTrace>& traces) {
  using detail::f3;
  if (traces.empty()) throw InvalidParameter("plot: no traces");

  double t_end = 0.0;
  for (const auto& t : traces) t_end = std::max(t_end, detail::trace_end_time(t));

  struct Circle { double x, y, r, opacity; };
  std::vector<Circle> obstacles;
  std::set<std::string> seen_scenarios;
  std::vector<const SimTrace*> scenario_owner;
  for (const auto& t : traces) {
    if (!seen_scenarios.insert(scenario_to_json(t.scenario).dump()).second) continue;
    scenario_owner.push_back(&t);
    const double dt = t.scenario.params.dt;
    const long stride = std::max(1L, std::lround(1.0 / dt));
    const long last = std::lround(t_end / dt);
    for (const auto& o : t.scenario.obstacles) {
      if (!o.dynamic()) {
        obstacles.push_back({o.center.x, o.center.y, o.radius, 1.0});
        continue;
      }
      for (long s = 0; s <= last; s += stride) {
        const double time = static_cast<double>(s) * dt;
        const Vec2 c = o.center + o.velocity * time;
        const double frac = t_end > 0.0 ? time / t_end : 1.0;
        obstacles.push_back({c.x, c.y, o.radius, 0.15 + 0.85 * frac});
      }
    }
  }

  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  auto grow = [&](double x, double y, double r) {
    x0 = std::min(x0, x - r); x1 = std::max(x1, x + r);
    y0 = std::min(y0, y - r); y1 = std::max(y1, y + r);
  };
  for (const auto& c : obstacles) grow(c.x, c.y, c.r);
  for (const auto& t : traces) {
    grow(t.scenario.robot.start.x, t.scenario.robot.start.y, t.scenario.robot.r);
    grow(t.scenario.robot.goal.x, t.scenario.robot.goal.y, t.scenario.robot.r);
    for (const auto& r : t.rows) grow(r.p.x, r.p.y, t.scenario.robot.r);
  }
  const double pad = 0.1;
  x0 -= pad; y0 -= pad; x1 += pad; y1 += pad;
  const double width_px = 800.0;
  const detail::Frame fr{x0, y0, x1, y1, width_px / (x1 - x0)};
  const double height_px = (y1 - y0) * fr.scale;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f3(width_px) + "\" height=\"" + f3(height_px) +
       "\" viewBox=\"0 0 " + f3(width_px) + " " + f3(height_px) + "\">\n";
  s += "<style>\n"
       ".obstacle{fill:#444;stroke:#000;stroke-dasharray:4 3}\n"
       ".path{fill:none;stroke-width:2}\n"
       ".path-0{stroke:#1f77b4}.path-1{stroke:#2ca02c}.path-2{stroke:#d62728}.path-3{stroke:#9467bd}\n"
       ".path-4{stroke:#ff7f0e}.path-5{stroke:#8c564b}\n"
       ".start{fill:#2ca02c}.goal{fill:#9467bd}\n"
       ".collision{fill:none;stroke:#d62728;stroke-width:2}\n"
       ".label{font:12px sans-serif}\n"
       "</style>\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (const auto& c : obstacles)
    s += "<circle class=\"obstacle\" cx=\"" + f3(fr.px(c.x)) + "\" cy=\"" + f3(fr.py(c.y)) + "\" r=\"" +
         f3(c.r * fr.scale) + "\" fill-opacity=\"" + f3(c.opacity * 0.35) + "\"/>\n";

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const SimTrace& t = traces[i];
    s += "<polyline class=\"path path-" + std::to_string(i % 6) + " method-" + to_string(t.method) + "\" points=\"";
    s += f3(fr.px(t.scenario.robot.start.x)) + "," + f3(fr.py(t.scenario.robot.start.y));
    for (const auto& r : t.rows) s += " " + f3(fr.px(r.p.x)) + "," + f3(fr.py(r.p.y));
    s += "\"/>\n";
  }

  for (const SimTrace* t : scenario_owner) {
    const double rr = 6.0;
    const Vec2 a = t->scenario.robot.start;
    const Vec2 b = t->scenario.robot.goal;
    s += "<circle class=\"start\" cx=\"" + f3(fr.px(a.x)) + "\" cy=\"" + f3(fr.py(a.y)) + "\" r=\"" + f3(rr) + "\"/>\n";
    s += "<circle class=\"goal\" cx=\"" + f3(fr.px(b.x)) + "\" cy=\"" + f3(fr.py(b.y)) + "\" r=\"" + f3(rr) + "\"/>\n";
  }

  for (const auto& t : traces) {
    const long idx = detail::first_collision(t);
    if (idx < 0) continue;
    const TraceRow& r = t.rows[static_cast<std::size_t>(idx)];
    s += "<circle class=\"collision\" cx=\"" + f3(fr.px(r.p.x)) + "\" cy=\"" + f3(fr.py(r.p.y)) + "\" r=\"" +
         f3(t.scenario.robot.r * fr.scale) + "\"/>\n";
    s += "<text class=\"label\" x=\"" + f3(fr.px(r.p.x) + 8.0) + "\" y=\"" + f3(fr.py(r.p.y) - 8.0) +
         "\">collision t=" + f3(r.t) + "</text>\n";
  }

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const SimTrace& t = traces[i];
    s += "<text class=\"label path-" + std::to_string(i % 6) + "\" x=\"10\" y=\"" + f3(18.0 + 16.0 * i) +
         "\" fill=\"#000\">" + t.scenario.name + " " + to_string(t.method) + " N=" + std::to_string(t.horizon) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

inline void emit_plot(const std::vector<SimTrace>& traces, const std::filesystem::path& path) {
  detail::write_text(path, render_plot(traces));
}

/// Writes trace.csv, trace.json, summary.json, summary.txt and plot.svg.
inline void write_run_outputs(const SimTrace& trace, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  detail::write_text(dir / "trace.csv", trace_to_csv(trace));
  detail::write_text(dir / "trace.json", trace_meta(trace).dump(2) + "\n");
  detail::write_text(dir / "summary.json", summary_to_json(trace).dump(2) + "\n");
  detail::write_text(dir / "summary.txt", summary_table_header() + summary_table_row(trace));
  emit_plot({trace}, dir / "plot.svg");
}

} // namespace geovo
