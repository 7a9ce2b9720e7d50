#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geovo/simulation.hpp"

namespace geovo {

namespace detail {

inline std::string fmt_num(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline nlohmann::json num_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

} // namespace detail

/// Columns: t, x, y, vx, vy, ax, ay, solve_ms, outer_iters, norm_V, clearance_1..clearance_Np
inline std::string trace_to_csv(const SimTrace& trace) {
  using detail::fmt_num;
  std::string out = "t,x,y,vx,vy,ax,ay,solve_ms,outer_iters,norm_V";
  for (std::size_t i = 0; i < trace.scenario.obstacles.size(); ++i) out += ",clearance_" + std::to_string(i + 1);
  out += '\n';
  for (const TraceRow& r : trace.rows) {
    out += fmt_num(r.t) + ',' + fmt_num(r.p.x) + ',' + fmt_num(r.p.y) + ',' + fmt_num(r.v.x) + ',' + fmt_num(r.v.y) +
           ',' + fmt_num(r.u.x) + ',' + fmt_num(r.u.y) + ',' + fmt_num(r.solve_ms, "%.6f") + ',' +
           std::to_string(r.outer_iters) + ',' + fmt_num(r.norm_V);
    for (double c : r.clearances) out += ',' + fmt_num(c);
    out += '\n';
  }
  return out;
}

inline std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,y,vx,vy,ax,ay,solve_ms,outer_iters,norm_V", 0) != 0)
    throw ParseError("trace CSV: unexpected header");
  const std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        f.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("trace CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (f.size() != columns) throw ParseError("trace CSV line " + std::to_string(lineno) + ": wrong column count");
    TraceRow r;
    r.t = f[0];
    r.p = {f[1], f[2]};
    r.v = {f[3], f[4]};
    r.u = {f[5], f[6]};
    r.solve_ms = f[7];
    r.outer_iters = static_cast<int>(f[8]);
    r.norm_V = f[9];
    r.clearances.assign(f.begin() + 10, f.end());
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json summary_to_json(const SimTrace& trace) {
  const TraceSummary& s = trace.summary;
  return {{"scenario", trace.scenario.name},
          {"method", to_string(trace.method)},
          {"horizon", trace.horizon},
          {"seed", trace.scenario.seed},
          {"reached_goal", s.reached_goal},
          {"collision", s.collision},
          {"min_clearance", detail::num_or_null(s.min_clearance)},
          {"time_to_goal", detail::num_or_null(s.time_to_goal)},
          {"steps", s.steps},
          {"solver_failures", s.solver_failures},
          {"fallback_steps", s.fallback_steps},
          {"solve_ms", {{"max", s.solve_max}, {"min", s.solve_min}, {"median", s.solve_median}, {"avg", s.solve_avg}}}};
}

inline std::string summary_table_header() {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-13s %3s %8s %9s %7s %10s %10s %10s %10s %10s\n", "scenario", "method", "N",
                "reached", "collision", "t_goal", "min_clr", "max_ms", "min_ms", "median_ms", "avg_ms");
  return buf;
}

inline std::string summary_table_row(const SimTrace& trace) {
  const TraceSummary& s = trace.summary;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-13s %3d %8s %9s %7.2f %10.4f %10.3f %10.3f %10.3f %10.3f\n",
                trace.scenario.name.c_str(), to_string(trace.method).c_str(), trace.horizon,
                s.reached_goal ? "yes" : "no", s.collision ? "YES" : "no", s.time_to_goal, s.min_clearance,
                s.solve_max, s.solve_min, s.solve_median, s.solve_avg);
  return buf;
}

/// Sidecar metadata next to a CSV trace so plots can be rebuilt from files.
inline nlohmann::json trace_meta(const SimTrace& trace) {
  return {{"scenario", scenario_to_json(trace.scenario)}, {"method", to_string(trace.method)}, {"horizon", trace.horizon}};
}

/// Reads `<stem>.csv` plus its `<stem>.json` sidecar.
inline SimTrace load_trace(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw ParseError("cannot open trace '" + csv_path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  SimTrace trace;
  trace.rows = parse_trace_csv(ss.str());

  std::filesystem::path meta_path = csv_path;
  meta_path.replace_extension(".json");
  std::ifstream min(meta_path);
  if (!min) throw ParseError("missing trace metadata '" + meta_path.string() + "'");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(min);
    trace.scenario = parse_scenario(meta.at("scenario").dump());
    trace.method = parse_method(meta.at("method").get<std::string>());
    trace.horizon = meta.at("horizon").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("trace metadata '" + meta_path.string() + "': " + e.what());
  }
  summarize_rows(trace.rows, trace.summary);
  if (!trace.rows.empty() && norm(trace.rows.back().p - trace.scenario.robot.goal) <= trace.scenario.params.goal_tol) {
    trace.summary.reached_goal = true;
    trace.summary.time_to_goal = trace.rows.back().t;
  }
  return trace;
}

} // namespace geovo
