#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geovo/baselines.hpp"
#include "geovo/planner.hpp"
#include "geovo/scenario.hpp"

namespace geovo {

enum class Method { GeoProVo, GeoProEd, ReactiveVo, MinlpOracle };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::GeoProVo: return "geopro-vo";
    case Method::GeoProEd: return "geopro-ed";
    case Method::ReactiveVo: return "reactive-vo";
    case Method::MinlpOracle: return "minlp-oracle";
  }
  return "unknown";
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::GeoProVo, Method::GeoProEd, Method::ReactiveVo, Method::MinlpOracle})
    if (to_string(m) == s) return m;
  throw InvalidParameter("unknown method '" + s + "'");
}

struct SimConfig {
  AlspgConfig alspg;
  OracleConfig oracle;
  CostWeights weights;
  int grid_n = 41;
  bool record_timing = true;
  std::optional<int> horizon;  // overrides params.N
};

struct TraceRow {
  double t = 0.0;
  Vec2 p;
  Vec2 v;
  Vec2 u;
  double solve_ms = 0.0;
  int outer_iters = 0;
  double norm_V = 0.0;
  std::vector<double> clearances;
};

struct TraceSummary {
  bool reached_goal = false;
  double min_clearance = std::numeric_limits<double>::infinity();
  bool collision = false;
  double time_to_goal = std::numeric_limits<double>::quiet_NaN();
  double solve_max = 0.0;
  double solve_min = 0.0;
  double solve_median = 0.0;
  double solve_avg = 0.0;
  int steps = 0;
  int solver_failures = 0;
  int fallback_steps = 0;  // reactive VO found no safe candidate
};

struct SimTrace {
  Scenario scenario;
  Method method = Method::GeoProVo;
  int horizon = 1;
  std::vector<TraceRow> rows;
  TraceSummary summary;
};

/// Max/min/median/avg of per-step solve times, recomputed from rows.
inline void fill_timing(const std::vector<TraceRow>& rows, TraceSummary& s) {
  if (rows.empty()) {
    s.solve_max = s.solve_min = s.solve_median = s.solve_avg = 0.0;
    return;
  }
  std::vector<double> t;
  t.reserve(rows.size());
  for (const auto& r : rows) t.push_back(r.solve_ms);
  std::sort(t.begin(), t.end());
  s.solve_min = t.front();
  s.solve_max = t.back();
  const std::size_t n = t.size();
  s.solve_median = n % 2 ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
  double sum = 0.0;
  for (double x : t) sum += x;
  s.solve_avg = sum / static_cast<double>(n);
}

/// Summary fields that follow from the rows alone. Collision means a
/// clearance below zero; the safety margin is not part of the definition.
inline void summarize_rows(const std::vector<TraceRow>& rows, TraceSummary& s) {
  s.steps = static_cast<int>(rows.size());
  s.min_clearance = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    for (double c : r.clearances) s.min_clearance = std::min(s.min_clearance, c);
  s.collision = s.min_clearance < 0.0;
  fill_timing(rows, s);
}

inline NMPCProblem make_problem(const Scenario& sc, const RobotState& x0, double t, int horizon,
                                const CostWeights& weights) {
  NMPCProblem pr;
  pr.x0 = x0;
  pr.goal = sc.robot.goal;
  pr.horizon_N = horizon;
  pr.dt = sc.params.dt;
  pr.weights = weights;
  pr.robot_radius = sc.robot.r;
  pr.margin = sc.params.d_s;
  pr.bounds = {Box2::symmetric(sc.params.v_max), Box2::symmetric(sc.params.a_max)};
  for (const auto& o : sc.obstacles)
    pr.obstacles.push_back({Disk(o.center + o.velocity * t, o.radius), o.velocity, o.dynamic()});
  return pr;
}

/// Closed loop: plan, apply the first control, advance robot and obstacles,
/// until the goal tolerance is met or max_time elapses. Collisions are logged.
inline SimTrace run_closed_loop(const Scenario& sc, Method method, const SimConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  sc.validate();
  SimTrace trace;
  trace.scenario = sc;
  trace.method = method;
  trace.horizon = cfg.horizon.value_or(sc.params.N);
  if (trace.horizon < 1) throw InvalidParameter("horizon must be >= 1");
  const int n = trace.horizon;
  const double dt = sc.params.dt;

  RobotState x{sc.robot.start, {}};
  ControlSeq warm(static_cast<std::size_t>(n));
  TraceSummary& sum = trace.summary;

  if (norm(x.p - sc.robot.goal) <= sc.params.goal_tol) {
    sum.reached_goal = true;
    sum.time_to_goal = 0.0;
    summarize_rows(trace.rows, sum);
    return trace;
  }

  const PlannerMethod vo = vo_nmpc_method();
  const PlannerMethod ed = ed_nmpc_method();
  const long long max_steps = std::llround(sc.params.max_time / dt);
  for (long long s = 0; s < max_steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    const NMPCProblem pr = make_problem(sc, x, t, n, cfg.weights);
    TraceRow row;
    const auto t0 = clock::now();
    Vec2 u;
    switch (method) {
      case Method::GeoProVo:
      case Method::GeoProEd: {
        PlanStepOutput out = plan_step(pr, warm, cfg.alspg, method == Method::GeoProVo ? vo : ed);
        u = out.result.applied_u;
        warm = std::move(out.next_warm);
        row.outer_iters = out.result.solver_stats.outer_iterations;
        row.norm_V = out.result.solver_stats.final_norm_V;
        if (out.result.solver_failed) ++sum.solver_failures;
        break;
      }
      case Method::ReactiveVo: {
        const ReactiveVoResult r =
            reactive_vo_step(x.p, sc.robot.goal, pr.obstacles, sc.robot.r + sc.params.d_s, sc.params.v_max, cfg.grid_n);
        if (r.fallback) ++sum.fallback_steps;
        u = (r.velocity - x.v) / dt;  // velocity applied directly, acceleration unclamped
        break;
      }
      case Method::MinlpOracle: {
        OracleConfig oc = cfg.oracle;
        const OracleResult r = minlp_enumerate(pr, warm, oc);
        u = admissible_control(r.u.front(), x.v, dt, pr.bounds);
        warm = shift_warm_start(r.u);
        row.outer_iters = r.stats.outer_iterations;
        row.norm_V = r.stats.final_norm_V;
        if (r.feasible_count == 0) ++sum.solver_failures;
        break;
      }
    }
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    x = step(x, u, dt);
    row.t = static_cast<double>(s + 1) * dt;
    row.p = x.p;
    row.v = x.v;
    row.u = u;
    row.solve_ms = cfg.record_timing ? ms : 0.0;
    for (const auto& o : sc.obstacles)
      row.clearances.push_back(clearance(x.p, sc.robot.r, o.center + o.velocity * row.t, o.radius));
    trace.rows.push_back(std::move(row));
    if (norm(x.p - sc.robot.goal) <= sc.params.goal_tol) {
      sum.reached_goal = true;
      sum.time_to_goal = trace.rows.back().t;
      break;
    }
  }
  summarize_rows(trace.rows, sum);
  return trace;
}

} // namespace geovo
