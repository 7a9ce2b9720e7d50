#pragma once

#include <limits>
#include <string>
#include <vector>

#include "geovo/alspg.hpp"
#include "geovo/problem.hpp"
#include "geovo/projectors.hpp"

namespace geovo {

/// Velocity bound blocks, one per horizon step, obstacle index -1.
inline ConstraintBlocks state_box_blocks(const NMPCProblem& problem) {
  ConstraintBlocks out;
  out.reserve(static_cast<std::size_t>(problem.horizon_N));
  for (int k = 1; k <= problem.horizon_N; ++k)
    out.push_back({problem.bounds.v_box, {k, Quantity::Velocity}, {}, 0.1, {-1, k}});
  return out;
}

/// Sum of radii plus safety margin used to inflate obstacle `o`.
inline double inflated_radius(const NMPCProblem& problem, const Obstacle& o) {
  return problem.robot_radius + o.disk.radius + problem.margin;
}

/// VO blocks for every (obstacle, step), cones built at the reference robot
/// position and the predicted obstacle centre of that step, followed by the
/// velocity-bound blocks. A degenerate cone becomes the flee halfplane.
inline ConstraintBlocks build_blocks(const NMPCProblem& problem, const StateTraj& reference) {
  if (reference.size() != static_cast<std::size_t>(problem.horizon_N))
    throw InvalidParameter("build_blocks: reference trajectory must have length N");
  ConstraintBlocks out;
  out.reserve(problem.obstacles.size() * reference.size() + reference.size());
  for (std::size_t i = 0; i < problem.obstacles.size(); ++i) {
    const Obstacle& o = problem.obstacles[i];
    const double r_sum = inflated_radius(problem, o);
    for (int k = 1; k <= problem.horizon_N; ++k) {
      const Vec2 center = o.predicted_center(k, problem.dt);
      const Vec2 p = reference[static_cast<std::size_t>(k - 1)].p;
      VOCone cone = build_vo_cone(p, center, o.velocity, r_sum);
      ProjectorSpec spec = cone.degenerate ? ProjectorSpec{flee_halfplane(p, center, o.velocity)} : ProjectorSpec{cone};
      out.push_back({std::move(spec), {k, Quantity::Velocity}, {}, 0.1, {static_cast<int>(i), k}});
    }
  }
  auto boxes = state_box_blocks(problem);
  out.insert(out.end(), boxes.begin(), boxes.end());
  return out;
}

/// A constraint model for the ALSPG planner.
struct PlannerMethod {
  std::string name;
  BlockBuilder builder;
};

inline PlannerMethod vo_nmpc_method() { return {"geopro-vo", &build_blocks}; }

struct PlanStepResult {
  Vec2 applied_u;
  ControlSeq u_opt;
  StateTraj predicted_traj;
  AlspgStats solver_stats;
  std::vector<double> clearances;  // per obstacle, min over the predicted trajectory
  bool solver_failed = false;
  std::string failure;
};

struct PlanStepOutput {
  PlanStepResult result;
  ControlSeq next_warm;
};

/// Centre distance minus the sum of radii; negative means overlap.
inline double clearance(const Vec2& p, double robot_radius, const Vec2& center, double obstacle_radius) {
  return norm(p - center) - (robot_radius + obstacle_radius);
}

inline std::vector<double> predicted_clearances(const NMPCProblem& problem, const StateTraj& traj) {
  std::vector<double> out;
  out.reserve(problem.obstacles.size());
  for (const Obstacle& o : problem.obstacles) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k)
      best = std::min(best, clearance(traj[k].p, problem.robot_radius,
                                      o.predicted_center(static_cast<int>(k) + 1, problem.dt), o.disk.radius));
    out.push_back(best);
  }
  return out;
}

/// Clamps a control to the acceleration box and, where possible, to the range
/// that keeps the next velocity inside the velocity box.
inline Vec2 admissible_control(const Vec2& u, const Vec2& v, double dt, const StateControlBounds& bounds) {
  const Box2& a = bounds.a_box;
  const Box2& vb = bounds.v_box;
  auto axis = [dt](double ui, double vi, double alo, double ahi, double vlo, double vhi) {
    const double lo = std::max(alo, (vlo - vi) / dt);
    const double hi = std::min(ahi, (vhi - vi) / dt);
    if (lo <= hi) return std::clamp(ui, lo, hi);
    return std::clamp((std::clamp(vi, vlo, vhi) - vi) / dt, alo, ahi);
  };
  return {axis(u.x, v.x, a.lower.x, a.upper.x, vb.lower.x, vb.upper.x),
          axis(u.y, v.y, a.lower.y, a.upper.y, vb.lower.y, vb.upper.y)};
}

inline ControlSeq shift_warm_start(const ControlSeq& u) {
  ControlSeq out(u.size());
  for (std::size_t k = 0; k + 1 < u.size(); ++k) out[k] = u[k + 1];
  if (!u.empty()) out.back() = u.back();
  return out;
}

inline PlanStepOutput plan_step(const NMPCProblem& problem, const ControlSeq& u_warm, const AlspgConfig& cfg,
                                const PlannerMethod& method = vo_nmpc_method()) {
  if (u_warm.size() != static_cast<std::size_t>(problem.horizon_N))
    throw InvalidParameter("plan_step: warm start must have length N");
  PlanStepOutput out;
  PlanStepResult& r = out.result;
  try {
    AlspgResult sol = alspg_solve(problem, u_warm, cfg, method.builder);
    r.u_opt = std::move(sol.u);
    r.solver_stats = std::move(sol.stats);
    r.applied_u = admissible_control(r.u_opt.front(), problem.x0.v, problem.dt, problem.bounds);
    out.next_warm = shift_warm_start(r.u_opt);
  } catch (const NumericalFailure& e) {
    r.solver_failed = true;
    r.failure = e.what();
    r.u_opt = u_warm;
    r.applied_u = project_box(-problem.x0.v / problem.dt, problem.bounds.a_box);
    out.next_warm = ControlSeq(u_warm.size());
  }
  r.predicted_traj = rollout(problem.x0, r.u_opt, problem.dt);
  r.clearances = predicted_clearances(problem, r.predicted_traj);
  return out;
}

} // namespace geovo
