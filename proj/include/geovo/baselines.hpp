#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "geovo/alspg.hpp"
#include "geovo/planner.hpp"

namespace geovo {

// ---------------------------------------------------------------------------
// Reactive velocity obstacle controller.

struct ReactiveVoResult {
  Vec2 velocity;
  bool fallback = false;  // no lattice candidate was outside every cone
};

namespace detail {

/// Signed safety of v against one obstacle: positive strictly outside the
/// closed cone, otherwise minus the distance to the nearer boundary line.
inline double vo_safety(const Vec2& v, const Vec2& p, const Obstacle& o, double r_sum) {
  const VOCone cone = build_vo_cone(p, o.disk.center, o.velocity, r_sum);
  if (cone.degenerate) return flee_halfplane(p, o.disk.center, o.velocity).residual(v);
  const auto r = cone.residuals(v);
  return std::max(r[0], r[1]);
}

} // namespace detail

/// Picks, from a grid_n x grid_n lattice over [-v_max, v_max]^2, the velocity
/// closest to the preferred one that is outside every obstacle's cone. The
/// preferred velocity points at the goal with magnitude min(|goal - p|, v_max).
/// `clearance_radius` is r + d_s; each obstacle adds its own radius.
inline ReactiveVoResult reactive_vo_step(const Vec2& p, const Vec2& goal, const std::vector<Obstacle>& obstacles,
                                         double clearance_radius, double v_max, int grid_n = 41) {
  if (grid_n < 3 || grid_n % 2 == 0) throw InvalidParameter("reactive_vo: grid_n must be odd and >= 3");
  if (!(v_max > 0.0)) throw InvalidParameter("reactive_vo: v_max must be positive");

  Vec2 pref = goal - p;
  const double dist = norm(pref);
  if (dist > v_max) pref = pref * (v_max / dist);

  const double h = 2.0 * v_max / (grid_n - 1);
  double best_d = std::numeric_limits<double>::infinity();
  double best_fallback = -std::numeric_limits<double>::infinity();
  Vec2 best, fallback;
  bool found = false;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const Vec2 cand{-v_max + i * h, -v_max + j * h};
      double safety = std::numeric_limits<double>::infinity();
      for (const Obstacle& o : obstacles)
        safety = std::min(safety, detail::vo_safety(cand, p, o, clearance_radius + o.disk.radius));
      if (safety > 0.0) {
        const double d = squared_norm(cand - pref);
        if (d < best_d) {
          best_d = d;
          best = cand;
          found = true;
        }
      } else if (!found && safety > best_fallback) {
        best_fallback = safety;
        fallback = cand;
      }
    }
  }
  if (found) return {best, false};
  return {fallback, true};
}

// ---------------------------------------------------------------------------
// Euclidean-distance NMPC: GeoPro-ED on predicted positions inside ALSPG.

inline ConstraintBlocks build_ed_blocks(const NMPCProblem& problem, const StateTraj& reference) {
  (void)reference;  // position blocks do not depend on the linearisation point
  ConstraintBlocks out;
  for (std::size_t i = 0; i < problem.obstacles.size(); ++i) {
    const Obstacle& o = problem.obstacles[i];
    for (int k = 1; k <= problem.horizon_N; ++k) {
      ClearanceDisk disk{Disk(o.predicted_center(k, problem.dt), o.disk.radius),
                         problem.robot_radius + problem.margin};
      out.push_back({disk, {k, Quantity::Position}, {}, 0.1, {static_cast<int>(i), k}});
    }
  }
  auto boxes = state_box_blocks(problem);
  out.insert(out.end(), boxes.begin(), boxes.end());
  return out;
}

inline PlannerMethod ed_nmpc_method() { return {"geopro-ed", &build_ed_blocks}; }

// ---------------------------------------------------------------------------
// Enumeration oracle for the disjunctive (big-M) VO formulation.

/// One halfspace choice per (obstacle, step) pair, pair index i * N + (k - 1).
/// Choice 0 enforces N_1 . v >= c_1, choice 1 enforces N_2 . v >= c_2.
using DisjunctAssignment = std::vector<std::uint8_t>;

inline ConstraintBlocks build_disjunct_blocks(const NMPCProblem& problem, const StateTraj& reference,
                                              const DisjunctAssignment& choice) {
  ConstraintBlocks out;
  const int n = problem.horizon_N;
  for (std::size_t i = 0; i < problem.obstacles.size(); ++i) {
    const Obstacle& o = problem.obstacles[i];
    const double r_sum = inflated_radius(problem, o);
    for (int k = 1; k <= n; ++k) {
      const Vec2 center = o.predicted_center(k, problem.dt);
      const Vec2 p = reference[static_cast<std::size_t>(k - 1)].p;
      const VOCone cone = build_vo_cone(p, center, o.velocity, r_sum);
      const std::uint8_t m = choice.at(i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k - 1));
      Hyperplane h = cone.degenerate ? flee_halfplane(p, center, o.velocity) : cone.boundary(m);
      out.push_back({h, {k, Quantity::Velocity}, {}, 0.1, {static_cast<int>(i), k}});
    }
  }
  auto boxes = state_box_blocks(problem);
  out.insert(out.end(), boxes.begin(), boxes.end());
  return out;
}

struct OracleConfig {
  AlspgConfig alspg;
  int max_pairs = 8;  // at most 2^8 assignments
};

struct OracleResult {
  ControlSeq u;
  double cost = std::numeric_limits<double>::infinity();
  int feasible_count = 0;
  long long assignments = 0;
  DisjunctAssignment best_assignment;
  AlspgStats stats;  // of the selected subproblem
};

/// Assignment number `a` in lexicographic order, pair 0 most significant.
inline DisjunctAssignment assignment_from_index(unsigned long long a, int pairs) {
  DisjunctAssignment c(static_cast<std::size_t>(pairs));
  for (int j = 0; j < pairs; ++j) c[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((a >> (pairs - 1 - j)) & 1ULL);
  return c;
}

/// Solves every disjunct assignment with halfplane projectors and keeps the
/// cheapest feasible one. With no feasible assignment, the least-violating
/// solution is returned and feasible_count is 0.
inline OracleResult minlp_enumerate(const NMPCProblem& problem, const ControlSeq& u_init, const OracleConfig& cfg) {
  problem.validate();
  const int pairs = static_cast<int>(problem.obstacles.size()) * problem.horizon_N;
  if (pairs > cfg.max_pairs || pairs > 62)
    throw InvalidParameter("minlp_enumerate: " + std::to_string(pairs) + " (obstacle, step) pairs exceed the enumeration cap of " +
                           std::to_string(cfg.max_pairs));
  const unsigned long long count = 1ULL << pairs;

  OracleResult best;
  double least_violation = std::numeric_limits<double>::infinity();
  OracleResult least;
  for (unsigned long long a = 0; a < count; ++a) {
    DisjunctAssignment choice = assignment_from_index(a, pairs);
    BlockBuilder builder = [&choice](const NMPCProblem& pr, const StateTraj& ref) {
      return build_disjunct_blocks(pr, ref, choice);
    };
    AlspgResult sol = alspg_solve(problem, u_init, cfg.alspg, builder);
    const double cost = trajectory_cost(problem, sol.u);
    ++best.assignments;
    if (sol.stats.final_norm_V <= cfg.alspg.eps_tol) {
      ++best.feasible_count;
      if (cost < best.cost) {
        best.cost = cost;
        best.u = sol.u;
        best.best_assignment = choice;
        best.stats = sol.stats;
      }
    } else if (best.feasible_count == 0 && sol.stats.final_norm_V < least_violation) {
      least_violation = sol.stats.final_norm_V;
      least.u = sol.u;
      least.cost = cost;
      least.best_assignment = choice;
      least.stats = sol.stats;
    }
  }
  if (best.feasible_count == 0) {
    least.assignments = best.assignments;
    least.feasible_count = 0;
    return least;
  }
  return best;
}

/// Human-readable big-M form of the VO constraints at a reference trajectory.
inline std::string format_vo_minlp(const NMPCProblem& problem, const StateTraj& reference, double big_m = 1e5) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "VO-NMPC  N=%d  obstacles=%zu  G=%.6g\n", problem.horizon_N,
                problem.obstacles.size(), big_m);
  out += line;
  for (std::size_t i = 0; i < problem.obstacles.size(); ++i) {
    const Obstacle& o = problem.obstacles[i];
    for (int k = 1; k <= problem.horizon_N; ++k) {
      const VOCone cone = build_vo_cone(reference[static_cast<std::size_t>(k - 1)].p, o.predicted_center(k, problem.dt),
                                        o.velocity, inflated_radius(problem, o));
      if (cone.degenerate) {
        std::snprintf(line, sizeof line, "  o%zu k%d: degenerate cone\n", i + 1, k);
        out += line;
        continue;
      }
      for (int m = 0; m < 2; ++m) {
        std::snprintf(line, sizeof line, "  o%zu k%d m%d: %.6f - (%.6f*vx + %.6f*vy) <= G*(1 - z)\n", i + 1, k, m + 1,
                      cone.offsets[m], cone.normals[m].x, cone.normals[m].y);
        out += line;
      }
      std::snprintf(line, sizeof line, "  o%zu k%d: z1 + z2 >= 1\n", i + 1, k);
      out += line;
    }
  }
  return out;
}

} // namespace geovo
