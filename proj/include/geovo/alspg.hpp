#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "geovo/dynamics.hpp"
#include "geovo/problem.hpp"
#include "geovo/projectors.hpp"
#include "geovo/spg.hpp"

namespace geovo {

enum class Quantity { Position, Velocity };

/// Picks p_k or v_k (k in 1..N) out of the stacked trajectory. Linear, with a
/// constant 2 x 4N Jacobian.
struct Selector {
  int step = 1;
  Quantity quantity = Quantity::Velocity;

  Vec2 operator()(const StateTraj& traj) const {
    const RobotState& s = traj.at(static_cast<std::size_t>(step - 1));
    return quantity == Quantity::Velocity ? s.v : s.p;
  }
  /// Row offset of the selected pair inside the 4-vector of state k.
  int row_offset() const { return quantity == Quantity::Velocity ? 2 : 0; }
};

/// Obstacle index (-1 for state bounds) and horizon step of a block.
struct BlockId {
  int obstacle = -1;
  int step = 1;
  friend bool operator==(const BlockId&, const BlockId&) = default;
};

struct ConstraintBlock {
  ProjectorSpec projector;
  Selector selector;
  Vec2 lambda;
  double rho = 0.1;
  BlockId id;
};

using ConstraintBlocks = std::vector<ConstraintBlock>;

/// Produces the constraint blocks for a problem, with projector geometry taken
/// from a reference trajectory. Must return the same block layout for every
/// reference of the same problem; multipliers and penalties are owned by the solver.
using BlockBuilder = std::function<ConstraintBlocks(const NMPCProblem&, const StateTraj&)>;

/// V = g - P(g + lambda / rho)
inline Vec2 distance_function(const StateTraj& traj, const ConstraintBlock& b) {
  const Vec2 g = b.selector(traj);
  return g - apply_projector(b.projector, g + b.lambda / b.rho);
}

inline Vec2 distance_function(const ControlSeq& u, const ConstraintBlock& b, const NMPCProblem& problem) {
  return distance_function(rollout(problem.x0, u, problem.dt), b);
}

/// lambda <- rho (V + lambda / rho)
inline Vec2 multiplier_update(const StateTraj& traj, const ConstraintBlock& b) {
  return (distance_function(traj, b) + b.lambda / b.rho) * b.rho;
}

/// Condensed augmented Lagrangian
///   L(U) = l(U) + sum_b rho_b/2 |g_b + lambda_b/rho_b - P_b(g_b + lambda_b/rho_b)|^2
/// and its gradient B^T (J_X + sum_b rho_b S_b^T w_b) + J_U, with the B^T
/// product evaluated by the reverse recursion.
class AugmentedLagrangian {
public:
  AugmentedLagrangian(const NMPCProblem& problem, const ConstraintBlocks& blocks)
      : problem_(problem),
        blocks_(blocks),
        cost_(build_cost(problem)),
        lin_(linearize(static_cast<std::size_t>(problem.horizon_N), problem.dt)) {}

  double operator()(const Eigen::VectorXd& u_flat, Eigen::VectorXd& grad) const {
    const ControlSeq u = unflatten(u_flat);
    const StateTraj traj = rollout(problem_.x0, u, problem_.dt);
    CostEval c = cost_(traj, u);
    double value = c.value;
    std::vector<Eigen::Vector4d>& omega = c.jac_x;
    for (const ConstraintBlock& b : blocks_) {
      const Vec2 y = b.selector(traj) + b.lambda / b.rho;
      const Vec2 w = y - apply_projector(b.projector, y);
      value += 0.5 * b.rho * squared_norm(w);
      const int row = b.selector.row_offset();
      Eigen::Vector4d& om = omega[static_cast<std::size_t>(b.selector.step - 1)];
      om[row] += b.rho * w.x;
      om[row + 1] += b.rho * w.y;
    }
    const auto z = adjoint_multiply(omega, lin_);
    grad = c.jac_u;
    for (std::size_t k = 0; k < z.size(); ++k) grad.segment<2>(2 * static_cast<Eigen::Index>(k)) += z[k];
    return value;
  }

private:
  const NMPCProblem& problem_;
  const ConstraintBlocks& blocks_;
  QuadraticGoalCost cost_;
  BatchLinearization lin_;
};

struct LagrangianEval {
  double value;
  Eigen::VectorXd gradient;
};

inline LagrangianEval eval_lagrangian(const ControlSeq& u, const ConstraintBlocks& blocks, const NMPCProblem& problem) {
  AugmentedLagrangian al(problem, blocks);
  LagrangianEval out{0.0, Eigen::VectorXd(2 * static_cast<Eigen::Index>(u.size()))};
  out.value = al(flatten(u), out.gradient);
  return out;
}

struct AlspgConfig {
  double beta = 20.0;
  double rho_init = 0.1;
  double eps_tol = 1e-2;
  int N_max = 20;
  double rho_max = 1e8;
  bool refresh_geometry = true;  // rebuild projectors from each outer iterate
  bool record_history = false;
  SpgConfig spg;

  void validate() const {
    if (!(beta > 1.0)) throw InvalidParameter("alspg: beta must exceed 1");
    if (!(rho_init > 0.0)) throw InvalidParameter("alspg: rho_init must be positive");
    if (!(eps_tol > 0.0)) throw InvalidParameter("alspg: eps_tol must be positive");
    if (N_max < 1) throw InvalidParameter("alspg: N_max must be >= 1");
    spg.validate();
  }
};

struct AlspgStats {
  int outer_iterations = 0;
  int inner_iterations = 0;
  double final_norm_V = 0.0;
  bool converged = false;
  bool penalty_ceiling_hit = false;
  std::vector<double> iteration_ms;
  std::vector<double> norm_V_history;
  std::vector<std::vector<double>> rho_history;  // per outer iteration, per block
};

struct AlspgResult {
  ControlSeq u;
  AlspgStats stats;
  ConstraintBlocks blocks;  // with final multipliers and penalties
};

inline Eigen::VectorXd project_controls(const Eigen::VectorXd& u, const Box2& a_box) {
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i + 1 < u.size(); i += 2) {
    out[i] = std::clamp(u[i], a_box.lower.x, a_box.upper.x);
    out[i + 1] = std::clamp(u[i + 1], a_box.lower.y, a_box.upper.y);
  }
  return out;
}

/// Stacked 2-norm of V over all blocks.
inline double stacked_norm_V(const StateTraj& traj, const ConstraintBlocks& blocks) {
  double sq = 0.0;
  for (const auto& b : blocks) sq += squared_norm(distance_function(traj, b));
  return std::sqrt(sq);
}

/// Augmented Lagrangian outer loop with an SPG inner solver over the control box.
inline AlspgResult alspg_solve(const NMPCProblem& problem, const ControlSeq& u_init, const AlspgConfig& cfg,
                               const BlockBuilder& builder) {
  using clock = std::chrono::steady_clock;
  problem.validate();
  cfg.validate();
  if (u_init.size() != static_cast<std::size_t>(problem.horizon_N))
    throw InvalidParameter("alspg: initial control sequence must have length N");

  const Box2 a_box = problem.bounds.a_box;
  auto project = [&a_box](const Eigen::VectorXd& u) { return project_controls(u, a_box); };

  AlspgResult res;
  AlspgStats& st = res.stats;

  Eigen::VectorXd u = project(flatten(u_init));
  StateTraj traj = rollout(problem.x0, unflatten(u), problem.dt);
  ConstraintBlocks blocks = builder(problem, traj);
  for (auto& b : blocks) {
    b.lambda = {};
    b.rho = cfg.rho_init;
  }
  std::vector<double> prev_norm(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) prev_norm[i] = norm(distance_function(traj, blocks[i]));

  for (int it = 0; it < cfg.N_max; ++it) {
    const auto t0 = clock::now();
    AugmentedLagrangian lagrangian(problem, blocks);
    SpgResult inner = spg_minimize(lagrangian, project, u, cfg.spg);
    u = std::move(inner.x);
    st.inner_iterations += inner.stats.iterations;
    traj = rollout(problem.x0, unflatten(u), problem.dt);

    double sq = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      ConstraintBlock& b = blocks[i];
      const Vec2 v = distance_function(traj, b);
      const Vec2 lambda_next = (v + b.lambda / b.rho) * b.rho;
      const double nv = norm(v);
      sq += nv * nv;
      // Zero violation never raises the penalty; otherwise grow unless V decreased.
      if (nv > 0.0 && nv >= prev_norm[i] - 1e-12) {
        if (b.rho * cfg.beta <= cfg.rho_max) {
          b.rho *= cfg.beta;
        } else {
          st.penalty_ceiling_hit = true;
        }
      }
      prev_norm[i] = nv;
      b.lambda = lambda_next;
    }
    st.final_norm_V = std::sqrt(sq);
    st.outer_iterations = it + 1;
    if (cfg.record_history) {
      st.norm_V_history.push_back(st.final_norm_V);
      std::vector<double> rhos;
      rhos.reserve(blocks.size());
      for (const auto& b : blocks) rhos.push_back(b.rho);
      st.rho_history.push_back(std::move(rhos));
    }
    const bool done = st.final_norm_V <= cfg.eps_tol;
    if (!done && cfg.refresh_geometry && it + 1 < cfg.N_max) {
      ConstraintBlocks rebuilt = builder(problem, traj);
      if (rebuilt.size() != blocks.size()) throw InvalidParameter("alspg: block builder changed the block layout");
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        blocks[i].projector = std::move(rebuilt[i].projector);
        blocks[i].selector = rebuilt[i].selector;
        blocks[i].id = rebuilt[i].id;
      }
    }
    st.iteration_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
    if (done) {
      st.converged = true;
      break;
    }
  }

  res.u = unflatten(u);
  res.blocks = std::move(blocks);
  return res;
}

} // namespace geovo
