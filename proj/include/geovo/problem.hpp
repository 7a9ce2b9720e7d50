#pragma once

#include <vector>

#include <Eigen/Dense>

#include "geovo/dynamics.hpp"
#include "geovo/geometry.hpp"

namespace geovo {

struct Obstacle {
  Disk disk;
  Vec2 velocity;
  bool dynamic = false;

  /// Centre after `steps` steps of length dt at constant velocity.
  Vec2 predicted_center(int steps, double dt) const { return disk.center + velocity * (steps * dt); }
};

struct CostWeights {
  double q_p = 10.0;  // goal tracking
  double r_u = 0.1;   // control effort
  double q_v = 1.0;   // velocity damping
};

struct StateControlBounds {
  Box2 v_box = Box2::symmetric(0.4);
  Box2 a_box = Box2::symmetric(1.0);
};

/// One receding-horizon problem, posed at the robot's current state.
struct NMPCProblem {
  RobotState x0;
  Vec2 goal;
  int horizon_N = 6;
  double dt = 0.05;
  CostWeights weights;
  std::vector<Obstacle> obstacles;
  StateControlBounds bounds;
  double robot_radius = 0.1;
  double margin = 0.03;  // d_s

  void validate() const {
    if (horizon_N < 1) throw InvalidParameter("horizon_N must be >= 1");
    if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
    if (!(weights.q_p > 0.0 && weights.r_u > 0.0)) throw InvalidParameter("cost weights must be positive");
    if (!(weights.q_v >= 0.0)) throw InvalidParameter("velocity weight must be non-negative");
    if (!(robot_radius > 0.0)) throw InvalidParameter("robot radius must be positive");
    if (!(margin >= 0.0)) throw InvalidParameter("margin must be non-negative");
  }
};

/// Value and Jacobians of the stage cost with respect to the stacked states
/// (4N, ordered x, y, vx, vy per step) and stacked controls (2N).
struct CostEval {
  double value = 0.0;
  std::vector<Eigen::Vector4d> jac_x;
  Eigen::VectorXd jac_u;
};

/// l = sum_{k=1..N} (q_p |p_k - goal|^2 + q_v |v_k|^2) + sum_{k=0..N-1} r_u |u_k|^2
class QuadraticGoalCost {
public:
  QuadraticGoalCost(const Vec2& goal, CostWeights w) : goal_(goal), w_(w) {}

  CostEval operator()(const StateTraj& x, const ControlSeq& u) const {
    CostEval out;
    out.jac_x.assign(x.size(), Eigen::Vector4d::Zero());
    out.jac_u = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(u.size()));
    for (std::size_t k = 0; k < x.size(); ++k) {
      const Vec2 e = x[k].p - goal_;
      out.value += w_.q_p * squared_norm(e);
      out.jac_x[k][0] = 2.0 * w_.q_p * e.x;
      out.jac_x[k][1] = 2.0 * w_.q_p * e.y;
      out.value += w_.q_v * squared_norm(x[k].v);
      out.jac_x[k][2] = 2.0 * w_.q_v * x[k].v.x;
      out.jac_x[k][3] = 2.0 * w_.q_v * x[k].v.y;
    }
    for (std::size_t k = 0; k < u.size(); ++k) {
      out.value += w_.r_u * squared_norm(u[k]);
      out.jac_u[2 * k] = 2.0 * w_.r_u * u[k].x;
      out.jac_u[2 * k + 1] = 2.0 * w_.r_u * u[k].y;
    }
    return out;
  }

  double value(const StateTraj& x, const ControlSeq& u) const { return (*this)(x, u).value; }

private:
  Vec2 goal_;
  CostWeights w_;
};

inline QuadraticGoalCost build_cost(const NMPCProblem& problem) {
  return QuadraticGoalCost(problem.goal, problem.weights);
}

/// Plain cost of a control sequence, states eliminated by rollout.
inline double trajectory_cost(const NMPCProblem& problem, const ControlSeq& u) {
  return build_cost(problem).value(rollout(problem.x0, u, problem.dt), u);
}

} // namespace geovo
