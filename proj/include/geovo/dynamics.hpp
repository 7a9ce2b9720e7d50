#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "geovo/geometry.hpp"

namespace geovo {

using Matrix42 = Eigen::Matrix<double, 4, 2>;

/// State [x, y, vx, vy].
struct RobotState {
  Vec2 p;
  Vec2 v;

  Eigen::Vector4d to_vector() const { return {p.x, p.y, v.x, v.y}; }
  static RobotState from_vector(const Eigen::Vector4d& s) { return {{s[0], s[1]}, {s[2], s[3]}}; }
  friend bool operator==(const RobotState&, const RobotState&) = default;
};

using ControlSeq = std::vector<Vec2>;  // u_0 .. u_{N-1}
using StateTraj = std::vector<RobotState>;  // x_1 .. x_N

inline Eigen::VectorXd flatten(const ControlSeq& u) {
  Eigen::VectorXd out(2 * static_cast<Eigen::Index>(u.size()));
  for (std::size_t k = 0; k < u.size(); ++k) {
    out[2 * k] = u[k].x;
    out[2 * k + 1] = u[k].y;
  }
  return out;
}

inline ControlSeq unflatten(const Eigen::VectorXd& flat) {
  ControlSeq u(static_cast<std::size_t>(flat.size() / 2));
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = {flat[2 * k], flat[2 * k + 1]};
  return u;
}

/// Exact zero-order-hold step of the double integrator.
inline RobotState step(const RobotState& x, const Vec2& u, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
  return {x.p + x.v * dt + u * (0.5 * dt * dt), x.v + u * dt};
}

inline StateTraj rollout(const RobotState& x0, const ControlSeq& u, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
  StateTraj traj;
  traj.reserve(u.size());
  RobotState x = x0;
  for (const Vec2& uk : u) {
    x = step(x, uk, dt);
    traj.push_back(x);
  }
  return traj;
}

/// Per-step Jacobians A_k = df/dx_k, B_k = df/du_k. Constant for this model.
struct BatchLinearization {
  std::vector<Eigen::Matrix4d> A;
  std::vector<Matrix42> B;
  double dt = 0.0;

  std::size_t horizon() const { return A.size(); }
};

inline BatchLinearization linearize(std::size_t horizon, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
  Eigen::Matrix4d a = Eigen::Matrix4d::Identity();
  a(0, 2) = dt;
  a(1, 3) = dt;
  Matrix42 b = Matrix42::Zero();
  b(0, 0) = 0.5 * dt * dt;
  b(1, 1) = 0.5 * dt * dt;
  b(2, 0) = dt;
  b(3, 1) = dt;
  return {std::vector<Eigen::Matrix4d>(horizon, a), std::vector<Matrix42>(horizon, b), dt};
}

/// z = B^T omega for the block lower-triangular rollout operator B, by the
/// reverse recursion  zt_{N-1} = omega_{N-1},  zt_k = omega_k + A_{k+1}^T zt_{k+1},
/// z_k = B_k^T zt_k.  O(N) matrix-vector products, nothing dense.
inline std::vector<Eigen::Vector2d> adjoint_multiply(std::span<const Eigen::Vector4d> omega,
                                                     const BatchLinearization& lin) {
  const std::size_t n = lin.horizon();
  if (omega.size() != n || lin.B.size() != n) throw InvalidParameter("adjoint_multiply: length mismatch");
  std::vector<Eigen::Vector2d> z(n);
  if (n == 0) return z;
  Eigen::Vector4d acc = omega[n - 1];
  z[n - 1] = lin.B[n - 1].transpose() * acc;
  for (std::size_t k = n - 1; k-- > 0;) {
    acc = omega[k] + lin.A[k + 1].transpose() * acc;
    z[k] = lin.B[k].transpose() * acc;
  }
  return z;
}

} // namespace geovo
