#pragma once

#include <array>
#include <cmath>
#include <variant>

#include "geovo/geometry.hpp"

namespace geovo {

/// Velocity obstacle induced by one circular obstacle: the closed cone
/// {v : N_1 . v <= c_1 and N_2 . v <= c_2} with apex at the obstacle velocity.
/// The normals point out of the cone, so N_m . v >= c_m is the safe side of
/// boundary m.
struct VOCone {
  Vec2 apex;
  std::array<Vec2, 2> normals{};
  std::array<double, 2> offsets{};
  double half_angle = 0.0;
  bool degenerate = false;

  /// Boundary m (0 or 1) as the safe halfspace N_m . v >= c_m.
  Hyperplane boundary(int m) const {
    if (degenerate) throw DegenerateCone();
    return Hyperplane(normals[m], offsets[m]);
  }

  /// N_m . v - c_m for m = 0, 1. Both negative means strictly inside.
  std::array<double, 2> residuals(const Vec2& v) const {
    return {dot(normals[0], v) - offsets[0], dot(normals[1], v) - offsets[1]};
  }
};

/// Builds the cone from relative position p_robot - p_obs. The tangent
/// directions are that vector rotated by +-beta, and each normal is its tangent
/// turned a quarter so it faces away from the cone interior.
inline VOCone build_vo_cone(const Vec2& p_robot, const Vec2& p_obs, const Vec2& v_obs, double r_sum) {
  if (!(r_sum > 0.0)) throw InvalidParameter("r_sum must be positive");
  VOCone cone;
  cone.apex = v_obs;
  const Vec2 rel = p_robot - p_obs;
  const double dist = norm(rel);
  if (dist <= r_sum) {
    cone.degenerate = true;
    return cone;
  }
  const double beta = std::asin(r_sum / dist);
  const Vec2 t1 = rotate(rel, beta);
  const Vec2 t2 = rotate(rel, -beta);
  // Exact quarter turns: R(-pi/2) (x, y) = (y, -x), R(pi/2) (x, y) = (-y, x).
  cone.normals[0] = Vec2{t1.y, -t1.x} / norm(t1);
  cone.normals[1] = Vec2{-t2.y, t2.x} / norm(t2);
  cone.offsets[0] = dot(cone.normals[0], v_obs);
  cone.offsets[1] = dot(cone.normals[1], v_obs);
  cone.half_angle = beta;
  return cone;
}

/// Closed membership test; boundary points count as inside.
inline bool in_vo(const Vec2& v, const VOCone& cone) {
  if (cone.degenerate) throw DegenerateCone();
  const auto r = cone.residuals(v);
  return r[0] <= 0.0 && r[1] <= 0.0;
}

/// GeoPro-VO: identity on safe velocities, otherwise the projection onto the
/// nearer of the two boundary lines. Ties go to boundary 0.
inline Vec2 geopro_vo(const Vec2& v, const VOCone& cone) {
  if (cone.degenerate) throw DegenerateCone();
  const auto r = cone.residuals(v);
  if (r[0] >= 0.0 || r[1] >= 0.0) return v;
  const int m = (r[0] >= r[1]) ? 0 : 1;
  return v - cone.normals[m] * r[m];
}

/// Replacement constraint when the cone is degenerate: the relative velocity
/// must not point toward the obstacle centre.
inline Hyperplane flee_halfplane(const Vec2& p_robot, const Vec2& p_obs, const Vec2& v_obs) {
  Vec2 n = p_robot - p_obs;
  const double len = norm(n);
  n = len > 0.0 ? n / len : Vec2{1.0, 0.0};
  return Hyperplane(n, dot(n, v_obs));
}

/// GeoPro-ED: pushes a position radially out of the disk inflated by r_robot.
/// A position exactly at the centre is pushed along +x.
inline Vec2 geopro_ed(const Vec2& p, const Disk& obs, double r_robot) {
  const Vec2 d = p - obs.center;
  const double dist = norm(d);
  const double reach = r_robot + obs.radius;
  if (dist >= reach) return p;
  if (dist == 0.0) return obs.center + Vec2{reach, 0.0};
  return p + d * ((reach - dist) / dist);
}

struct ClearanceDisk {
  Disk obstacle;
  double robot_radius;
};

enum class ProjectorKind { VelocityObstacle, EuclideanDistance, StateBox, Halfplane };

using ProjectorSpec = std::variant<VOCone, ClearanceDisk, Box2, Hyperplane>;

inline ProjectorKind kind_of(const ProjectorSpec& spec) {
  return static_cast<ProjectorKind>(spec.index());
}

inline Vec2 apply_projector(const ProjectorSpec& spec, const Vec2& value) {
  struct Visitor {
    const Vec2& v;
    Vec2 operator()(const VOCone& c) const { return geopro_vo(v, c); }
    Vec2 operator()(const ClearanceDisk& d) const { return geopro_ed(v, d.obstacle, d.robot_radius); }
    Vec2 operator()(const Box2& b) const { return project_box(v, b); }
    Vec2 operator()(const Hyperplane& h) const { return project_halfplane(v, h); }
  };
  return std::visit(Visitor{value}, spec);
}

} // namespace geovo
