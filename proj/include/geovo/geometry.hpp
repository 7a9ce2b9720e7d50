#pragma once

#include <algorithm>
#include <cmath>

#include "geovo/errors.hpp"

namespace geovo {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
constexpr double squared_norm(const Vec2& v) { return dot(v, v); }
inline double norm_inf(const Vec2& v) { return std::max(std::abs(v.x), std::abs(v.y)); }
inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Counter-clockwise rotation by `beta` radians.
inline Vec2 rotate(const Vec2& v, double beta) {
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Closed halfspace {y : normal . y >= offset}. The normal is unit length.
class Hyperplane {
public:
  Hyperplane(const Vec2& normal, double offset) {
    const double n = norm(normal);
    if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(offset))
      throw InvalidParameter("hyperplane normal must be finite and non-zero");
    normal_ = normal / n;
    offset_ = offset / n;
  }

  const Vec2& normal() const noexcept { return normal_; }
  double offset() const noexcept { return offset_; }

  /// normal . v - offset; negative means the point violates the halfspace.
  double residual(const Vec2& v) const { return dot(normal_, v) - offset_; }

private:
  Vec2 normal_;
  double offset_ = 0.0;
};

struct Box2 {
  Vec2 lower;
  Vec2 upper;

  Box2(const Vec2& lo, const Vec2& hi) : lower(lo), upper(hi) {
    if (!(lo.x <= hi.x && lo.y <= hi.y))
      throw InvalidParameter("box lower bound exceeds upper bound");
  }

  static Box2 symmetric(double half_width) { return Box2({-half_width, -half_width}, {half_width, half_width}); }

  bool contains(const Vec2& v) const {
    return v.x >= lower.x && v.x <= upper.x && v.y >= lower.y && v.y <= upper.y;
  }
};

struct Disk {
  Vec2 center;
  double radius;

  Disk(const Vec2& c, double r) : center(c), radius(r) {
    if (!(r > 0.0)) throw InvalidParameter("disk radius must be positive");
  }
};

/// Nearest point of the halfspace {n . y >= c}.
inline Vec2 project_halfplane(const Vec2& v, const Hyperplane& h) {
  const double r = h.residual(v);
  if (r >= 0.0) return v;
  return v - h.normal() * r;
}

inline Vec2 project_box(const Vec2& v, const Box2& b) {
  return {std::clamp(v.x, b.lower.x, b.upper.x), std::clamp(v.y, b.lower.y, b.upper.y)};
}

} // namespace geovo
