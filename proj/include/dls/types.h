#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dls {

/// Input outside an operation's domain (non-positive radius, short path, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Planar wrench: force along x and y [N] and torque about z [N·m].
struct Wrench2 {
  double fx{0.0};
  double fy{0.0};
  double tau{0.0};

  friend bool operator==(const Wrench2&, const Wrench2&) = default;
  Wrench2 operator-() const { return {-fx, -fy, -tau}; }
};

/// Planar twist: linear velocity [m/s] and angular velocity [rad/s].
struct Twist2 {
  double vx{0.0};
  double vy{0.0};
  double omega{0.0};

  friend bool operator==(const Twist2&, const Twist2&) = default;
  double linear_speed() const { return std::hypot(vx, vy); }
};

/// SE(2) pose with an unwrapped heading. Multi-turn headings are legal; the
/// slippage constraint couples per-segment heading increments, so headings are
/// never wrapped into (-pi, pi].
struct Pose2 {
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  friend bool operator==(const Pose2&, const Pose2&) = default;
  Pose2 operator+(const Pose2& o) const { return {x + o.x, y + o.y, theta + o.theta}; }
  Pose2 operator-(const Pose2& o) const { return {x - o.x, y - o.y, theta - o.theta}; }
  Pose2 operator*(double s) const { return {x * s, y * s, theta * s}; }
  Pose2 operator-() const { return {-x, -y, -theta}; }
};

/// Physical parameters of the end-effector / object / support stack.
struct FrictionParams {
  double mu_e{0.36};    ///< end-effector / object friction coefficient
  double mu_p{0.3};     ///< object / support friction coefficient
  double r_e{0.01};     ///< equivalent radius of the top patch [m]
  double r_p{0.04};     ///< equivalent radius of the support patch [m]
  double c{0.6};        ///< pressure-distribution constant, uniform pressure ~0.6
  double mass{0.05};    ///< [kg]
  double gravity{9.81}; ///< [m/s^2]

  friend bool operator==(const FrictionParams&, const FrictionParams&) = default;

  double weight() const { return mass * gravity; }

  /// Throws DomainError naming the first violated invariant.
  void validate() const;
};

inline bool is_finite(const Pose2& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.theta);
}

}  // namespace dls
