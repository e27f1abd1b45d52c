#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dls/types.h"

namespace dls {

/// Numerical thresholds used by the closed-form mechanics routines.
struct MechanicsTolerances {
  /// Relative residual allowed on each ellipse equation at the intersection.
  double intersection_residual{1e-12};
  /// |w^T A w - 1| allowed for a wrench to count as lying on a limit surface.
  double on_surface{1e-9};
};

/// Ellipsoidal limit surface of one contact at one normal force, reduced to
/// the isotropic form w^T A w = 1 with A = diag(a_f^-2, a_f^-2, a_t^-2).
struct LimitSurface {
  double a_f{1.0};           ///< force semi-axis, mu * N [N]
  double a_t{1.0};           ///< torque semi-axis, r * c * mu * N [N·m]
  double normal_force{1.0};  ///< N [N]

  friend bool operator==(const LimitSurface&, const LimitSurface&) = default;

  /// w^T A w; 1 on the surface, < 1 strictly inside.
  double quadratic_form(const Wrench2& w) const;
  /// Same form in the reduced (F, T) plane, F = |f|.
  double reduced_form(double force, double torque) const;
};

/// Top (end-effector / object) and bottom (object / support) surfaces at one
/// applied normal force.
struct DualSurfaces {
  LimitSurface top;
  LimitSurface support;
};

enum class CaseId { I, II, III, IV, V };

std::string_view to_string(CaseId id);
/// Parses "I".."V"; throws DomainError otherwise.
CaseId case_from_string(std::string_view s);

struct ContactCase {
  CaseId id{CaseId::I};
  double p_t{0.0};  ///< relative slope difference of the cones along T
  double p_f{0.0};  ///< relative slope difference of the cones along F
};

/// Open interval of applied normal forces.
struct ForceInterval {
  double lower{0.0};
  double upper{0.0};

  bool empty() const { return !(lower < upper); }
  bool contains(double n) const { return n > lower && n < upper; }
};

/// Critical normal forces of a parameter set and the band of N_e in which the
/// two reduced limit surfaces cross.
struct ForceRegime {
  std::optional<double> n_slip;
  std::optional<double> n_stick;
  ForceInterval valid_range;
};

/// Reduced-plane crossing of the two ellipses, first quadrant.
struct IntersectionPoint {
  double force{0.0};   ///< F* >= 0 [N]
  double torque{0.0};  ///< T* >= 0 [N·m]
};

/// Relative placement of the top ellipse with respect to the support ellipse.
enum class Containment { kTopInside, kSupportInside, kIntersecting, kCoincident };

/// Which surface supplies the normal that defines k_v.
enum class KvSurface { kSupport, kTop };

std::string_view to_string(KvSurface s);

/// The two ellipses do not cross: one lies inside the other.
class NoIntersection : public std::runtime_error {
 public:
  NoIntersection(bool top_inside, const std::string& what)
      : std::runtime_error(what), top_inside_(top_inside) {}
  bool top_inside() const { return top_inside_; }

 private:
  bool top_inside_;
};

/// The crossing is a pure-torque point, where the twist has no translation.
class InfiniteKv : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LimitSurface build_limit_surface(double mu, double r, double c, double n);

/// N_p = m g + N_e.
double support_normal_force(const FrictionParams& params, double n_e);

/// R = N_e / (N_e + m g), in [0, 1).
double force_ratio(const FrictionParams& params, double n_e);

DualSurfaces dual_surfaces(const FrictionParams& params, double n_e);

ContactCase classify_case(const FrictionParams& params);

ForceRegime force_regime(const FrictionParams& params);

Containment containment(const LimitSurface& top, const LimitSurface& support);

/// Solves the 2x2 linear system in (F^2, T^2). Coincident ellipses return the
/// pure-force point (a_f, 0). Throws NoIntersection when one contains the other.
IntersectionPoint intersect_surfaces(const LimitSurface& top, const LimitSurface& support,
                                     const MechanicsTolerances& tol = {});

IntersectionPoint intersection_wrench(const FrictionParams& params, double n_e,
                                      const MechanicsTolerances& tol = {});

/// Critical angular-to-linear speed ratio [rad/m] at the slip boundary.
double kv(const FrictionParams& params, double n_e,
          KvSurface surface = KvSurface::kSupport,
          const MechanicsTolerances& tol = {});

/// Twist slope |omega| / |v| of the normal of `surface` at a reduced wrench.
double normal_slope(const LimitSurface& surface, const IntersectionPoint& point);

/// Sticking test for the top contact. Cases III/IV bound rotation from above
/// (boundary sticks), cases II/V from below (boundary slips). The rest twist
/// always sticks; any other twist slips in Case I.
bool is_slippage_free(const Twist2& twist, double k_v, CaseId case_id, double safety);

/// Unit outward normal of the surface at an on-surface wrench.
Twist2 twist_direction_from_wrench(const LimitSurface& surface, const Wrench2& wrench,
                                   const MechanicsTolerances& tol = {});

/// Boundary wrench whose normal is parallel to `twist` (maximum dissipation).
Wrench2 wrench_from_twist_direction(const LimitSurface& surface, const Twist2& twist);

/// Quasi-static planar balance w_e + w_p = 0.
inline Wrench2 balancing_wrench(const Wrench2& w) { return -w; }

constexpr double kDefaultSafety = 0.8;

}  // namespace dls
