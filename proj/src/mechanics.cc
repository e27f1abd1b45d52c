#include "dls/mechanics.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dls {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << name << " must be positive and finite, got " << value;
    throw DomainError(os.str());
  }
}

void require_applied_force(double n_e) {
  if (!(n_e >= 0.0) || !std::isfinite(n_e)) {
    std::ostringstream os;
    os << "applied normal force must be non-negative, got " << n_e;
    throw DomainError(os.str());
  }
}

}  // namespace

void FrictionParams::validate() const {
  require_positive(mu_e, "mu_e");
  require_positive(mu_p, "mu_p");
  require_positive(r_e, "r_e");
  require_positive(r_p, "r_p");
  require_positive(c, "c");
  if (c > 1.0) {
    std::ostringstream os;
    os << "c must lie in (0, 1], got " << c;
    throw DomainError(os.str());
  }
  require_positive(mass, "mass");
  require_positive(gravity, "gravity");
}

double LimitSurface::quadratic_form(const Wrench2& w) const {
  const double uf = 1.0 / (a_f * a_f);
  const double ut = 1.0 / (a_t * a_t);
  return (w.fx * w.fx + w.fy * w.fy) * uf + w.tau * w.tau * ut;
}

double LimitSurface::reduced_form(double force, double torque) const {
  const double f = force / a_f;
  const double t = torque / a_t;
  return f * f + t * t;
}

std::string_view to_string(CaseId id) {
  switch (id) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III: return "III";
    case CaseId::IV: return "IV";
    case CaseId::V: return "V";
  }
  return "?";
}

CaseId case_from_string(std::string_view s) {
  if (s == "I") return CaseId::I;
  if (s == "II") return CaseId::II;
  if (s == "III") return CaseId::III;
  if (s == "IV") return CaseId::IV;
  if (s == "V") return CaseId::V;
  throw DomainError("unknown contact case '" + std::string(s) + "'");
}

std::string_view to_string(KvSurface s) {
  return s == KvSurface::kSupport ? "support" : "top";
}

LimitSurface build_limit_surface(double mu, double r, double c, double n) {
  require_positive(mu, "mu");
  require_positive(r, "r");
  require_positive(c, "c");
  require_positive(n, "normal force");
  const double a_f = mu * n;
  return {a_f, r * c * a_f, n};
}

double support_normal_force(const FrictionParams& params, double n_e) {
  require_applied_force(n_e);
  return params.weight() + n_e;
}

double force_ratio(const FrictionParams& params, double n_e) {
  require_applied_force(n_e);
  return n_e / (n_e + params.weight());
}

DualSurfaces dual_surfaces(const FrictionParams& params, double n_e) {
  require_positive(n_e, "applied normal force");
  return {build_limit_surface(params.mu_e, params.r_e, params.c, n_e),
          build_limit_surface(params.mu_p, params.r_p, params.c,
                              support_normal_force(params, n_e))};
}

ContactCase classify_case(const FrictionParams& params) {
  const double torque_top = params.mu_e * params.r_e;
  const double torque_support = params.mu_p * params.r_p;
  ContactCase out;
  out.p_t = (torque_top - torque_support) / torque_support;
  out.p_f = (params.mu_e - params.mu_p) / params.mu_p;
  // Ties go to the more conservative case. N_slip on the force axis is
  // m g / p_f and on the torque axis m g / p_t, so with both slopes positive
  // the axis with the larger slope difference crosses first.
  if (out.p_f <= 0.0 && out.p_t <= 0.0) {
    out.id = CaseId::I;
  } else if (out.p_f <= 0.0) {
    out.id = CaseId::II;
  } else if (out.p_t <= 0.0) {
    out.id = CaseId::III;
  } else if (out.p_t <= out.p_f) {
    out.id = CaseId::IV;
  } else {
    out.id = CaseId::V;
  }
  return out;
}

ForceRegime force_regime(const FrictionParams& params) {
  const double mg = params.weight();
  // Force semi-axes cross at N_e = mu_p m g / (mu_e - mu_p); torque semi-axes
  // at r_p mu_p m g / (r_e mu_e - r_p mu_p).
  const double force_axis = params.mu_p * mg / (params.mu_e - params.mu_p);
  const double torque_axis = params.r_p * params.mu_p * mg /
                             (params.r_e * params.mu_e - params.r_p * params.mu_p);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  ForceRegime regime;
  switch (classify_case(params).id) {
    case CaseId::I:
      break;
    case CaseId::II:
      regime.n_slip = torque_axis;
      regime.valid_range = {torque_axis, kInf};
      break;
    case CaseId::III:
      regime.n_slip = force_axis;
      regime.valid_range = {force_axis, kInf};
      break;
    case CaseId::IV:
      regime.n_slip = force_axis;
      regime.n_stick = torque_axis;
      regime.valid_range = {force_axis, torque_axis};
      break;
    case CaseId::V:
      regime.n_slip = torque_axis;
      regime.n_stick = force_axis;
      regime.valid_range = {torque_axis, force_axis};
      break;
  }
  return regime;
}

Containment containment(const LimitSurface& top, const LimitSurface& support) {
  const double df = top.a_f - support.a_f;
  const double dt = top.a_t - support.a_t;
  if (df == 0.0 && dt == 0.0) return Containment::kCoincident;
  if (df <= 0.0 && dt <= 0.0) return Containment::kTopInside;
  if (df >= 0.0 && dt >= 0.0) return Containment::kSupportInside;
  return Containment::kIntersecting;
}

IntersectionPoint intersect_surfaces(const LimitSurface& top, const LimitSurface& support,
                                     const MechanicsTolerances& tol) {
  switch (containment(top, support)) {
    case Containment::kCoincident:
      return {top.a_f, 0.0};
    case Containment::kTopInside:
      throw NoIntersection(true, "no slip boundary: top limit surface lies inside the support surface");
    case Containment::kSupportInside:
      throw NoIntersection(false, "no slip boundary: support limit surface lies inside the top surface");
    case Containment::kIntersecting:
      break;
  }

  // Work in axis-normalized unknowns x = F^2 / a_f,top^2, y = T^2 / a_t,top^2:
  //   x + y = 1,  x * sf + y * st = 1
  // with sf = (a_f,top / a_f,sup)^2 and st likewise, so x = (st - 1) / (st - sf).
  const double sf = (top.a_f / support.a_f) * (top.a_f / support.a_f);
  const double st = (top.a_t / support.a_t) * (top.a_t / support.a_t);
  double x = (st - 1.0) / (st - sf);
  double y = (1.0 - sf) / (st - sf);
  x = std::clamp(x, 0.0, 1.0);
  y = std::clamp(y, 0.0, 1.0);

  IntersectionPoint p{top.a_f * std::sqrt(x), top.a_t * std::sqrt(y)};

  // One Newton step on the pair of ellipse equations removes the rounding left
  // by the closed form.
  const double r1 = top.reduced_form(p.force, p.torque) - 1.0;
  const double r2 = support.reduced_form(p.force, p.torque) - 1.0;
  if (std::abs(r1) > tol.intersection_residual || std::abs(r2) > tol.intersection_residual) {
    const double j11 = 2.0 * p.force / (top.a_f * top.a_f);
    const double j12 = 2.0 * p.torque / (top.a_t * top.a_t);
    const double j21 = 2.0 * p.force / (support.a_f * support.a_f);
    const double j22 = 2.0 * p.torque / (support.a_t * support.a_t);
    const double det = j11 * j22 - j12 * j21;
    if (det != 0.0) {
      const double df = (r1 * j22 - r2 * j12) / det;
      const double dt = (j11 * r2 - j21 * r1) / det;
      p.force = std::max(0.0, p.force - df);
      p.torque = std::max(0.0, p.torque - dt);
    }
  }
  return p;
}

IntersectionPoint intersection_wrench(const FrictionParams& params, double n_e,
                                      const MechanicsTolerances& tol) {
  const DualSurfaces s = dual_surfaces(params, n_e);
  return intersect_surfaces(s.top, s.support, tol);
}

double normal_slope(const LimitSurface& surface, const IntersectionPoint& point) {
  if (point.force == 0.0) {
    throw InfiniteKv("slip boundary is a pure-torque wrench; k_v is unbounded");
  }
  const double v = point.force / (surface.a_f * surface.a_f);
  const double w = point.torque / (surface.a_t * surface.a_t);
  return std::abs(w) / std::abs(v);
}

double kv(const FrictionParams& params, double n_e, KvSurface surface,
          const MechanicsTolerances& tol) {
  const DualSurfaces s = dual_surfaces(params, n_e);
  const IntersectionPoint p = intersect_surfaces(s.top, s.support, tol);
  return normal_slope(surface == KvSurface::kSupport ? s.support : s.top, p);
}

bool is_slippage_free(const Twist2& twist, double k_v, CaseId case_id, double safety) {
  const double v = twist.linear_speed();
  const double w = std::abs(twist.omega);
  if (v == 0.0 && w == 0.0) return true;
  switch (case_id) {
    case CaseId::I:
      return false;
    case CaseId::III:
    case CaseId::IV:
      return safety * k_v * v >= w;
    case CaseId::II:
    case CaseId::V:
      return k_v * v / safety < w;
  }
  return false;
}

Twist2 twist_direction_from_wrench(const LimitSurface& surface, const Wrench2& wrench,
                                   const MechanicsTolerances& tol) {
  const double residual = surface.quadratic_form(wrench) - 1.0;
  if (!(std::abs(residual) < tol.on_surface)) {
    std::ostringstream os;
    os << "wrench is not on the limit surface (residual " << residual << ")";
    throw DomainError(os.str());
  }
  const double uf = 1.0 / (surface.a_f * surface.a_f);
  const double ut = 1.0 / (surface.a_t * surface.a_t);
  Twist2 t{wrench.fx * uf, wrench.fy * uf, wrench.tau * ut};
  const double norm = std::sqrt(t.vx * t.vx + t.vy * t.vy + t.omega * t.omega);
  return {t.vx / norm, t.vy / norm, t.omega / norm};
}

Wrench2 wrench_from_twist_direction(const LimitSurface& surface, const Twist2& twist) {
  if (twist.vx == 0.0 && twist.vy == 0.0 && twist.omega == 0.0) {
    throw DomainError("twist direction must be nonzero");
  }
  const double af2 = surface.a_f * surface.a_f;
  const double at2 = surface.a_t * surface.a_t;
  const Wrench2 raw{af2 * twist.vx, af2 * twist.vy, at2 * twist.omega};
  const double scale = std::sqrt(twist.vx * raw.fx + twist.vy * raw.fy + twist.omega * raw.tau);
  return {raw.fx / scale, raw.fy / scale, raw.tau / scale};
}

}  // namespace dls
