#include "dls/planner.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace dls {

namespace {

// Rotation-to-translation ratio bounding a segment: |dtheta| <= ratio * |dp|
// in cases III/IV, |dtheta| > ratio * |dp| in cases II/V.
double bound_ratio(double k_v, CaseId case_id, double safety, KvConvention convention) {
  const bool upper = case_id == CaseId::III || case_id == CaseId::IV;
  const double scaled = upper ? safety * k_v : k_v / safety;
  return convention == KvConvention::kSquared ? scaled : std::sqrt(scaled);
}

bool bounds_rotation_above(CaseId case_id) {
  return case_id == CaseId::III || case_id == CaseId::IV;
}

double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

SegmentDelta delta_of(const Pose2& a, const Pose2& b) {
  return {b.x - a.x, b.y - a.y, b.theta - a.theta};
}

using Deltas = std::vector<SegmentDelta>;

// Quadratic objective and penalty expressed over the segment increments.
class SegmentProblem {
 public:
  SegmentProblem(const PlanProblem& problem, const SolverOptions& options)
      : problem_(problem),
        options_(options),
        segments_(problem.n - 1),
        ratio_(bound_ratio(problem.k_v, problem.case_id, problem.safety, problem.convention)),
        upper_(bounds_rotation_above(problem.case_id)) {
    const Pose2 total = problem.goal - problem.start;
    total_ = {total.x, total.y, total.theta};
    for (int j = 0; j < 3; ++j) mean_step_[j] = total_[j] / segments_;
    // Normalizes margins to O(1) so that the penalty weight starts meaningful
    // regardless of the goal's scale.
    const double rot = mean_step_[2] * mean_step_[2];
    const double trans = ratio_ * ratio_ *
                         (mean_step_[0] * mean_step_[0] + mean_step_[1] * mean_step_[1]);
    margin_scale_ = std::max({rot, trans, 1e-300});
  }

  int segments() const { return segments_; }
  double ratio() const { return ratio_; }
  const SegmentDelta& total() const { return total_; }

  double objective(const Deltas& d) const {
    double dev = 0.0;
    std::array<double, 3> e{0.0, 0.0, 0.0};
    for (int i = 0; i < segments_; ++i) {
      for (int j = 0; j < 3; ++j) {
        e[j] += d[i][j] - mean_step_[j];
        dev += e[j] * e[j];
      }
    }
    double rough = 0.0;
    for (int i = 1; i < segments_; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double s = d[i][j] - d[i - 1][j];
        rough += s * s;
      }
    }
    return problem_.c1 * dev + problem_.c2 * rough;
  }

  void objective_gradient(const Deltas& d, Deltas& g) const {
    g.assign(segments_, {0.0, 0.0, 0.0});
    // Deviation term: dJ/dd_i = 2 c1 * sum_{k > i} e_k, with e_k the deviation
    // of waypoint k (which depends on d_0..d_{k-1}).
    std::vector<SegmentDelta> e(segments_ + 1, {0.0, 0.0, 0.0});
    for (int k = 1; k <= segments_; ++k) {
      for (int j = 0; j < 3; ++j) e[k][j] = e[k - 1][j] + d[k - 1][j] - mean_step_[j];
    }
    std::array<double, 3> tail{0.0, 0.0, 0.0};
    for (int i = segments_ - 1; i >= 0; --i) {
      for (int j = 0; j < 3; ++j) {
        tail[j] += e[i + 1][j];
        g[i][j] = 2.0 * problem_.c1 * tail[j];
      }
    }
    for (int i = 1; i < segments_; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double s = 2.0 * problem_.c2 * (d[i][j] - d[i - 1][j]);
        g[i][j] += s;
        g[i - 1][j] -= s;
      }
    }
  }

  // Normalized constraint violation of one segment; zero when feasible.
  double violation(const SegmentDelta& s) const {
    const double l2 = s[0] * s[0] + s[1] * s[1];
    const double t2 = s[2] * s[2];
    double v;
    if (upper_) {
      v = t2 - ratio_ * ratio_ * l2;
    } else {
      const double inflate = 1.0 + options_.strict_offset;
      v = ratio_ * ratio_ * inflate * inflate * l2 - t2;
    }
    return std::max(0.0, v / margin_scale_);
  }

  double penalty(const Deltas& d) const {
    double p = 0.0;
    for (const auto& s : d) {
      const double v = violation(s);
      p += v * v;
    }
    return p;
  }

  double max_violation(const Deltas& d) const {
    double worst = 0.0;
    for (const auto& s : d) worst = std::max(worst, violation(s));
    return worst;
  }

  void add_penalty_gradient(const Deltas& d, double rho, Deltas& g) const {
    const double inflate = 1.0 + options_.strict_offset;
    const double r2 = upper_ ? ratio_ * ratio_ : ratio_ * ratio_ * inflate * inflate;
    for (int i = 0; i < segments_; ++i) {
      const double v = violation(d[i]);
      if (v == 0.0) continue;
      const double w = rho * 2.0 * v / margin_scale_;
      const double sgn = upper_ ? 1.0 : -1.0;
      g[i][0] += w * sgn * (-2.0 * r2 * d[i][0]);
      g[i][1] += w * sgn * (-2.0 * r2 * d[i][1]);
      g[i][2] += w * sgn * (2.0 * d[i][2]);
    }
  }

  // Removes the component that would move sum(d) off the goal displacement.
  void project_gradient(Deltas& g) const {
    for (int j = 0; j < 3; ++j) {
      double mean = 0.0;
      for (const auto& s : g) mean += s[j];
      mean /= segments_;
      for (auto& s : g) s[j] -= mean;
    }
  }

  void recenter_translation(Deltas& d) const {
    for (int j = 0; j < 2; ++j) {
      double sum = 0.0;
      for (const auto& s : d) sum += s[j];
      const double fix = (total_[j] - sum) / segments_;
      for (auto& s : d) s[j] += fix;
    }
  }

  // Projection sweep: per-segment rotation projection, then redistribution of
  // the rotation residual among segments with room to absorb it. Returns
  // false when the translations cannot carry the required rotation.
  bool repair(Deltas& d) const {
    recenter_translation(d);
    return upper_ ? repair_bounded(d) : repair_strict(d);
  }

  PlanResult assemble(const Deltas& d) const {
    Path path;
    path.waypoints.reserve(segments_ + 1);
    Pose2 q = problem_.start;
    path.waypoints.push_back(q);
    for (int i = 0; i + 1 < segments_; ++i) {
      q = {q.x + d[i][0], q.y + d[i][1], q.theta + d[i][2]};
      path.waypoints.push_back(q);
    }
    path.waypoints.push_back(problem_.goal);
    PlanResult out;
    out.path = std::move(path);
    out.report = validate_path(out.path, problem_, options_.feasibility_tol);
    return out;
  }

 private:
  // Rotation capacity sum(ratio * |dp_i|) of the translations.
  double capacity(const Deltas& d) const {
    double c = 0.0;
    for (const auto& s : d) c += ratio_ * std::hypot(s[0], s[1]);
    return c;
  }

  // Inflates the translation detour about the straight line until the
  // segments can carry the goal rotation; sum(d) is unchanged.
  bool grow_detour(Deltas& d) const {
    const double needed = std::abs(total_[2]) * (1.0 + 1e-9);
    if (capacity(d) >= needed) return true;
    auto scaled = [&](double lambda) {
      Deltas out = d;
      for (auto& s : out) {
        for (int j = 0; j < 2; ++j) s[j] = mean_step_[j] + lambda * (s[j] - mean_step_[j]);
      }
      return out;
    };
    double hi = 2.0;
    while (capacity(scaled(hi)) < needed) {
      hi *= 2.0;
      if (hi > 1e12) return false;
    }
    double lo = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (capacity(scaled(mid)) < needed ? lo : hi) = mid;
    }
    d = scaled(hi);
    return true;
  }

  bool repair_bounded(Deltas& d) const {
    if (!grow_detour(d)) return false;
    double sum = 0.0;
    for (auto& s : d) {
      const double cap = ratio_ * std::hypot(s[0], s[1]);
      s[2] = std::clamp(s[2], -cap, cap);
      sum += s[2];
    }
    const double residual = total_[2] - sum;
    if (residual == 0.0) return true;
    const double dir = residual > 0.0 ? 1.0 : -1.0;
    double room = 0.0;
    std::vector<double> slack(segments_);
    for (int i = 0; i < segments_; ++i) {
      const double cap = ratio_ * std::hypot(d[i][0], d[i][1]);
      slack[i] = std::max(0.0, cap - dir * d[i][2]);
      room += slack[i];
    }
    if (room < std::abs(residual)) return false;
    const double share = std::abs(residual) / room;
    for (int i = 0; i < segments_; ++i) {
      const double cap = ratio_ * std::hypot(d[i][0], d[i][1]);
      d[i][2] = std::clamp(d[i][2] + dir * share * slack[i], -cap, cap);
    }
    return true;
  }

  bool repair_strict(Deltas& d) const {
    const double inflate = 1.0 + options_.strict_offset;
    auto floor_of = [&](const SegmentDelta& s) {
      return ratio_ * std::hypot(s[0], s[1]) * inflate * inflate;
    };
    for (auto& s : d) {
      const double lo = floor_of(s);
      if (std::abs(s[2]) < lo) s[2] = sign_or_one(s[2]) * lo;
    }
    for (int attempt = 0; attempt <= segments_; ++attempt) {
      double sum = 0.0;
      for (const auto& s : d) sum += s[2];
      const double residual = total_[2] - sum;
      if (residual == 0.0) return true;
      const double dir = residual > 0.0 ? 1.0 : -1.0;
      // Rotation can grow without bound in its own direction, and free
      // (zero-translation) segments take any rotation.
      std::vector<int> movable;
      for (int i = 0; i < segments_; ++i) {
        if (dir * d[i][2] > 0.0 || floor_of(d[i]) == 0.0) movable.push_back(i);
      }
      if (movable.empty()) {
        int flip = 0;
        for (int i = 1; i < segments_; ++i) {
          if (std::abs(d[i][2]) < std::abs(d[flip][2])) flip = i;
        }
        d[flip][2] = dir * floor_of(d[flip]);
        continue;
      }
      const double share = residual / static_cast<double>(movable.size());
      bool ok = true;
      for (int i : movable) {
        const double next = d[i][2] + share;
        if (floor_of(d[i]) > 0.0 && std::abs(next) < floor_of(d[i])) ok = false;
        d[i][2] = next;
      }
      if (ok) return true;
      for (auto& s : d) {
        const double lo = floor_of(s);
        if (std::abs(s[2]) < lo) s[2] = sign_or_one(s[2]) * lo;
      }
    }
    return false;
  }

  const PlanProblem& problem_;
  const SolverOptions& options_;
  int segments_;
  double ratio_;
  bool upper_;
  SegmentDelta total_{};
  SegmentDelta mean_step_{};
  double margin_scale_{1.0};
};

double dot(const Deltas& a, const Deltas& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int j = 0; j < 3; ++j) s += a[i][j] * b[i][j];
  }
  return s;
}

void axpy(Deltas& out, const Deltas& x, double alpha, const Deltas& g) {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int j = 0; j < 3; ++j) out[i][j] = x[i][j] - alpha * g[i][j];
  }
}

// Coil around the straight line: one circle of radius R per loop, traversed
// with the rotation's handedness so the construction commutes with mirroring.
Deltas coil_initialization(const SegmentProblem& sp, int loops, double length) {
  const int m = sp.segments();
  const SegmentDelta& total = sp.total();
  const double dist = std::hypot(total[0], total[1]);
  std::array<double, 2> u{1.0, 0.0};
  if (dist > 0.0) u = {total[0] / dist, total[1] / dist};
  const double hand = sign_or_one(total[2]);
  const std::array<double, 2> perp{-hand * u[1], hand * u[0]};
  const double radius = length / (2.0 * std::numbers::pi * loops);

  auto offset = [&](int k) -> std::array<double, 2> {
    const double phi = 2.0 * std::numbers::pi * loops * static_cast<double>(k) / m;
    const double a = radius * std::sin(phi);
    const double b = radius * (1.0 - std::cos(phi));
    return {a * u[0] + b * perp[0], a * u[1] + b * perp[1]};
  };

  Deltas d(m);
  for (int i = 0; i < m; ++i) {
    const auto o0 = offset(i);
    const auto o1 = offset(i + 1);
    d[i] = {total[0] / m + o1[0] - o0[0], total[1] / m + o1[1] - o0[1], total[2] / m};
  }
  return d;
}

// Alternating rotation signs for cases II/V, starting with the goal's sense.
Deltas zigzag_initialization(const SegmentProblem& sp) {
  const int m = sp.segments();
  const SegmentDelta& total = sp.total();
  const double hand = sign_or_one(total[2]);
  Deltas d(m);
  for (int i = 0; i < m; ++i) {
    const double l = std::hypot(total[0] / m, total[1] / m);
    const double sgn = (i % 2 == 0) ? hand : -hand;
    d[i] = {total[0] / m, total[1] / m, sgn * 1.5 * sp.ratio() * l + total[2] / m};
  }
  return d;
}

struct Incumbent {
  std::optional<Deltas> deltas;
  double objective{std::numeric_limits<double>::infinity()};
};

struct RunOutcome {
  Incumbent best;
  std::vector<double> trace;
  int iterations{0};
  Deltas last;
};

void offer(const SegmentProblem& sp, Deltas candidate, Incumbent& best) {
  if (!sp.repair(candidate)) return;
  const double j = sp.objective(candidate);
  if (j < best.objective) {
    best.objective = j;
    best.deltas = std::move(candidate);
  }
}

// Two-loop recursion over the stored curvature pairs; returns the descent
// direction -H g. Pairs live in the sum-preserving subspace, so the direction
// does too.
void lbfgs_direction(const std::deque<std::pair<Deltas, Deltas>>& pairs, const Deltas& g,
                     Deltas& dir) {
  dir = g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    const auto& [s, y] = pairs[k];
    alpha[k] = dot(s, dir) / dot(y, s);
    axpy(dir, dir, alpha[k], y);
  }
  if (!pairs.empty()) {
    const auto& [s, y] = pairs.back();
    const double gamma = dot(s, y) / dot(y, y);
    for (auto& v : dir) {
      for (double& c : v) c *= gamma;
    }
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [s, y] = pairs[k];
    const double beta = dot(y, dir) / dot(y, s);
    axpy(dir, dir, beta - alpha[k], s);
  }
}

RunOutcome run_penalty(const SegmentProblem& sp, Deltas d, const SolverOptions& opt) {
  constexpr std::size_t kHistory = 8;
  RunOutcome out;
  double rho = opt.rho_initial;
  Deltas g, g_next, dir, trial;
  std::deque<std::pair<Deltas, Deltas>> pairs;

  auto merit = [&](const Deltas& x) { return sp.objective(x) + rho * sp.penalty(x); };
  auto merit_gradient = [&](const Deltas& x, Deltas& grad) {
    sp.objective_gradient(x, grad);
    sp.add_penalty_gradient(x, rho, grad);
    sp.project_gradient(grad);
  };

  for (int outer = 0; outer < opt.max_outer; ++outer) {
    pairs.clear();
    merit_gradient(d, g);
    double f = merit(d);
    const double g0 = std::sqrt(dot(g, g));
    int stalled = 0;
    for (int inner = 0; inner < opt.max_inner; ++inner) {
      const double gg = dot(g, g);
      if (std::sqrt(gg) < std::max(opt.gradient_tol, 1e-6 * g0)) break;
      lbfgs_direction(pairs, g, dir);
      double slope = dot(g, dir);
      if (!(slope > 0.0)) {
        pairs.clear();
        dir = g;
        slope = gg;
      }
      double step = pairs.empty() ? std::min(1.0, 1e-3 / std::sqrt(gg)) : 1.0;
      bool accepted = false;
      const double f_before = f;
      for (int bt = 0; bt < 60; ++bt) {
        axpy(trial, d, step, dir);
        const double ft = merit(trial);
        if (ft <= f - 1e-4 * step * slope) {
          accepted = true;
          f = ft;
          break;
        }
        step *= 0.5;
      }
      ++out.iterations;
      if (!accepted) break;
      merit_gradient(trial, g_next);
      Deltas s(d.size()), y(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        for (int j = 0; j < 3; ++j) {
          s[i][j] = trial[i][j] - d[i][j];
          y[i][j] = g_next[i][j] - g[i][j];
        }
      }
      if (dot(s, y) > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
        pairs.emplace_back(std::move(s), std::move(y));
        if (pairs.size() > kHistory) pairs.pop_front();
      }
      std::swap(d, trial);
      std::swap(g, g_next);
      // Stalled: the merit has stopped moving at the relative level.
      stalled = (f_before - f) <= 1e-12 * std::abs(f) ? stalled + 1 : 0;
      if (stalled >= 10) break;
    }
    const double previous_best = out.best.objective;
    offer(sp, d, out.best);
    if (out.best.deltas) out.trace.push_back(out.best.objective);
    if (out.best.deltas && sp.max_violation(d) < 1e-6) break;
    if (out.best.deltas && previous_best - out.best.objective <= 1e-6 * out.best.objective) break;
    rho *= opt.rho_growth;
  }
  out.last = d;
  return out;
}

// Descent on the objective alone, mapping every trial back onto the feasible
// set with the projection sweep; only improving steps are kept.
void polish(const SegmentProblem& sp, const SolverOptions& opt, RunOutcome& run) {
  if (!run.best.deltas) return;
  Deltas d = *run.best.deltas;
  double f = run.best.objective;
  Deltas g, trial;
  double step = 1e-2;
  for (int it = 0; it < opt.max_polish; ++it) {
    sp.objective_gradient(d, g);
    sp.project_gradient(g);
    if (std::sqrt(dot(g, g)) < opt.gradient_tol) break;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      axpy(trial, d, step, g);
      if (sp.repair(trial)) {
        const double ft = sp.objective(trial);
        if (ft < f) {
          d = trial;
          f = ft;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    ++run.iterations;
    if (!accepted) break;
    run.trace.push_back(f);
    step *= 4.0;
  }
  run.best.deltas = d;
  run.best.objective = f;
}

}  // namespace

KvConvention kv_convention_from_string(std::string_view s) {
  if (s == "squared") return KvConvention::kSquared;
  if (s == "paper") return KvConvention::kLiteral;
  throw DomainError("unknown k_v convention '" + std::string(s) + "' (expected squared|paper)");
}

std::string_view to_string(KvConvention c) {
  return c == KvConvention::kSquared ? "squared" : "paper";
}

void PlanProblem::validate() const {
  if (n < 2) throw DomainError("step count n must be at least 2");
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || (c1 == 0.0 && c2 == 0.0)) {
    throw DomainError("weights c1, c2 must be non-negative and not both zero");
  }
  if (!(k_v > 0.0) || !std::isfinite(k_v)) throw DomainError("k_v must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("safety must lie in (0, 1]");
  if (!is_finite(start) || !is_finite(goal)) throw DomainError("start and goal must be finite");
}

Path linear_interpolation(const Pose2& start, const Pose2& goal, int n) {
  if (n < 2) throw DomainError("linear interpolation needs at least 2 waypoints");
  Path path;
  path.waypoints.reserve(n);
  const Pose2 delta = goal - start;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    path.waypoints.push_back(start + delta * t);
  }
  path.waypoints.back() = goal;
  return path;
}

double segment_margin(const SegmentDelta& delta, double k_v, CaseId case_id, double safety,
                      KvConvention convention) {
  const double ratio = bound_ratio(k_v, case_id, safety, convention);
  const double l2 = delta[0] * delta[0] + delta[1] * delta[1];
  const double t2 = delta[2] * delta[2];
  return bounds_rotation_above(case_id) ? ratio * ratio * l2 - t2 : t2 - ratio * ratio * l2;
}

double segment_margin(const Pose2& q_prev, const Pose2& q_next, double k_v, CaseId case_id,
                      double safety, KvConvention convention) {
  return segment_margin(delta_of(q_prev, q_next), k_v, case_id, safety, convention);
}

bool margin_feasible(double margin, const SegmentDelta& delta, CaseId case_id, double tolerance) {
  if (case_id == CaseId::I) {
    return delta[0] == 0.0 && delta[1] == 0.0 && delta[2] == 0.0;
  }
  if (bounds_rotation_above(case_id)) return margin >= -tolerance;
  const bool zero = delta[0] == 0.0 && delta[1] == 0.0 && delta[2] == 0.0;
  return zero || margin > -tolerance;
}

double roughness_objective(const Path& path) {
  const auto& q = path.waypoints;
  double sum = 0.0;
  for (std::size_t i = 2; i < q.size(); ++i) {
    const Pose2 s = q[i - 2] - q[i - 1] * 2.0 + q[i];
    sum += s.x * s.x + s.y * s.y + s.theta * s.theta;
  }
  return sum;
}

double total_objective(const Path& path, const PlanProblem& problem) {
  if (path.size() != static_cast<std::size_t>(problem.n)) {
    std::ostringstream os;
    os << "path has " << path.size() << " waypoints, problem expects " << problem.n;
    throw DomainError(os.str());
  }
  const Path reference = linear_interpolation(problem.start, problem.goal, problem.n);
  double dev = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Pose2 e = path.waypoints[i] - reference.waypoints[i];
    dev += e.x * e.x + e.y * e.y + e.theta * e.theta;
  }
  return problem.c1 * dev + problem.c2 * roughness_objective(path);
}

SegmentDelta project_segment(const SegmentDelta& delta, double k_v, CaseId case_id, double safety,
                             KvConvention convention, double strict_offset) {
  const double margin = segment_margin(delta, k_v, case_id, safety, convention);
  const double ratio = bound_ratio(k_v, case_id, safety, convention);
  const double l = std::hypot(delta[0], delta[1]);
  if (case_id == CaseId::I) {
    return {delta[0], delta[1], 0.0};
  }
  if (bounds_rotation_above(case_id)) {
    if (margin >= 0.0) return delta;
    const double sgn = delta[2] < 0.0 ? -1.0 : 1.0;
    SegmentDelta out{delta[0], delta[1], sgn * ratio * l};
    // Rounding in the margin can leave the clamped point a few ulps outside.
    while (segment_margin(out, k_v, case_id, safety, convention) < 0.0) {
      out[2] = std::nextafter(out[2], 0.0);
    }
    return out;
  }
  if (margin > 0.0 || (l == 0.0 && delta[2] == 0.0)) return delta;
  const double sgn = sign_or_one(delta[2]);
  SegmentDelta out{delta[0], delta[1], sgn * ratio * l * (1.0 + strict_offset)};
  while (!(segment_margin(out, k_v, case_id, safety, convention) > 0.0)) {
    out[2] = std::nextafter(out[2], sgn * std::numeric_limits<double>::infinity());
  }
  return out;
}

SolveReport validate_path(const Path& path, const PlanProblem& problem, double feasibility_tol,
                          double endpoint_tol) {
  SolveReport report;
  report.objective_value = total_objective(path, problem);
  bool feasible = true;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const SegmentDelta d = delta_of(path.waypoints[i - 1], path.waypoints[i]);
    const double m = segment_margin(d, problem.k_v, problem.case_id, problem.safety,
                                    problem.convention);
    report.per_segment_margins.push_back(m);
    feasible = feasible && margin_feasible(m, d, problem.case_id, feasibility_tol);
  }
  auto close = [&](const Pose2& a, const Pose2& b) {
    return std::abs(a.x - b.x) <= endpoint_tol && std::abs(a.y - b.y) <= endpoint_tol &&
           std::abs(a.theta - b.theta) <= endpoint_tol;
  };
  const bool endpoints = close(path.front(), problem.start) && close(path.back(), problem.goal);
  report.converged = feasible && endpoints;
  return report;
}

PlanResult solve_plan(const PlanProblem& problem, const SolverOptions& options) {
  problem.validate();
  if (problem.case_id == CaseId::I) {
    throw Infeasible("Case I: the end-effector slips for every motion; no slippage-free path exists");
  }

  // A feasible straight line is optimal: both objective terms vanish on it.
  {
    PlanResult linear;
    linear.path = linear_interpolation(problem.start, problem.goal, problem.n);
    linear.report = validate_path(linear.path, problem, options.feasibility_tol);
    if (linear.report.converged) {
      linear.report.objective_trace.push_back(linear.report.objective_value);
      return linear;
    }
  }

  const SegmentProblem sp(problem, options);
  std::vector<Deltas> starts;
  if (bounds_rotation_above(problem.case_id)) {
    const double needed = std::abs(sp.total()[2]) / sp.ratio();
    for (int loops = 1; loops <= 3; ++loops) {
      starts.push_back(coil_initialization(sp, loops, 1.25 * needed));
    }
  } else {
    starts.push_back(zigzag_initialization(sp));
  }

  std::optional<RunOutcome> best;
  int iterations = 0;
  for (const Deltas& init : starts) {
    RunOutcome run = run_penalty(sp, init, options);
    polish(sp, options, run);
    iterations += run.iterations;
    if (!best || run.best.objective < best->best.objective) best = std::move(run);
  }

  if (!best->best.deltas) {
    PlanResult partial = sp.assemble(best->last);
    partial.report.iterations = iterations;
    throw NonConvergence("planner found no feasible path within the iteration caps",
                         std::move(partial));
  }
  PlanResult out = sp.assemble(*best->best.deltas);
  out.report.iterations = iterations;
  out.report.objective_trace = std::move(best->trace);
  if (!out.report.converged) {
    throw NonConvergence("planner output failed final validation", std::move(out));
  }
  return out;
}

}  // namespace dls
