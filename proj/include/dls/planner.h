#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "dls/mechanics.h"
#include "dls/types.h"

namespace dls {

/// How k_v enters the discrete segment constraint.
enum class KvConvention {
  /// (s k_v)^2 (dx^2 + dy^2) - dtheta^2: the squared sticking bound, unit-consistent.
  kSquared,
  /// s k_v (dx^2 + dy^2) - dtheta^2: the literal K = [[1,-1],[-1,1]] (x) diag(k_v, k_v, -1).
  kLiteral,
};

KvConvention kv_convention_from_string(std::string_view s);
std::string_view to_string(KvConvention c);

/// Iteration caps and tolerances of the path solver.
struct SolverOptions {
  int max_outer{50};
  int max_inner{10000};
  double rho_initial{1.0};
  double rho_growth{10.0};
  double gradient_tol{1e-8};
  double feasibility_tol{1e-10};
  /// Interior offset for the strict inequality of cases II/V.
  double strict_offset{1e-9};
  /// Feasible-descent iterations run after the first feasible point is found.
  int max_polish{400};
};

struct PlanProblem {
  Pose2 start;
  Pose2 goal;
  int n{30};
  double k_v{1.25};
  CaseId case_id{CaseId::III};
  double c1{10.0};
  double c2{1.0};
  double safety{kDefaultSafety};
  KvConvention convention{KvConvention::kSquared};

  /// Throws DomainError on a malformed problem.
  void validate() const;
};

struct Path {
  std::vector<Pose2> waypoints;

  std::size_t size() const { return waypoints.size(); }
  const Pose2& front() const { return waypoints.front(); }
  const Pose2& back() const { return waypoints.back(); }
  friend bool operator==(const Path&, const Path&) = default;
};

struct SolveReport {
  double objective_value{0.0};
  std::vector<double> per_segment_margins;
  int iterations{0};
  bool converged{false};
  /// Objective of the best feasible path after each outer iteration.
  std::vector<double> objective_trace;
};

struct PlanResult {
  Path path;
  SolveReport report;
};

/// The problem admits no slippage-free path (Case I).
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iteration caps exhausted before a feasible path was found.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, PlanResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const PlanResult& best_effort() const { return best_; }

 private:
  PlanResult best_;
};

using SegmentDelta = std::array<double, 3>;

Path linear_interpolation(const Pose2& start, const Pose2& goal, int n);

/// Signed constraint value of one segment; feasible when >= 0 in cases III/IV
/// and > 0 (or a zero segment) in cases II/V.
double segment_margin(const Pose2& q_prev, const Pose2& q_next, double k_v, CaseId case_id,
                      double safety, KvConvention convention = KvConvention::kSquared);

double segment_margin(const SegmentDelta& delta, double k_v, CaseId case_id, double safety,
                      KvConvention convention = KvConvention::kSquared);

bool margin_feasible(double margin, const SegmentDelta& delta, CaseId case_id,
                     double tolerance = 0.0);

/// Sum of squared second differences of the waypoints.
double roughness_objective(const Path& path);

double total_objective(const Path& path, const PlanProblem& problem);

/// Closed-form move of a segment onto the feasible set by adjusting rotation
/// only; feasible inputs are returned unchanged.
SegmentDelta project_segment(const SegmentDelta& delta, double k_v, CaseId case_id, double safety,
                             KvConvention convention = KvConvention::kSquared,
                             double strict_offset = 1e-9);

PlanResult solve_plan(const PlanProblem& problem, const SolverOptions& options = {});

SolveReport validate_path(const Path& path, const PlanProblem& problem,
                          double feasibility_tol = 1e-10, double endpoint_tol = 1e-9);

}  // namespace dls
