#pragma once

#include <string>
#include <vector>

#include "dls/mechanics.h"
#include "dls/planner.h"

namespace dls {

/// Motion law applied when the top contact slips. ConeProjection clamps (or
/// inflates) the commanded rotation onto the sticking-cone boundary and passes
/// translation through; it approximates the slipping object's motion.
enum class SlipModel { kConeProjection };

struct SimConfig {
  FrictionParams params;
  double n_e{4.0};
  /// Scales the physical k_v; 1 simulates the model boundary itself.
  double safety{1.0};
  SlipModel slip_model{SlipModel::kConeProjection};
  KvSurface kv_surface{KvSurface::kSupport};
};

/// Contact regime the simulator resolves for a configuration.
enum class SimRegime {
  kBoundary,     ///< N_e inside the valid range: stick/slip per the k_v cone
  kAlwaysSlip,   ///< top surface inside the support surface: the object stays put
  kAlwaysStick,  ///< support surface inside the top surface: the object follows exactly
};

/// Resolved physics of a SimConfig: contact case, regime and k_v.
struct SimModel {
  CaseId case_id{CaseId::I};
  SimRegime regime{SimRegime::kAlwaysSlip};
  double k_v{0.0};
  double safety{1.0};
};

/// Human-readable problems with a configuration; empty when it is meaningful.
std::vector<std::string> validate_config(const SimConfig& config);

SimModel resolve_model(const SimConfig& config);

struct StepResult {
  Pose2 object_pose;
  bool slipped{false};
};

struct Rollout {
  Path ee_path;
  Path object_path;
  std::vector<bool> slip_flags;
  Pose2 final_error;
};

struct Metrics {
  double pos_rmse{0.0};
  double ori_rmse{0.0};
};

/// One quasi-static step with an explicit contact case and k_v.
StepResult step(const Pose2& object_pose, const SegmentDelta& ee_delta, CaseId case_id,
                double k_v, double safety);

/// One step under the physics resolved from `config`.
StepResult step(const Pose2& object_pose, const SegmentDelta& ee_delta, const SimModel& model);

/// Rolls the object along an end-effector path; the object starts aligned
/// with the end-effector and the goal is the path's final pose.
Rollout rollout(const Path& ee_path, const SimConfig& config);
Rollout rollout(const Path& ee_path, const SimModel& model);

Metrics pose_rmse(const std::vector<Rollout>& rollouts, const std::vector<Pose2>& goals);

/// One planning task of a comparison sweep.
struct SweepItem {
  std::string object{"default"};
  double n_e{4.0};
  PlanProblem problem;
};

struct PlannerRow {
  std::string object;
  std::string planner;  ///< "linear" or "proposed"
  Metrics metrics;
};

struct ForceRow {
  double n_e{0.0};
  std::string planner;
  Metrics metrics;
};

struct Comparison {
  std::vector<PlannerRow> by_object;  ///< per object and planner, plus "average"
  std::vector<ForceRow> by_force;     ///< per applied normal force and planner
  std::vector<Rollout> proposed;      ///< input order
  std::vector<Rollout> linear;        ///< input order
};

/// Plans and simulates every item with both the QCQP planner and linear
/// interpolation. Items are evaluated on `threads` workers; results keep
/// input order.
Comparison compare_planners(const std::vector<SweepItem>& items, const SimConfig& config,
                            const SolverOptions& options = {}, unsigned threads = 0);

/// Convenience form: every problem runs at config.n_e under object "default".
Comparison compare_planners(const std::vector<PlanProblem>& problems, const SimConfig& config);

/// Table of metrics with header object,planner,pos_rmse_m,ori_rmse_rad.
std::string metrics_csv(const std::vector<PlannerRow>& rows);
/// Per-force table with header n_e,planner,pos_rmse_m,ori_rmse_rad.
std::string force_csv(const std::vector<ForceRow>& rows);

}  // namespace dls
