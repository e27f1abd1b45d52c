#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dls/mechanics.h"
#include "dls/types.h"

namespace dls {

/// One executed motion segment with its measured support reaction.
struct SegmentRecord {
  Pose2 q_e0;
  Pose2 q_eT;
  Pose2 q_o0;
  Pose2 q_oT;
  double n_e{0.0};
  Wrench2 wrench;
  std::optional<bool> label;  ///< true when the top contact slipped

  friend bool operator==(const SegmentRecord&, const SegmentRecord&) = default;
};

constexpr double kSlipOrientationThreshold = 0.05;  // [rad]
constexpr double kSlipPositionThreshold = 0.005;    // [m]

/// Slip when the object's displacement departs from the end-effector's by
/// more than either threshold.
bool label_slip(const SegmentRecord& record, double ori_threshold = kSlipOrientationThreshold,
                double pos_threshold = kSlipPositionThreshold);

/// Stored label, or the threshold label when the record carries none.
bool resolved_label(const SegmentRecord& record);

struct ModePrediction {
  bool predicted_slip{false};
  /// In [-1, 1]: positive when the support surface binds first along the ray
  /// through the wrench (top contact sticks), negative when the top binds first.
  double margin{0.0};
  /// Wrench lies outside both surfaces by more than the tolerance.
  bool quasi_static_violation{false};
};

ModePrediction predict_mode(const FrictionParams& params, const SegmentRecord& record,
                            double outside_tolerance = 0.05);

struct ParamBounds {
  double mu_min{0.01};
  double mu_max{2.0};
  double r_min{0.001};
  double r_max{0.2};
};

struct FitOptions {
  int restarts{20};
  std::uint64_t seed{1};
  int max_iterations{4000};
  /// Relative spread of simplex losses at which a restart stops.
  double tolerance{1e-14};
  /// Log-scale jitter applied to the initial guess for each restart.
  double jitter{0.5};
  double slip_weight{0.5};
  double regularization{1e-12};
  /// Weight of the distance of each wrench from the surface its label says
  /// is sliding.
  double surface_weight{1.0};
};

struct FitResult {
  FrictionParams params;
  double loss{0.0};
  double classification_accuracy{0.0};
  int iterations{0};
  bool converged{false};
};

/// All records share one label, so no boundary can be fitted.
class Degenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loss of a parameter set on a dataset (the objective fit_params minimizes,
/// without the regularization term).
double fit_loss(const FrictionParams& params, const std::vector<SegmentRecord>& dataset,
                const FitOptions& opts = {});

double classification_accuracy(const FrictionParams& params,
                               const std::vector<SegmentRecord>& dataset);

/// Fits {mu_e, mu_p, r_e, r_p}; c, mass and gravity are taken from `init`.
FitResult fit_params(const std::vector<SegmentRecord>& dataset, const FrictionParams& init,
                     const ParamBounds& bounds = {}, const FitOptions& opts = {});

/// Synthetic segments whose wrenches sit on the binding surface, in
/// directions spread uniformly over the support surface, cycling through
/// `n_e_levels`. `noise` is the standard deviation of the multiplicative
/// perturbation applied to each wrench component.
std::vector<SegmentRecord> synth_dataset(const FrictionParams& params_true, int count,
                                         const std::vector<double>& n_e_levels, double noise,
                                         std::uint64_t seed);

}  // namespace dls
