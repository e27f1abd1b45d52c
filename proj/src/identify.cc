#include "dls/identify.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "rng.h"

namespace dls {

namespace {

using detail::Rng;

constexpr int kMaxRebuilds = 30;

struct ReducedWrench {
  double force;
  double torque;
};

ReducedWrench reduce(const Wrench2& w) { return {std::hypot(w.fx, w.fy), std::abs(w.tau)}; }

using Theta = std::array<double, 4>;  // log mu_e, log mu_p, log r_e, log r_p

FrictionParams with_theta(const FrictionParams& base, const Theta& t) {
  FrictionParams p = base;
  p.mu_e = std::exp(t[0]);
  p.mu_p = std::exp(t[1]);
  p.r_e = std::exp(t[2]);
  p.r_p = std::exp(t[3]);
  return p;
}

Theta theta_of(const FrictionParams& p) {
  return {std::log(p.mu_e), std::log(p.mu_p), std::log(p.r_e), std::log(p.r_p)};
}

Theta clamp_theta(Theta t, const ParamBounds& b) {
  // Lower bounds are open.
  const double mu_lo = std::log(b.mu_min) + 1e-9;
  const double r_lo = std::log(b.r_min) + 1e-9;
  t[0] = std::clamp(t[0], mu_lo, std::log(b.mu_max));
  t[1] = std::clamp(t[1], mu_lo, std::log(b.mu_max));
  t[2] = std::clamp(t[2], r_lo, std::log(b.r_max));
  t[3] = std::clamp(t[3], r_lo, std::log(b.r_max));
  return t;
}

}  // namespace

bool label_slip(const SegmentRecord& record, double ori_threshold, double pos_threshold) {
  const Pose2 ee = record.q_eT - record.q_e0;
  const Pose2 obj = record.q_oT - record.q_o0;
  const Pose2 diff = ee - obj;
  return std::hypot(diff.x, diff.y) > pos_threshold || std::abs(diff.theta) > ori_threshold;
}

bool resolved_label(const SegmentRecord& record) {
  return record.label ? *record.label : label_slip(record);
}

ModePrediction predict_mode(const FrictionParams& params, const SegmentRecord& record,
                            double outside_tolerance) {
  const DualSurfaces s = dual_surfaces(params, record.n_e);
  const ReducedWrench w = reduce(record.wrench);
  ModePrediction out;
  if (w.force == 0.0 && w.torque == 0.0) {
    out.margin = 1.0;
    return out;
  }
  // Along the ray through w the support boundary sits at scale 1/sqrt(g_sup)
  // and the top boundary at 1/sqrt(g_top); the larger form binds first.
  const double g_top = s.top.reduced_form(w.force, w.torque);
  const double g_sup = s.support.reduced_form(w.force, w.torque);
  out.margin = (g_sup - g_top) / (g_sup + g_top);
  out.predicted_slip = out.margin < 0.0;
  const double outside = 1.0 + outside_tolerance;
  out.quasi_static_violation = std::sqrt(g_top) > outside && std::sqrt(g_sup) > outside;
  return out;
}

double fit_loss(const FrictionParams& params, const std::vector<SegmentRecord>& dataset,
                const FitOptions& opts) {
  double total = 0.0;
  double weight_sum = 0.0;
  for (const auto& r : dataset) {
    const bool slipped = resolved_label(r);
    const double weight = slipped ? opts.slip_weight : 1.0;
    const DualSurfaces s = dual_surfaces(params, r.n_e);
    const ReducedWrench w = reduce(r.wrench);
    const double g_top = s.top.reduced_form(w.force, w.torque);
    const double g_sup = s.support.reduced_form(w.force, w.torque);
    const double sum = g_top + g_sup;
    const double margin = sum > 0.0 ? (g_sup - g_top) / sum : 1.0;
    const double y = slipped ? -1.0 : 1.0;
    const double hinge = std::max(0.0, -y * margin);
    // The sliding contact's surface carries the measured wrench: the support
    // while the top sticks, the top once it slips.
    const double off = std::sqrt(slipped ? g_top : g_sup) - 1.0;
    total += weight * (hinge + opts.surface_weight * off * off);
    weight_sum += weight;
  }
  return weight_sum > 0.0 ? total / weight_sum : 0.0;
}

double classification_accuracy(const FrictionParams& params,
                               const std::vector<SegmentRecord>& dataset) {
  if (dataset.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& r : dataset) {
    if (predict_mode(params, r).predicted_slip == resolved_label(r)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

FitResult fit_params(const std::vector<SegmentRecord>& dataset, const FrictionParams& init,
                     const ParamBounds& bounds, const FitOptions& opts) {
  if (dataset.empty()) throw DomainError("cannot fit an empty dataset");
  init.validate();
  std::size_t slips = 0;
  for (const auto& r : dataset) {
    if (!(r.n_e > 0.0)) throw DomainError("segment record with non-positive normal force");
    if (resolved_label(r)) ++slips;
  }
  if (slips == 0 || slips == dataset.size()) {
    throw Degenerate("dataset holds a single label class; the slip boundary is unconstrained");
  }

  const Theta anchor = theta_of(init);
  auto objective = [&](const Theta& t) {
    double reg = 0.0;
    for (int k = 0; k < 4; ++k) reg += (t[k] - anchor[k]) * (t[k] - anchor[k]);
    return fit_loss(with_theta(init, t), dataset, opts) + opts.regularization * reg;
  };

  Rng rng(opts.seed);
  FitResult best;
  best.loss = std::numeric_limits<double>::infinity();
  Theta best_theta = anchor;
  int total_iterations = 0;
  bool any_converged = false;

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    Theta start = anchor;
    if (restart > 0) {
      for (double& v : start) v += rng.uniform(-opts.jitter, opts.jitter);
    }
    start = clamp_theta(start, bounds);
    Theta run_best = start;
    double run_value = std::numeric_limits<double>::infinity();
    bool converged = false;
    int it = 0;

    // A collapsed simplex in a narrow valley stalls; rebuilding it around the
    // incumbent continues the descent.
    for (int rebuild = 0; rebuild < kMaxRebuilds && it < opts.max_iterations; ++rebuild) {
      const double edge = rebuild == 0 ? 0.2 : 0.05;
      // Nelder-Mead on log-parameters; vertices are projected into the bounds.
      std::array<Theta, 5> simplex;
      std::array<double, 5> value;
      simplex[0] = run_best;
      for (int k = 0; k < 4; ++k) {
        simplex[k + 1] = run_best;
        simplex[k + 1][k] += edge;
        simplex[k + 1] = clamp_theta(simplex[k + 1], bounds);
      }
      for (int k = 0; k < 5; ++k) value[k] = objective(simplex[k]);

      converged = false;
      for (; it < opts.max_iterations; ++it) {
        std::array<int, 5> order{0, 1, 2, 3, 4};
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return value[a] < value[b]; });
        std::array<Theta, 5> sorted_s;
        std::array<double, 5> sorted_v;
        for (int k = 0; k < 5; ++k) {
          sorted_s[k] = simplex[order[k]];
          sorted_v[k] = value[order[k]];
        }
        simplex = sorted_s;
        value = sorted_v;

        const double spread = value[4] - value[0];
        double size = 0.0;
        for (int k = 1; k < 5; ++k) {
          for (int j = 0; j < 4; ++j) {
            size = std::max(size, std::abs(simplex[k][j] - simplex[0][j]));
          }
        }
        if (spread <= opts.tolerance * (std::abs(value[0]) + 1e-300) || size < 1e-12) {
          converged = true;
          break;
        }

        Theta centroid{0.0, 0.0, 0.0, 0.0};
        for (int k = 0; k < 4; ++k) {
          for (int j = 0; j < 4; ++j) centroid[j] += simplex[k][j] / 4.0;
        }
        auto along = [&](double t) {
          Theta p;
          for (int j = 0; j < 4; ++j) p[j] = centroid[j] + t * (simplex[4][j] - centroid[j]);
          return clamp_theta(p, bounds);
        };

        const Theta reflected = along(-1.0);
        const double fr = objective(reflected);
        if (fr < value[0]) {
          const Theta expanded = along(-2.0);
          const double fe = objective(expanded);
          if (fe < fr) {
            simplex[4] = expanded;
            value[4] = fe;
          } else {
            simplex[4] = reflected;
            value[4] = fr;
          }
          continue;
        }
        if (fr < value[3]) {
          simplex[4] = reflected;
          value[4] = fr;
          continue;
        }
        const bool outside = fr < value[4];
        const Theta contracted = along(outside ? -0.5 : 0.5);
        const double fc = objective(contracted);
        if (fc < std::min(fr, value[4])) {
          simplex[4] = contracted;
          value[4] = fc;
          continue;
        }
        for (int k = 1; k < 5; ++k) {
          for (int j = 0; j < 4; ++j) {
            simplex[k][j] = simplex[0][j] + 0.5 * (simplex[k][j] - simplex[0][j]);
          }
          simplex[k] = clamp_theta(simplex[k], bounds);
          value[k] = objective(simplex[k]);
        }
      }
      const auto argmin = std::min_element(value.begin(), value.end()) - value.begin();
      const bool improved = value[argmin] < run_value * (1.0 - 1e-6);
      if (value[argmin] < run_value) {
        run_value = value[argmin];
        run_best = simplex[argmin];
      }
      if (!improved && rebuild > 0) break;
    }
    total_iterations += it;
    any_converged = any_converged || converged;
    if (run_value < best.loss) {
      best.loss = run_value;
      best_theta = run_best;
    }
  }

  best.params = with_theta(init, best_theta);
  best.loss = fit_loss(best.params, dataset, opts);
  best.classification_accuracy = classification_accuracy(best.params, dataset);
  best.iterations = total_iterations;
  best.converged = any_converged;
  return best;
}

std::vector<SegmentRecord> synth_dataset(const FrictionParams& params_true, int count,
                                         const std::vector<double>& n_e_levels, double noise,
                                         std::uint64_t seed) {
  if (count <= 0) throw DomainError("synthetic dataset size must be positive");
  if (n_e_levels.empty()) throw DomainError("synthetic dataset needs at least one force level");
  params_true.validate();
  Rng rng(seed);
  std::vector<SegmentRecord> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double n_e = n_e_levels[k % n_e_levels.size()];
    const DualSurfaces s = dual_surfaces(params_true, n_e);

    // Direction uniform in the support surface's normalized angle.
    const double phi = rng.uniform(0.0, 0.5 * std::numbers::pi);
    const double f_dir = s.support.a_f * std::cos(phi);
    const double t_dir = s.support.a_t * std::sin(phi);
    const double g_top = s.top.reduced_form(f_dir, t_dir);
    const double g_sup = s.support.reduced_form(f_dir, t_dir);
    const bool slipped = g_top > g_sup;
    const double scale = 1.0 / std::sqrt(std::max(g_top, g_sup));
    const double force = f_dir * scale;
    const double torque = t_dir * scale;

    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double torque_sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    Wrench2 w{force * std::cos(heading), force * std::sin(heading), torque_sign * torque};
    if (noise > 0.0) {
      w.fx *= 1.0 + noise * rng.normal();
      w.fy *= 1.0 + noise * rng.normal();
      w.tau *= 1.0 + noise * rng.normal();
    }

    // Segment poses: the object moves against the wrench along the support
    // surface normal, and lags well past both thresholds when slipping.
    const Twist2 dir = twist_direction_from_wrench(
        s.support, Wrench2{f_dir * std::cos(heading), f_dir * std::sin(heading),
                           torque_sign * t_dir});
    const double lin = std::hypot(dir.vx, dir.vy);
    const double travel = 0.03;
    const double spin = lin > 0.0 ? travel * std::abs(dir.omega) / lin : 0.3;
    const double ux = lin > 0.0 ? -dir.vx / lin : 0.0;
    const double uy = lin > 0.0 ? -dir.vy / lin : 0.0;
    const Pose2 ee_delta{travel * ux, travel * uy, -torque_sign * std::min(spin, 0.3)};

    SegmentRecord r;
    r.q_e0 = {rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01), rng.uniform(-0.1, 0.1)};
    r.q_o0 = r.q_e0;
    r.q_eT = r.q_e0 + ee_delta;
    r.q_oT = slipped ? r.q_o0 + ee_delta * 0.5 + Pose2{0.0, 0.0, torque_sign * 0.1}
                     : r.q_o0 + ee_delta;
    r.n_e = n_e;
    r.wrench = w;
    r.label = slipped;
    out.push_back(r);
  }
  return out;
}

}  // namespace dls
