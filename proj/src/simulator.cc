#include "dls/simulator.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "dls/io.h"

namespace dls {

std::vector<std::string> validate_config(const SimConfig& config) {
  std::vector<std::string> issues;
  try {
    config.params.validate();
  } catch (const DomainError& e) {
    issues.emplace_back(e.what());
    return issues;
  }
  if (!(config.safety > 0.0 && config.safety <= 1.0)) {
    issues.emplace_back("safety must lie in (0, 1]");
  }
  if (!(config.n_e > 0.0) || !std::isfinite(config.n_e)) {
    issues.emplace_back("applied normal force must be positive");
    return issues;
  }
  const ContactCase cc = classify_case(config.params);
  if (cc.id == CaseId::I) {
    issues.emplace_back("Case I: the end-effector slips for every motion");
    return issues;
  }
  const ForceRegime regime = force_regime(config.params);
  if (!regime.valid_range.contains(config.n_e)) {
    std::ostringstream os;
    os << "N_e = " << config.n_e << " N lies outside the slip-boundary range ("
       << regime.valid_range.lower << ", " << regime.valid_range.upper << ")";
    issues.push_back(os.str());
  }
  return issues;
}

SimModel resolve_model(const SimConfig& config) {
  config.params.validate();
  if (!(config.safety > 0.0 && config.safety <= 1.0)) {
    throw DomainError("safety must lie in (0, 1]");
  }
  SimModel model;
  model.case_id = classify_case(config.params).id;
  model.safety = config.safety;
  if (model.case_id == CaseId::I) return model;

  const ForceRegime regime = force_regime(config.params);
  if (regime.valid_range.contains(config.n_e)) {
    model.regime = SimRegime::kBoundary;
    model.k_v = kv(config.params, config.n_e, config.kv_surface);
  } else if (regime.n_stick && config.n_e >= *regime.n_stick) {
    model.regime = SimRegime::kAlwaysStick;
  } else {
    model.regime = SimRegime::kAlwaysSlip;
  }
  return model;
}

StepResult step(const Pose2& object_pose, const SegmentDelta& ee_delta, CaseId case_id,
                double k_v, double safety) {
  const Twist2 twist{ee_delta[0], ee_delta[1], ee_delta[2]};
  if (is_slippage_free(twist, k_v, case_id, safety)) {
    return {object_pose + Pose2{ee_delta[0], ee_delta[1], ee_delta[2]}, false};
  }
  if (case_id == CaseId::I) return {object_pose, true};
  const SegmentDelta moved = project_segment(ee_delta, k_v, case_id, safety);
  return {object_pose + Pose2{moved[0], moved[1], moved[2]}, true};
}

StepResult step(const Pose2& object_pose, const SegmentDelta& ee_delta, const SimModel& model) {
  const bool rest = ee_delta[0] == 0.0 && ee_delta[1] == 0.0 && ee_delta[2] == 0.0;
  switch (model.regime) {
    case SimRegime::kAlwaysStick:
      return {object_pose + Pose2{ee_delta[0], ee_delta[1], ee_delta[2]}, false};
    case SimRegime::kAlwaysSlip:
      return {object_pose, !rest};
    case SimRegime::kBoundary:
      break;
  }
  return step(object_pose, ee_delta, model.case_id, model.k_v, model.safety);
}

Rollout rollout(const Path& ee_path, const SimModel& model) {
  if (ee_path.size() < 2) throw DomainError("rollout needs at least two waypoints");
  Rollout out;
  out.ee_path = ee_path;
  Pose2 object = ee_path.front();
  // q_err = q_e - q_o changes only on slipped steps, so a sticking object
  // reproduces the end-effector waypoints bit for bit.
  Pose2 err;
  out.object_path.waypoints.push_back(object);
  for (std::size_t i = 1; i < ee_path.size(); ++i) {
    const Pose2 d = ee_path.waypoints[i] - ee_path.waypoints[i - 1];
    const StepResult r = step(object, {d.x, d.y, d.theta}, model);
    if (r.slipped) {
      object = r.object_pose;
      err = ee_path.waypoints[i] - object;
    } else {
      object = ee_path.waypoints[i] - err;
    }
    out.object_path.waypoints.push_back(object);
    out.slip_flags.push_back(r.slipped);
  }
  out.final_error = object - ee_path.back();
  return out;
}

Rollout rollout(const Path& ee_path, const SimConfig& config) {
  return rollout(ee_path, resolve_model(config));
}

Metrics pose_rmse(const std::vector<Rollout>& rollouts, const std::vector<Pose2>& goals) {
  if (rollouts.empty()) throw DomainError("pose RMSE of an empty rollout set");
  if (rollouts.size() != goals.size()) throw DomainError("rollout and goal counts differ");
  double pos = 0.0;
  double ori = 0.0;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    const Pose2 e = rollouts[i].object_path.back() - goals[i];
    pos += e.x * e.x + e.y * e.y;
    ori += e.theta * e.theta;
  }
  const double n = static_cast<double>(rollouts.size());
  return {std::sqrt(pos / n), std::sqrt(ori / n)};
}

namespace {

template <typename Key>
void append_grouped(const std::vector<SweepItem>& items, const Comparison& cmp,
                    const std::vector<Key>& order, Key (*key_of)(const SweepItem&),
                    const auto& emit) {
  for (const Key& key : order) {
    for (const char* planner : {"linear", "proposed"}) {
      const auto& source = std::string_view(planner) == "linear" ? cmp.linear : cmp.proposed;
      std::vector<Rollout> rs;
      std::vector<Pose2> goals;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (key_of(items[i]) != key) continue;
        rs.push_back(source[i]);
        goals.push_back(items[i].problem.goal);
      }
      emit(key, planner, pose_rmse(rs, goals));
    }
  }
}

std::string object_of(const SweepItem& item) { return item.object; }
double force_of(const SweepItem& item) { return item.n_e; }

}  // namespace

Comparison compare_planners(const std::vector<SweepItem>& items, const SimConfig& config,
                            const SolverOptions& options, unsigned threads) {
  if (items.empty()) throw DomainError("planner comparison needs at least one problem");
  Comparison cmp;
  cmp.proposed.resize(items.size());
  cmp.linear.resize(items.size());
  std::vector<std::exception_ptr> errors(items.size());

  auto work = [&](std::size_t i) {
    try {
      const SweepItem& item = items[i];
      SimConfig local = config;
      local.n_e = item.n_e;
      const SimModel model = resolve_model(local);
      const PlanResult plan = solve_plan(item.problem, options);
      cmp.proposed[i] = rollout(plan.path, model);
      cmp.linear[i] = rollout(
          linear_interpolation(item.problem.start, item.problem.goal, item.problem.n), model);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(items.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < items.size(); i += threads) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<std::string> objects;
  std::vector<double> forces;
  for (const auto& item : items) {
    if (std::find(objects.begin(), objects.end(), item.object) == objects.end()) {
      objects.push_back(item.object);
    }
    if (std::find(forces.begin(), forces.end(), item.n_e) == forces.end()) {
      forces.push_back(item.n_e);
    }
  }
  std::sort(forces.begin(), forces.end());

  append_grouped<std::string>(items, cmp, objects, &object_of,
                              [&](const std::string& key, const char* planner, Metrics m) {
                                cmp.by_object.push_back({key, planner, m});
                              });
  if (objects.size() > 1) {
    for (const char* planner : {"linear", "proposed"}) {
      Metrics avg;
      int count = 0;
      for (const auto& row : cmp.by_object) {
        if (row.planner != planner) continue;
        avg.pos_rmse += row.metrics.pos_rmse;
        avg.ori_rmse += row.metrics.ori_rmse;
        ++count;
      }
      avg.pos_rmse /= count;
      avg.ori_rmse /= count;
      cmp.by_object.push_back({"average", planner, avg});
    }
  }
  append_grouped<double>(items, cmp, forces, &force_of,
                         [&](double key, const char* planner, Metrics m) {
                           cmp.by_force.push_back({key, planner, m});
                         });
  return cmp;
}

Comparison compare_planners(const std::vector<PlanProblem>& problems, const SimConfig& config) {
  std::vector<SweepItem> items;
  items.reserve(problems.size());
  for (const auto& p : problems) items.push_back({"default", config.n_e, p});
  return compare_planners(items, config);
}

std::string metrics_csv(const std::vector<PlannerRow>& rows) {
  std::ostringstream os;
  os << "object,planner,pos_rmse_m,ori_rmse_rad\n";
  for (const auto& r : rows) {
    os << r.object << ',' << r.planner << ',' << format_number(r.metrics.pos_rmse) << ','
       << format_number(r.metrics.ori_rmse) << '\n';
  }
  return os.str();
}

std::string force_csv(const std::vector<ForceRow>& rows) {
  std::ostringstream os;
  os << "n_e,planner,pos_rmse_m,ori_rmse_rad\n";
  for (const auto& r : rows) {
    os << format_number(r.n_e) << ',' << r.planner << ',' << format_number(r.metrics.pos_rmse)
       << ',' << format_number(r.metrics.ori_rmse) << '\n';
  }
  return os.str();
}

}  // namespace dls
