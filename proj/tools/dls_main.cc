// dls: command-line front end for the dual limit surface library.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dls/identify.h"
#include "dls/io.h"
#include "dls/mechanics.h"
#include "dls/planner.h"
#include "dls/simulator.h"
#include "dls/svg.h"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitDegenerate = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir{"."};
  std::optional<double> safety;
  std::optional<std::string> kv_convention;
};

dls::Config resolve_config(const CommonFlags& flags) {
  dls::Config config;
  if (!flags.config_path.empty()) config = dls::load_config(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.safety) config.safety = *flags.safety;
  if (flags.kv_convention) {
    try {
      config.kv_convention = dls::kv_convention_from_string(*flags.kv_convention);
    } catch (const dls::DomainError& e) {
      throw dls::ParseError(std::string("--kv-convention: ") + e.what());
    }
  }
  config.validate();
  return config;
}

std::string out_file(const CommonFlags& flags, const std::string& name) {
  const std::filesystem::path dir(flags.out_dir);
  if (!std::filesystem::is_directory(dir)) {
    throw dls::ParseError("output directory '" + flags.out_dir + "' does not exist");
  }
  return (dir / name).string();
}

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json pose_json(const dls::Pose2& q) { return json::array({num(q.x), num(q.y), num(q.theta)}); }

json regime_json(const dls::FrictionParams& params) {
  const dls::ContactCase cc = dls::classify_case(params);
  const dls::ForceRegime regime = dls::force_regime(params);
  json j;
  j["case"] = std::string(dls::to_string(cc.id));
  j["p_T"] = cc.p_t;
  j["p_F"] = cc.p_f;
  j["n_slip"] = regime.n_slip ? json(*regime.n_slip) : json(nullptr);
  j["n_stick"] = regime.n_stick ? json(*regime.n_stick) : json(nullptr);
  if (regime.valid_range.empty()) {
    j["valid_range"] = nullptr;
  } else {
    j["valid_range"] = json::array({num(regime.valid_range.lower), num(regime.valid_range.upper)});
  }
  return j;
}

int cmd_classify(const CommonFlags& flags) {
  const dls::Config config = resolve_config(flags);
  std::cout << regime_json(config.friction).dump() << "\n";
  return kExitOk;
}

int cmd_kv(const CommonFlags& flags) {
  const dls::Config config = resolve_config(flags);
  const dls::KvGrid& grid = config.kv_grid;
  std::string csv = "n_e,k_v\n";
  for (int i = 0; i < grid.count; ++i) {
    const double n_e =
        grid.count == 1 ? grid.min : grid.min + (grid.max - grid.min) * i / (grid.count - 1);
    std::string value;
    try {
      value = dls::format_number(dls::kv(config.friction, n_e, config.kv_surface));
    } catch (const dls::NoIntersection&) {
      value = "";  // no slip boundary at this force
    } catch (const dls::InfiniteKv&) {
      value = "inf";
    }
    csv += dls::format_number(n_e) + "," + value + "\n";
  }
  std::cout << csv;
  if (flags.out_dir != ".") dls::write_file(out_file(flags, "kv.csv"), csv);
  return kExitOk;
}

dls::PlanProblem problem_from(const dls::Config& config, const dls::Pose2& start,
                              const dls::Pose2& goal) {
  dls::PlanProblem p;
  p.start = start;
  p.goal = goal;
  p.n = config.planner.n;
  p.c1 = config.planner.c1;
  p.c2 = config.planner.c2;
  p.safety = config.safety;
  p.convention = config.kv_convention;
  p.case_id = dls::classify_case(config.friction).id;
  if (p.case_id == dls::CaseId::I) {
    throw dls::Infeasible("Case I: the end-effector slips for every motion");
  }
  if (config.planner.k_v) {
    p.k_v = *config.planner.k_v;
  } else {
    try {
      p.k_v = dls::kv(config.friction, config.n_e, config.kv_surface);
    } catch (const dls::NoIntersection& e) {
      throw dls::Infeasible(std::string("no slip boundary at the configured N_e: ") + e.what());
    }
  }
  return p;
}

void write_plan_outputs(const CommonFlags& flags, const dls::PlanProblem& problem,
                        const dls::PlanResult& result) {
  dls::write_file(out_file(flags, "path.json"), dls::path_to_json(result.path));
  dls::write_file(
      out_file(flags, "path.svg"),
      dls::path_svg({{"linear", "#ff7f0e",
                      dls::linear_interpolation(problem.start, problem.goal, problem.n), false},
                     {"planned", "#1f77b4", result.path, true}},
                    "planned path"));
  json report;
  report["converged"] = result.report.converged;
  report["objective"] = num(result.report.objective_value);
  report["iterations"] = result.report.iterations;
  report["k_v"] = problem.k_v;
  report["case"] = std::string(dls::to_string(problem.case_id));
  json margins = json::array();
  for (double m : result.report.per_segment_margins) margins.push_back(num(m));
  report["per_segment_margins"] = margins;
  dls::write_file(out_file(flags, "plan_report.json"), report.dump(2) + "\n");
}

int cmd_plan(const CommonFlags& flags, const std::string& start_text,
             const std::string& goal_text) {
  const dls::Config config = resolve_config(flags);
  const dls::Pose2 start = dls::pose_from_json_text(start_text);
  const dls::Pose2 goal = dls::pose_from_json_text(goal_text);
  out_file(flags, "path.json");  // fail on a missing directory before solving
  const dls::PlanProblem problem = problem_from(config, start, goal);
  try {
    const dls::PlanResult result = dls::solve_plan(problem);
    write_plan_outputs(flags, problem, result);
  } catch (const dls::NonConvergence& e) {
    write_plan_outputs(flags, problem, e.best_effort());
    std::cerr << "dls plan: " << e.what() << "\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_simulate(const CommonFlags& flags, const std::string& path_file) {
  const dls::Config config = resolve_config(flags);
  const dls::Path path = dls::path_from_json(dls::read_file(path_file));
  dls::SimConfig sim;
  sim.params = config.friction;
  sim.n_e = config.n_e;
  sim.safety = config.sim_safety;
  sim.kv_surface = config.kv_surface;
  for (const auto& issue : dls::validate_config(sim)) std::cerr << "warning: " << issue << "\n";
  const dls::Rollout r = dls::rollout(path, sim);
  dls::write_file(out_file(flags, "rollout.csv"), dls::rollout_to_csv(r));
  int slips = 0;
  for (bool s : r.slip_flags) slips += s;
  json j;
  j["final_error"] = pose_json(r.final_error);
  j["position_error"] = std::hypot(r.final_error.x, r.final_error.y);
  j["orientation_error"] = std::abs(r.final_error.theta);
  j["slipped_steps"] = slips;
  j["slip_model"] = "cone_projection";
  dls::write_file(out_file(flags, "terminal_error.json"), j.dump(2) + "\n");
  return kExitOk;
}

json params_json(const dls::FrictionParams& p) {
  json j;
  j["mu_e"] = p.mu_e;
  j["mu_p"] = p.mu_p;
  j["r_e"] = p.r_e;
  j["r_p"] = p.r_p;
  j["c"] = p.c;
  j["mass"] = p.mass;
  j["gravity"] = p.gravity;
  return j;
}

int cmd_fit(const CommonFlags& flags, const std::string& data_file) {
  const dls::Config config = resolve_config(flags);
  const auto dataset = dls::dataset_from_csv(dls::read_file(data_file));
  out_file(flags, "fit.json");
  dls::FitOptions opts;
  opts.seed = config.seed;
  const dls::FitResult fit = dls::fit_params(dataset, config.friction, {}, opts);
  json j;
  j["params"] = params_json(fit.params);
  j["loss"] = num(fit.loss);
  j["classification_accuracy"] = fit.classification_accuracy;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["case"] = std::string(dls::to_string(dls::classify_case(fit.params).id));
  dls::write_file(out_file(flags, "fit.json"), j.dump(2) + "\n");
  dls::write_file(out_file(flags, "fit_boundary.svg"), dls::fit_boundary_svg(dataset, fit.params));
  return kExitOk;
}

int cmd_synth(const CommonFlags& flags, int count, double noise) {
  const dls::Config config = resolve_config(flags);
  const auto data =
      dls::synth_dataset(config.friction, count, {3, 4, 5, 6, 7, 8, 9}, noise, config.seed);
  dls::write_file(out_file(flags, "dataset.csv"), dls::dataset_to_csv(data));
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::string& problems_file, unsigned threads) {
  const dls::Config config = resolve_config(flags);
  const auto items = dls::sweep_from_json(dls::read_file(problems_file), config, config.seed);
  out_file(flags, "table.csv");
  dls::SimConfig sim;
  sim.params = config.friction;
  sim.n_e = config.n_e;
  sim.safety = config.sim_safety;
  sim.kv_surface = config.kv_surface;
  const dls::Comparison cmp = dls::compare_planners(items, sim, {}, threads);
  dls::write_file(out_file(flags, "table.csv"), dls::metrics_csv(cmp.by_object));
  dls::write_file(out_file(flags, "force_rmse.csv"), dls::force_csv(cmp.by_force));
  std::cout << dls::metrics_csv(cmp.by_object);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Dual limit surface tools: contact classification, k_v, slippage-free planning, "
      "stick/slip simulation and friction identification.\n"
      "Settings come from --config; --seed, --safety and --kv-convention override the "
      "matching config fields."};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags flags;
  app.add_option("--config", flags.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "random seed (overrides config.seed)");
  app.add_option("--out", flags.out_dir, "output directory (must exist)");
  app.add_option("--safety", flags.safety, "planner safety factor in (0, 1] (overrides config.safety)");
  app.add_option("--kv-convention", flags.kv_convention, "squared|paper (overrides config)")
      ->check(CLI::IsMember({"squared", "paper"}));

  auto* classify = app.add_subcommand("classify", "print case, p_T, p_F and critical forces as JSON");
  auto* kv = app.add_subcommand("kv", "print k_v over the configured N_e grid as CSV");

  std::string start_text = "[0, 0, 0]";
  std::string goal_text;
  auto* plan = app.add_subcommand("plan", "plan a slippage-free path; writes path.json and path.svg");
  plan->add_option("--start", start_text, "start pose as JSON [x, y, theta]");
  plan->add_option("--goal", goal_text, "goal pose as JSON [x, y, theta]")->required();

  std::string path_file;
  auto* simulate = app.add_subcommand("simulate", "roll a path out; writes rollout.csv and terminal_error.json");
  simulate->add_option("path", path_file, "path JSON file")->required();

  std::string data_file;
  auto* fit = app.add_subcommand("fit", "fit friction parameters; writes fit.json and fit_boundary.svg");
  fit->add_option("dataset", data_file, "segment dataset CSV")->required();

  int synth_count = 500;
  double synth_noise = 0.0;
  auto* synth = app.add_subcommand("synth", "write a synthetic segment dataset (dataset.csv)");
  synth->add_option("--count", synth_count, "number of segments");
  synth->add_option("--noise", synth_noise, "relative wrench noise");

  std::string problems_file;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "compare planners; writes table.csv and force_rmse.csv");
  sweep->add_option("problems", problems_file, "problem suite JSON")->required();
  sweep->add_option("--threads", threads, "worker threads (0: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*classify) return cmd_classify(flags);
    if (*kv) return cmd_kv(flags);
    if (*plan) return cmd_plan(flags, start_text, goal_text);
    if (*simulate) return cmd_simulate(flags, path_file);
    if (*fit) return cmd_fit(flags, data_file);
    if (*synth) return cmd_synth(flags, synth_count, synth_noise);
    if (*sweep) return cmd_sweep(flags, problems_file, threads);
  } catch (const dls::ParseError& e) {
    std::cerr << "dls: " << e.what() << "\n";
    return kExitInput;
  } catch (const dls::DomainError& e) {
    std::cerr << "dls: invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const dls::Infeasible& e) {
    std::cerr << "dls: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const dls::NonConvergence& e) {
    std::cerr << "dls: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const dls::Degenerate& e) {
    std::cerr << "dls: degenerate data: " << e.what() << "\n";
    return kExitDegenerate;
  }
  return kExitInput;
}
