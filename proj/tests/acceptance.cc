// Acceptance harness: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "dls/identify.h"
#include "dls/io.h"
#include "dls/mechanics.h"
#include "dls/planner.h"
#include "dls/simulator.h"
#include "oracles.h"

namespace dls {
namespace {

struct Outcome {
  bool pass{true};
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// A random (params, N_e) pair with N_e strictly inside the crossing band.
std::pair<FrictionParams, double> random_valid_point(std::mt19937_64& gen) {
  while (true) {
    const FrictionParams p = oracle::random_params(gen);
    const ForceRegime regime = force_regime(p);
    if (regime.valid_range.empty()) continue;
    const double lo = regime.valid_range.lower;
    const double hi = std::isinf(regime.valid_range.upper) ? 10.0 * lo + 1.0
                                                           : regime.valid_range.upper;
    const double n_e =
        std::uniform_real_distribution<double>(lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo))(gen);
    return {p, n_e};
  }
}

Outcome criterion_1() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(101);
  double worst = 0.0;
  constexpr int kPoints = 200;
  for (int k = 0; k < kPoints; ++k) {
    const auto [p, n_e] = random_valid_point(gen);
    const auto sup = oracle::support_ellipse(p, n_e);
    const auto cross = oracle::sampled_crossing(oracle::top_ellipse(p, n_e), sup);
    if (!cross) return {false, "oracle found no crossing inside the valid band"};
    const double expected = oracle::fd_normal_slope(sup, cross->force, cross->torque);
    worst = std::max(worst, std::abs(kv(p, n_e) - expected) / expected);
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 5.0,
          fmt("%.0f points, max rel err %.2e, %.2f s", kPoints, worst, t)};
}

oracle::Placement expected_placement(CaseId id, const ForceRegime& regime, double n_e) {
  if (id == CaseId::I || n_e <= regime.valid_range.lower) return oracle::Placement::kTopInside;
  if (n_e < regime.valid_range.upper) return oracle::Placement::kCrossing;
  return oracle::Placement::kSupportInside;
}

Outcome criterion_2() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(202);
  int checked = 0;
  int disagree = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const FrictionParams p = oracle::random_params(gen);
    const CaseId id = classify_case(p).id;
    const ForceRegime regime = force_regime(p);
    for (int k = 1; k <= 20; ++k) {
      const double n_e = 0.25 * k;
      const auto top = oracle::top_ellipse(p, n_e);
      const auto sup = oracle::support_ellipse(p, n_e);
      const auto seen = oracle::sampled_placement(top, sup);
      const DualSurfaces s = dual_surfaces(p, n_e);
      const Containment lib = containment(s.top, s.support);
      const bool lib_matches =
          (lib == Containment::kTopInside && seen == oracle::Placement::kTopInside) ||
          (lib == Containment::kSupportInside && seen == oracle::Placement::kSupportInside) ||
          (lib == Containment::kIntersecting && seen == oracle::Placement::kCrossing);
      if (seen != expected_placement(id, regime, n_e) || !lib_matches) ++disagree;
      ++checked;
    }
  }
  const double t = seconds_since(t0);
  return {disagree == 0 && t < 5.0,
          fmt("%.0f checks, %.0f disagreements, %.2f s", checked, disagree, t)};
}

Outcome criterion_3() {
  std::mt19937_64 gen(303);
  int tested = 0;
  int failed = 0;
  int stick_checks = 0;
  while (tested < 100) {
    const FrictionParams p = oracle::random_params(gen);
    const CaseId id = classify_case(p).id;
    if (id != CaseId::III && id != CaseId::IV) continue;
    const ForceRegime regime = force_regime(p);
    auto placement = [&](double n_e) {
      return oracle::sampled_placement(oracle::top_ellipse(p, n_e), oracle::support_ellipse(p, n_e));
    };
    const double n_slip = *regime.n_slip;
    bool ok = placement(n_slip * (1.0 - 1e-3)) == oracle::Placement::kTopInside;
    const double above = n_slip * (1.0 + 1e-3);
    if (regime.n_stick && *regime.n_stick > n_slip) {
      const double n_stick = *regime.n_stick;
      if (above < n_stick) ok = ok && placement(above) == oracle::Placement::kCrossing;
      const double below_stick = n_stick * (1.0 - 1e-3);
      if (below_stick > n_slip) ok = ok && placement(below_stick) == oracle::Placement::kCrossing;
      ok = ok && placement(n_stick * (1.0 + 1e-3)) == oracle::Placement::kSupportInside;
      ++stick_checks;
    } else if (id == CaseId::III) {
      ok = ok && placement(above) == oracle::Placement::kCrossing;
    } else {
      // Case IV with an empty band: the object always sticks above n_slip.
      ok = ok && placement(above) == oracle::Placement::kSupportInside;
    }
    failed += !ok;
    ++tested;
  }
  return {failed == 0,
          fmt("%.0f parameter sets (%.0f with n_stick), %.0f failures", tested, stick_checks,
              failed)};
}

Pose2 random_benchmark_goal(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double d = 0.02 + 0.02 * u(gen);
  const double a = 2.0 * std::numbers::pi * u(gen);
  const double rot = (0.5 + 0.4 * u(gen)) * (u(gen) < 0.5 ? -1.0 : 1.0);
  return {d * std::cos(a), d * std::sin(a), rot};
}

PlanProblem reference_problem(const Pose2& goal) {
  PlanProblem p;
  p.goal = goal;
  p.n = 30;
  p.k_v = 1.25;
  p.c1 = 10.0;
  p.c2 = 1.0;
  return p;
}

std::vector<PlanProblem> benchmark_suite() {
  std::mt19937_64 gen(404);
  std::vector<PlanProblem> suite;
  for (int k = 0; k < 100; ++k) suite.push_back(reference_problem(random_benchmark_goal(gen)));
  return suite;
}

Outcome criterion_4() {
  const auto t0 = Clock::now();
  int converged = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_endpoint = 0.0;
  const auto suite = benchmark_suite();
  for (const PlanProblem& p : suite) {
    const PlanResult r = solve_plan(p);
    converged += r.report.converged;
    for (std::size_t i = 1; i < r.path.size(); ++i) {
      worst_margin = std::min(worst_margin, segment_margin(r.path.waypoints[i - 1],
                                                           r.path.waypoints[i], p.k_v, p.case_id,
                                                           p.safety, p.convention));
    }
    for (const Pose2 e : {r.path.front() - p.start, r.path.back() - p.goal}) {
      worst_endpoint = std::max({worst_endpoint, std::abs(e.x), std::abs(e.y), std::abs(e.theta)});
    }
  }
  const double t = seconds_since(t0);
  const bool pass = converged == static_cast<int>(suite.size()) && worst_margin >= -1e-10 &&
                    worst_endpoint <= 1e-9 && t < 30.0;
  return {pass, fmt("%.0f/100 converged, min margin %.2e, max endpoint err %.2e", converged,
                    worst_margin, worst_endpoint) +
                    fmt(", %.2f s", t)};
}

Outcome criterion_5() {
  std::mt19937_64 gen(505);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double d = 0.02 + 0.02 * std::abs(u(gen));
    const double a = std::numbers::pi * u(gen);
    // Commanded rotation stays below the safety-scaled sticking bound.
    const double rot = 0.8 * 1.25 * d * u(gen);
    const PlanProblem p = reference_problem({d * std::cos(a), d * std::sin(a), rot});
    const PlanResult r = solve_plan(p);
    const Path line = linear_interpolation(p.start, p.goal, p.n);
    for (int i = 0; i < p.n; ++i) {
      const Pose2 e = r.path.waypoints[i] - line.waypoints[i];
      worst = std::max({worst, std::abs(e.x), std::abs(e.y), std::abs(e.theta)});
    }
  }
  return {worst <= 1e-6, fmt("20 goals, max deviation from linear %.2e", worst)};
}

Outcome criterion_6() {
  std::mt19937_64 gen(606);
  std::uniform_real_distribution<double> force(3.0, 5.0);
  std::vector<SweepItem> items;
  for (const PlanProblem& p : benchmark_suite()) {
    SweepItem item;
    item.object = items.size() % 2 ? "box" : "disk";
    item.n_e = force(gen);
    item.problem = p;
    items.push_back(item);
  }
  const SimConfig sim;
  const Comparison c = compare_planners(items, sim);
  double linear_ori = 0.0;
  double proposed_ori = 0.0;
  double proposed_pos = 0.0;
  for (const PlannerRow& row : c.by_object) {
    if (row.object != "average") continue;
    if (row.planner == "linear") linear_ori = row.metrics.ori_rmse;
    if (row.planner == "proposed") {
      proposed_ori = row.metrics.ori_rmse;
      proposed_pos = row.metrics.pos_rmse;
    }
  }
  // Position error of every path that stuck throughout.
  double stick_pos = 0.0;
  int sticking = 0;
  for (const Rollout& r : c.proposed) {
    bool stuck = true;
    for (bool s : r.slip_flags) stuck = stuck && !s;
    if (!stuck) continue;
    ++sticking;
    stick_pos = std::max(stick_pos, std::hypot(r.final_error.x, r.final_error.y));
  }
  const double ratio = proposed_ori / linear_ori;
  const bool pass = linear_ori > 0.0 && ratio <= 0.2 && sticking > 0 && stick_pos == 0.0;
  return {pass, fmt("ori RMSE proposed %.3e vs linear %.3e (ratio %.3f)", proposed_ori,
                    linear_ori, ratio) +
                    fmt(", %.0f sticking paths, max sticking pos err %.1e, pos RMSE %.1e",
                        sticking, stick_pos, proposed_pos)};
}

FrictionParams offset_init(const FrictionParams& truth) {
  FrictionParams p = truth;
  p.mu_e *= 1.4;
  p.mu_p *= 0.8;
  p.r_e *= 1.6;
  p.r_p *= 0.7;
  return p;
}

Outcome criterion_7() {
  const auto t0 = Clock::now();
  const FrictionParams truth;
  const std::vector<double> levels{3, 4, 5, 6, 7, 8, 9};
  const auto clean = synth_dataset(truth, 500, levels, 0.0, 707);
  const FitResult fit = fit_params(clean, offset_init(truth));
  double worst_kv = 0.0;
  for (double n_e : levels) {
    const double expected = kv(truth, n_e);
    worst_kv = std::max(worst_kv, std::abs(kv(fit.params, n_e) - expected) / expected);
  }
  const auto noisy = synth_dataset(truth, 500, levels, 0.05, 708);
  const std::vector<SegmentRecord> train(noisy.begin(), noisy.begin() + 400);
  const std::vector<SegmentRecord> held_out(noisy.begin() + 400, noisy.end());
  const FitResult noisy_fit = fit_params(train, offset_init(truth));
  const double held_acc = classification_accuracy(noisy_fit.params, held_out);
  const double t = seconds_since(t0);
  const bool pass =
      fit.classification_accuracy == 1.0 && worst_kv <= 0.02 && held_acc >= 0.95 && t < 60.0;
  return {pass, fmt("train acc %.4f, max k_v rel err %.2e, noisy held-out acc %.4f",
                    fit.classification_accuracy, worst_kv, held_acc) +
                    fmt(", %.2f s", t)};
}

Outcome criterion_8() {
  std::mt19937_64 gen(808);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.1, 5.0);
  double worst_round_trip = 0.0;
  double worst_fd = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const LimitSurface s = build_limit_surface(0.2 * u(gen), 0.01 * u(gen), 0.6, u(gen));
    const Twist2 dir{g(gen), g(gen), g(gen)};
    const Wrench2 w = wrench_from_twist_direction(s, dir);
    const Twist2 n = twist_direction_from_wrench(s, w);
    const Twist2 fd = oracle::fd_gradient(s.a_f, s.a_t, w);
    const double fd_norm = std::sqrt(fd.vx * fd.vx + fd.vy * fd.vy + fd.omega * fd.omega);
    worst_fd = std::max({worst_fd, std::abs(n.vx - fd.vx / fd_norm),
                         std::abs(n.vy - fd.vy / fd_norm), std::abs(n.omega - fd.omega / fd_norm)});
    const double dn = std::sqrt(dir.vx * dir.vx + dir.vy * dir.vy + dir.omega * dir.omega);
    const Wrench2 back = wrench_from_twist_direction(s, n);
    const double scale = std::hypot(w.fx, w.fy) + std::abs(w.tau);
    worst_round_trip = std::max(
        {worst_round_trip, std::abs(n.vx - dir.vx / dn), std::abs(n.vy - dir.vy / dn),
         std::abs(n.omega - dir.omega / dn), std::abs(back.fx - w.fx) / scale,
         std::abs(back.fy - w.fy) / scale, std::abs(back.tau - w.tau) / scale});
  }
  return {worst_round_trip <= 1e-9 && worst_fd <= 1e-8,
          fmt("1000 boundary points, max round-trip err %.2e, max normal vs FD err %.2e",
              worst_round_trip, worst_fd)};
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(DLS_CLI_PATH) + " " + args + " > /dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion_9() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "dls_acceptance_determinism";
  fs::remove_all(root);
  for (const char* d : {"a", "b", "c"}) fs::create_directories(root / d);
  const std::string data = (root / "data.csv").string();
  const std::string suite = (root / "suite.json").string();
  write_file(data, dataset_to_csv(synth_dataset(FrictionParams{}, 300, {3, 4, 5, 6, 7, 8, 9},
                                                0.05, 909)));
  write_file(suite, R"({"generate": {"count": 24, "translation": [0.02, 0.04],
    "rotation": [0.5, 0.9], "n_e_levels": [3, 4, 5], "objects": ["disk", "box"]}})");
  const std::string init =
      (root / "init.json").string();
  write_file(init, R"({"seed": 9, "friction": {"mu_e": 0.5, "r_e": 0.016, "r_p": 0.028}})");
  int bad_exit = 0;
  for (const char* d : {"a", "b", "c"}) {
    const std::string out = " --out " + (root / d).string();
    const std::string threads = std::string(d) == "c" ? "1" : "0";
    bad_exit += run_cli("--config " + init + out + " fit " + data) != 0;
    bad_exit += run_cli("--config " + init + out + " sweep " + suite + " --threads " + threads) != 0;
  }
  int differing = 0;
  for (const char* f : {"fit.json", "fit_boundary.svg", "table.csv", "force_rmse.csv"}) {
    const std::string a = read_file((root / "a" / f).string());
    differing += a != read_file((root / "b" / f).string());
    differing += a != read_file((root / "c" / f).string());
  }
  fs::remove_all(root);
  return {bad_exit == 0 && differing == 0,
          fmt("3 runs each of fit and sweep, %.0f failed runs, %.0f differing files", bad_exit,
              differing)};
}

}  // namespace
}  // namespace dls

int main() {
  const std::vector<std::pair<const char*, std::function<dls::Outcome()>>> criteria{
      {"kv oracle equivalence", dls::criterion_1},
      {"case/containment agreement", dls::criterion_2},
      {"critical-force boundary", dls::criterion_3},
      {"planner feasibility suite", dls::criterion_4},
      {"linear degeneracy", dls::criterion_5},
      {"orientation-error reduction", dls::criterion_6},
      {"identification round trip", dls::criterion_7},
      {"normal map and gradient checks", dls::criterion_8},
      {"determinism", dls::criterion_9},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    dls::Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
