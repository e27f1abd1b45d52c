#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dls/identify.h"
#include "dls/planner.h"
#include "dls/simulator.h"

namespace dls {

/// Malformed input file or field; the message names the location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal that round-trips the double (at most 17 significant
/// digits); byte-stable across runs.
std::string format_number(double v);

struct PlannerSettings {
  int n{30};
  double c1{10.0};
  double c2{1.0};
  /// When unset, k_v comes from the mechanics at the configured N_e.
  std::optional<double> k_v;
};

struct KvGrid {
  double min{1.0};
  double max{9.0};
  int count{17};
};

/// Everything a command-line invocation needs, read from one JSON file.
struct Config {
  FrictionParams friction;
  double n_e{4.0};
  double safety{kDefaultSafety};
  double sim_safety{1.0};
  PlannerSettings planner;
  std::uint64_t seed{1};
  KvConvention kv_convention{KvConvention::kSquared};
  KvSurface kv_surface{KvSurface::kSupport};
  KvGrid kv_grid;

  void validate() const;
};

Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);
std::string config_to_json(const Config& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// JSON array of [x, y, theta] triples.
std::string path_to_json(const Path& path);
Path path_from_json(const std::string& json_text);

Pose2 pose_from_json_text(const std::string& text);

/// Header of the segment dataset CSV.
inline constexpr const char* kDatasetHeader =
    "qe0_x,qe0_y,qe0_th,qeT_x,qeT_y,qeT_th,qo0_x,qo0_y,qo0_th,qoT_x,qoT_y,qoT_th,Ne,fx,fy,tau,label";

std::string dataset_to_csv(const std::vector<SegmentRecord>& records);
/// Throws ParseError naming the row and column of the first violation.
std::vector<SegmentRecord> dataset_from_csv(const std::string& csv_text);

/// Per-step rollout table: step,ee_x,ee_y,ee_theta,obj_x,obj_y,obj_theta,slipped.
std::string rollout_to_csv(const Rollout& rollout);

/// Sweep problems: either an explicit "problems" list or a seeded "generate"
/// block drawing goals uniformly from translation/rotation/force ranges. A
/// "n_e_levels" list in the block cycles N_e through fixed levels instead.
std::vector<SweepItem> sweep_from_json(const std::string& json_text, const Config& config,
                                       std::uint64_t seed);

/// Goals drawn uniformly: translation magnitude in [t_lo, t_hi] in a uniform
/// direction, rotation magnitude in [r_lo, r_hi] with a random sign, N_e in
/// [n_lo, n_hi].
std::vector<SweepItem> generate_sweep(int count, double t_lo, double t_hi, double r_lo,
                                      double r_hi, double n_lo, double n_hi,
                                      const std::vector<std::string>& objects,
                                      const PlanProblem& base, std::uint64_t seed);

}  // namespace dls
