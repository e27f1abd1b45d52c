#include "dls/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "rng.h"

namespace dls {

using nlohmann::json;

std::string format_number(double v) {
  if (!std::isfinite(v)) {
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T field(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + "." + key + ": wrong type");
  }
}

Pose2 pose_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ParseError(where + ": expected [x, y, theta]");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const json::exception&) {
    throw ParseError(where + ": pose entries must be numbers");
  }
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

void Config::validate() const {
  friction.validate();
  if (!(n_e > 0.0) || !std::isfinite(n_e)) throw DomainError("n_e must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("safety must lie in (0, 1]");
  if (!(sim_safety > 0.0 && sim_safety <= 1.0)) throw DomainError("sim_safety must lie in (0, 1]");
  if (planner.n < 2) throw DomainError("planner.n must be at least 2");
  if (planner.c1 < 0.0 || planner.c2 < 0.0 || (planner.c1 == 0.0 && planner.c2 == 0.0)) {
    throw DomainError("planner weights must be non-negative and not both zero");
  }
  if (planner.k_v && !(*planner.k_v > 0.0)) throw DomainError("planner.k_v must be positive");
  if (kv_grid.count < 1 || !(kv_grid.min > 0.0) || kv_grid.max < kv_grid.min) {
    throw DomainError("kv_grid must have count >= 1 and 0 < min <= max");
  }
}

Config parse_config(const std::string& json_text) {
  const json j = parse_json(json_text, "config");
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  Config c;
  if (j.contains("friction")) {
    const json& f = j.at("friction");
    if (!f.is_object()) throw ParseError("config.friction: expected an object");
    auto& p = c.friction;
    p.mu_e = field(f, "mu_e", p.mu_e, "friction");
    p.mu_p = field(f, "mu_p", p.mu_p, "friction");
    p.r_e = field(f, "r_e", p.r_e, "friction");
    p.r_p = field(f, "r_p", p.r_p, "friction");
    p.c = field(f, "c", p.c, "friction");
    p.mass = field(f, "mass", p.mass, "friction");
    p.gravity = field(f, "gravity", p.gravity, "friction");
  }
  c.n_e = field(j, "n_e", c.n_e, "config");
  c.safety = field(j, "safety", c.safety, "config");
  c.sim_safety = field(j, "sim_safety", c.sim_safety, "config");
  c.seed = field<std::uint64_t>(j, "seed", c.seed, "config");
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    if (!p.is_object()) throw ParseError("config.planner: expected an object");
    c.planner.n = field(p, "n", c.planner.n, "planner");
    c.planner.c1 = field(p, "c1", c.planner.c1, "planner");
    c.planner.c2 = field(p, "c2", c.planner.c2, "planner");
    if (p.contains("k_v") && !p.at("k_v").is_null()) {
      c.planner.k_v = field(p, "k_v", 0.0, "planner");
    }
  }
  if (j.contains("kv_grid")) {
    const json& g = j.at("kv_grid");
    c.kv_grid.min = field(g, "min", c.kv_grid.min, "kv_grid");
    c.kv_grid.max = field(g, "max", c.kv_grid.max, "kv_grid");
    c.kv_grid.count = field(g, "count", c.kv_grid.count, "kv_grid");
  }
  try {
    c.kv_convention = kv_convention_from_string(
        field<std::string>(j, "kv_convention", std::string(to_string(c.kv_convention)), "config"));
    const auto surface = field<std::string>(j, "kv_surface", "support", "config");
    if (surface == "support") {
      c.kv_surface = KvSurface::kSupport;
    } else if (surface == "top") {
      c.kv_surface = KvSurface::kTop;
    } else {
      throw ParseError("config.kv_surface: expected support|top");
    }
  } catch (const DomainError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const Config& c) {
  json j;
  j["friction"] = {{"mu_e", c.friction.mu_e}, {"mu_p", c.friction.mu_p},
                   {"r_e", c.friction.r_e},   {"r_p", c.friction.r_p},
                   {"c", c.friction.c},       {"mass", c.friction.mass},
                   {"gravity", c.friction.gravity}};
  j["n_e"] = c.n_e;
  j["safety"] = c.safety;
  j["sim_safety"] = c.sim_safety;
  j["seed"] = c.seed;
  j["planner"] = {{"n", c.planner.n}, {"c1", c.planner.c1}, {"c2", c.planner.c2}};
  j["planner"]["k_v"] = c.planner.k_v ? json(*c.planner.k_v) : json(nullptr);
  j["kv_convention"] = std::string(to_string(c.kv_convention));
  j["kv_surface"] = std::string(to_string(c.kv_surface));
  j["kv_grid"] = {{"min", c.kv_grid.min}, {"max", c.kv_grid.max}, {"count", c.kv_grid.count}};
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw ParseError("failed writing '" + path + "'");
}

Config load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string path_to_json(const Path& path) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Pose2& q = path.waypoints[i];
    out += "  [" + format_number(q.x) + ", " + format_number(q.y) + ", " +
           format_number(q.theta) + "]";
    out += i + 1 < path.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

Path path_from_json(const std::string& json_text) {
  const json j = parse_json(json_text, "path file");
  if (!j.is_array()) throw ParseError("path file: expected an array of [x, y, theta]");
  Path path;
  for (std::size_t i = 0; i < j.size(); ++i) {
    path.waypoints.push_back(pose_of(j[i], "path[" + std::to_string(i) + "]"));
  }
  if (path.size() < 2) throw ParseError("path file: needs at least two waypoints");
  return path;
}

Pose2 pose_from_json_text(const std::string& text) {
  return pose_of(parse_json(text, "pose"), "pose");
}

std::string dataset_to_csv(const std::vector<SegmentRecord>& records) {
  std::string out = std::string(kDatasetHeader) + "\n";
  for (const auto& r : records) {
    const double values[] = {r.q_e0.x, r.q_e0.y, r.q_e0.theta, r.q_eT.x, r.q_eT.y, r.q_eT.theta,
                             r.q_o0.x, r.q_o0.y, r.q_o0.theta, r.q_oT.x, r.q_oT.y, r.q_oT.theta,
                             r.n_e,    r.wrench.fx, r.wrench.fy, r.wrench.tau};
    for (double v : values) out += format_number(v) + ",";
    if (r.label) out += *r.label ? "1" : "0";
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

}  // namespace

std::vector<SegmentRecord> dataset_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset: empty file");
  const auto header = split_csv_line(strip(line));
  const auto expected = split_csv_line(kDatasetHeader);
  if (header.size() != expected.size()) {
    throw ParseError("dataset row 1: expected " + std::to_string(expected.size()) +
                     " columns, found " + std::to_string(header.size()));
  }
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (strip(header[c]) != expected[c]) {
      throw ParseError("dataset row 1, column " + std::to_string(c + 1) + ": expected '" +
                       expected[c] + "', found '" + header[c] + "'");
    }
  }

  std::vector<SegmentRecord> records;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != expected.size()) {
      throw ParseError("dataset row " + std::to_string(row) + ": expected " +
                       std::to_string(expected.size()) + " columns, found " +
                       std::to_string(cells.size()));
    }
    double v[16];
    for (int c = 0; c < 16; ++c) {
      const std::string cell = strip(cells[c]);
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      const auto res = std::from_chars(first, last, v[c]);
      if (cell.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v[c])) {
        throw ParseError("dataset row " + std::to_string(row) + ", column '" + expected[c] +
                         "': not a finite number ('" + cell + "')");
      }
    }
    SegmentRecord r;
    r.q_e0 = {v[0], v[1], v[2]};
    r.q_eT = {v[3], v[4], v[5]};
    r.q_o0 = {v[6], v[7], v[8]};
    r.q_oT = {v[9], v[10], v[11]};
    r.n_e = v[12];
    r.wrench = {v[13], v[14], v[15]};
    if (!(r.n_e > 0.0)) {
      throw ParseError("dataset row " + std::to_string(row) + ", column 'Ne': must be positive");
    }
    const std::string label = strip(cells[16]);
    if (label == "1") {
      r.label = true;
    } else if (label == "0") {
      r.label = false;
    } else if (!label.empty()) {
      throw ParseError("dataset row " + std::to_string(row) +
                       ", column 'label': expected 0, 1 or empty");
    }
    records.push_back(r);
  }
  return records;
}

std::string rollout_to_csv(const Rollout& r) {
  std::string out = "step,ee_x,ee_y,ee_theta,obj_x,obj_y,obj_theta,slipped\n";
  for (std::size_t i = 0; i < r.ee_path.size(); ++i) {
    const Pose2& e = r.ee_path.waypoints[i];
    const Pose2& o = r.object_path.waypoints[i];
    const bool slipped = i > 0 && r.slip_flags[i - 1];
    out += std::to_string(i) + "," + format_number(e.x) + "," + format_number(e.y) + "," +
           format_number(e.theta) + "," + format_number(o.x) + "," + format_number(o.y) + "," +
           format_number(o.theta) + "," + (slipped ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<SweepItem> generate_sweep(int count, double t_lo, double t_hi, double r_lo,
                                      double r_hi, double n_lo, double n_hi,
                                      const std::vector<std::string>& objects,
                                      const PlanProblem& base, std::uint64_t seed) {
  if (count <= 0) throw DomainError("sweep needs a positive problem count");
  detail::Rng rng(seed);
  std::vector<SweepItem> items;
  items.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double dist = rng.uniform(t_lo, t_hi);
    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double rot = rng.uniform(r_lo, r_hi) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    SweepItem item;
    item.object = objects.empty() ? "default" : objects[k % objects.size()];
    item.n_e = rng.uniform(n_lo, n_hi);
    item.problem = base;
    item.problem.goal = base.start + Pose2{dist * std::cos(heading), dist * std::sin(heading), rot};
    items.push_back(item);
  }
  return items;
}

std::vector<SweepItem> sweep_from_json(const std::string& json_text, const Config& config,
                                       std::uint64_t seed) {
  const json j = parse_json(json_text, "problem suite");
  if (!j.is_object()) throw ParseError("problem suite: top level must be an object");

  PlanProblem base;
  base.n = config.planner.n;
  base.c1 = config.planner.c1;
  base.c2 = config.planner.c2;
  base.safety = config.safety;
  base.convention = config.kv_convention;
  base.case_id = classify_case(config.friction).id;
  const auto kv_at = [&](double n_e) {
    return config.planner.k_v ? *config.planner.k_v
                              : kv(config.friction, n_e, config.kv_surface);
  };

  std::vector<SweepItem> items;
  if (j.contains("generate")) {
    const json& g = j.at("generate");
    auto range = [&](const char* key, double lo, double hi) -> std::pair<double, double> {
      if (!g.contains(key)) return {lo, hi};
      const json& r = g.at(key);
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        throw ParseError(std::string("generate.") + key + ": expected [lo, hi]");
      }
      return {r[0].get<double>(), r[1].get<double>()};
    };
    const int count = field(g, "count", 0, "generate");
    const auto [t_lo, t_hi] = range("translation", 0.02, 0.04);
    const auto [r_lo, r_hi] = range("rotation", 0.5, 0.9);
    const auto [n_lo, n_hi] = range("n_e", config.n_e, config.n_e);
    std::vector<std::string> objects;
    if (g.contains("objects")) {
      try {
        objects = g.at("objects").get<std::vector<std::string>>();
      } catch (const json::exception&) {
        throw ParseError("generate.objects: expected a list of names");
      }
    }
    if (count <= 0) throw ParseError("generate.count: must be positive");
    items = generate_sweep(count, t_lo, t_hi, r_lo, r_hi, n_lo, n_hi, objects, base, seed);
    if (g.contains("n_e_levels")) {
      std::vector<double> levels;
      try {
        levels = g.at("n_e_levels").get<std::vector<double>>();
      } catch (const json::exception&) {
        throw ParseError("generate.n_e_levels: expected a list of forces");
      }
      if (levels.empty()) throw ParseError("generate.n_e_levels: empty list");
      for (std::size_t k = 0; k < items.size(); ++k) items[k].n_e = levels[k % levels.size()];
    }
  } else if (j.contains("problems")) {
    const json& list = j.at("problems");
    if (!list.is_array()) throw ParseError("problems: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "problems[" + std::to_string(i) + "]";
      const json& p = list[i];
      if (!p.is_object() || !p.contains("goal")) throw ParseError(where + ": needs a goal");
      SweepItem item;
      item.object = field<std::string>(p, "object", "default", where);
      item.n_e = field(p, "n_e", config.n_e, where);
      item.problem = base;
      if (p.contains("start")) item.problem.start = pose_of(p.at("start"), where + ".start");
      item.problem.goal = pose_of(p.at("goal"), where + ".goal");
      items.push_back(item);
    }
  } else {
    throw ParseError("problem suite: expected a 'problems' list or a 'generate' block");
  }
  if (items.empty()) throw ParseError("problem suite is empty");
  for (auto& item : items) {
    if (!(item.n_e > 0.0)) throw ParseError("problem suite: n_e must be positive");
    item.problem.k_v = kv_at(item.n_e);
  }
  return items;
}

}  // namespace dls
