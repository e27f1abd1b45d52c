#include "dls/io.h"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

namespace dls {
namespace {

TEST(FormatNumberTest, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.4905), "0.4905");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(-0.0), "-0");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(gen) * std::pow(10.0, k % 20 - 10);
    EXPECT_EQ(std::stod(format_number(v)), v);
    EXPECT_EQ(format_number(std::stod(format_number(v))), format_number(v));
  }
}

TEST(ConfigTest, DefaultsAndOverrides) {
  const Config d = parse_config("{}");
  EXPECT_EQ(d.friction.mu_e, FrictionParams{}.mu_e);
  EXPECT_EQ(d.planner.n, 30);
  EXPECT_FALSE(d.planner.k_v.has_value());

  const Config c = parse_config(R"({
    "friction": {"mu_e": 0.6, "r_p": 0.03},
    "n_e": 5.5, "seed": 99, "safety": 0.7,
    "planner": {"n": 40, "k_v": 1.25},
    "kv_convention": "paper", "kv_surface": "top",
    "kv_grid": {"min": 2, "max": 6, "count": 5}})");
  EXPECT_EQ(c.friction.mu_e, 0.6);
  EXPECT_EQ(c.friction.r_p, 0.03);
  EXPECT_EQ(c.n_e, 5.5);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.safety, 0.7);
  EXPECT_EQ(c.planner.n, 40);
  EXPECT_EQ(c.planner.k_v, 1.25);
  EXPECT_EQ(c.kv_convention, KvConvention::kLiteral);
  EXPECT_EQ(c.kv_surface, KvSurface::kTop);
  EXPECT_EQ(c.kv_grid.count, 5);

  const Config again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(ConfigTest, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("{"), ParseError);
  EXPECT_THROW(parse_config("[]"), ParseError);
  EXPECT_THROW(parse_config(R"({"n_e": "four"})"), ParseError);
  EXPECT_THROW(parse_config(R"({"friction": 3})"), ParseError);
  EXPECT_THROW(parse_config(R"({"kv_convention": "cubic"})"), ParseError);
  EXPECT_THROW(parse_config(R"({"kv_surface": "side"})"), ParseError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ParseError);
  try {
    parse_config(R"({"friction": {"mu_e": "x"}})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("mu_e"), std::string::npos);
  }
}

TEST(ConfigTest, ValidateRejectsNonPhysicalValues) {
  EXPECT_ANY_THROW(parse_config(R"({"friction": {"mu_e": -0.1}})").validate());
  EXPECT_ANY_THROW(parse_config(R"({"n_e": 0})").validate());
  EXPECT_ANY_THROW(parse_config(R"({"safety": 0})").validate());
  EXPECT_ANY_THROW(parse_config(R"({"planner": {"n": 1}})").validate());
  EXPECT_NO_THROW(parse_config("{}").validate());
}

TEST(PathJsonTest, RoundTripAndErrors) {
  const Path p = linear_interpolation({0.1, -0.2, 0.3}, {0.0, -0.01, -0.7}, 7);
  EXPECT_EQ(path_from_json(path_to_json(p)), p);
  EXPECT_THROW(path_from_json(""), ParseError);
  EXPECT_THROW(path_from_json("[]"), ParseError);
  EXPECT_THROW(path_from_json("[[0, 0, 0]]"), ParseError);
  EXPECT_THROW(path_from_json("[[0, 0], [1, 1]]"), ParseError);
  EXPECT_THROW(path_from_json(R"([[0, 0, 0], [1, "a", 0]])"), ParseError);
  EXPECT_EQ(pose_from_json_text("[0, -0.01, -0.7]"), (Pose2{0, -0.01, -0.7}));
  EXPECT_THROW(pose_from_json_text("[0, 1]"), ParseError);
}

TEST(DatasetCsvTest, RoundTripIsExact) {
  const auto data = synth_dataset(FrictionParams{}, 60, {3, 5, 7}, 0.05, 4);
  const std::string csv = dataset_to_csv(data);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kDatasetHeader);
  const auto back = dataset_from_csv(csv);
  EXPECT_EQ(back, data);
  EXPECT_EQ(dataset_to_csv(back), csv);
}

TEST(DatasetCsvTest, ErrorsNameRowAndColumn) {
  const auto data = synth_dataset(FrictionParams{}, 3, {4}, 0.0, 4);
  const std::string csv = dataset_to_csv(data);

  std::string typo = csv;
  typo.replace(typo.find("tau"), 3, "tua");
  try {
    dataset_from_csv(typo);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("column 16"), std::string::npos) << e.what();
  }

  std::string bad = csv;
  const std::size_t row3 = bad.find('\n', bad.find('\n') + 1) + 1;
  bad.replace(row3, bad.find(',', row3) - row3, "abc");
  try {
    dataset_from_csv(bad);
    FAIL();
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("row 3"), std::string::npos) << what;
    EXPECT_NE(what.find("qe0_x"), std::string::npos) << what;
  }

  EXPECT_THROW(dataset_from_csv(""), ParseError);
  EXPECT_THROW(dataset_from_csv(std::string(kDatasetHeader) + "\n1,2,3\n"), ParseError);
}

TEST(DatasetCsvTest, EmptyLabelIsDerivedFromPoses) {
  auto data = synth_dataset(FrictionParams{}, 5, {4}, 0.0, 8);
  for (auto& r : data) r.label.reset();
  const auto back = dataset_from_csv(dataset_to_csv(data));
  for (const auto& r : back) EXPECT_FALSE(r.label.has_value());
}

TEST(SweepJsonTest, ExplicitProblems) {
  Config config;
  config.planner.k_v = 1.25;
  const auto items = sweep_from_json(R"({"problems": [
      {"object": "box", "n_e": 3.5, "goal": [0.03, 0.0, 0.6]},
      {"goal": [0.0, -0.01, -0.7], "start": [0.1, 0.0, 0.0]}]})",
                                     config, 1);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].object, "box");
  EXPECT_EQ(items[0].n_e, 3.5);
  EXPECT_EQ(items[0].problem.k_v, 1.25);
  EXPECT_EQ(items[1].object, "default");
  EXPECT_EQ(items[1].n_e, config.n_e);
  EXPECT_EQ(items[1].problem.start, (Pose2{0.1, 0.0, 0.0}));
}

TEST(SweepJsonTest, GeneratedSuiteIsSeededAndInRange) {
  Config config;
  const std::string text = R"({"generate": {"count": 40, "translation": [0.02, 0.04],
      "rotation": [0.5, 0.9], "n_e": [3, 5], "objects": ["disk", "box"]}})";
  const auto a = sweep_from_json(text, config, 5);
  const auto b = sweep_from_json(text, config, 5);
  const auto c = sweep_from_json(text, config, 6);
  ASSERT_EQ(a.size(), 40u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].problem.goal, b[i].problem.goal);
    differs = differs || !(a[i].problem.goal == c[i].problem.goal);
    const Pose2& g = a[i].problem.goal;
    EXPECT_GE(std::hypot(g.x, g.y), 0.02 - 1e-15);
    EXPECT_LE(std::hypot(g.x, g.y), 0.04 + 1e-15);
    EXPECT_GE(std::abs(g.theta), 0.5);
    EXPECT_LE(std::abs(g.theta), 0.9);
    EXPECT_GE(a[i].n_e, 3.0);
    EXPECT_LE(a[i].n_e, 5.0);
    EXPECT_EQ(a[i].object, i % 2 ? "box" : "disk");
    EXPECT_DOUBLE_EQ(a[i].problem.k_v, kv(config.friction, a[i].n_e));
  }
  EXPECT_TRUE(differs);

  const auto levels = sweep_from_json(
      R"({"generate": {"count": 6, "n_e_levels": [3, 4, 5]}})", config, 5);
  for (std::size_t i = 0; i < levels.size(); ++i) EXPECT_EQ(levels[i].n_e, 3.0 + i % 3);
}

TEST(SweepJsonTest, RejectsEmptyAndMalformedSuites) {
  const Config config;
  EXPECT_THROW(sweep_from_json(R"({"problems": []})", config, 1), ParseError);
  EXPECT_THROW(sweep_from_json(R"({"generate": {"count": 0}})", config, 1), ParseError);
  EXPECT_THROW(sweep_from_json("{}", config, 1), ParseError);
  EXPECT_THROW(sweep_from_json(R"({"problems": [{"n_e": 3}]})", config, 1), ParseError);
  EXPECT_THROW(sweep_from_json(R"({"problems": [{"goal": [0.03, 0, 0.5], "n_e": -1}]})",
                               config, 1),
               ParseError);
}

TEST(RolloutCsvTest, OneRowPerWaypoint) {
  SimConfig sim;
  const Rollout r = rollout(linear_interpolation({0, 0, 0}, {0.03, 0, 0.6}, 10), sim);
  const std::string csv = rollout_to_csv(r);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 1 + 10);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,ee_x,ee_y,ee_theta,obj_x,obj_y,obj_theta,slipped");
}

}  // namespace
}  // namespace dls
