#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "json.hpp"
#include "windsteer/env/episode_log.hpp"
#include "windsteer/errors.hpp"
#include "windsteer/eval/compare.hpp"
#include "windsteer/eval/evaluate.hpp"
#include "windsteer/eval/export.hpp"
#include "windsteer/eval/grid_search.hpp"
#include "windsteer/loads/del_oracle.hpp"

using namespace windsteer;
using namespace windsteer::eval;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

using BoxPtr = std::shared_ptr<const turbwind::TurbulenceBox>;

env::EnvConfig eval_config() {
  env::EnvConfig cfg;
  cfg.lattice = windsteer::testing::small_lattice();
  return cfg;
}

BoxPtr held_out_box(const env::EnvConfig& cfg, std::uint64_t id = 61) {
  return std::make_shared<const turbwind::TurbulenceBox>(
      turbwind::generate_turbulence_box(id, cfg.inflow, cfg.lattice, cfg.farm.layout));
}

EvalReport run(const Policy& p, const BoxPtr& box, const env::EnvConfig& cfg,
               const EvalOptions& opt = {}) {
  return evaluate(p, box, cfg, windsteer::testing::quick_surrogate(), opt);
}

// Subset of JSON Schema: type, const, required, properties,
// additionalProperties, items, minItems, minimum/maximum and their exclusive forms.
void validate(const Json& v, const Json& s, const std::string& at, std::vector<std::string>& errs) {
  auto fail = [&](const std::string& m) { errs.push_back(at + ": " + m); };
  if (s.contains("const") && v != s["const"]) fail("const mismatch");
  if (s.contains("type")) {
    std::vector<std::string> types;
    if (s["type"].is_array())
      for (const auto& t : s["type"]) types.push_back(t);
    else
      types.push_back(s["type"]);
    bool ok = false;
    for (const auto& t : types) {
      ok |= t == "object" && v.is_object();
      ok |= t == "array" && v.is_array();
      ok |= t == "string" && v.is_string();
      ok |= t == "number" && v.is_number();
      ok |= t == "integer" && (v.is_number_integer() || v.is_number_unsigned());
      ok |= t == "null" && v.is_null();
    }
    if (!ok) return fail("wrong type");
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) fail("below minimum");
    if (s.contains("maximum") && x > s["maximum"].get<double>()) fail("above maximum");
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) fail("not above exclusiveMinimum");
  }
  if (v.is_object()) {
    for (const auto& r : s.value("required", Json::array()))
      if (!v.contains(r.get<std::string>())) fail("missing " + r.get<std::string>());
    const Json props = s.value("properties", Json::object());
    for (const auto& [k, child] : v.items()) {
      if (props.contains(k))
        validate(child, props[k], at + "/" + k, errs);
      else if (s.contains("additionalProperties") && s["additionalProperties"] == false)
        fail("unexpected key " + k);
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) fail("too few items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], s["items"], at + "/" + std::to_string(i), errs);
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Evaluate, ZeroYawPolicyMatchesBaseline) {
  const auto cfg = eval_config();
  const auto r = run(constant_policy(Eigen::Vector3d::Zero()), held_out_box(cfg), cfg);
  EXPECT_EQ(r.summary.analysis_steps, 201);
  EXPECT_NEAR(r.summary.power_ratio, 1.0, 1e-3);
  EXPECT_NEAR(r.summary.max_to_max_del_ratio, 1.0, 1e-2);
  EXPECT_EQ(r.summary.violation_fraction, 0.0);
  for (const auto& rec : r.records) EXPECT_EQ(rec.del_agent, rec.del_baseline);
  EXPECT_EQ(r.records.size(), 300u);
  EXPECT_NEAR(r.records.front().t, 10.0, 1e-9);
}

TEST(Evaluate, DeterministicWithInvariantBaseline) {
  const auto cfg = eval_config();
  const auto box = held_out_box(cfg);
  const auto a = run(constant_policy(Eigen::Vector3d(-20, -15, 0)), box, cfg);
  const auto b = run(constant_policy(Eigen::Vector3d(-20, -15, 0)), box, cfg);
  const auto c = run(constant_policy(Eigen::Vector3d(25, 5, 0)), box, cfg);
  ASSERT_EQ(a.records.size(), c.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    ASSERT_EQ(a.records[k].power, b.records[k].power);
    ASSERT_EQ(a.records[k].del_agent, b.records[k].del_agent);
    ASSERT_EQ(a.records[k].baseline_power, c.records[k].baseline_power);
    ASSERT_EQ(a.records[k].del_baseline, c.records[k].del_baseline);
  }
  EXPECT_EQ(a.summary.max_to_max_del_ratio, b.summary.max_to_max_del_ratio);
  EXPECT_EQ(a.rainflow.rainflow_del, b.rainflow.rainflow_del);
}

TEST(Evaluate, RefusesTrainingPoolBoxesUnlessAllowed) {
  const auto cfg = eval_config();
  const auto box = held_out_box(cfg, 3);
  try {
    run(constant_policy(Eigen::Vector3d::Zero()), box, cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "box_id");
  }
  EvalOptions opt;
  opt.allow_training_box = true;
  opt.duration_s = 1200;
  EXPECT_NO_THROW(run(constant_policy(Eigen::Vector3d::Zero()), box, cfg, opt));
}

TEST(Evaluate, StaticOptimumReplayMatchesGridGain) {
  auto cfg = eval_config();
  cfg.inflow.ti = 0.0;
  const auto grid = grid_search_oracle(cfg.farm, cfg.inflow);
  const auto box = std::make_shared<const turbwind::TurbulenceBox>(
      turbwind::quiescent_box(cfg.lattice, 999));
  const auto r = run(constant_policy(grid.best_yaw), box, cfg);
  EXPECT_NEAR(r.summary.power_ratio - 1.0, grid.gain, 1e-6);
  EXPECT_NEAR(r.summary.mean_power_baseline, grid.baseline_power, 1e-6 * grid.baseline_power);
}

TEST(Evaluate, AnalysisRegionGatesSummaries) {
  const auto cfg = eval_config();
  const auto r = run(constant_policy(Eigen::Vector3d(-15, -10, 0)), held_out_box(cfg), cfg);
  auto altered = r.records;
  for (auto& rec : altered)
    if (rec.t < 1000.0) {
      rec.power *= 0.3;
      rec.del_agent *= 7.0;
      rec.yaw.setConstant(29.0);
    }
  DelHistogram h1, h2;
  const auto s1 = summarize_records(r.records, std::nullopt, EvalOptions{}, &h1);
  const auto s2 = summarize_records(altered, std::nullopt, EvalOptions{}, &h2);
  EXPECT_EQ(s1.power_ratio, s2.power_ratio);
  EXPECT_EQ(s1.max_to_max_del_ratio, s2.max_to_max_del_ratio);
  EXPECT_EQ(s1.mean_yaw, s2.mean_yaw);
  EXPECT_EQ(h1.edges, h2.edges);
  EXPECT_EQ(h1.agent, h2.agent);
}

TEST(Evaluate, HistogramCountsSumToAnalysisSteps) {
  const auto cfg = eval_config();
  const auto r = run(constant_policy(Eigen::Vector3d(-20, 0, 0)), held_out_box(cfg), cfg);
  ASSERT_EQ(r.histogram.edges.size(), 41);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(std::accumulate(r.histogram.agent[i].begin(), r.histogram.agent[i].end(), 0),
              r.summary.analysis_steps);
    EXPECT_EQ(std::accumulate(r.histogram.baseline[i].begin(), r.histogram.baseline[i].end(), 0),
              r.summary.analysis_steps);
  }
}

TEST(Evaluate, MaxToMaxAndViolationFractionFromRecords) {
  std::vector<env::StepRecord> recs;
  for (int k = 1; k <= 4; ++k) {
    env::StepRecord r;
    r.t = 1000.0 + 10 * k;
    r.yaw = Eigen::Vector2d(k, 0);
    r.power = Eigen::Vector2d(2, 1);
    r.baseline_power = Eigen::Vector2d(1, 1);
    r.del_agent = Eigen::Vector2d(100.0 + 10 * k, 50);
    r.del_baseline = Eigen::Vector2d(100, 90);
    r.reward.delta = r.del_agent.maxCoeff() / r.del_baseline.maxCoeff() - 1;
    recs.push_back(r);
  }
  const auto s = summarize_records(recs, 0.25, EvalOptions{});
  EXPECT_EQ(s.analysis_steps, 4);
  EXPECT_NEAR(s.power_ratio, 1.5, 1e-12);
  EXPECT_NEAR(s.max_to_max_del_ratio, 1.4, 1e-12);
  EXPECT_NEAR(s.violation_fraction, 0.5, 1e-12);
  EXPECT_NEAR(s.mean_yaw(0), 2.5, 1e-12);
  EXPECT_NEAR(s.limit_p05, 125.0, 1e-12);
}

TEST(Evaluate, RainflowCrossCheckCorrelatesForSteeringPolicy) {
  const auto cfg = eval_config();
  loads::SurrogateSampleSpec spec;
  const auto surrogate = std::make_shared<const loads::SurrogateNet>(
      loads::train_surrogate(cfg.oracle, spec));
  const auto box = std::make_shared<const turbwind::TurbulenceBox>(
      turbwind::generate_turbulence_box(61, cfg.inflow, turbwind::LatticeSpec{}, cfg.farm.layout));
  auto full = cfg;
  full.lattice = turbwind::LatticeSpec{};
  const auto r = evaluate(constant_policy(Eigen::Vector3d(-25, -30, 0)), box, full, surrogate);
  EXPECT_GT(r.rainflow.spearman, 0.7);
  EXPECT_EQ(r.summary.rainflow_spearman, r.rainflow.spearman);
}

TEST(Evaluate, PercentileAndSpearman) {
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 100), 4.0);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {10, 20, 35, 100}), 1.0, 1e-12);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-12);
  EXPECT_NEAR(spearman({1, 2, 2, 3}, {1, 2, 2, 3}), 1.0, 1e-12);
}

TEST(Evaluate, PseudoLoadRangeIsTheOracleOnWindowFeatures) {
  loads::DelWindow w(2, 3);
  std::vector<turbwind::SectorSamples> samples(2);
  for (int k = 0; k < 4; ++k) {
    for (auto& s : samples) {
      s.speeds.setConstant(8.0 + k);
      s.speeds.col(turbwind::kLeft).setConstant(7.0 + k);
      s.summarize();
    }
    w.push(samples, Eigen::Vector2d(-12, 3));
  }
  EXPECT_NEAR(pseudo_load_range(w, 1, loads::OracleCoefficients{}),
              loads::del_oracle(w.features(1)), 1e-12);
}

TEST(Export, RoundTripSchemaAndByteStability) {
  const auto cfg = eval_config();
  const auto r = run(constant_policy(Eigen::Vector3d(-20, -10, 0)), held_out_box(cfg), cfg);
  const auto d1 = fs::temp_directory_path() / "windsteer_export1";
  const auto d2 = fs::temp_directory_path() / "windsteer_export2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  export_results(r, d1.string(), "probe");
  export_results(run(constant_policy(Eigen::Vector3d(-20, -10, 0)), held_out_box(cfg), cfg),
                 d2.string(), "probe");
  for (const char* f : {"timeseries.csv", "histograms.csv", "rainflow.csv", "summary.json"})
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;

  const auto records = env::read_episode_log((d1 / "timeseries.csv").string());
  DelHistogram h;
  const auto s = summarize_records(records, std::nullopt, EvalOptions{}, &h);
  EXPECT_EQ(s.power_ratio, r.summary.power_ratio);
  EXPECT_EQ(s.max_to_max_del_ratio, r.summary.max_to_max_del_ratio);
  EXPECT_EQ(s.mean_del_agent, r.summary.mean_del_agent);
  EXPECT_EQ(h.agent, r.histogram.agent);

  std::string label;
  const auto back = read_summary(d1.string(), &label);
  EXPECT_EQ(label, "probe");
  EXPECT_EQ(back.power_ratio, r.summary.power_ratio);
  EXPECT_EQ(back.delta_max, r.summary.delta_max);

  const char* schema_path = WINDSTEER_SCHEMA_PATH;
  ASSERT_NE(schema_path, nullptr);
  const Json schema = Json::parse(slurp(schema_path));
  std::vector<std::string> errs;
  validate(Json::parse(slurp(d1 / "summary.json")), schema, "", errs);
  EXPECT_TRUE(errs.empty()) << errs.front();
  Json broken = Json::parse(slurp(d1 / "summary.json"));
  broken.erase("power_ratio");
  broken["extra"] = 1;
  errs.clear();
  validate(broken, schema, "", errs);
  EXPECT_EQ(errs.size(), 2u);

  EXPECT_THROW(export_results(r, "/proc/windsteer-no-such/dir"), IoError);
}

TEST(Compare, OrderingChecksAndBoxMismatch) {
  auto mk = [](std::optional<double> d, double p, double m) {
    EvalSummary s;
    s.box_id = 61;
    s.delta_max = d;
    s.power_ratio = p;
    s.max_to_max_del_ratio = m;
    return s;
  };
  const auto t = compare_constraint_levels(
      {mk(0.2, 1.05, 1.2), mk(std::nullopt, 1.10, 1.5), mk(0.3, 1.08, 1.33), mk(0.1, 1.02, 1.2)});
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_FALSE(t.rows[0].delta_max.has_value());
  EXPECT_EQ(*t.rows[1].delta_max, 0.3);
  EXPECT_EQ(*t.rows[3].delta_max, 0.1);
  for (const auto& c : t.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;

  const auto bad = compare_constraint_levels(
      {mk(0.2, 1.09, 1.3), mk(std::nullopt, 1.05, 1.5), mk(0.3, 1.08, 1.40)});
  int failed = 0;
  for (const auto& c : bad.checks) failed += !c.passed;
  EXPECT_GE(failed, 3);

  auto other = mk(0.3, 1.0, 1.0);
  other.box_id = 62;
  EXPECT_THROW(compare_constraint_levels({mk(0.2, 1, 1), other}), ConfigError);

  const auto same = compare_constraint_levels(
      {mk(std::nullopt, 1, 1), mk(0.3, 1, 1), mk(0.2, 1, 1), mk(0.1, 1, 1)});
  for (std::size_t i = 1; i < same.rows.size(); ++i) {
    EXPECT_EQ(same.rows[i].power_ratio, same.rows[0].power_ratio);
    EXPECT_EQ(same.rows[i].max_to_max_del_ratio, same.rows[0].max_to_max_del_ratio);
  }
  const Json j = Json::parse(compare_json(t));
  EXPECT_EQ(j["rows"].size(), 4u);
}

TEST(GridSearchTest, CsvHasOneRowPerCombination) {
  turbwind::FarmModel m;
  turbwind::InflowSpec spec;
  GridSearchOptions opt;
  opt.step_deg = 15;
  const auto g = grid_search_oracle(m, spec, opt);
  EXPECT_EQ(g.yaw_grid, (std::vector<double>{-30, -15, 0, 15, 30}));
  const auto path = (fs::temp_directory_path() / "windsteer_grid.csv").string();
  write_grid_csv(path, g);
  const std::string text = slurp(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 26);
  EXPECT_EQ(text.rfind("yaw_0,yaw_1,farm_power,gain", 0), 0u);
  EXPECT_GE(g.gain, 0.0);
  EXPECT_EQ(steady_farm_power(m, spec, Eigen::Vector3d::Zero(), opt), g.baseline_power);
}
