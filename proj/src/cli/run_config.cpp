#include "windsteer/cli/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "json.hpp"
#include "toml.hpp"
#include "windsteer/errors.hpp"

namespace windsteer::cli {

namespace {

class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  void number(const char* key, double& out) {
    if (auto* n = find(key)) {
      if (auto v = n->value<double>()) out = *v;
      else fail(key, "expected a number");
    }
  }
  void integer(const char* key, int& out) {
    std::int64_t v = out;
    integer64(key, v);
    if (v < INT32_MIN || v > INT32_MAX) fail(key, "out of range");
    out = static_cast<int>(v);
  }
  void integer64(const char* key, std::int64_t& out) {
    if (auto* n = find(key)) {
      if (auto v = n->value_exact<std::int64_t>()) out = *v;
      else fail(key, "expected an integer");
    }
  }
  void unsigned64(const char* key, std::uint64_t& out) {
    std::int64_t v = static_cast<std::int64_t>(out);
    integer64(key, v);
    if (v < 0) fail(key, "must be non-negative");
    out = static_cast<std::uint64_t>(v);
  }
  void string(const char* key, std::string& out) {
    if (auto* n = find(key)) {
      if (auto v = n->value_exact<std::string>()) out = *v;
      else fail(key, "expected a string");
    }
  }
  void boolean(const char* key, bool& out) {
    if (auto* n = find(key)) {
      if (auto v = n->value_exact<bool>()) out = *v;
      else fail(key, "expected true or false");
    }
  }
  /// Number, or "none"/false for an absent value.
  void optional_number(const char* key, std::optional<double>& out) {
    if (auto* n = find(key)) {
      if (auto v = n->value<double>()) out = *v;
      else if (auto s = n->value_exact<std::string>(); s && (*s == "none" || *s == "unconstrained"))
        out.reset();
      else if (auto b = n->value_exact<bool>(); b && !*b)
        out.reset();
      else
        fail(key, "expected a number or \"none\"");
    }
  }
  void seed_list(const char* key, std::vector<std::uint64_t>& out) {
    if (auto* n = find(key)) {
      auto* arr = n->as_array();
      if (!arr) fail(key, "expected an array of integers");
      out.clear();
      for (const auto& e : *arr) {
        auto v = e.value_exact<std::int64_t>();
        if (!v || *v < 0) fail(key, "expected non-negative integers");
        out.push_back(static_cast<std::uint64_t>(*v));
      }
    }
  }
  const toml::array* array(const char* key) {
    if (auto* n = find(key)) {
      if (auto* a = n->as_array()) return a;
      fail(key, "expected an array");
    }
    return nullptr;
  }

  /// Rejects keys that no reader asked for.
  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_)
      if (!seen_.count(std::string(k.str())))
        throw ConfigError("[" + name_ + "]." + std::string(k.str()), "unknown key");
  }

  [[noreturn]] void fail(const char* key, const std::string& msg) const {
    throw ConfigError(field(key), msg);
  }
  std::string field(const char* key) const { return "[" + name_ + "]." + key; }

 private:
  const toml::node* find(const char* key) {
    seen_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(source, msg.str());
  }
  static const std::set<std::string> known = {"farm",   "inflow",    "constraint", "training",
                                              "paths",  "env",       "turbulence", "oracle",
                                              "surrogate", "evaluation", "grid"};
  for (const auto& [k, v] : root) {
    if (!known.count(std::string(k.str())))
      throw ConfigError("[" + std::string(k.str()) + "]", "unknown section");
    if (!v.is_table()) throw ConfigError("[" + std::string(k.str()) + "]", "expected a table");
  }
  auto section = [&](const char* name) { return Section(root[name].as_table(), name); };

  RunConfig cfg;
  auto& e = cfg.env;

  {
    auto s = section("inflow");
    s.number("ws", e.inflow.ws);
    s.number("wd", e.inflow.wd);
    s.number("ti", e.inflow.ti);
    s.finish();
  }
  {
    auto s = section("farm");
    int n = 3;
    double spacing = 6.0;
    auto& layout = e.farm.layout;
    s.integer("n_turbines", n);
    s.number("spacing_d", spacing);
    s.number("rotor_diameter", layout.rotor_diameter);
    s.number("hub_height", layout.hub_height);
    s.number("rated_power", layout.rated_power);
    if (n < 1) s.fail("n_turbines", "must be >= 1");
    if (!(spacing > 0.0)) s.fail("spacing_d", "must be > 0");
    if (!(layout.rotor_diameter > 0.0)) s.fail("rotor_diameter", "must be > 0");
    const auto keep = layout;
    layout = turbwind::FarmLayout::aligned_row(n, spacing, keep.rotor_diameter);
    layout.hub_height = keep.hub_height;
    layout.rated_power = keep.rated_power;
    if (const auto* pos = s.array("positions")) {
      layout.positions.resize(2, static_cast<Eigen::Index>(pos->size()));
      Eigen::Index j = 0;
      for (const auto& p : *pos) {
        const auto* xy = p.as_array();
        if (!xy || xy->size() != 2) s.fail("positions", "expected [[x, y], ...] in metres");
        for (int c = 0; c < 2; ++c) {
          auto v = (*xy)[c].value<double>();
          if (!v) s.fail("positions", "expected numbers");
          layout.positions(c, j) = *v;
        }
        ++j;
      }
    }
    auto& rotor = e.farm.rotor;
    s.number("air_density", rotor.air_density);
    s.number("power_coefficient", rotor.power_coefficient);
    s.number("power_yaw_exponent", rotor.power_yaw_exponent);
    s.number("thrust_coefficient", rotor.thrust_coefficient);
    auto& wake = e.farm.wake;
    wake.expansion_rate = turbwind::expansion_rate_from_ti(e.inflow.ti);
    s.number("wake_expansion_rate", wake.expansion_rate);
    s.number("wake_initial_width", wake.initial_width);
    s.number("deflection_gain", wake.deflection_gain);
    s.number("deflection_sign", wake.deflection_sign);
    s.number("meander_time_constant", wake.meander_time_constant);
    s.number("exit_margin_d", wake.exit_margin_d);
    s.finish();
  }
  {
    auto s = section("constraint");
    s.optional_number("delta_max", e.delta_max);
    s.number("alpha", e.alpha);
    s.number("reward_floor", e.reward_floor);
    s.finish();
  }
  {
    auto s = section("training");
    auto& t = cfg.train;
    s.integer64("total_steps", t.total_steps);
    s.integer("n_env", e.n_env);
    s.integer("reset_interval", e.reset_interval);
    s.integer("threads", e.threads);
    s.integer("batch_size", t.batch_size);
    s.number("gamma", t.gamma);
    s.number("tau", t.tau);
    s.number("lr", t.lr);
    s.number("alpha_lr", t.alpha_lr);
    s.number("initial_alpha", t.initial_alpha);
    s.optional_number("fixed_alpha", t.fixed_alpha);
    s.number("target_entropy", t.target_entropy);
    s.integer64("warmup_steps", t.warmup_steps);
    s.number("update_to_data", t.update_to_data);
    s.integer("replay_capacity", t.replay_capacity);
    s.integer("hidden", t.hidden);
    s.unsigned64("seed", t.seed);
    s.seed_list("seeds", t.seeds);
    s.integer64("checkpoint_interval", t.checkpoint_interval);
    s.finish();
  }
  {
    auto s = section("env");
    s.integer("substeps", e.substeps);
    s.number("physics_dt", e.physics_dt);
    s.number("spinup_s", e.spinup_s);
    s.number("power_window_s", e.power_window_s);
    s.number("obs_window_s", e.obs_window_s);
    s.number("del_window_s", e.del_window_s);
    s.number("ws_scale", e.ws_scale);
    s.number("angle_scale", e.angle_scale);
    s.finish();
  }
  {
    auto s = section("turbulence");
    s.integer("nx", e.lattice.nx);
    s.integer("ny", e.lattice.ny);
    s.integer("nz", e.lattice.nz);
    s.number("length_x", e.lattice.length_x);
    s.number("dy", e.lattice.dy);
    s.number("dz", e.lattice.dz);
    s.number("scale_parameter", e.spectrum.scale_parameter);
    s.finish();
  }
  {
    auto s = section("oracle");
    auto& k = e.oracle;
    s.number("c0", k.c0);
    s.number("e1", k.e1);
    s.number("a1", k.a1);
    s.number("a2", k.a2);
    s.number("a3", k.a3);
    s.number("a4", k.a4);
    s.finish();
  }
  {
    auto s = section("surrogate");
    auto& g = cfg.surrogate;
    s.integer("samples", g.samples);
    s.unsigned64("seed", g.seed);
    s.integer("hidden", g.hidden);
    s.integer("max_epochs", g.max_epochs);
    s.integer("batch_size", g.batch_size);
    s.number("learning_rate", g.learning_rate);
    s.number("final_learning_rate", g.final_learning_rate);
    s.number("holdout_fraction", g.holdout_fraction);
    s.number("target_relative_rmse", g.target_relative_rmse);
    s.finish();
  }
  {
    auto s = section("evaluation");
    auto& v = cfg.evaluation;
    s.number("duration_s", v.duration_s);
    s.number("analysis_start_s", v.analysis_start_s);
    s.integer("histogram_bins", v.histogram_bins);
    s.number("rainflow_window_s", v.rainflow_window_s);
    s.number("rainflow_stride_s", v.rainflow_stride_s);
    s.unsigned64("box_id", cfg.eval_box_id);
    s.boolean("sample_actions", cfg.eval_sample_actions);
    s.boolean("allow_training_box", v.allow_training_box);
    s.finish();
  }
  {
    auto s = section("grid");
    s.number("step", cfg.grid.step_deg);
    s.number("settle_s", cfg.grid.settle_s);
    s.finish();
  }
  {
    auto s = section("paths");
    s.string("box_pool_dir", e.box_pool_dir);
    s.integer("pool_size", e.pool_size);
    s.string("surrogate", e.surrogate_path);
    s.finish();
  }
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  if (path.empty()) {
    RunConfig cfg;
    validate(cfg);
    return cfg;
  }
  std::ifstream in(path);
  if (!in) throw IoError(path, "config file not found");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path);
}

void validate(const RunConfig& cfg) {
  cfg.env.validate();
  cfg.train.validate();
  if (cfg.surrogate.samples < 10) throw ConfigError("[surrogate].samples", "must be >= 10");
  if (!(cfg.surrogate.holdout_fraction > 0.0 && cfg.surrogate.holdout_fraction < 1.0))
    throw ConfigError("[surrogate].holdout_fraction", "must lie in (0, 1)");
  if (!(cfg.evaluation.analysis_start_s < cfg.evaluation.duration_s))
    throw ConfigError("[evaluation].analysis_start_s", "must be before the end of the rollout");
  if (cfg.evaluation.histogram_bins < 1)
    throw ConfigError("[evaluation].histogram_bins", "must be >= 1");
  if (!(cfg.grid.step_deg > 0.0)) throw ConfigError("[grid].step", "must be > 0");
  if (cfg.env.lattice.length_x < turbwind::required_box_length(cfg.env.farm.layout, cfg.env.inflow))
    throw ConfigError("[turbulence].length_x",
                      "shorter than the farm extent plus 600 s of advection");
}

std::string resolved_config_json(const RunConfig& c) {
  nlohmann::json j;  // std::map ordering gives sorted keys
  const auto& e = c.env;
  j["inflow"] = {{"ws", e.inflow.ws}, {"wd", e.inflow.wd}, {"ti", e.inflow.ti}};
  nlohmann::json pos = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.farm.layout.positions.cols(); ++i)
    pos.push_back({e.farm.layout.positions(0, i), e.farm.layout.positions(1, i)});
  j["farm"] = {{"positions", pos},
               {"rotor_diameter", e.farm.layout.rotor_diameter},
               {"hub_height", e.farm.layout.hub_height},
               {"rated_power", e.farm.layout.rated_power},
               {"air_density", e.farm.rotor.air_density},
               {"power_coefficient", e.farm.rotor.power_coefficient},
               {"power_yaw_exponent", e.farm.rotor.power_yaw_exponent},
               {"thrust_coefficient", e.farm.rotor.thrust_coefficient},
               {"wake_expansion_rate", e.farm.wake.expansion_rate},
               {"wake_initial_width", e.farm.wake.initial_width},
               {"deflection_gain", e.farm.wake.deflection_gain},
               {"deflection_sign", e.farm.wake.deflection_sign},
               {"meander_time_constant", e.farm.wake.meander_time_constant},
               {"exit_margin_d", e.farm.wake.exit_margin_d}};
  j["constraint"] = {{"delta_max", e.delta_max ? nlohmann::json(*e.delta_max) : nlohmann::json()},
                     {"alpha", e.alpha},
                     {"reward_floor", e.reward_floor}};
  const auto& t = c.train;
  j["training"] = {{"total_steps", t.total_steps},
                   {"n_env", e.n_env},
                   {"reset_interval", e.reset_interval},
                   {"batch_size", t.batch_size},
                   {"gamma", t.gamma},
                   {"tau", t.tau},
                   {"lr", t.lr},
                   {"alpha_lr", t.alpha_lr},
                   {"initial_alpha", t.initial_alpha},
                   {"fixed_alpha", t.fixed_alpha ? nlohmann::json(*t.fixed_alpha) : nlohmann::json()},
                   {"target_entropy", t.target_entropy},
                   {"warmup_steps", t.warmup_steps},
                   {"update_to_data", t.update_to_data},
                   {"replay_capacity", t.replay_capacity},
                   {"hidden", t.hidden},
                   {"seed", t.seed},
                   {"seeds", t.seeds},
                   {"checkpoint_interval", t.checkpoint_interval}};
  j["env"] = {{"substeps", e.substeps},         {"physics_dt", e.physics_dt},
              {"spinup_s", e.spinup_s},         {"power_window_s", e.power_window_s},
              {"obs_window_s", e.obs_window_s}, {"del_window_s", e.del_window_s},
              {"ws_scale", e.ws_scale},         {"angle_scale", e.angle_scale}};
  j["turbulence"] = {{"nx", e.lattice.nx},         {"ny", e.lattice.ny},
                     {"nz", e.lattice.nz},         {"length_x", e.lattice.length_x},
                     {"dy", e.lattice.dy},         {"dz", e.lattice.dz},
                     {"scale_parameter", e.spectrum.scale_parameter}};
  j["oracle"] = {{"c0", e.oracle.c0}, {"e1", e.oracle.e1}, {"a1", e.oracle.a1},
                 {"a2", e.oracle.a2}, {"a3", e.oracle.a3}, {"a4", e.oracle.a4}};
  const auto& g = c.surrogate;
  j["surrogate"] = {{"samples", g.samples},
                    {"seed", g.seed},
                    {"hidden", g.hidden},
                    {"max_epochs", g.max_epochs},
                    {"batch_size", g.batch_size},
                    {"learning_rate", g.learning_rate},
                    {"final_learning_rate", g.final_learning_rate},
                    {"holdout_fraction", g.holdout_fraction},
                    {"target_relative_rmse", g.target_relative_rmse}};
  const auto& v = c.evaluation;
  j["evaluation"] = {{"duration_s", v.duration_s},
                     {"analysis_start_s", v.analysis_start_s},
                     {"histogram_bins", v.histogram_bins},
                     {"rainflow_window_s", v.rainflow_window_s},
                     {"rainflow_stride_s", v.rainflow_stride_s},
                     {"box_id", c.eval_box_id},
                     {"sample_actions", c.eval_sample_actions},
                     {"allow_training_box", v.allow_training_box}};
  j["grid"] = {{"step", c.grid.step_deg}, {"settle_s", c.grid.settle_s}};
  j["paths"] = {{"box_pool_dir", e.box_pool_dir},
                {"pool_size", e.pool_size},
                {"surrogate", e.surrogate_path}};
  return j.dump(2);
}

}  // namespace windsteer::cli
