#include "windsteer/cli/dispatch.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "windsteer/cli/manifest.hpp"
#include "windsteer/cli/run_config.hpp"
#include "windsteer/env/vec_env.hpp"
#include "windsteer/errors.hpp"
#include "windsteer/eval/compare.hpp"
#include "windsteer/eval/export.hpp"
#include "windsteer/turbwind/box_io.hpp"

namespace windsteer::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  std::vector<std::string> argv;
  std::ostream& out;
  std::ostream& err;
};

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  std::string q;
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q;
}

int threads_from_environment(int fallback) {
  const char* v = std::getenv("WINDSTEER_THREADS");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0 || n > 4096)
    throw ConfigError("WINDSTEER_THREADS", "expected a non-negative integer, got \"" +
                                               std::string(v) + "\"");
  return static_cast<int>(n);
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg = load_run_config(path);
  cfg.env.threads = threads_from_environment(cfg.env.threads);
  return cfg;
}

RunManifest start_manifest(const Context& ctx, const std::string& command, const RunConfig& cfg) {
  RunManifest m;
  m.tool_version = WINDSTEER_VERSION;
  m.command = command;
  m.argv = ctx.argv;
  m.resolved_config = resolved_config_json(cfg);
  m.config_hash = fnv1a_hex(m.resolved_config);
  m.started_utc = utc_timestamp();
  m.threads = cfg.env.threads;
  return m;
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory (" + ec.message() + ")");
}

std::string sidecar(const std::string& file) { return file + ".manifest.json"; }

std::vector<std::string> pool_files(const env::EnvConfig& e) {
  env::BoxPool pool(e.box_pool_dir);
  std::vector<std::string> files;
  for (auto id : env::training_pool_ids(e.pool_size)) {
    files.push_back(pool.path_for(id));
    if (!fs::exists(files.back())) throw IoError(files.back(), "turbulence box not found");
  }
  return files;
}

std::shared_ptr<const loads::SurrogateNet> load_surrogate(const std::string& path) {
  if (!fs::exists(path)) throw IoError(path, "surrogate checkpoint not found");
  return std::make_shared<const loads::SurrogateNet>(loads::load_surrogate(path));
}

void apply_constraint(RunConfig& cfg, const CLI::Option* delta_opt, double delta,
                      bool unconstrained) {
  if (unconstrained && delta_opt->count())
    throw ConfigError("[constraint].delta_max", "--delta-max and --unconstrained conflict");
  if (unconstrained) cfg.env.delta_max.reset();
  if (delta_opt->count()) {
    cfg.env.delta_max = delta;
    cfg.env.validate();
  }
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx{{argv, argv + argc}, out, err};
  CLI::App app{"windsteer: load-constrained wake steering with independent soft actor-critic"};
  app.set_version_flag("--version", std::string(WINDSTEER_VERSION));
  app.require_subcommand(1);
  std::function<void()> run;

  // gen-turbulence
  auto* gen = app.add_subcommand("gen-turbulence", "Generate the turbulence box pool");
  std::string gen_config, gen_out;
  int gen_pool = -1;
  std::vector<std::uint64_t> gen_ids;
  std::optional<double> gen_ws, gen_ti;
  gen->add_option("--config", gen_config, "TOML config file");
  gen->add_option("--ws", gen_ws, "Mean wind speed, m/s (overrides [inflow].ws)");
  gen->add_option("--ti", gen_ti, "Turbulence intensity (overrides [inflow].ti)");
  gen->add_option("--pool", gen_pool, "Number of training boxes (ids 0..N-1)");
  gen->add_option("--ids", gen_ids, "Additional box ids, e.g. held-out evaluation boxes")
      ->delimiter(',');
  gen->add_option("--out", gen_out, "Output directory (default [paths].box_pool_dir)");
  gen->callback([&] {
    run = [&] {
      RunConfig cfg = load_config(gen_config);
      if (gen_pool >= 0) cfg.env.pool_size = gen_pool;
      if (!gen_out.empty()) cfg.env.box_pool_dir = gen_out;
      if (gen_ws) cfg.env.inflow.ws = *gen_ws;
      if (gen_ti) cfg.env.inflow.ti = *gen_ti;
      validate(cfg);
      const std::string dir = cfg.env.box_pool_dir;
      ensure_dir(dir);
      std::vector<std::uint64_t> ids = env::training_pool_ids(cfg.env.pool_size);
      if (gen_pool == 0) ids.clear();
      ids.insert(ids.end(), gen_ids.begin(), gen_ids.end());
      RunManifest m = start_manifest(ctx, "gen-turbulence", cfg);
      for (auto id : ids) m.seeds["box_" + std::to_string(id)] = id;
      const std::string manifest = (fs::path(dir) / "manifest.json").string();
      write_manifest_atomic(m, manifest);
      env::BoxPool pool(dir);
      std::vector<std::string> files(ids.size());
      env::parallel_for(static_cast<int>(ids.size()), cfg.env.threads, [&](int k) {
        const auto box = turbwind::generate_turbulence_box(ids[k], cfg.env.inflow, cfg.env.lattice,
                                                           cfg.env.farm.layout, cfg.env.spectrum);
        files[k] = pool.path_for(ids[k]);
        turbwind::save_box(box, files[k]);
      });
      m.box_pool_hash = hash_files(files);
      m.finished_utc = utc_timestamp();
      write_manifest_atomic(m, manifest);
      ctx.out << "generated " << ids.size() << " boxes in " << dir << " (hash "
              << *m.box_pool_hash << ")\n";
    };
  });

  // train-surrogate
  auto* sur = app.add_subcommand("train-surrogate", "Fit the DEL surrogate to the oracle");
  std::string sur_config, sur_out;
  int sur_samples = -1;
  std::int64_t sur_seed = -1;
  sur->add_option("--config", sur_config, "TOML config file");
  sur->add_option("--samples", sur_samples, "Latin-hypercube sample count");
  sur->add_option("--seed", sur_seed, "Sampling and initialisation seed");
  sur->add_option("--out", sur_out, "Checkpoint path (default [paths].surrogate)");
  sur->callback([&] {
    run = [&] {
      RunConfig cfg = load_config(sur_config);
      if (sur_samples >= 0) cfg.surrogate.samples = sur_samples;
      if (sur_seed >= 0) cfg.surrogate.seed = static_cast<std::uint64_t>(sur_seed);
      if (!sur_out.empty()) cfg.env.surrogate_path = sur_out;
      validate(cfg);
      const std::string path = cfg.env.surrogate_path;
      ensure_dir(fs::path(path).parent_path());
      RunManifest m = start_manifest(ctx, "train-surrogate", cfg);
      m.seeds["surrogate"] = cfg.surrogate.seed;
      write_manifest_atomic(m, sidecar(path));
      loads::SurrogateFitReport report;
      const auto net = loads::train_surrogate(cfg.env.oracle, cfg.surrogate, &report);
      loads::save_surrogate(net, path);
      m.finished_utc = utc_timestamp();
      write_manifest_atomic(m, sidecar(path));
      ctx.out << "surrogate saved to " << path << " holdout_relative_rmse="
              << report.holdout_relative_rmse << " epochs=" << report.epochs << "\n";
    };
  });

  // train
  auto* tr = app.add_subcommand("train", "Train I-SAC agents");
  std::string tr_config, tr_out;
  double tr_delta = 0.0;
  bool tr_unconstrained = false, tr_sweep = false, tr_quiet = false;
  std::int64_t tr_seed = -1, tr_steps = -1;
  tr->add_option("--config", tr_config, "TOML config file");
  auto* tr_delta_opt = tr->add_option("--delta-max", tr_delta, "Permitted DEL increase");
  tr->add_flag("--unconstrained", tr_unconstrained, "Disable the load constraint");
  tr->add_option("--seed", tr_seed, "Training seed");
  tr->add_option("--total-steps", tr_steps, "Cumulative environment steps");
  tr->add_flag("--sweep", tr_sweep, "Train every seed in [training].seeds into seed_<s>/");
  tr->add_flag("--quiet", tr_quiet, "No progress lines");
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->callback([&] {
    run = [&] {
      RunConfig cfg = load_config(tr_config);
      apply_constraint(cfg, tr_delta_opt, tr_delta, tr_unconstrained);
      if (tr_seed >= 0) cfg.train.seed = static_cast<std::uint64_t>(tr_seed);
      if (tr_steps >= 0) cfg.train.total_steps = tr_steps;
      validate(cfg);
      const auto files = pool_files(cfg.env);
      const auto surrogate = load_surrogate(cfg.env.surrogate_path);
      const std::string pool_hash = hash_files(files);
      std::vector<std::uint64_t> seeds =
          tr_sweep ? cfg.train.seeds : std::vector<std::uint64_t>{cfg.train.seed};
      for (auto seed : seeds) {
        RunConfig run_cfg = cfg;
        run_cfg.train.seed = seed;
        const fs::path dir = tr_sweep ? fs::path(tr_out) / ("seed_" + std::to_string(seed))
                                      : fs::path(tr_out);
        ensure_dir(dir);
        RunManifest m = start_manifest(ctx, "train", run_cfg);
        m.seeds["train"] = seed;
        m.seeds["surrogate"] = cfg.surrogate.seed;
        m.box_pool_hash = pool_hash;
        write_manifest_atomic(m, (dir / "manifest.json").string());
        auto pool = std::make_shared<env::BoxPool>(cfg.env.box_pool_dir);
        std::int64_t next_report = 0;
        isac::train(run_cfg.train, run_cfg.env, surrogate, pool, dir.string(),
                    [&](const isac::TrainLogRow& row) {
                      if (tr_quiet || row.cumulative_step < next_report) return;
                      next_report = row.cumulative_step + 1000;
                      ctx.err << "step " << row.cumulative_step << " R_total=" << row.r_total
                              << " R_power=" << row.r_power << " R_penalty=" << row.r_penalty
                              << "\n";
                    });
        m.finished_utc = utc_timestamp();
        write_manifest_atomic(m, (dir / "manifest.json").string());
        ctx.out << "trained seed " << seed << " -> " << (dir / "final").string() << "\n";
      }
    };
  });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Evaluate frozen policies on a held-out box");
  std::string ev_config, ev_checkpoint, ev_out, ev_label;
  std::int64_t ev_box = -1;
  double ev_delta = 0.0;
  bool ev_unconstrained = false, ev_allow = false, ev_sample = false;
  ev->add_option("--config", ev_config, "TOML config file");
  ev->add_option("--checkpoint", ev_checkpoint, "Policy directory (or a training output)")
      ->required();
  ev->add_option("--box-id", ev_box, "Held-out turbulence box id");
  auto* ev_delta_opt = ev->add_option("--delta-max", ev_delta, "Constraint level of the report");
  ev->add_flag("--unconstrained", ev_unconstrained, "Report without a constraint level");
  ev->add_flag("--allow-training-box", ev_allow, "Permit a box from the training pool");
  ev->add_flag("--sample", ev_sample, "Sample actions instead of using the policy mean");
  ev->add_option("--label", ev_label, "Label stored in summary.json");
  ev->add_option("--out", ev_out, "Report directory")->required();
  ev->callback([&] {
    run = [&] {
      RunConfig cfg = load_config(ev_config);
      apply_constraint(cfg, ev_delta_opt, ev_delta, ev_unconstrained);
      if (ev_box >= 0) cfg.eval_box_id = static_cast<std::uint64_t>(ev_box);
      if (ev_allow) cfg.evaluation.allow_training_box = true;
      if (ev_sample) cfg.eval_sample_actions = true;
      validate(cfg);
      std::string ckpt = ev_checkpoint;
      if (!fs::exists(fs::path(ckpt) / "policy.json") &&
          fs::exists(fs::path(ckpt) / "final" / "policy.json"))
        ckpt = (fs::path(ckpt) / "final").string();
      auto policy = std::make_shared<const isac::PolicyCheckpoint>(isac::load_policy(ckpt));
      cfg.env.ws_scale = policy->ws_scale;
      cfg.env.angle_scale = policy->angle_scale;
      const auto surrogate = load_surrogate(cfg.env.surrogate_path);

      if (!cfg.evaluation.allow_training_box &&
          cfg.eval_box_id < static_cast<std::uint64_t>(cfg.env.pool_size))
        throw ConfigError("box_id", "box " + std::to_string(cfg.eval_box_id) +
                                        " belongs to the training pool; use a held-out id or "
                                        "--allow-training-box");
      ensure_dir(ev_out);
      RunManifest m = start_manifest(ctx, "evaluate", cfg);
      m.seeds["box"] = cfg.eval_box_id;
      m.seeds["surrogate"] = cfg.surrogate.seed;
      const std::string manifest = (fs::path(ev_out) / "manifest.json").string();
      env::BoxPool pool(cfg.env.box_pool_dir);
      std::shared_ptr<const turbwind::TurbulenceBox> box;
      if (fs::exists(pool.path_for(cfg.eval_box_id))) {
        box = pool.get(cfg.eval_box_id);
        m.box_pool_hash = hash_files({pool.path_for(cfg.eval_box_id)});
      } else {
        box = std::make_shared<const turbwind::TurbulenceBox>(turbwind::generate_turbulence_box(
            cfg.eval_box_id, cfg.env.inflow, cfg.env.lattice, cfg.env.farm.layout,
            cfg.env.spectrum));
      }
      write_manifest_atomic(m, manifest);
      const auto report = eval::evaluate(eval::checkpoint_policy(policy, cfg.eval_sample_actions),
                                         box, cfg.env, surrogate, cfg.evaluation);
      eval::export_results(report, ev_out, ev_label);
      m.finished_utc = utc_timestamp();
      write_manifest_atomic(m, manifest);
      const auto& s = report.summary;
      ctx.out << "power_ratio=" << s.power_ratio << " max_to_max_del_ratio="
              << s.max_to_max_del_ratio << " violation_fraction=" << s.violation_fraction
              << "\n";
    };
  });

  // grid-search
  auto* gs = app.add_subcommand("grid-search", "Static-yaw brute-force oracle (ti = 0)");
  std::string gs_config, gs_out = "grid.csv";
  std::optional<double> gs_step;
  gs->add_option("--config", gs_config, "TOML config file");
  gs->add_option("--step", gs_step, "Grid step, degrees");
  gs->add_option("--out", gs_out, "CSV output path");
  gs->callback([&] {
    run = [&] {
      RunConfig cfg = load_config(gs_config);
      if (gs_step) cfg.grid.step_deg = *gs_step;
      validate(cfg);
      ensure_dir(fs::path(gs_out).parent_path());
      RunManifest m = start_manifest(ctx, "grid-search", cfg);
      write_manifest_atomic(m, sidecar(gs_out));
      const auto r = eval::grid_search_oracle(cfg.env.farm, cfg.env.inflow, cfg.grid);
      eval::write_grid_csv(gs_out, r);
      m.finished_utc = utc_timestamp();
      write_manifest_atomic(m, sidecar(gs_out));
      ctx.out << "best_yaw=";
      for (Eigen::Index i = 0; i < r.best_yaw.size(); ++i)
        ctx.out << (i ? "," : "") << r.best_yaw(i);
      ctx.out << " gain=" << r.gain << "\n";
    };
  });

  // compare
  auto* cmp = app.add_subcommand("compare", "Tabulate reports across constraint levels");
  std::vector<std::string> cmp_reports;
  std::string cmp_out = "summary.json";
  bool cmp_strict = false;
  cmp->add_option("--reports", cmp_reports, "Report directories or summary.json files")
      ->required();
  cmp->add_option("--out", cmp_out, "Output JSON path");
  cmp->add_flag("--strict", cmp_strict, "Exit 1 when any ordering or compliance check fails");
  cmp->callback([&] {
    run = [&] {
      RunConfig cfg = load_config("");
      std::vector<eval::EvalSummary> summaries;
      std::vector<std::string> labels;
      for (const auto& r : cmp_reports) {
        std::string label;
        summaries.push_back(eval::read_summary(r, &label));
        labels.push_back(label);
      }
      const auto table = eval::compare_constraint_levels(summaries, labels);
      ensure_dir(fs::path(cmp_out).parent_path());
      RunManifest m = start_manifest(ctx, "compare", cfg);
      m.seeds["box"] = table.box_id;
      write_manifest_atomic(m, sidecar(cmp_out));
      std::ofstream f(cmp_out);
      if (!f) throw IoError(cmp_out, "cannot open for writing");
      f << eval::compare_json(table);
      if (!f) throw IoError(cmp_out, "write failed");
      m.finished_utc = utc_timestamp();
      write_manifest_atomic(m, sidecar(cmp_out));
      bool ok = true;
      for (const auto& row : table.rows)
        ctx.out << row.label << " power_ratio=" << row.power_ratio
                << " max_to_max_del_ratio=" << row.max_to_max_del_ratio << "\n";
      for (const auto& c : table.checks) {
        ctx.out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        ok = ok && c.passed;
      }
      if (cmp_strict && !ok) throw std::runtime_error("comparison checks failed");
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "windsteer: error kind=usage message=\"" << one_line(e.what()) << "\"\n";
    return kExitConfig;
  }

  try {
    if (run) run();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "windsteer: error kind=config field=" << (e.field().empty() ? "-" : e.field())
        << " message=\"" << one_line(e.what()) << "\"\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "windsteer: error kind=io path=" << e.path() << " message=\"" << one_line(e.what())
        << "\"\n";
    return kExitIo;
  } catch (const TrainingError& e) {
    err << "windsteer: error kind=training message=\"" << one_line(e.what()) << "\"\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "windsteer: error kind=runtime message=\"" << one_line(e.what()) << "\"\n";
    return kExitRuntime;
  }
}

}  // namespace windsteer::cli
