#include "windsteer/isac/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"
#include "windsteer/env/episode_log.hpp"
#include "windsteer/env/vec_env.hpp"
#include "windsteer/errors.hpp"
#include "windsteer/isac/replay.hpp"
#include "windsteer/nn/checkpoint.hpp"

namespace windsteer::isac {

namespace fs = std::filesystem;
using env::format_double;

void TrainConfig::validate() const {
  if (total_steps < 0) throw ConfigError("[training].total_steps", "must be non-negative");
  if (batch_size <= 0) throw ConfigError("[training].batch_size", "must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("[training].gamma", "must lie in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("[training].tau", "must lie in (0, 1]");
  if (!(lr > 0.0)) throw ConfigError("[training].lr", "must be positive");
  if (!(alpha_lr > 0.0)) throw ConfigError("[training].alpha_lr", "must be positive");
  if (!(initial_alpha > 0.0)) throw ConfigError("[training].initial_alpha", "must be positive");
  if (fixed_alpha && !(*fixed_alpha > 0.0))
    throw ConfigError("[training].fixed_alpha", "must be positive");
  if (warmup_steps < batch_size)
    throw ConfigError("[training].warmup_steps", "must be at least the batch size");
  if (!(update_to_data > 0.0)) throw ConfigError("[training].update_to_data", "must be positive");
  if (replay_capacity < batch_size)
    throw ConfigError("[training].replay_capacity", "must be at least the batch size");
  if (hidden <= 0) throw ConfigError("[training].hidden", "must be positive");
  if (checkpoint_interval < 0)
    throw ConfigError("[training].checkpoint_interval", "must be non-negative");
}

void save_policy(const std::string& dir, const std::vector<AgentNets>& agents,
                 const env::EnvConfig& env_cfg, std::int64_t cumulative_step) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create checkpoint directory");
  nlohmann::ordered_json j;
  j["format"] = "windsteer-policy";
  j["version"] = 1;
  j["cumulative_step"] = cumulative_step;
  j["ws_scale"] = env_cfg.ws_scale;
  j["angle_scale"] = env_cfg.angle_scale;
  j["agents"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    const std::string k = std::to_string(i);
    nn::save_mlp(a.actor, (fs::path(dir) / ("actor_" + k + ".mnet")).string());
    nn::save_mlp(a.q1, (fs::path(dir) / ("q1_" + k + ".mnet")).string());
    nn::save_mlp(a.q2, (fs::path(dir) / ("q2_" + k + ".mnet")).string());
    nn::save_mlp(a.q1_target, (fs::path(dir) / ("q1_target_" + k + ".mnet")).string());
    nn::save_mlp(a.q2_target, (fs::path(dir) / ("q2_target_" + k + ".mnet")).string());
    j["agents"].push_back({{"actor", "actor_" + k + ".mnet"},
                           {"q1", "q1_" + k + ".mnet"},
                           {"q2", "q2_" + k + ".mnet"},
                           {"q1_target", "q1_target_" + k + ".mnet"},
                           {"q2_target", "q2_target_" + k + ".mnet"},
                           {"log_alpha", a.log_alpha},
                           {"learn_alpha", a.learn_alpha},
                           {"log_std_min", a.head.log_std_min},
                           {"log_std_max", a.head.log_std_max},
                           {"action_scale", a.head.scale},
                           {"action_offset", a.head.offset}});
  }
  const std::string path = (fs::path(dir) / "policy.json").string();
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError(path, "write failed");
}

PolicyCheckpoint load_policy(const std::string& dir) {
  const std::string path = (fs::path(dir) / "policy.json").string();
  std::ifstream in(path);
  if (!in) throw IoError(path, "policy checkpoint not found");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("malformed policy manifest (") + e.what() + ")");
  }
  PolicyCheckpoint p;
  try {
    if (j.at("format") != "windsteer-policy") throw IoError(path, "not a policy manifest");
    p.ws_scale = j.at("ws_scale");
    p.angle_scale = j.at("angle_scale");
    p.cumulative_step = j.at("cumulative_step");
    for (const auto& a : j.at("agents")) {
      AgentNets nets;
      auto file = [&](const char* key) {
        return (fs::path(dir) / a.at(key).get<std::string>()).string();
      };
      nets.actor = nn::load_mlp(file("actor"));
      nets.q1 = nn::load_mlp(file("q1"));
      nets.q2 = nn::load_mlp(file("q2"));
      nets.q1_target = nn::load_mlp(file("q1_target"));
      nets.q2_target = nn::load_mlp(file("q2_target"));
      nets.log_alpha = a.at("log_alpha");
      nets.learn_alpha = a.at("learn_alpha");
      nets.head.log_std_min = a.at("log_std_min");
      nets.head.log_std_max = a.at("log_std_max");
      nets.head.scale = a.at("action_scale");
      nets.head.offset = a.at("action_offset");
      if (nets.actor.output_dim() != 2) throw IoError(path, "actor must emit mean and log-std");
      p.agents.push_back(std::move(nets));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("malformed policy manifest (") + e.what() + ")");
  }
  if (p.agents.empty()) throw IoError(path, "policy manifest lists no agents");
  return p;
}

void write_train_log_header(std::ostream& out, int n_agents) {
  out << "cumulative_step,R_total,R_power,R_penalty,penalty_active";
  for (int i = 0; i < n_agents; ++i)
    out << ",actor_loss_" << i << ",critic_loss_" << i << ",alpha_" << i;
  out << '\n';
}

void write_train_log_row(std::ostream& out, const TrainLogRow& row) {
  out << row.cumulative_step << ',' << format_double(row.r_total) << ','
      << format_double(row.r_power) << ',' << format_double(row.r_penalty) << ','
      << format_double(row.penalty_active);
  for (std::size_t i = 0; i < row.alpha.size(); ++i)
    out << ',' << format_double(row.actor_loss[i]) << ',' << format_double(row.critic_loss[i])
        << ',' << format_double(row.alpha[i]);
  out << '\n';
}

namespace {

void dump_batch(const std::string& out_dir, int agent, std::int64_t step, const Batch& b) {
  if (out_dir.empty()) return;
  const std::string path =
      (fs::path(out_dir) / ("nonfinite_batch_agent" + std::to_string(agent) + "_step" +
                            std::to_string(step) + ".csv"))
          .string();
  std::ofstream out(path);
  if (!out) return;
  out << "j";
  for (int r = 0; r < b.obs.rows(); ++r) out << ",obs_" << r;
  out << ",action,reward";
  for (int r = 0; r < b.next_obs.rows(); ++r) out << ",next_obs_" << r;
  out << '\n';
  for (int j = 0; j < b.size(); ++j) {
    out << j;
    for (int r = 0; r < b.obs.rows(); ++r) out << ',' << format_double(b.obs(r, j));
    out << ',' << format_double(b.action(j)) << ',' << format_double(b.reward(j));
    for (int r = 0; r < b.next_obs.rows(); ++r) out << ',' << format_double(b.next_obs(r, j));
    out << '\n';
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream, 0x15acu};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const env::EnvConfig& env_cfg,
                  std::shared_ptr<const loads::SurrogateNet> surrogate,
                  std::shared_ptr<env::BoxPool> pool, const std::string& out_dir,
                  const TrainProgress& progress) {
  cfg.validate();
  env_cfg.validate();
  const int n_agents = env_cfg.farm.layout.n_turbines();

  env::EnvConfig ecfg = env_cfg;
  ecfg.seed = derive_seed(cfg.seed, 1);

  AgentSpec spec;
  spec.obs_dim = env::kObservationSize;
  spec.hidden = cfg.hidden;
  spec.lr = cfg.lr;
  spec.alpha_lr = cfg.alpha_lr;
  spec.initial_alpha = cfg.initial_alpha;
  spec.fixed_alpha = cfg.fixed_alpha;

  TrainResult result;
  std::vector<nn::Rng> agent_rng;
  for (int i = 0; i < n_agents; ++i) {
    agent_rng.emplace_back(derive_seed(cfg.seed, 100 + i));
    result.agents.push_back(make_agent(spec, agent_rng.back()));
  }
  nn::Rng action_rng(derive_seed(cfg.seed, 2));

  std::ofstream log;
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir, "cannot create output directory");
    const std::string path = (fs::path(out_dir) / "train_log.csv").string();
    log.open(path);
    if (!log) throw IoError(path, "cannot open for writing");
    write_train_log_header(log, n_agents);
  }
  auto checkpoint = [&](std::int64_t step, bool final) {
    if (out_dir.empty()) return;
    const fs::path dir = final ? fs::path(out_dir) / "final"
                               : fs::path(out_dir) / "checkpoints" /
                                     ("step_" + std::to_string(step));
    save_policy(dir.string(), result.agents, ecfg, step);
  };

  if (cfg.total_steps == 0) {
    checkpoint(0, true);
    return result;
  }

  env::VecEnv vec(ecfg, std::move(surrogate), std::move(pool));
  ReplayBuffer replay(cfg.replay_capacity, n_agents, env::kObservationSize,
                      derive_seed(cfg.seed, 3));
  vec.reset();

  const double scale = spec.head.scale;
  std::uniform_real_distribution<double> uniform(-scale, scale);
  std::int64_t cumulative = 0;
  std::int64_t next_checkpoint = cfg.checkpoint_interval;
  double update_credit = 0.0;

  while (cumulative < cfg.total_steps) {
    const int n_env = vec.size();
    std::vector<Eigen::VectorXd> actions(n_env, Eigen::VectorXd(n_agents));
    if (cumulative < cfg.warmup_steps) {
      for (auto& a : actions)
        for (int i = 0; i < n_agents; ++i) a(i) = uniform(action_rng);
    } else {
      for (int i = 0; i < n_agents; ++i) {
        Matrix obs(env::kObservationSize, n_env);
        for (int e = 0; e < n_env; ++e) obs.col(e) = vec.observations()[e].col(i);
        const PolicySample p =
            sample_policy(result.agents[i], obs, standard_normal_row(n_env, action_rng));
        for (int e = 0; e < n_env; ++e) actions[e](i) = p.action(e);
      }
    }

    const auto transitions = vec.step(actions);
    TrainLogRow row;
    for (const auto& t : transitions) {
      replay.add(t);
      row.r_total += t.reward.r_total;
      row.r_power += t.reward.r_power;
      row.r_penalty += t.reward.r_constraint;
      row.penalty_active += t.reward.r_constraint < 0.0 ? 1.0 : 0.0;
    }
    row.r_total /= n_env;
    row.r_power /= n_env;
    row.r_penalty /= n_env;
    row.penalty_active /= n_env;
    cumulative += n_env;
    row.cumulative_step = cumulative;
    row.actor_loss.assign(n_agents, 0.0);
    row.critic_loss.assign(n_agents, 0.0);
    row.alpha.resize(n_agents);

    if (cumulative >= cfg.warmup_steps) {
      update_credit += cfg.update_to_data * n_env;
      const int updates = static_cast<int>(update_credit);
      update_credit -= updates;
      for (int u = 0; u < updates; ++u) {
        for (int i = 0; i < n_agents; ++i) {
          AgentNets& agent = result.agents[i];
          const Batch batch = replay.sample(i, cfg.batch_size);
          const CriticLosses cl = critic_update(agent, batch, cfg.gamma, agent_rng[i]);
          const ActorResult ar = actor_update(agent, batch, agent_rng[i]);
          if (!std::isfinite(cl.q1) || !std::isfinite(cl.q2) || !std::isfinite(ar.loss)) {
            dump_batch(out_dir, i, cumulative, batch);
            throw TrainingError("non-finite loss for agent " + std::to_string(i) + " at step " +
                                std::to_string(cumulative) + " (critic " +
                                format_double(cl.q1) + "/" + format_double(cl.q2) +
                                ", actor " + format_double(ar.loss) + ")");
          }
          temperature_update(agent, ar.log_prob, cfg.target_entropy);
          target_update(agent, cfg.tau);
          row.actor_loss[i] += ar.loss / updates;
          row.critic_loss[i] += 0.5 * (cl.q1 + cl.q2) / updates;
        }
      }
    }
    for (int i = 0; i < n_agents; ++i) row.alpha[i] = result.agents[i].alpha();

    if (log) write_train_log_row(log, row);
    if (progress) progress(row);
    result.log.push_back(std::move(row));

    if (cfg.checkpoint_interval > 0 && cumulative >= next_checkpoint &&
        cumulative < cfg.total_steps) {
      checkpoint(cumulative, false);
      while (next_checkpoint <= cumulative) next_checkpoint += cfg.checkpoint_interval;
    }
  }
  if (log) {
    log.flush();
    if (!log) throw IoError(out_dir, "training log write failed");
  }
  checkpoint(cumulative, true);
  return result;
}

}  // namespace windsteer::isac
