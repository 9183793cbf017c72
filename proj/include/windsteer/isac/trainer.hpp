#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "windsteer/env/box_pool.hpp"
#include "windsteer/env/config.hpp"
#include "windsteer/isac/agent.hpp"
#include "windsteer/loads/surrogate.hpp"

namespace windsteer::isac {

struct TrainConfig {
  std::int64_t total_steps = 150000;  // cumulative over all environments
  int batch_size = 256;
  double gamma = 0.99;
  double tau = 0.005;
  double lr = 3e-4;
  double alpha_lr = 3e-4;
  double initial_alpha = 0.1;
  std::optional<double> fixed_alpha;
  double target_entropy = -1.0;
  std::int64_t warmup_steps = 1000;
  double update_to_data = 1.0;
  int replay_capacity = 100000;
  int hidden = 64;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5};
  /// Cumulative steps between intermediate checkpoints; 0 keeps only the final one.
  std::int64_t checkpoint_interval = 0;

  void validate() const;
};

struct TrainLogRow {
  std::int64_t cumulative_step = 0;
  double r_total = 0.0;
  double r_power = 0.0;
  double r_penalty = 0.0;
  double penalty_active = 0.0;  // fraction of this round's steps with r_constraint < 0
  std::vector<double> actor_loss;
  std::vector<double> critic_loss;
  std::vector<double> alpha;
};

struct TrainResult {
  std::vector<AgentNets> agents;
  std::vector<TrainLogRow> log;
};

/// Frozen per-turbine policies as stored on disk.
struct PolicyCheckpoint {
  std::vector<AgentNets> agents;
  double ws_scale = 1.0 / 15.0;
  double angle_scale = 1.0 / 30.0;
  std::int64_t cumulative_step = 0;
};

/// Writes one MNET file per network plus policy.json into `dir`.
void save_policy(const std::string& dir, const std::vector<AgentNets>& agents,
                 const env::EnvConfig& env_cfg, std::int64_t cumulative_step);
PolicyCheckpoint load_policy(const std::string& dir);

void write_train_log_header(std::ostream& out, int n_agents);
void write_train_log_row(std::ostream& out, const TrainLogRow& row);

using TrainProgress = std::function<void(const TrainLogRow&)>;

/// Algorithm loop: step all environments with policy (or warm-up random)
/// actions, store joint transitions, then per agent run the critic, actor,
/// temperature and target updates. Writes train_log.csv and checkpoints under
/// `out_dir` when it is non-empty.
TrainResult train(const TrainConfig& cfg, const env::EnvConfig& env_cfg,
                  std::shared_ptr<const loads::SurrogateNet> surrogate,
                  std::shared_ptr<env::BoxPool> pool, const std::string& out_dir,
                  const TrainProgress& progress = {});

}  // namespace windsteer::isac
