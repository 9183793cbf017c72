#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "windsteer/env/box_pool.hpp"
#include "windsteer/env/wind_env.hpp"

namespace windsteer::env {

/// Joint transition of all agents in one environment.
struct Transition {
  Observations obs;
  Eigen::VectorXd actions;  // degrees
  RewardComponents reward;
  Observations next_obs;
  bool truncated = false;
};

/// Runs fn(0..n-1) on up to `threads` workers (0 or 1 = inline). Exceptions are
/// collected and the one from the lowest index is rethrown, prefixed with it.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// N independent environments stepped in lockstep. Truncated environments are
/// reset automatically with the next box from the sampler; the transition
/// keeps the pre-reset next observation.
class VecEnv {
 public:
  VecEnv(EnvConfig config, std::shared_ptr<const loads::SurrogateNet> surrogate,
         std::shared_ptr<BoxPool> pool);

  const std::vector<Observations>& reset();
  std::vector<Transition> step(const std::vector<Eigen::VectorXd>& actions);

  int size() const { return static_cast<int>(envs_.size()); }
  const std::vector<Observations>& observations() const { return obs_; }
  WindEnv& env(int i) { return envs_[i]; }
  const WindEnv& env(int i) const { return envs_[i]; }
  /// Box ids in the order they were assigned (env order within each round).
  const std::vector<std::uint64_t>& box_history() const { return box_history_; }

 private:
  EnvConfig config_;
  std::shared_ptr<BoxPool> pool_;
  BoxSampler sampler_;
  std::vector<WindEnv> envs_;
  std::vector<Observations> obs_;
  std::vector<std::uint64_t> box_history_;
};

}  // namespace windsteer::env
