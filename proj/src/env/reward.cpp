#include "windsteer/env/reward.hpp"

#include <algorithm>

namespace windsteer::env {

double power_reward(double agent_power_mean, double baseline_power_mean) {
  return agent_power_mean / baseline_power_mean - 1.0;
}

double constraint_reward(double delta, std::optional<double> delta_max, double alpha) {
  if (!delta_max || !(delta > *delta_max)) return 0.0;
  return alpha * (*delta_max - delta);
}

RewardComponents shape_reward(double agent_power_mean, double baseline_power_mean, double delta,
                              std::optional<double> delta_max, double alpha, double floor) {
  RewardComponents r;
  r.r_power = power_reward(agent_power_mean, baseline_power_mean);
  r.r_constraint = constraint_reward(delta, delta_max, alpha);
  r.r_total = std::max(r.r_power + r.r_constraint, floor);
  r.delta = delta;
  r.delta_max = delta_max;
  r.alpha = alpha;
  return r;
}

}  // namespace windsteer::env
