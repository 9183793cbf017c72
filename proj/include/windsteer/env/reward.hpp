#pragma once

#include <optional>

namespace windsteer::env {

struct RewardComponents {
  double r_power = 0.0;
  double r_constraint = 0.0;
  double r_total = 0.0;
  double delta = 0.0;
  std::optional<double> delta_max;
  double alpha = 1.0;
};

/// Power ratio reward: mean agent farm power over mean baseline farm power - 1.
double power_reward(double agent_power_mean, double baseline_power_mean);

/// alpha * (delta_max - delta) while delta exceeds delta_max, else 0; always 0
/// when unconstrained.
double constraint_reward(double delta, std::optional<double> delta_max, double alpha);

/// Shared global reward, clipped from below at `floor`.
RewardComponents shape_reward(double agent_power_mean, double baseline_power_mean, double delta,
                              std::optional<double> delta_max, double alpha,
                              double floor = -10.0);

}  // namespace windsteer::env
