#pragma once

#include <deque>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "windsteer/env/box_pool.hpp"
#include "windsteer/env/config.hpp"
#include "windsteer/env/reward.hpp"
#include "windsteer/loads/del_window.hpp"
#include "windsteer/loads/surrogate.hpp"
#include "windsteer/turbwind/farm.hpp"

namespace windsteer::env {

inline constexpr int kObservationSize = 8;

/// Index of each observation component.
enum ObservationIndex : int {
  kWsGlobal = 0,
  kWdGlobal,
  kWsLocal,
  kWsLocalMean,
  kWdLocal,
  kWdLocalMean,
  kYaw,
  kYawMean,
};

/// Per-agent observations, one normalised column per turbine.
using Observations = Eigen::Matrix<double, kObservationSize, Eigen::Dynamic>;

/// Trailing mean over a fixed number of samples, summed oldest first.
class RollingMean {
 public:
  explicit RollingMean(int capacity = 1) : capacity_(capacity) {}
  void clear() { values_.clear(); }
  void push(double v) {
    values_.push_back(v);
    if (static_cast<int>(values_.size()) > capacity_) values_.pop_front();
  }
  double mean() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return values_.empty() ? 0.0 : sum / static_cast<double>(values_.size());
  }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  int capacity_;
  std::deque<double> values_;
};

/// Everything the episode log records about one control step.
struct StepRecord {
  double t = 0.0;
  Eigen::VectorXd yaw;
  /// Per-turbine power averaged over the control step's physics substeps.
  Eigen::VectorXd power;
  Eigen::VectorXd baseline_power;
  Eigen::VectorXd del_agent;
  Eigen::VectorXd del_baseline;
  RewardComponents reward;
};

struct StepResult {
  Observations obs;
  RewardComponents reward;
  bool truncated = false;
};

/// One farm under agent control plus its zero-yaw baseline twin on the same
/// turbulence box.
class WindEnv {
 public:
  WindEnv(EnvConfig config, std::shared_ptr<const loads::SurrogateNet> surrogate);

  /// Zero yaw in both farms, clears wakes and windows, spins up, and returns
  /// the first observations.
  Observations reset(BoxPtr box);
  /// Actions are yaw commands in degrees, one per turbine.
  StepResult step(const Eigen::VectorXd& actions);

  const turbwind::FarmState& agent_state() const { return agent_; }
  const turbwind::FarmState& baseline_state() const { return baseline_; }
  const StepRecord& last_record() const { return record_; }
  const loads::DelWindowState& agent_loads() const { return agent_loads_; }
  const loads::DelWindowState& baseline_loads() const { return baseline_loads_; }
  const EnvConfig& config() const { return config_; }
  const turbwind::TurbulenceBox& box() const { return *box_; }
  int n_turbines() const { return config_.farm.layout.n_turbines(); }
  int steps_since_reset() const { return steps_since_reset_; }
  /// Control-step time since the end of spin-up, seconds.
  double episode_time() const { return agent_.t - spinup_end_; }

 private:
  void advance_control_step(const Eigen::VectorXd& commands);
  Observations observe();
  double local_direction(int turbine) const;

  EnvConfig config_;
  std::shared_ptr<const loads::SurrogateNet> surrogate_;
  BoxPtr box_;
  Eigen::Matrix3Xd hubs_;

  turbwind::FarmState agent_;
  turbwind::FarmState baseline_;
  loads::DelWindowState agent_loads_;
  loads::DelWindowState baseline_loads_;
  RollingMean agent_power_;
  RollingMean baseline_power_;
  std::vector<RollingMean> ws_history_;
  std::vector<RollingMean> wd_history_;
  std::vector<RollingMean> yaw_history_;
  Eigen::VectorXd step_power_;
  Eigen::VectorXd step_baseline_power_;
  StepRecord record_;
  int steps_since_reset_ = 0;
  double spinup_end_ = 0.0;
};

}  // namespace windsteer::env
