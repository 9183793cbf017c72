#include "windsteer/env/wind_env.hpp"

#include <cmath>

#include "windsteer/errors.hpp"
#include "windsteer/turbwind/turbulence.hpp"

namespace windsteer::env {

using turbwind::FarmState;

WindEnv::WindEnv(EnvConfig config, std::shared_ptr<const loads::SurrogateNet> surrogate)
    : config_(std::move(config)), surrogate_(std::move(surrogate)) {
  config_.validate();
  if (!surrogate_) throw ConfigError("[paths].surrogate", "no DEL surrogate supplied");
  const int n = n_turbines();
  agent_loads_ = loads::DelWindowState(n, config_.del_window_steps());
  baseline_loads_ = loads::DelWindowState(n, config_.del_window_steps());
  agent_power_ = RollingMean(config_.power_window_steps());
  baseline_power_ = RollingMean(config_.power_window_steps());
  ws_history_.assign(n, RollingMean(config_.obs_window_steps()));
  wd_history_.assign(n, RollingMean(config_.obs_window_steps()));
  yaw_history_.assign(n, RollingMean(config_.obs_window_steps()));
}

Observations WindEnv::reset(BoxPtr box) {
  if (!box) throw ConfigError("box", "reset needs a turbulence box");
  box_ = std::move(box);
  hubs_ = config_.farm.hub_positions(config_.inflow);
  agent_ = turbwind::initial_farm_state(*box_, config_.inflow, config_.farm);
  baseline_ = agent_;
  agent_loads_.window.clear();
  baseline_loads_.window.clear();
  agent_power_.clear();
  baseline_power_.clear();
  for (auto* history : {&ws_history_, &wd_history_, &yaw_history_})
    for (auto& h : *history) h.clear();

  const int spinup_steps = static_cast<int>(std::lround(config_.spinup_s / config_.control_dt()));
  const Eigen::VectorXd hold = Eigen::VectorXd::Zero(n_turbines());
  for (int k = 0; k < spinup_steps; ++k) advance_control_step(hold);
  if (spinup_steps == 0) advance_control_step(hold);

  spinup_end_ = agent_.t;
  steps_since_reset_ = 0;
  record_ = StepRecord{};
  return observe();
}

void WindEnv::advance_control_step(const Eigen::VectorXd& commands) {
  const auto& spec = config_.inflow;
  const auto& model = config_.farm;
  step_power_ = Eigen::VectorXd::Zero(n_turbines());
  step_baseline_power_ = Eigen::VectorXd::Zero(n_turbines());
  for (int s = 0; s < config_.substeps; ++s) {
    for (int i = 0; i < n_turbines(); ++i)
      agent_.yaw(i) = turbwind::apply_yaw_command(agent_.yaw(i), commands(i), config_.physics_dt);
    turbwind::advance(agent_, *box_, spec, model, config_.physics_dt);
    turbwind::advance(baseline_, *box_, spec, model, config_.physics_dt);
    agent_power_.push(turbwind::farm_power(agent_));
    baseline_power_.push(turbwind::farm_power(baseline_));
    step_power_ += agent_.power;
    step_baseline_power_ += baseline_.power;
  }
  step_power_ /= config_.substeps;
  step_baseline_power_ /= config_.substeps;
  agent_loads_.window.push(agent_.rotor_samples, agent_.yaw);
  baseline_loads_.window.push(baseline_.rotor_samples, baseline_.yaw);
  loads::update_del_estimates(agent_loads_, *surrogate_);
  loads::update_del_estimates(baseline_loads_, *surrogate_);
  for (int i = 0; i < n_turbines(); ++i) {
    ws_history_[i].push(agent_.rotor_samples[i].rotor_average);
    wd_history_[i].push(local_direction(i));
    yaw_history_[i].push(agent_.yaw(i));
  }
}

StepResult WindEnv::step(const Eigen::VectorXd& actions) {
  if (!box_) throw ConfigError("env", "step called before reset");
  if (actions.size() != n_turbines())
    throw ShapeError("env step expects " + std::to_string(n_turbines()) + " actions");
  Eigen::VectorXd commands = actions;
  for (int i = 0; i < commands.size(); ++i)
    if (!std::isfinite(commands(i))) commands(i) = agent_.yaw(i);

  advance_control_step(commands);

  StepResult result;
  const double delta = loads::constraint_excess(agent_loads_.del, baseline_loads_.del);
  result.reward = shape_reward(agent_power_.mean(), baseline_power_.mean(), delta,
                               config_.delta_max, config_.alpha, config_.reward_floor);
  ++steps_since_reset_;
  result.truncated = steps_since_reset_ % config_.reset_interval == 0;
  result.obs = observe();

  record_.t = episode_time();
  record_.yaw = agent_.yaw;
  record_.power = step_power_;
  record_.baseline_power = step_baseline_power_;
  record_.del_agent = agent_loads_.del;
  record_.del_baseline = baseline_loads_.del;
  record_.reward = result.reward;
  return result;
}

double WindEnv::local_direction(int turbine) const {
  const Eigen::Vector3d v =
      turbwind::freestream_at(*box_, config_.inflow, agent_.t, hubs_.col(turbine));
  return -turbwind::rad2deg(std::atan2(v.y(), v.x()));
}

Observations WindEnv::observe() {
  const int n = n_turbines();
  Observations obs(kObservationSize, n);
  Eigen::VectorXd ws(n), wd(n);
  for (int i = 0; i < n; ++i) {
    ws(i) = agent_.rotor_samples[i].rotor_average;
    wd(i) = local_direction(i);
  }
  const double ws_global = ws.mean();
  const double wd_global = wd.mean();
  const double a = config_.angle_scale, w = config_.ws_scale;
  for (int i = 0; i < n; ++i) {
    obs(kWsGlobal, i) = w * ws_global;
    obs(kWdGlobal, i) = a * wd_global;
    obs(kWsLocal, i) = w * ws(i);
    obs(kWsLocalMean, i) = w * ws_history_[i].mean();
    obs(kWdLocal, i) = a * wd(i);
    obs(kWdLocalMean, i) = a * wd_history_[i].mean();
    obs(kYaw, i) = a * agent_.yaw(i);
    obs(kYawMean, i) = a * yaw_history_[i].mean();
  }
  return obs;
}

}  // namespace windsteer::env
