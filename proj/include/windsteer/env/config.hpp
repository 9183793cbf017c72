#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "windsteer/loads/del_oracle.hpp"
#include "windsteer/turbwind/farm.hpp"
#include "windsteer/turbwind/turbulence.hpp"

namespace windsteer::env {

struct EnvConfig {
  turbwind::InflowSpec inflow;
  turbwind::FarmModel farm;
  turbwind::LatticeSpec lattice;
  turbwind::SpectrumParams spectrum;
  loads::OracleCoefficients oracle;

  /// Permitted max-to-max DEL increase; empty means unconstrained.
  std::optional<double> delta_max = 0.2;
  double alpha = 1.0;
  double reward_floor = -10.0;

  int n_env = 15;
  int reset_interval = 1500;  // control steps per environment
  int substeps = 10;
  double physics_dt = 1.0;
  double spinup_s = 200.0;
  double power_window_s = 120.0;
  double obs_window_s = 120.0;
  double del_window_s = 600.0;

  double ws_scale = 1.0 / 15.0;
  double angle_scale = 1.0 / 30.0;

  std::uint64_t seed = 0;
  int pool_size = 60;
  /// Threads for stepping the vectorised environment; 0 = single-threaded.
  int threads = 0;
  std::string box_pool_dir = "boxes";
  std::string surrogate_path = "surrogate.bin";

  double control_dt() const { return substeps * physics_dt; }
  int power_window_steps() const;
  int obs_window_steps() const;
  int del_window_steps() const;

  /// Throws ConfigError with the config-file path of the first bad field.
  void validate() const;
};

}  // namespace windsteer::env
