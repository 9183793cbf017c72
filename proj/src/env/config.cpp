#include "windsteer/env/config.hpp"

#include <cmath>

#include "windsteer/errors.hpp"

namespace windsteer::env {

namespace {

int steps_for(double seconds, double dt, const char* field) {
  const double n = seconds / dt;
  if (!(n >= 1.0)) throw ConfigError(field, "window shorter than one step");
  return static_cast<int>(std::lround(n));
}

}  // namespace

int EnvConfig::power_window_steps() const {
  return steps_for(power_window_s, physics_dt, "[env].power_window_s");
}
int EnvConfig::obs_window_steps() const {
  return steps_for(obs_window_s, control_dt(), "[env].obs_window_s");
}
int EnvConfig::del_window_steps() const {
  return steps_for(del_window_s, control_dt(), "[env].del_window_s");
}

void EnvConfig::validate() const {
  inflow.validate();
  farm.layout.validate();
  if (delta_max && !(*delta_max > 0.0))
    throw ConfigError("[constraint].delta_max", "must be > 0 (omit or 'none' for unconstrained)");
  if (!(alpha > 0.0)) throw ConfigError("[constraint].alpha", "must be > 0");
  if (!(reward_floor < 0.0)) throw ConfigError("[constraint].reward_floor", "must be < 0");
  if (n_env < 1) throw ConfigError("[training].n_env", "must be >= 1");
  if (reset_interval < 1) throw ConfigError("[training].reset_interval", "must be >= 1");
  if (substeps < 1) throw ConfigError("[env].substeps", "must be >= 1");
  if (!(physics_dt > 0.0)) throw ConfigError("[env].physics_dt", "must be > 0");
  if (!(spinup_s >= 0.0)) throw ConfigError("[env].spinup_s", "must be >= 0");
  power_window_steps();
  obs_window_steps();
  del_window_steps();
  if (!(farm.wake.expansion_rate >= 0.0))
    throw ConfigError("[farm].wake_expansion_rate", "must be >= 0");
  if (!(farm.wake.meander_time_constant > 0.0))
    throw ConfigError("[farm].meander_time_constant", "must be > 0");
  if (pool_size < 1) throw ConfigError("[paths].pool_size", "must be >= 1");
  if (threads < 0) throw ConfigError("threads", "must be >= 0");
  if (lattice.nx < 2 || lattice.ny < 2 || lattice.nz < 2)
    throw ConfigError("[turbulence].nx", "lattice dimensions must be >= 2");
  if (!(lattice.dy > 0.0 && lattice.dz > 0.0 && lattice.length_x > 0.0))
    throw ConfigError("[turbulence].length_x", "lattice spacings must be > 0");
}

}  // namespace windsteer::env
