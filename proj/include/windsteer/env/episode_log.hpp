#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "windsteer/env/wind_env.hpp"

namespace windsteer::env {

/// Episode CSV: t, yaw_i, power_i, baseline_power_i, del_agent_i,
/// del_baseline_i, r_power, r_constraint, r_total, delta. Values are written
/// with 17 significant digits so a re-read reproduces them exactly.
void write_episode_log(std::ostream& out, const std::vector<StepRecord>& records);
void write_episode_log(const std::string& path, const std::vector<StepRecord>& records);
std::vector<StepRecord> read_episode_log(const std::string& path);

std::string format_double(double v);

}  // namespace windsteer::env
