#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "windsteer/turbwind/farm.hpp"

namespace windsteer::eval {

struct GridSearchOptions {
  double step_deg = 5.0;
  double limit_deg = turbwind::kYawLimitDeg;
  /// Physics time each combination runs before its power is read.
  double settle_s = 300.0;
  double physics_dt = 1.0;
};

struct GridSearchResult {
  std::vector<double> yaw_grid;   // candidate values for turbines 0 and 1
  Eigen::MatrixXd farm_power;     // [i0][i1], W; remaining turbines at 0
  double baseline_power = 0.0;    // all zero yaw
  Eigen::VectorXd best_yaw;       // argmax, one entry per turbine
  double best_power = 0.0;
  double gain = 0.0;              // best_power / baseline_power - 1
};

/// Steady farm power with every turbine held at `yaw_deg`, ti forced to 0.
double steady_farm_power(const turbwind::FarmModel& model, turbwind::InflowSpec spec,
                         const Eigen::VectorXd& yaw_deg, const GridSearchOptions& options = {});

/// Exhaustive search over turbine 0 and 1 yaws with the rest at zero. Ties
/// keep the first candidate in grid order (most negative yaw first).
GridSearchResult grid_search_oracle(const turbwind::FarmModel& model,
                                    const turbwind::InflowSpec& spec,
                                    const GridSearchOptions& options = {});

void write_grid_csv(const std::string& path, const GridSearchResult& result);

}  // namespace windsteer::eval
