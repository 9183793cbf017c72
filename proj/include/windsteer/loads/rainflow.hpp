#pragma once

#include <span>
#include <vector>

namespace windsteer::loads {

struct RainflowCycle {
  double range = 0.0;
  double count = 0.0;  // 1 for a closed cycle, 0.5 for a residual half cycle
};

/// Local extrema of the series, endpoints included; plateaus collapse to one point.
std::vector<double> turning_points(std::span<const double> series);

/// Four-point rainflow counting. Closed cycles come first in extraction order;
/// the unclosed residual follows as half cycles between consecutive points.
std::vector<RainflowCycle> rainflow_cycles(std::span<const double> series);

/// (sum n_i S_i^m / n_ref)^(1/m). A constant series gives 0.
double rainflow_del(std::span<const double> series, double wohler_m, double n_ref);

}  // namespace windsteer::loads
