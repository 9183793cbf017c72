#include "windsteer/loads/rainflow.hpp"

#include <cmath>

#include "windsteer/errors.hpp"

namespace windsteer::loads {

std::vector<double> turning_points(std::span<const double> series) {
  std::vector<double> points;
  if (series.empty()) return points;
  points.push_back(series[0]);
  int direction = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double step = series[i] - points.back();
    if (step == 0.0) continue;
    const int d = step > 0.0 ? 1 : -1;
    if (d == direction) {
      points.back() = series[i];  // still climbing (or falling): extend
    } else {
      points.push_back(series[i]);
      direction = d;
    }
  }
  return points;
}

std::vector<RainflowCycle> rainflow_cycles(std::span<const double> series) {
  std::vector<RainflowCycle> cycles;
  std::vector<double> stack;
  for (double p : turning_points(series)) {
    stack.push_back(p);
    while (stack.size() >= 4) {
      const std::size_t n = stack.size();
      const double outer_a = std::abs(stack[n - 3] - stack[n - 4]);
      const double inner = std::abs(stack[n - 2] - stack[n - 3]);
      const double outer_b = std::abs(stack[n - 1] - stack[n - 2]);
      if (inner <= outer_a && inner <= outer_b) {
        cycles.push_back({inner, 1.0});
        stack.erase(stack.end() - 3, stack.end() - 1);
      } else {
        break;
      }
    }
  }
  for (std::size_t i = 1; i < stack.size(); ++i)
    cycles.push_back({std::abs(stack[i] - stack[i - 1]), 0.5});
  return cycles;
}

double rainflow_del(std::span<const double> series, double wohler_m, double n_ref) {
  if (series.size() < 2) throw ConfigError("rainflow", "series needs at least 2 samples");
  if (!(wohler_m > 0.0)) throw ConfigError("wohler_m", "must be > 0");
  if (!(n_ref > 0.0)) throw ConfigError("n_ref", "must be > 0");
  double damage = 0.0;
  for (const auto& c : rainflow_cycles(series)) damage += c.count * std::pow(c.range, wohler_m);
  if (damage == 0.0) return 0.0;
  return std::pow(damage / n_ref, 1.0 / wohler_m);
}

}  // namespace windsteer::loads
