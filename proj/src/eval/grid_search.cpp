#include "windsteer/eval/grid_search.hpp"

#include <cmath>
#include <fstream>

#include "windsteer/env/episode_log.hpp"
#include "windsteer/errors.hpp"
#include "windsteer/turbwind/turbulence.hpp"

namespace windsteer::eval {

double steady_farm_power(const turbwind::FarmModel& model, turbwind::InflowSpec spec,
                         const Eigen::VectorXd& yaw_deg, const GridSearchOptions& options) {
  spec.ti = 0.0;
  if (yaw_deg.size() != model.layout.n_turbines())
    throw ShapeError("steady_farm_power needs one yaw per turbine");
  if (!(options.physics_dt > 0.0)) throw ConfigError("[grid].physics_dt", "must be positive");
  turbwind::LatticeSpec dims;
  dims.nx = dims.ny = dims.nz = 2;
  const auto box = turbwind::quiescent_box(dims);
  turbwind::FarmState state = turbwind::initial_farm_state(box, spec, model);
  state.yaw = yaw_deg.cwiseMax(-turbwind::kYawLimitDeg).cwiseMin(turbwind::kYawLimitDeg);
  const int steps = static_cast<int>(std::ceil(options.settle_s / options.physics_dt));
  for (int k = 0; k < steps; ++k) turbwind::advance(state, box, spec, model, options.physics_dt);
  return turbwind::farm_power(state);
}

GridSearchResult grid_search_oracle(const turbwind::FarmModel& model,
                                    const turbwind::InflowSpec& spec,
                                    const GridSearchOptions& options) {
  if (!(options.step_deg > 0.0)) throw ConfigError("[grid].step", "must be positive");
  const int n = model.layout.n_turbines();
  if (n < 2) throw ConfigError("[farm].n_turbines", "grid search needs at least two turbines");
  GridSearchResult r;
  const int half = static_cast<int>(std::floor(options.limit_deg / options.step_deg + 1e-9));
  for (int k = -half; k <= half; ++k) r.yaw_grid.push_back(k * options.step_deg);
  const int m = static_cast<int>(r.yaw_grid.size());

  r.baseline_power = steady_farm_power(model, spec, Eigen::VectorXd::Zero(n), options);
  r.farm_power.resize(m, m);
  r.best_yaw = Eigen::VectorXd::Zero(n);
  r.best_power = -1.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Eigen::VectorXd yaw = Eigen::VectorXd::Zero(n);
      yaw(0) = r.yaw_grid[a];
      yaw(1) = r.yaw_grid[b];
      const double p = steady_farm_power(model, spec, yaw, options);
      r.farm_power(a, b) = p;
      if (p > r.best_power * (1.0 + 1e-12)) {
        r.best_power = p;
        r.best_yaw = yaw;
      }
    }
  r.gain = r.best_power / r.baseline_power - 1.0;
  return r;
}

void write_grid_csv(const std::string& path, const GridSearchResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  out << "yaw_0,yaw_1,farm_power,gain\n";
  for (std::size_t a = 0; a < result.yaw_grid.size(); ++a)
    for (std::size_t b = 0; b < result.yaw_grid.size(); ++b) {
      const double p = result.farm_power(a, b);
      out << env::format_double(result.yaw_grid[a]) << ',' << env::format_double(result.yaw_grid[b])
          << ',' << env::format_double(p) << ','
          << env::format_double(p / result.baseline_power - 1.0) << '\n';
    }
  if (!out) throw IoError(path, "write failed");
}

}  // namespace windsteer::eval
