#pragma once

#include <vector>

#include <Eigen/Core>

#include "windsteer/loads/surrogate.hpp"
#include "windsteer/turbwind/farm.hpp"

namespace windsteer::loads {

/// Sliding window of instantaneous per-turbine DEL features, one entry per
/// control step. Averages run over the filled part of the window, oldest entry
/// first, so the result does not depend on where the ring currently starts.
class DelWindow {
 public:
  DelWindow() = default;
  DelWindow(int n_turbines, int capacity);

  void clear();
  void push(const std::vector<turbwind::SectorSamples>& samples, const Eigen::VectorXd& yaw);

  int size() const { return count_; }
  int capacity() const { return static_cast<int>(entries_.size()); }
  int n_turbines() const { return n_turbines_; }

  /// Window mean of sector means, sector TI and yaw. Requires size() >= 1.
  DelFeatures features(int turbine) const;

 private:
  int n_turbines_ = 0;
  int head_ = 0;  // next write slot
  int count_ = 0;
  std::vector<Eigen::Matrix<double, kFeatureCount, Eigen::Dynamic>> entries_;
};

/// Window plus the latest per-turbine DEL estimates [kN m] of one farm.
struct DelWindowState {
  DelWindow window;
  Eigen::VectorXd del;

  DelWindowState() = default;
  DelWindowState(int n_turbines, int capacity)
      : window(n_turbines, capacity), del(Eigen::VectorXd::Zero(n_turbines)) {}
};

double estimate_del(const DelWindow& window, const SurrogateNet& net, int turbine);

/// Refreshes state.del for every turbine.
void update_del_estimates(DelWindowState& state, const SurrogateNet& net);

/// Max-to-max constraint excess: max_i agent_i / max_i baseline_i - 1.
double constraint_excess(const Eigen::VectorXd& agent_del, const Eigen::VectorXd& baseline_del);

}  // namespace windsteer::loads
