#include "windsteer/loads/del_window.hpp"

#include "windsteer/errors.hpp"

namespace windsteer::loads {

DelWindow::DelWindow(int n_turbines, int capacity) : n_turbines_(n_turbines) {
  if (capacity < 1) throw ConfigError("del_window", "capacity must be >= 1");
  entries_.assign(capacity, Eigen::Matrix<double, kFeatureCount, Eigen::Dynamic>::Zero(
                                kFeatureCount, n_turbines));
}

void DelWindow::clear() {
  head_ = 0;
  count_ = 0;
}

void DelWindow::push(const std::vector<turbwind::SectorSamples>& samples,
                     const Eigen::VectorXd& yaw) {
  if (static_cast<int>(samples.size()) != n_turbines_ || yaw.size() != n_turbines_)
    throw ShapeError("DelWindow::push: turbine count mismatch");
  auto& entry = entries_[head_];
  for (int i = 0; i < n_turbines_; ++i) {
    entry.col(i) << samples[i].mean, samples[i].ti, yaw(i);
  }
  head_ = (head_ + 1) % capacity();
  if (count_ < capacity()) ++count_;
}

DelFeatures DelWindow::features(int turbine) const {
  if (count_ == 0) throw ShapeError("DelWindow::features on an empty window");
  FeatureVector sum = FeatureVector::Zero();
  const int oldest = (head_ - count_ + capacity()) % capacity();
  for (int k = 0; k < count_; ++k) sum += entries_[(oldest + k) % capacity()].col(turbine);
  return DelFeatures::from_vector(sum / count_);
}

double estimate_del(const DelWindow& window, const SurrogateNet& net, int turbine) {
  return net.predict(window.features(turbine));
}

void update_del_estimates(DelWindowState& state, const SurrogateNet& net) {
  const int n = state.window.n_turbines();
  Eigen::Matrix<double, kFeatureCount, Eigen::Dynamic> x(kFeatureCount, n);
  for (int i = 0; i < n; ++i) x.col(i) = state.window.features(i).to_vector();
  state.del = net.predict(x).transpose();
}

double constraint_excess(const Eigen::VectorXd& agent_del, const Eigen::VectorXd& baseline_del) {
  return agent_del.maxCoeff() / baseline_del.maxCoeff() - 1.0;
}

}  // namespace windsteer::loads
