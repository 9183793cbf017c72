#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace windsteer::nn {

/// Central-difference gradient of a scalar function of a parameter vector.
template <typename F>
Eigen::VectorXd finite_difference_gradient(F&& f, Eigen::VectorXd params, double h = 1e-5) {
  Eigen::VectorXd grad(params.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double saved = params(i);
    params(i) = saved + h;
    const double up = f(params);
    params(i) = saved - h;
    const double down = f(params);
    params(i) = saved;
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor).
inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                 double floor = 1e-7) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a(i)), std::abs(b(i)), floor});
    worst = std::max(worst, std::abs(a(i) - b(i)) / denom);
  }
  return worst;
}

}  // namespace windsteer::nn
