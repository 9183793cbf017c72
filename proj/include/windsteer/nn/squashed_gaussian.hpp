#pragma once

#include <cmath>
#include <random>

#include <Eigen/Core>

#include "windsteer/nn/mlp.hpp"

namespace windsteer::nn {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;
inline constexpr double kLog2 = 0.69314718055994530942;

/// Tanh-squashed diagonal Gaussian over a bounded action. The network emits a
/// mean and a raw log-std; the raw value is squashed into [log_std_min,
/// log_std_max] through tanh so the bound never blocks gradients.
struct SquashedGaussianHead {
  double log_std_min = -5.0;
  double log_std_max = 2.0;
  double scale = 30.0;
  double offset = 0.0;

  double log_std(double raw) const {
    return log_std_min + 0.5 * (log_std_max - log_std_min) * (std::tanh(raw) + 1.0);
  }
  /// d log_std / d raw.
  double log_std_slope(double raw) const {
    const double t = std::tanh(raw);
    return 0.5 * (log_std_max - log_std_min) * (1.0 - t * t);
  }
};

/// log(1 - tanh(u)^2), stable for large |u|.
inline double log_one_minus_tanh_sq(double u) {
  return 2.0 * (kLog2 - u - softplus(-2.0 * u));
}

struct ActionSample {
  double action = 0.0;      // offset + scale * tanh(pre_tanh)
  double squashed = 0.0;    // tanh(pre_tanh), in [-1, 1]
  double log_prob = 0.0;    // density of `action` in action units
  double pre_tanh = 0.0;
  double noise = 0.0;
  double log_std = 0.0;
};

/// Reparameterised sample for a given standard-normal draw.
inline ActionSample sample_action(const SquashedGaussianHead& head, double mean,
                                  double raw_log_std, double noise) {
  ActionSample s;
  s.noise = noise;
  s.log_std = head.log_std(raw_log_std);
  s.pre_tanh = mean + std::exp(s.log_std) * noise;
  s.squashed = std::tanh(s.pre_tanh);
  s.action = head.offset + head.scale * s.squashed;
  s.log_prob = -0.5 * noise * noise - s.log_std - kLogSqrt2Pi - std::log(head.scale) -
               log_one_minus_tanh_sq(s.pre_tanh);
  return s;
}

inline ActionSample sample_action(const SquashedGaussianHead& head, double mean,
                                  double raw_log_std, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return sample_action(head, mean, raw_log_std, normal(rng));
}

/// Density of an arbitrary action strictly inside the bounds.
inline double log_prob(const SquashedGaussianHead& head, double mean, double raw_log_std,
                       double action) {
  const double y = (action - head.offset) / head.scale;
  const double u = std::atanh(y);
  const double ls = head.log_std(raw_log_std);
  const double z = (u - mean) / std::exp(ls);
  return -0.5 * z * z - ls - kLogSqrt2Pi - std::log(head.scale) - log_one_minus_tanh_sq(u);
}

/// Gradients of a per-sample loss L(squashed, log_prob) with the noise held
/// fixed. Inputs are dL/d squashed and dL/d log_prob; outputs are dL/d mean
/// and dL/d raw_log_std.
struct HeadGradient {
  double mean = 0.0;
  double raw_log_std = 0.0;
};

inline HeadGradient head_backward(const SquashedGaussianHead& head, const ActionSample& s,
                                  double raw_log_std, double d_squashed, double d_log_prob) {
  const double sigma = std::exp(s.log_std);
  // log_prob depends on pre_tanh through -log(1 - tanh^2) -> +2 tanh(u).
  const double d_pre = d_squashed * (1.0 - s.squashed * s.squashed) +
                       d_log_prob * 2.0 * s.squashed;
  const double d_log_std = d_pre * sigma * s.noise - d_log_prob;
  return {d_pre, d_log_std * head.log_std_slope(raw_log_std)};
}

}  // namespace windsteer::nn
