#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "windsteer/errors.hpp"

namespace windsteer::nn {

/// First/second-moment accumulators of the adaptive optimizer.
template <typename Scalar = double>
struct AdamState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector m;
  Vector v;
  std::int64_t step = 0;
  Scalar lr = Scalar(3e-4);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);

  AdamState() = default;
  explicit AdamState(Eigen::Index n, Scalar learning_rate = Scalar(3e-4))
      : m(Vector::Zero(n)), v(Vector::Zero(n)), lr(learning_rate) {}
};

/// One bias-corrected update: params -= lr * m_hat / (sqrt(v_hat) + eps).
template <typename Scalar, typename ParamsDerived, typename GradDerived>
void adam_step(AdamState<Scalar>& state, Eigen::MatrixBase<ParamsDerived>& params,
               const Eigen::MatrixBase<GradDerived>& grads) {
  if (params.size() != state.m.size() || grads.size() != state.m.size())
    throw ShapeError("adam_step: parameter, gradient and moment sizes differ");
  ++state.step;
  state.m = state.beta1 * state.m + (Scalar(1) - state.beta1) * grads;
  state.v = state.beta2 * state.v + (Scalar(1) - state.beta2) * grads.cwiseAbs2();
  const Scalar c1 = Scalar(1) - std::pow(state.beta1, Scalar(state.step));
  const Scalar c2 = Scalar(1) - std::pow(state.beta2, Scalar(state.step));
  params.derived().array() -=
      state.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace windsteer::nn
