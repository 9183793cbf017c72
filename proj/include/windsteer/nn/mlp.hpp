#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "windsteer/errors.hpp"

namespace windsteer::nn {

using Rng = std::mt19937_64;

enum class Activation : std::uint32_t { kIdentity = 0, kTanh = 1, kRelu = 2, kSoftplus = 3 };

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Numerically stable log(1 + exp(x)).
template <typename Scalar>
Scalar softplus(Scalar x) {
  return x > Scalar(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

/// Per-layer activations recorded by a forward pass, consumed by backward().
template <typename Scalar>
struct MlpTape {
  std::vector<MatrixX<Scalar>> inputs;  // x_l
  std::vector<MatrixX<Scalar>> pre;     // z_l = W x_l + b
  std::vector<MatrixX<Scalar>> post;    // act(z_l)
};

template <typename Scalar>
struct MlpGradients {
  VectorX<Scalar> params;  // same layout as Mlp::parameters()
  MatrixX<Scalar> input;   // d loss / d x, one column per sample
};

/// Fully connected network. Parameters live in one flat vector, layer by layer,
/// each layer as its column-major weight (out x in) followed by its bias.
/// Samples are columns: forward maps (in x batch) to (out x batch).
template <typename Scalar = double>
class Mlp {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  Mlp() = default;

  Mlp(std::vector<int> dims, std::vector<Activation> activations)
      : dims_(std::move(dims)), activations_(std::move(activations)) {
    if (dims_.size() < 2 || activations_.size() != dims_.size() - 1)
      throw ShapeError("Mlp needs n+1 dims for n activations");
    Eigen::Index total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      if (dims_[l] <= 0 || dims_[l + 1] <= 0) throw ShapeError("Mlp dims must be positive");
      offsets_.push_back(total);
      total += static_cast<Eigen::Index>(dims_[l] + 1) * dims_[l + 1];
    }
    params_ = Vector::Zero(total);
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  static Mlp random(std::vector<int> dims, std::vector<Activation> activations, Rng& rng) {
    Mlp net(std::move(dims), std::move(activations));
    for (int l = 0; l < net.layer_count(); ++l) {
      const Scalar bound = Scalar(1) / std::sqrt(Scalar(net.dims_[l]));
      std::uniform_real_distribution<double> dist(-double(bound), double(bound));
      auto w = net.weight(l);
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = Scalar(dist(rng));
      auto b = net.bias(l);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = Scalar(dist(rng));
    }
    return net;
  }

  int layer_count() const { return static_cast<int>(activations_.size()); }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<Activation>& activations() const { return activations_; }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }
  Eigen::Index parameter_count() const { return params_.size(); }

  Eigen::Map<Matrix> weight(int l) {
    return {params_.data() + offsets_[l], dims_[l + 1], dims_[l]};
  }
  Eigen::Map<const Matrix> weight(int l) const {
    return {params_.data() + offsets_[l], dims_[l + 1], dims_[l]};
  }
  Eigen::Map<Vector> bias(int l) {
    return {params_.data() + offsets_[l] + Eigen::Index(dims_[l]) * dims_[l + 1], dims_[l + 1]};
  }
  Eigen::Map<const Vector> bias(int l) const {
    return {params_.data() + offsets_[l] + Eigen::Index(dims_[l]) * dims_[l + 1], dims_[l + 1]};
  }

  Matrix forward(const Matrix& x) const {
    check_input(x);
    Matrix h = x;
    for (int l = 0; l < layer_count(); ++l) {
      Matrix z = weight(l) * h;
      z.colwise() += bias(l);
      h = activate(z, activations_[l]);
    }
    return h;
  }

  Matrix forward(const Matrix& x, MlpTape<Scalar>& tape) const {
    check_input(x);
    tape.inputs.resize(layer_count());
    tape.pre.resize(layer_count());
    tape.post.resize(layer_count());
    const Matrix* h = &x;
    for (int l = 0; l < layer_count(); ++l) {
      tape.inputs[l] = *h;
      tape.pre[l].noalias() = weight(l) * tape.inputs[l];
      tape.pre[l].colwise() += bias(l);
      tape.post[l] = activate(tape.pre[l], activations_[l]);
      h = &tape.post[l];
    }
    return tape.post.back();
  }

  /// Reverse-mode gradients for d loss / d output = upstream (out x batch),
  /// summed over the batch.
  MlpGradients<Scalar> backward(const MlpTape<Scalar>& tape, const Matrix& upstream) const {
    if (tape.post.size() != static_cast<std::size_t>(layer_count()))
      throw ShapeError("backward called without a matching forward tape");
    if (upstream.rows() != output_dim() || upstream.cols() != tape.post.back().cols())
      throw ShapeError("upstream gradient shape does not match network output");
    MlpGradients<Scalar> grads;
    grads.params = Vector::Zero(params_.size());
    Matrix delta = upstream;
    for (int l = layer_count() - 1; l >= 0; --l) {
      apply_derivative(delta, tape.pre[l], tape.post[l], activations_[l]);
      const Eigen::Index off = offsets_[l];
      Eigen::Map<Matrix> dw(grads.params.data() + off, dims_[l + 1], dims_[l]);
      dw.noalias() = delta * tape.inputs[l].transpose();
      Eigen::Map<Vector>(grads.params.data() + off + Eigen::Index(dims_[l]) * dims_[l + 1],
                         dims_[l + 1]) = delta.rowwise().sum();
      Matrix next = weight(l).transpose() * delta;
      delta = std::move(next);
    }
    grads.input = std::move(delta);
    return grads;
  }

  bool operator==(const Mlp& other) const {
    return dims_ == other.dims_ && activations_ == other.activations_ &&
           params_ == other.params_;
  }

 private:
  void check_input(const Matrix& x) const {
    if (x.rows() != input_dim())
      throw ShapeError("Mlp input has " + std::to_string(x.rows()) + " rows, expected " +
                       std::to_string(input_dim()));
  }

  static Matrix activate(const Matrix& z, Activation a) {
    switch (a) {
      case Activation::kTanh:
        return z.array().tanh().matrix();
      case Activation::kRelu:
        return z.cwiseMax(Scalar(0));
      case Activation::kSoftplus:
        return z.unaryExpr([](Scalar v) { return softplus(v); });
      case Activation::kIdentity:
        break;
    }
    return z;
  }

  static void apply_derivative(Matrix& delta, const Matrix& pre, const Matrix& post,
                               Activation a) {
    switch (a) {
      case Activation::kTanh:
        delta.array() *= Scalar(1) - post.array().square();
        break;
      case Activation::kRelu:
        delta.array() *= (pre.array() > Scalar(0)).template cast<Scalar>();
        break;
      case Activation::kSoftplus:
        delta.array() *= pre.unaryExpr([](Scalar v) { return sigmoid(v); }).array();
        break;
      case Activation::kIdentity:
        break;
    }
  }

  std::vector<int> dims_;
  std::vector<Activation> activations_;
  std::vector<Eigen::Index> offsets_;
  Vector params_;
};

template <typename Scalar>
MatrixX<Scalar> forward(const Mlp<Scalar>& net, const MatrixX<Scalar>& x) {
  return net.forward(x);
}

template <typename Scalar>
MlpGradients<Scalar> backward(const Mlp<Scalar>& net, const MlpTape<Scalar>& tape,
                              const MatrixX<Scalar>& upstream) {
  return net.backward(tape, upstream);
}

/// theta' <- tau theta + (1 - tau) theta'.
template <typename Scalar>
void polyak_update(Mlp<Scalar>& target, const Mlp<Scalar>& source, Scalar tau) {
  target.parameters() = tau * source.parameters() + (Scalar(1) - tau) * target.parameters();
}

}  // namespace windsteer::nn
