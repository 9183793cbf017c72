#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "windsteer/errors.hpp"
#include "windsteer/nn/adam.hpp"
#include "windsteer/nn/checkpoint.hpp"
#include "windsteer/nn/gradcheck.hpp"
#include "windsteer/nn/mlp.hpp"
#include "windsteer/nn/squashed_gaussian.hpp"

using namespace windsteer;
using namespace windsteer::nn;

namespace {

// Scalar loss 0.5 * sum(w .* out^2) with fixed weights, so upstream = w .* out.
double weighted_loss(const Mlp<double>& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) {
  return 0.5 * (w.array() * net.forward(x).array().square()).sum();
}

void check_gradients(std::vector<int> dims, std::vector<Activation> acts, unsigned seed) {
  Rng rng(seed);
  Mlp<double> net = Mlp<double>::random(dims, acts, rng);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(dims.front(), 5), w(dims.back(), 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = g(rng);

  MlpTape<double> tape;
  const Eigen::MatrixXd out = net.forward(x, tape);
  const auto grads = net.backward(tape, (w.array() * out.array()).matrix());

  const Eigen::VectorXd fd = finite_difference_gradient(
      [&](const Eigen::VectorXd& p) {
        Mlp<double> copy = net;
        copy.parameters() = p;
        return weighted_loss(copy, x, w);
      },
      net.parameters());
  EXPECT_LE(max_relative_error(grads.params, fd), 1e-4);

  Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  const Eigen::VectorXd fdx = finite_difference_gradient(
      [&](const Eigen::VectorXd& v) {
        return weighted_loss(net, Eigen::Map<const Eigen::MatrixXd>(v.data(), x.rows(), x.cols()), w);
      },
      xv);
  EXPECT_LE(max_relative_error(Eigen::Map<const Eigen::VectorXd>(grads.input.data(), grads.input.size()), fdx),
            1e-4);
}

}  // namespace

TEST(Mlp, ParameterCountAndZeroNet) {
  Mlp<double> net({9, 64, 64, 1}, {Activation::kTanh, Activation::kTanh, Activation::kSoftplus});
  EXPECT_EQ(net.parameter_count(), 10 * 64 + 65 * 64 + 65);
  Mlp<double> zero({3, 4, 2}, {Activation::kTanh, Activation::kIdentity});
  EXPECT_TRUE(zero.forward(Eigen::MatrixXd::Random(3, 7)).isZero());
}

TEST(Mlp, IdentityLayerAndHandComposition) {
  Mlp<double> id({3, 3}, {Activation::kIdentity});
  id.weight(0).setIdentity();
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 4);
  EXPECT_EQ(id.forward(x), x);

  Rng rng(42);
  Mlp<double> net = Mlp<double>::random({2, 3, 1}, {Activation::kTanh, Activation::kIdentity}, rng);
  const Eigen::Vector2d v(0.3, -1.2);
  double out = net.bias(1)(0);
  for (int j = 0; j < 3; ++j) {
    const double h = std::tanh(net.weight(0)(j, 0) * v(0) + net.weight(0)(j, 1) * v(1) + net.bias(0)(j));
    out += net.weight(1)(0, j) * h;
  }
  EXPECT_NEAR(net.forward(Eigen::MatrixXd(v))(0, 0), out, 1e-15);
  EXPECT_THROW(net.forward(Eigen::MatrixXd::Zero(3, 1)), ShapeError);
}

TEST(Mlp, BackwardMatchesFiniteDifferencesForEveryArchitecture) {
  check_gradients({9, 64, 64, 1}, {Activation::kTanh, Activation::kTanh, Activation::kSoftplus}, 1);
  check_gradients({8, 64, 64, 2}, {Activation::kTanh, Activation::kTanh, Activation::kIdentity}, 2);
  check_gradients({9, 64, 64, 1}, {Activation::kRelu, Activation::kRelu, Activation::kIdentity}, 3);
  check_gradients({4, 7, 3}, {Activation::kSoftplus, Activation::kTanh}, 4);
}

TEST(Mlp, LinearGradientIsOuterProductAndZeroUpstreamIsZero) {
  Rng rng(5);
  Mlp<double> net = Mlp<double>::random({3, 2}, {Activation::kIdentity}, rng);
  const Eigen::Vector3d x(1, -2, 0.5);
  const Eigen::Vector2d up(0.7, -0.3);
  MlpTape<double> tape;
  net.forward(Eigen::MatrixXd(x), tape);
  const auto g = net.backward(tape, Eigen::MatrixXd(up));
  const Eigen::MatrixXd outer = up * x.transpose();
  EXPECT_TRUE(Eigen::Map<const Eigen::MatrixXd>(g.params.data(), 2, 3).isApprox(outer));
  EXPECT_TRUE(g.params.tail(2).isApprox(up));
  const auto z = net.backward(tape, Eigen::MatrixXd::Zero(2, 1));
  EXPECT_TRUE(z.params.isZero());
  EXPECT_TRUE(z.input.isZero());
}

TEST(Mlp, PolyakAndDeterminism) {
  Rng a(7), b(7);
  auto n1 = Mlp<double>::random({4, 5, 1}, {Activation::kRelu, Activation::kIdentity}, a);
  auto n2 = Mlp<double>::random({4, 5, 1}, {Activation::kRelu, Activation::kIdentity}, b);
  EXPECT_TRUE(n1 == n2);
  Mlp<double> target = n1;
  target.parameters().setZero();
  polyak_update(target, n1, 0.25);
  EXPECT_TRUE(target.parameters().isApprox(0.25 * n1.parameters()));
}

TEST(Adam, ZeroGradientFirstStepAndShapes) {
  Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(4, -1, 1);
  const Eigen::VectorXd p0 = p;
  AdamState<double> s(4, 1e-2);
  adam_step(s, p, Eigen::VectorXd::Zero(4));
  EXPECT_EQ(p, p0);

  AdamState<double> t(4, 1e-2);
  const Eigen::Vector4d g(0.5, -3.0, 1e-3, -2e-2);
  adam_step(t, p, g);
  for (int i = 0; i < 4; ++i) {
    const double expect = -1e-2 * g(i) / (std::abs(g(i)) + 1e-8);
    EXPECT_NEAR(p(i) - p0(i), expect, 1e-12);
  }
  Eigen::VectorXd wrong(3);
  EXPECT_THROW(adam_step(t, wrong, Eigen::Vector3d::Zero()), ShapeError);
}

TEST(Adam, ConvexQuadraticDecreasesAfterWarmup) {
  Eigen::VectorXd p(3);
  p << 3, -2, 5;
  const Eigen::Vector3d scale(1, 10, 0.1);
  auto f = [&](const Eigen::VectorXd& v) { return 0.5 * (scale.array() * v.array().square()).sum(); };
  AdamState<double> s(3, 0.05);
  double prev = f(p);
  for (int k = 0; k < 400; ++k) {
    adam_step(s, p, (scale.array() * p.array()).matrix());
    const double cur = f(p);
    if (k >= 20 && k < 60) EXPECT_LT(cur, prev) << "step " << k;
    prev = cur;
  }
  EXPECT_LT(f(p), 0.05);
}

TEST(SquashedGaussian, DeterministicLimitAndBounds) {
  SquashedGaussianHead head;
  const auto s = sample_action(head, 0.4, -1e9, 0.0);
  EXPECT_NEAR(s.log_std, -5.0, 1e-12);
  EXPECT_NEAR(s.action, 30 * std::tanh(0.4), 1e-12);
  EXPECT_NEAR(head.log_std(1e9), 2.0, 1e-12);

  Rng rng(3);
  std::normal_distribution<double> g(0, 3);
  for (int k = 0; k < 20000; ++k) {
    const auto a = sample_action(head, g(rng), g(rng), rng);
    ASSERT_GE(a.action, -30.0);
    ASSERT_LE(a.action, 30.0);
    ASSERT_TRUE(std::isfinite(a.log_prob));
  }
  for (double mu : {-20.0, 0.0, 20.0})
    for (double raw : {-50.0, 0.0, 50.0})
      for (double eps : {-8.0, 0.0, 8.0}) EXPECT_TRUE(std::isfinite(sample_action(head, mu, raw, eps).log_prob));
}

TEST(SquashedGaussian, DensityIntegratesToOneAndMatchesSample) {
  SquashedGaussianHead head;
  for (auto [mu, raw] : {std::pair{0.3, -0.5}, std::pair{-1.0, 0.2}, std::pair{0.0, 0.0}}) {
    const int n = 200000;
    const double h = 60.0 / n;
    double integral = 0;
    for (int k = 0; k < n; ++k) integral += std::exp(log_prob(head, mu, raw, -30 + (k + 0.5) * h)) * h;
    EXPECT_NEAR(integral, 1.0, 0.02);
    const auto s = sample_action(head, mu, raw, 0.7);
    EXPECT_NEAR(log_prob(head, mu, raw, s.action), s.log_prob, 1e-8);
  }
}

TEST(SquashedGaussian, HeadBackwardMatchesFiniteDifferences) {
  SquashedGaussianHead head;
  const double noise = -0.6, ds = 1.3, dl = -0.4;
  auto loss = [&](double mu, double raw) {
    const auto s = sample_action(head, mu, raw, noise);
    return ds * s.squashed + dl * s.log_prob;
  };
  for (auto [mu, raw] : {std::pair{0.2, -0.3}, std::pair{-1.1, 0.9}}) {
    const auto s = sample_action(head, mu, raw, noise);
    const HeadGradient g = head_backward(head, s, raw, ds, dl);
    const double e = 1e-6;
    EXPECT_NEAR(g.mean, (loss(mu + e, raw) - loss(mu - e, raw)) / (2 * e), 1e-6);
    EXPECT_NEAR(g.raw_log_std, (loss(mu, raw + e) - loss(mu, raw - e)) / (2 * e), 1e-6);
  }
}

TEST(Checkpoint, MnetRoundTripAndBadFile) {
  Rng rng(8);
  auto net = Mlp<double>::random({8, 64, 64, 2}, {Activation::kTanh, Activation::kTanh, Activation::kIdentity}, rng);
  const auto dir = std::filesystem::temp_directory_path() / "windsteer_nn";
  std::filesystem::create_directories(dir);
  save_mlp(net, (dir / "a.mnet").string());
  EXPECT_TRUE(load_mlp((dir / "a.mnet").string()) == net);
  EXPECT_THROW(load_mlp((dir / "nope.mnet").string()), IoError);
}
