#include "windsteer/loads/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "windsteer/binary_io.hpp"
#include "windsteer/errors.hpp"
#include "windsteer/nn/adam.hpp"
#include "windsteer/nn/checkpoint.hpp"

namespace windsteer::loads {

namespace {

using FeatureMatrix = Eigen::Matrix<double, kFeatureCount, Eigen::Dynamic>;

constexpr std::uint32_t kDsurVersion = 1;
constexpr int kLhsDims = 10;

Eigen::MatrixXd latin_hypercube(int dims, int count, nn::Rng& rng) {
  Eigen::MatrixXd u(dims, count);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> strata(count);
  for (int d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int i = 0; i < count; ++i) u(d, i) = (strata[i] + unit(rng)) / count;
  }
  return u;
}

double lerp(double lo, double hi, double u) { return lo + (hi - lo) * u; }

Eigen::RowVectorXd oracle_labels(const FeatureMatrix& x, const OracleCoefficients& k) {
  Eigen::RowVectorXd y(x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    y(i) = del_oracle(DelFeatures::from_vector(x.col(i)), k);
  return y;
}

double relative_rmse(const Eigen::RowVectorXd& pred, const Eigen::RowVectorXd& truth) {
  const double rmse = std::sqrt((pred - truth).squaredNorm() / truth.size());
  return rmse / truth.mean();
}

}  // namespace

SurrogateNet SurrogateNet::untrained(int hidden, nn::Rng& rng) {
  SurrogateNet s;
  s.net = nn::Mlp<double>::random(
      {kFeatureCount, hidden, hidden, 1},
      {nn::Activation::kTanh, nn::Activation::kTanh, nn::Activation::kSoftplus}, rng);
  return s;
}

Eigen::MatrixXd SurrogateNet::normalize(const FeatureMatrix& x) const {
  return ((x.colwise() - input_mean).array().colwise() / input_std.array()).matrix();
}

double SurrogateNet::predict(const DelFeatures& f) const {
  FeatureMatrix x = f.to_vector();
  return predict(x)(0);
}

Eigen::RowVectorXd SurrogateNet::predict(const FeatureMatrix& x) const {
  return output_scale * net.forward(normalize(x));
}

FeatureMatrix sample_features(const SurrogateSampleSpec& spec, int count, nn::Rng& rng) {
  const Eigen::MatrixXd u = latin_hypercube(kLhsDims, count, rng);
  FeatureMatrix x(kFeatureCount, count);
  for (int i = 0; i < count; ++i) {
    const double ws = lerp(spec.ws_min, spec.ws_max, u(0, i));
    const double ti = lerp(spec.ti_min, spec.ti_max, u(1, i));
    const double yaw = lerp(spec.yaw_min, spec.yaw_max, u(2, i));
    const double asym = lerp(spec.asym_min, spec.asym_max, u(3, i));
    const double side = u(4, i) < 0.5 ? -1.0 : 1.0;
    const double shear = lerp(-spec.shear_max, spec.shear_max, u(5, i));
    Eigen::Vector4d spread;
    for (int s = 0; s < 4; ++s) spread(s) = lerp(-spec.ti_spread, spec.ti_spread, u(6 + s, i));
    spread.array() -= spread.mean();

    x(0, i) = ws * (1.0 + 0.5 * side * asym);
    x(1, i) = ws * (1.0 - 0.5 * side * asym);
    x(2, i) = ws * (1.0 + 0.5 * shear);
    x(3, i) = ws * (1.0 - 0.5 * shear);
    for (int s = 0; s < 4; ++s) x(4 + s, i) = std::max(0.0, ti * (1.0 + spread(s)));
    x(8, i) = yaw;
  }
  return x;
}

SurrogateNet train_surrogate(const OracleCoefficients& oracle, const SurrogateSampleSpec& spec,
                             SurrogateFitReport* report) {
  if (spec.samples < 10) throw ConfigError("--samples", "need at least 10 samples");
  if (!(spec.holdout_fraction > 0.0 && spec.holdout_fraction < 1.0))
    throw ConfigError("holdout_fraction", "must lie in (0, 1)");

  nn::Rng rng(spec.seed);
  const FeatureMatrix x = sample_features(spec, spec.samples, rng);
  const Eigen::RowVectorXd y = oracle_labels(x, oracle);

  // LHS columns are already in random order, so the tail is a fair hold-out.
  const int n_hold = std::max(1, static_cast<int>(std::lround(spec.samples * spec.holdout_fraction)));
  const int n_train = spec.samples - n_hold;
  const FeatureMatrix x_train = x.leftCols(n_train);
  const FeatureMatrix x_hold = x.rightCols(n_hold);
  const Eigen::RowVectorXd y_train = y.leftCols(n_train);
  const Eigen::RowVectorXd y_hold = y.rightCols(n_hold);

  SurrogateNet model = SurrogateNet::untrained(spec.hidden, rng);
  model.input_mean = x_train.rowwise().mean();
  for (int f = 0; f < kFeatureCount; ++f) {
    const double var = (x_train.row(f).array() - model.input_mean(f)).square().mean();
    model.input_std(f) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  model.output_scale = y_train.mean();

  const Eigen::MatrixXd xn_train = model.normalize(x_train);
  const Eigen::RowVectorXd yn_train = y_train / model.output_scale;

  nn::AdamState<double> adam(model.net.parameter_count(), spec.learning_rate);
  std::vector<int> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  const int batches = (n_train + spec.batch_size - 1) / spec.batch_size;
  const long total_steps = static_cast<long>(batches) * spec.max_epochs;

  double hold_rmse = relative_rmse(model.predict(x_hold), y_hold);
  int epoch = 0;
  nn::MlpTape<double> tape;
  Eigen::MatrixXd xb;
  Eigen::RowVectorXd yb;
  for (epoch = 1; epoch <= spec.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int b = 0; b < batches; ++b) {
      const int begin = b * spec.batch_size;
      const int size = std::min(spec.batch_size, n_train - begin);
      xb.resize(kFeatureCount, size);
      yb.resize(size);
      for (int i = 0; i < size; ++i) {
        xb.col(i) = xn_train.col(order[begin + i]);
        yb(i) = yn_train(order[begin + i]);
      }
      const Eigen::MatrixXd pred = model.net.forward(xb, tape);
      // Relative squared error, so low-DEL samples weigh as much as high ones.
      const Eigen::MatrixXd upstream =
          ((2.0 / size) * (pred - yb).array() / yb.array().square()).matrix();
      const auto grads = model.net.backward(tape, upstream);

      // Geometric decay from the initial to the final learning rate.
      const double progress = static_cast<double>(adam.step) / total_steps;
      adam.lr = spec.learning_rate *
                std::pow(spec.final_learning_rate / spec.learning_rate, progress);
      nn::adam_step(adam, model.net.parameters(), grads.params);
    }
    if (epoch % 10 == 0 || epoch == spec.max_epochs) {
      hold_rmse = relative_rmse(model.predict(x_hold), y_hold);
      if (!std::isfinite(hold_rmse))
        throw TrainingError("surrogate training diverged (non-finite hold-out RMSE)");
      if (hold_rmse <= 0.25 * spec.target_relative_rmse) break;
    }
  }
  hold_rmse = relative_rmse(model.predict(x_hold), y_hold);

  if (report) {
    report->holdout_relative_rmse = hold_rmse;
    report->holdout_mean_del = y_hold.mean();
    report->epochs = std::min(epoch, spec.max_epochs);
  }
  if (!(hold_rmse <= spec.target_relative_rmse)) {
    std::ostringstream msg;
    msg << "surrogate missed the hold-out tolerance: relative RMSE " << hold_rmse << " > "
        << spec.target_relative_rmse;
    throw TrainingError(msg.str());
  }
  return model;
}

void save_surrogate(const SurrogateNet& s, const std::string& path) {
  io::BinaryWriter out(path);
  out.magic("DSUR");
  out.put<std::uint32_t>(kDsurVersion);
  nn::write_mlp_layout(out, s.net);
  out.put_array(std::span<const double>(s.input_mean.data(), kFeatureCount));
  out.put_array(std::span<const double>(s.input_std.data(), kFeatureCount));
  out.put(s.output_scale);
  nn::write_mlp_params(out, s.net);
  out.close();
}

SurrogateNet load_surrogate(const std::string& path) {
  io::BinaryReader in(path);
  in.expect_magic("DSUR");
  if (in.get<std::uint32_t>() != kDsurVersion) throw IoError(path, "unsupported DSUR version");
  SurrogateNet s;
  s.net = nn::read_mlp_layout(in);
  if (s.net.input_dim() != kFeatureCount || s.net.output_dim() != 1)
    throw IoError(path, "DSUR network must map 9 features to 1 output");
  in.get_array(std::span<double>(s.input_mean.data(), kFeatureCount));
  in.get_array(std::span<double>(s.input_std.data(), kFeatureCount));
  s.output_scale = in.get<double>();
  nn::read_mlp_params(in, s.net);
  return s;
}

}  // namespace windsteer::loads
