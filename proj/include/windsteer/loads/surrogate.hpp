#pragma once

#include <cstdint>
#include <string>

#include "windsteer/loads/del_oracle.hpp"
#include "windsteer/nn/mlp.hpp"

namespace windsteer::loads {

/// Three-layer DEL surrogate: 9 -> h -> h -> 1, tanh hidden, softplus output.
/// Inputs are standardised with the stored means/stds and the softplus output
/// is multiplied by output_scale, so predictions are strictly positive.
struct SurrogateNet {
  nn::Mlp<double> net;
  FeatureVector input_mean = FeatureVector::Zero();
  FeatureVector input_std = FeatureVector::Ones();
  double output_scale = 1.0;

  static SurrogateNet untrained(int hidden, nn::Rng& rng);

  double predict(const DelFeatures& f) const;
  /// Batched prediction, one feature column per sample.
  Eigen::RowVectorXd predict(const Eigen::Matrix<double, kFeatureCount, Eigen::Dynamic>& x) const;
  Eigen::MatrixXd normalize(const Eigen::Matrix<double, kFeatureCount, Eigen::Dynamic>& x) const;
};

/// Ranges and budget for fitting the surrogate on oracle samples. The ranges
/// are those of the window-averaged features the environment produces.
struct SurrogateSampleSpec {
  int samples = 20000;
  std::uint64_t seed = 1;
  double ws_min = 4.0, ws_max = 16.0;
  double ti_min = 0.0, ti_max = 0.2;
  double yaw_min = -30.0, yaw_max = 30.0;
  double asym_min = 0.0, asym_max = 0.5;
  /// Top/bottom split (top - bottom) / U, sampled symmetric about zero.
  double shear_max = 0.15;
  /// Per-sector TI deviation from the sector mean, relative.
  double ti_spread = 0.5;
  double holdout_fraction = 0.2;
  int hidden = 64;
  int max_epochs = 400;
  int batch_size = 128;
  double learning_rate = 2e-3;
  double final_learning_rate = 2e-5;
  double target_relative_rmse = 0.02;
};

struct SurrogateFitReport {
  double holdout_relative_rmse = 0.0;
  double holdout_mean_del = 0.0;
  int epochs = 0;
};

/// Latin-hypercube sample of oracle inputs; one feature column per sample.
Eigen::Matrix<double, kFeatureCount, Eigen::Dynamic> sample_features(
    const SurrogateSampleSpec& spec, int count, nn::Rng& rng);

/// Fits a surrogate to `oracle` labels. Deterministic in spec.seed. Throws
/// TrainingError (with the final RMSE) if the hold-out tolerance is missed.
SurrogateNet train_surrogate(const OracleCoefficients& oracle,
                             const SurrogateSampleSpec& spec,
                             SurrogateFitReport* report = nullptr);

/// "DSUR" checkpoint: magic, u32 version, MLP body, then f64 input means,
/// input stds and output scale.
void save_surrogate(const SurrogateNet& net, const std::string& path);
SurrogateNet load_surrogate(const std::string& path);

}  // namespace windsteer::loads
