#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "windsteer/env/wind_env.hpp"
#include "windsteer/isac/trainer.hpp"

namespace windsteer::eval {

/// Maps per-agent observations to yaw commands in degrees.
using Policy = std::function<Eigen::VectorXd(const env::Observations&)>;

/// Policy means (default) or seeded samples from a frozen checkpoint.
Policy checkpoint_policy(std::shared_ptr<const isac::PolicyCheckpoint> checkpoint,
                         bool sample = false, std::uint64_t seed = 0);
/// Always commands the same yaw vector.
Policy constant_policy(Eigen::VectorXd yaw_deg);

struct EvalOptions {
  double duration_s = 3000.0;
  double analysis_start_s = 1000.0;
  int histogram_bins = 40;
  double rainflow_window_s = 600.0;
  double rainflow_stride_s = 60.0;
  double wohler_m = 10.0;
  /// Permits evaluating on a box from the training pool.
  bool allow_training_box = false;
};

struct DelHistogram {
  Eigen::VectorXd edges;                    // bins + 1 uniform edges
  std::vector<std::vector<int>> agent;      // [turbine][bin]
  std::vector<std::vector<int>> baseline;
};

struct RainflowCheck {
  std::vector<int> turbine;
  std::vector<int> controller;  // 0 agent, 1 baseline
  std::vector<double> t_end;
  std::vector<double> surrogate_del;
  std::vector<double> rainflow_del;
  double spearman = 0.0;
};

/// Scalar results over the analysis region.
struct EvalSummary {
  std::uint64_t box_id = 0;
  std::optional<double> delta_max;
  double duration_s = 0.0;
  double analysis_start_s = 0.0;
  int analysis_steps = 0;
  double power_ratio = 1.0;
  double mean_power_agent = 0.0;     // W, farm total
  double mean_power_baseline = 0.0;
  double max_to_max_del_ratio = 1.0;
  double violation_fraction = 0.0;
  double mean_delta = 0.0;
  double limit_p05 = 0.0;  // percentiles of the time-varying DEL limit
  double limit_p95 = 0.0;
  Eigen::VectorXd mean_yaw;
  Eigen::VectorXd mean_del_agent;
  Eigen::VectorXd mean_del_baseline;
  Eigen::VectorXd max_del_agent;
  Eigen::VectorXd max_del_baseline;
  double rainflow_spearman = 0.0;
};

struct EvalReport {
  EvalSummary summary;
  std::vector<env::StepRecord> records;  // every control step, t from deployment
  DelHistogram histogram;
  RainflowCheck rainflow;
};

/// Summary statistics and histograms from a time series alone; evaluate()
/// uses this too, so a re-read episode log reproduces them exactly.
EvalSummary summarize_records(const std::vector<env::StepRecord>& records,
                              std::optional<double> delta_max, const EvalOptions& options,
                              DelHistogram* histogram = nullptr);

/// Deterministic rollout from zero yaw on `box`, agent and baseline twins in
/// lockstep. Refuses boxes from the training pool unless allowed.
EvalReport evaluate(const Policy& policy, std::shared_ptr<const turbwind::TurbulenceBox> box,
                    env::EnvConfig env_cfg, std::shared_ptr<const loads::SurrogateNet> surrogate,
                    const EvalOptions& options = {});

/// Linear-interpolation percentile (q in [0, 100]).
double percentile(std::vector<double> values, double q);
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Cycle range of the blade-root pseudo-load for one control step: the oracle
/// on the trailing-window features the surrogate sees. The pseudo-load swings
/// +range/2, -range/2 once per control step.
double pseudo_load_range(const loads::DelWindow& window, int turbine,
                         const loads::OracleCoefficients& oracle);

}  // namespace windsteer::eval
