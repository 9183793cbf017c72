#include "windsteer/eval/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "windsteer/errors.hpp"
#include "windsteer/loads/rainflow.hpp"

namespace windsteer::eval {

Policy checkpoint_policy(std::shared_ptr<const isac::PolicyCheckpoint> checkpoint, bool sample,
                         std::uint64_t seed) {
  if (!checkpoint || checkpoint->agents.empty())
    throw ConfigError("checkpoint", "policy checkpoint has no agents");
  auto rng = std::make_shared<nn::Rng>(seed);
  return [checkpoint, sample, rng](const env::Observations& obs) {
    const auto& agents = checkpoint->agents;
    if (obs.cols() != static_cast<Eigen::Index>(agents.size()))
      throw ShapeError("checkpoint has " + std::to_string(agents.size()) +
                       " agents but the farm has " + std::to_string(obs.cols()) + " turbines");
    Eigen::VectorXd a(obs.cols());
    for (Eigen::Index i = 0; i < obs.cols(); ++i) {
      const isac::Matrix o = obs.col(i);
      a(i) = sample ? isac::sample_policy(agents[i], o, isac::standard_normal_row(1, *rng)).action(0)
                    : isac::mean_action(agents[i], o)(0);
    }
    return a;
  };
}

Policy constant_policy(Eigen::VectorXd yaw_deg) {
  return [yaw = std::move(yaw_deg)](const env::Observations& obs) {
    if (obs.cols() != yaw.size()) throw ShapeError("constant policy size differs from the farm");
    return yaw;
  };
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeError("spearman needs equal-length samples");
  if (a.size() < 2) return 0.0;
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double pseudo_load_range(const loads::DelWindow& window, int turbine,
                         const loads::OracleCoefficients& oracle) {
  return loads::del_oracle(window.features(turbine), oracle);
}

EvalSummary summarize_records(const std::vector<env::StepRecord>& records,
                              std::optional<double> delta_max, const EvalOptions& options,
                              DelHistogram* histogram) {
  std::vector<const env::StepRecord*> region;
  for (const auto& r : records)
    if (r.t >= options.analysis_start_s - 1e-9) region.push_back(&r);
  if (region.empty())
    throw ConfigError("[evaluation].analysis_start_s", "no control steps in the analysis region");
  const int n = static_cast<int>(region.front()->yaw.size());
  const double steps = static_cast<double>(region.size());

  EvalSummary s;
  s.delta_max = delta_max;
  s.duration_s = records.back().t;
  s.analysis_start_s = options.analysis_start_s;
  s.analysis_steps = static_cast<int>(region.size());
  s.mean_yaw = Eigen::VectorXd::Zero(n);
  s.mean_del_agent = Eigen::VectorXd::Zero(n);
  s.mean_del_baseline = Eigen::VectorXd::Zero(n);
  s.max_del_agent = Eigen::VectorXd::Zero(n);
  s.max_del_baseline = Eigen::VectorXd::Zero(n);

  double pa = 0.0, pb = 0.0, delta_sum = 0.0;
  int violations = 0;
  std::vector<double> limit;
  const double factor = 1.0 + delta_max.value_or(0.0);
  for (const auto* r : region) {
    pa += r->power.sum();
    pb += r->baseline_power.sum();
    s.mean_yaw += r->yaw;
    s.mean_del_agent += r->del_agent;
    s.mean_del_baseline += r->del_baseline;
    s.max_del_agent = s.max_del_agent.cwiseMax(r->del_agent);
    s.max_del_baseline = s.max_del_baseline.cwiseMax(r->del_baseline);
    delta_sum += r->reward.delta;
    if (delta_max && r->reward.delta > *delta_max) ++violations;
    limit.push_back(factor * r->del_baseline.maxCoeff());
  }
  s.mean_power_agent = pa / steps;
  s.mean_power_baseline = pb / steps;
  s.power_ratio = pb > 0.0 ? pa / pb : 1.0;
  s.mean_yaw /= steps;
  s.mean_del_agent /= steps;
  s.mean_del_baseline /= steps;
  const double max_b = s.max_del_baseline.maxCoeff();
  s.max_to_max_del_ratio = max_b > 0.0 ? s.max_del_agent.maxCoeff() / max_b : 1.0;
  s.violation_fraction = violations / steps;
  s.mean_delta = delta_sum / steps;
  s.limit_p05 = percentile(limit, 5.0);
  s.limit_p95 = percentile(limit, 95.0);

  if (histogram) {
    const int bins = options.histogram_bins;
    if (bins <= 0) throw ConfigError("[evaluation].histogram_bins", "must be positive");
    double lo = std::min(s.max_del_agent.minCoeff(), s.max_del_baseline.minCoeff());
    double hi = std::max(s.max_del_agent.maxCoeff(), max_b);
    for (const auto* r : region) {
      lo = std::min({lo, r->del_agent.minCoeff(), r->del_baseline.minCoeff()});
      hi = std::max({hi, r->del_agent.maxCoeff(), r->del_baseline.maxCoeff()});
    }
    if (!(hi > lo)) hi = lo + 1.0;
    histogram->edges = Eigen::VectorXd::LinSpaced(bins + 1, lo, hi);
    histogram->agent.assign(n, std::vector<int>(bins, 0));
    histogram->baseline.assign(n, std::vector<int>(bins, 0));
    auto bin = [&](double v) {
      const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
      return std::clamp(b, 0, bins - 1);
    };
    for (const auto* r : region)
      for (int i = 0; i < n; ++i) {
        ++histogram->agent[i][bin(r->del_agent(i))];
        ++histogram->baseline[i][bin(r->del_baseline(i))];
      }
  }
  return s;
}

EvalReport evaluate(const Policy& policy, std::shared_ptr<const turbwind::TurbulenceBox> box,
                    env::EnvConfig env_cfg, std::shared_ptr<const loads::SurrogateNet> surrogate,
                    const EvalOptions& options) {
  if (!box) throw ConfigError("box_id", "no turbulence box supplied");
  if (!options.allow_training_box && box->id < static_cast<std::uint64_t>(env_cfg.pool_size))
    throw ConfigError("box_id", "box " + std::to_string(box->id) +
                                    " belongs to the training pool (ids 0.." +
                                    std::to_string(env_cfg.pool_size - 1) +
                                    "); use a held-out id or pass the override flag");
  if (!(options.duration_s > 0.0)) throw ConfigError("[evaluation].duration_s", "must be positive");
  if (!(options.rainflow_window_s > 0.0 && options.rainflow_stride_s > 0.0))
    throw ConfigError("[evaluation].rainflow_window_s", "window and stride must be positive");
  env_cfg.reset_interval = std::numeric_limits<int>::max();
  env_cfg.validate();

  env::WindEnv env(env_cfg, std::move(surrogate));
  const int n = env.n_turbines();
  env::Observations obs = env.reset(box);

  // [controller][turbine] pseudo-load, two points per control step after deployment
  std::vector<std::vector<std::vector<double>>> pseudo(2, std::vector<std::vector<double>>(n));
  auto record_pseudo_load = [&] {
    for (int i = 0; i < n; ++i) {
      const double ra = pseudo_load_range(env.agent_loads().window, i, env_cfg.oracle);
      const double rb = pseudo_load_range(env.baseline_loads().window, i, env_cfg.oracle);
      pseudo[0][i].insert(pseudo[0][i].end(), {0.5 * ra, -0.5 * ra});
      pseudo[1][i].insert(pseudo[1][i].end(), {0.5 * rb, -0.5 * rb});
    }
  };

  EvalReport report;
  const int steps = static_cast<int>(std::lround(options.duration_s / env_cfg.control_dt()));
  report.records.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    const env::StepResult r = env.step(policy(obs));
    obs = r.obs;
    report.records.push_back(env.last_record());
    record_pseudo_load();
  }

  report.summary =
      summarize_records(report.records, env_cfg.delta_max, options, &report.histogram);
  report.summary.box_id = box->id;

  // Rainflow cross-check over sliding windows ending inside the analysis region.
  const int window =
      static_cast<int>(std::lround(options.rainflow_window_s / env_cfg.control_dt()));
  auto& rf = report.rainflow;
  for (double t_end = std::max(options.analysis_start_s, options.rainflow_window_s);
       t_end <= report.records.back().t + 1e-9; t_end += options.rainflow_stride_s) {
    const int end = static_cast<int>(std::lround(t_end / env_cfg.control_dt()));  // exclusive
    if (end < window || end > static_cast<int>(report.records.size())) continue;
    const auto& rec = report.records[end - 1];
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < n; ++i) {
        const auto& series = pseudo[c][i];
        const std::span<const double> span(series.data() + 2 * (end - window),
                                           2 * static_cast<std::size_t>(window));
        rf.turbine.push_back(i);
        rf.controller.push_back(c);
        rf.t_end.push_back(t_end);
        rf.surrogate_del.push_back(c == 0 ? rec.del_agent(i) : rec.del_baseline(i));
        rf.rainflow_del.push_back(loads::rainflow_del(span, options.wohler_m, window));
      }
  }
  rf.spearman = spearman(rf.surrogate_del, rf.rainflow_del);
  report.summary.rainflow_spearman = rf.spearman;
  return report;
}

}  // namespace windsteer::eval
