#include "windsteer/eval/export.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "windsteer/env/episode_log.hpp"
#include "windsteer/errors.hpp"

namespace windsteer::eval {

namespace fs = std::filesystem;
using env::format_double;
using Json = nlohmann::ordered_json;

namespace {

Json to_array(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd from_array(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  if (!out) throw IoError(path, "write failed");
}

}  // namespace

std::string summary_json(const EvalSummary& s, const std::string& label) {
  Json j;
  j["format"] = "windsteer-eval-summary";
  j["version"] = 1;
  j["label"] = label;
  j["box_id"] = s.box_id;
  j["delta_max"] = s.delta_max ? Json(*s.delta_max) : Json(nullptr);
  j["duration_s"] = s.duration_s;
  j["analysis_start_s"] = s.analysis_start_s;
  j["analysis_steps"] = s.analysis_steps;
  j["power_ratio"] = s.power_ratio;
  j["mean_power_agent_w"] = s.mean_power_agent;
  j["mean_power_baseline_w"] = s.mean_power_baseline;
  j["max_to_max_del_ratio"] = s.max_to_max_del_ratio;
  j["violation_fraction"] = s.violation_fraction;
  j["mean_delta"] = s.mean_delta;
  j["del_limit_band"] = {{"p05", s.limit_p05}, {"p95", s.limit_p95}};
  j["mean_yaw_deg"] = to_array(s.mean_yaw);
  j["mean_del_agent"] = to_array(s.mean_del_agent);
  j["mean_del_baseline"] = to_array(s.mean_del_baseline);
  j["max_del_agent"] = to_array(s.max_del_agent);
  j["max_del_baseline"] = to_array(s.max_del_baseline);
  j["rainflow_spearman"] = s.rainflow_spearman;
  return j.dump(2) + "\n";
}

void write_histogram_csv(const std::string& path, const DelHistogram& h) {
  std::string text = "controller,turbine,bin,lower,upper,count\n";
  const int bins = static_cast<int>(h.edges.size()) - 1;
  auto emit = [&](const char* name, const std::vector<std::vector<int>>& counts) {
    for (std::size_t i = 0; i < counts.size(); ++i)
      for (int b = 0; b < bins; ++b)
        text += std::string(name) + ',' + std::to_string(i) + ',' + std::to_string(b) + ',' +
                format_double(h.edges(b)) + ',' + format_double(h.edges(b + 1)) + ',' +
                std::to_string(counts[i][b]) + '\n';
  };
  emit("agent", h.agent);
  emit("baseline", h.baseline);
  write_text(path, text);
}

void export_results(const EvalReport& report, const std::string& dir, const std::string& label) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create report directory");
  env::write_episode_log((fs::path(dir) / "timeseries.csv").string(), report.records);
  write_histogram_csv((fs::path(dir) / "histograms.csv").string(), report.histogram);

  std::string rf = "t_end,controller,turbine,surrogate_del,rainflow_del\n";
  const auto& r = report.rainflow;
  for (std::size_t k = 0; k < r.t_end.size(); ++k)
    rf += format_double(r.t_end[k]) + ',' + (r.controller[k] == 0 ? "agent" : "baseline") + ',' +
          std::to_string(r.turbine[k]) + ',' + format_double(r.surrogate_del[k]) + ',' +
          format_double(r.rainflow_del[k]) + '\n';
  write_text((fs::path(dir) / "rainflow.csv").string(), rf);
  write_text((fs::path(dir) / "summary.json").string(), summary_json(report.summary, label));
}

EvalSummary read_summary(const std::string& path_or_dir, std::string* label) {
  std::string path = path_or_dir;
  if (fs::is_directory(path)) path = (fs::path(path) / "summary.json").string();
  std::ifstream in(path);
  if (!in) throw IoError(path, "summary not found");
  EvalSummary s;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != "windsteer-eval-summary") throw IoError(path, "not an evaluation summary");
    if (label) *label = j.at("label").get<std::string>();
    s.box_id = j.at("box_id");
    if (!j.at("delta_max").is_null()) s.delta_max = j.at("delta_max").get<double>();
    s.duration_s = j.at("duration_s");
    s.analysis_start_s = j.at("analysis_start_s");
    s.analysis_steps = j.at("analysis_steps");
    s.power_ratio = j.at("power_ratio");
    s.mean_power_agent = j.at("mean_power_agent_w");
    s.mean_power_baseline = j.at("mean_power_baseline_w");
    s.max_to_max_del_ratio = j.at("max_to_max_del_ratio");
    s.violation_fraction = j.at("violation_fraction");
    s.mean_delta = j.at("mean_delta");
    s.limit_p05 = j.at("del_limit_band").at("p05");
    s.limit_p95 = j.at("del_limit_band").at("p95");
    s.mean_yaw = from_array(j.at("mean_yaw_deg"));
    s.mean_del_agent = from_array(j.at("mean_del_agent"));
    s.mean_del_baseline = from_array(j.at("mean_del_baseline"));
    s.max_del_agent = from_array(j.at("max_del_agent"));
    s.max_del_baseline = from_array(j.at("max_del_baseline"));
    s.rainflow_spearman = j.at("rainflow_spearman");
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("malformed summary (") + e.what() + ")");
  }
  return s;
}

}  // namespace windsteer::eval
