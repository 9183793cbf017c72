#include "windsteer/env/episode_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "windsteer/errors.hpp"

namespace windsteer::env {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

const char* const kGroups[] = {"yaw", "power", "baseline_power", "del_agent", "del_baseline"};

const Eigen::VectorXd& group(const StepRecord& r, int g) {
  switch (g) {
    case 0: return r.yaw;
    case 1: return r.power;
    case 2: return r.baseline_power;
    case 3: return r.del_agent;
    default: return r.del_baseline;
  }
}

Eigen::VectorXd& group(StepRecord& r, int g) {
  return const_cast<Eigen::VectorXd&>(group(static_cast<const StepRecord&>(r), g));
}

}  // namespace

void write_episode_log(std::ostream& out, const std::vector<StepRecord>& records) {
  const int n = records.empty() ? 0 : static_cast<int>(records.front().yaw.size());
  out << "t";
  for (int g = 0; g < 5; ++g)
    for (int i = 0; i < n; ++i) out << ',' << kGroups[g] << '_' << i;
  out << ",r_power,r_constraint,r_total,delta\n";
  for (const auto& r : records) {
    out << format_double(r.t);
    for (int g = 0; g < 5; ++g)
      for (int i = 0; i < n; ++i) out << ',' << format_double(group(r, g)(i));
    out << ',' << format_double(r.reward.r_power) << ',' << format_double(r.reward.r_constraint)
        << ',' << format_double(r.reward.r_total) << ',' << format_double(r.reward.delta) << '\n';
  }
}

void write_episode_log(const std::string& path, const std::vector<StepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  write_episode_log(out, records);
  if (!out) throw IoError(path, "write failed");
}

std::vector<StepRecord> read_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "empty episode log");
  int columns = 1;
  for (char c : line) columns += c == ',';
  const int n = (columns - 5) / 5;
  if (n < 1 || 5 * n + 5 != columns) throw IoError(path, "unexpected episode log header");

  std::vector<StepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (static_cast<int>(v.size()) != columns) throw IoError(path, "ragged episode log row");
    StepRecord r;
    r.t = v[0];
    for (int g = 0; g < 5; ++g) {
      group(r, g).resize(n);
      for (int i = 0; i < n; ++i) group(r, g)(i) = v[1 + g * n + i];
    }
    r.reward.r_power = v[1 + 5 * n];
    r.reward.r_constraint = v[2 + 5 * n];
    r.reward.r_total = v[3 + 5 * n];
    r.reward.delta = v[4 + 5 * n];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace windsteer::env
