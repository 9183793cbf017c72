#include "windsteer/eval/compare.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "windsteer/env/episode_log.hpp"
#include "windsteer/errors.hpp"

namespace windsteer::eval {

namespace {

std::string level_name(const std::optional<double>& d) {
  return d ? "delta_max=" + env::format_double(*d) : std::string("unconstrained");
}

const CompareRow* find_level(const CompareTable& t, std::optional<double> d) {
  for (const auto& r : t.rows) {
    if (!d && !r.delta_max) return &r;
    if (d && r.delta_max && std::abs(*r.delta_max - *d) < 1e-9) return &r;
  }
  return nullptr;
}

}  // namespace

CompareTable compare_constraint_levels(const std::vector<EvalSummary>& summaries,
                                       const std::vector<std::string>& labels, double tolerance,
                                       double slack) {
  if (summaries.empty()) throw ConfigError("reports", "nothing to compare");
  CompareTable t;
  t.box_id = summaries.front().box_id;
  for (std::size_t k = 0; k < summaries.size(); ++k) {
    const auto& s = summaries[k];
    if (s.box_id != t.box_id)
      throw ConfigError("reports", "reports come from different boxes (" +
                                       std::to_string(t.box_id) + " and " +
                                       std::to_string(s.box_id) + ")");
    CompareRow row;
    row.label = k < labels.size() && !labels[k].empty() ? labels[k] : level_name(s.delta_max);
    row.delta_max = s.delta_max;
    row.power_ratio = s.power_ratio;
    row.max_to_max_del_ratio = s.max_to_max_del_ratio;
    row.violation_fraction = s.violation_fraction;
    t.rows.push_back(row);
  }
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const CompareRow& a, const CompareRow& b) {
    if (!a.delta_max || !b.delta_max) return !a.delta_max && b.delta_max;
    return *a.delta_max > *b.delta_max;
  });

  auto add = [&](std::string name, bool ok, std::string detail) {
    t.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  if (const auto* unc = find_level(t, std::nullopt)) {
    for (const auto& r : t.rows) {
      if (!r.delta_max) continue;
      add("unconstrained_power_ge_" + level_name(r.delta_max),
          unc->power_ratio >= r.power_ratio - tolerance,
          env::format_double(unc->power_ratio) + " vs " + env::format_double(r.power_ratio));
    }
  }
  const auto* r30 = find_level(t, 0.3);
  const auto* r20 = find_level(t, 0.2);
  if (r30 && r20)
    add("power_0.3_ge_0.2", r30->power_ratio >= r20->power_ratio - tolerance,
        env::format_double(r30->power_ratio) + " vs " + env::format_double(r20->power_ratio));
  for (const auto* r : {r30, r20})
    if (r)
      add("max_to_max_within_" + level_name(r->delta_max),
          r->max_to_max_del_ratio <= 1.0 + *r->delta_max + slack,
          env::format_double(r->max_to_max_del_ratio) + " <= " +
              env::format_double(1.0 + *r->delta_max + slack));
  return t;
}

std::string compare_json(const CompareTable& t) {
  nlohmann::ordered_json j;
  j["format"] = "windsteer-compare";
  j["version"] = 1;
  j["box_id"] = t.box_id;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows)
    j["rows"].push_back({{"label", r.label},
                         {"delta_max", r.delta_max ? nlohmann::ordered_json(*r.delta_max)
                                                   : nlohmann::ordered_json(nullptr)},
                         {"power_ratio", r.power_ratio},
                         {"max_to_max_del_ratio", r.max_to_max_del_ratio},
                         {"violation_fraction", r.violation_fraction}});
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : t.checks)
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j.dump(2) + "\n";
}

}  // namespace windsteer::eval
