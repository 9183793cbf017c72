#pragma once

#include <string>
#include <vector>

#include "windsteer/eval/evaluate.hpp"

namespace windsteer::eval {

struct CompareRow {
  std::string label;
  std::optional<double> delta_max;  // empty = unconstrained
  double power_ratio = 1.0;
  double max_to_max_del_ratio = 1.0;
  double violation_fraction = 0.0;
};

struct CompareCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CompareTable {
  std::uint64_t box_id = 0;
  std::vector<CompareRow> rows;  // sorted: unconstrained first, then decreasing delta_max
  std::vector<CompareCheck> checks;
};

/// Table of power and max-to-max DEL ratios per constraint level plus the
/// ordering and compliance checks. All summaries must share one box.
CompareTable compare_constraint_levels(const std::vector<EvalSummary>& summaries,
                                       const std::vector<std::string>& labels = {},
                                       double tolerance = 0.01, double slack = 0.05);

std::string compare_json(const CompareTable& table);

}  // namespace windsteer::eval
