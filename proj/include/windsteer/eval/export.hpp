#pragma once

#include <string>

#include "windsteer/eval/evaluate.hpp"

namespace windsteer::eval {

/// Writes timeseries.csv, histograms.csv, rainflow.csv and summary.json into
/// `dir`. Output is byte-stable for identical reports.
void export_results(const EvalReport& report, const std::string& dir,
                    const std::string& label = "");

std::string summary_json(const EvalSummary& summary, const std::string& label);
void write_histogram_csv(const std::string& path, const DelHistogram& histogram);

/// Parses a summary.json written by export_results. Accepts the file or its directory.
EvalSummary read_summary(const std::string& path, std::string* label = nullptr);

}  // namespace windsteer::eval
