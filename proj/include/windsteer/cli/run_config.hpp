#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "windsteer/env/config.hpp"
#include "windsteer/eval/evaluate.hpp"
#include "windsteer/eval/grid_search.hpp"
#include "windsteer/isac/trainer.hpp"
#include "windsteer/loads/surrogate.hpp"

namespace windsteer::cli {

/// Everything a run can configure. Defaults reproduce the reference scenario.
struct RunConfig {
  env::EnvConfig env;
  isac::TrainConfig train;
  loads::SurrogateSampleSpec surrogate;
  eval::EvalOptions evaluation;
  eval::GridSearchOptions grid;
  std::uint64_t eval_box_id = 61;
  bool eval_sample_actions = false;
};

/// Parses TOML text with sections [farm], [inflow], [constraint], [training],
/// [paths] and the optional [env], [turbulence], [oracle], [surrogate],
/// [evaluation], [grid]. Unknown sections or keys are rejected.
RunConfig parse_run_config(const std::string& text, const std::string& source = "config");
/// Defaults when `path` is empty.
RunConfig load_run_config(const std::string& path);

/// Resolved configuration as canonical JSON (sorted keys), used for hashing
/// and for the run manifest.
std::string resolved_config_json(const RunConfig& cfg);

void validate(const RunConfig& cfg);

}  // namespace windsteer::cli
