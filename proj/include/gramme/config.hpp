#pragma once

#include <map>
#include <string>
#include <vector>

#include "gramme/harness.hpp"

namespace gramme {

/// Flat key=value config with [data], [model] and [train] sections.
/// Overrides use dotted keys (model.H=1) and are applied after the file.
struct RunConfig {
  ExperimentConfig experiment;
  double train_frac = 0.1;  // the single fraction used by the train verb
};

/// Keys accepted in config files and overrides.
const std::vector<std::string>& known_config_keys();

std::map<std::string, std::string> read_config_file(const std::string& path);

/// "section.key=value"; throws UsageError listing valid keys on a miss.
void apply_override(std::map<std::string, std::string>& values, const std::string& assignment);

RunConfig make_run_config(const std::map<std::string, std::string>& values);

/// Fully resolved config (defaults plus overrides), suitable to re-run.
std::string render_config(const RunConfig& config);

}  // namespace gramme
