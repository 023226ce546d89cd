#pragma once

#include <string>
#include <string_view>

#include "fsqkd/harness.hpp"
#include "fsqkd/linkbudget.hpp"

namespace fsqkd {

/// Config files are JSON objects carrying "schema_version": 1. Every other key
/// is optional and falls back to the struct default; unknown keys are rejected.
/// All parse errors throw ParameterError.
inline constexpr int kConfigSchemaVersion = 1;

ScenarioConfig parse_scenario(std::string_view text);
std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig load_scenario(const std::string& path);

link::LinkParams parse_link_params(std::string_view text);
std::string link_params_to_json(const link::LinkParams& params);
link::LinkParams load_link_params(const std::string& path);

/// Whole file as a string; throws ParameterError when unreadable.
std::string read_text_file(const std::string& path);

}  // namespace fsqkd
