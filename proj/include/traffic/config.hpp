// JSON (de)serialization of scenario and analysis configuration, with
// defaults and validation shared by the CLI and the presets.
#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "traffic/ews.hpp"
#include "traffic/simulate.hpp"
#include "traffic/types.hpp"

namespace traffic::config {

using nlohmann::json;

json to_json(const ModelParams& p);
json to_json(const sim::ScenarioConfig& s);
json to_json(const ews::PipelineConfig& c);

ModelParams params_from_json(const json& j);
sim::ScenarioConfig scenario_from_json(const json& j);
ews::PipelineConfig ews_from_json(const json& j);

// Reads and parses a JSON file; throws ValidationError with the parse
// location on malformed input.
json load_file(const std::string& path);

// Fully populated default configuration documents.
json default_scenario();
json default_ews();

}  // namespace traffic::config
