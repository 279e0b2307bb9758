#pragma once

#include <json.hpp>

#include <string>

#include "logonet/harness.hpp"

namespace logonet {

// `key = value` lines: strings, integers, floats, booleans, flat arrays,
// and # comments — the slice of TOML these configs actually use
nlohmann::json parse_toml_subset(const std::string& text);

// dispatches on extension (.json/.toml), sniffs a leading '{' otherwise
nlohmann::json load_config_file(const std::string& path);

struct SweepFileConfig {
    SweepConfig sweep;
    std::string data;  // returns CSV consumed by the sweep
};

// keys mirror the SweepConfig / ResamplePlan field names; unknown keys
// are rejected so typos fail loudly
SweepFileConfig sweep_config_from_json(const nlohmann::json& doc);

}  // namespace logonet
