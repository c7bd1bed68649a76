#pragma once

#include <filesystem>

#include <json.hpp>

#include "roam/pipeline.hpp"

namespace roam {

/// Flat key/value document. "preset" (if present) is applied first, every other key overrides
/// one parameter. Unknown keys and out-of-range values throw InputError.
RunConfig parse_config(const nlohmann::json& doc);
void apply_overrides(RunConfig& cfg, const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace roam
