// SPDX-License-Identifier: Apache-2.0
//
// JSON configuration and layout files. See docs/config.md for the schema.
#pragma once

#include <atsss/sim_engine.hpp>

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace atsss::config {

/// Parses and validates a config file; throws ConfigError listing every problem,
/// IoError if the file (or a referenced layout/request file) cannot be read.
sim::SimConfig load_config(const std::filesystem::path& path);

/// Same, from already-parsed JSON. Relative file references resolve against base_dir.
sim::SimConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Parses without the semantic checks (used by validate-config to report
/// everything at once). Structural errors are appended to `violations`.
sim::SimConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                            std::vector<std::string>& violations);

radio::ScenarioLayout layout_from_json(const nlohmann::json& j, std::vector<std::string>& violations);
radio::ScenarioLayout load_layout(const std::filesystem::path& path);

steering::SteeringPolicy policy_from_json(const nlohmann::json& j, const std::string& prefix,
                                          std::vector<std::string>& violations);
nlohmann::json policy_to_json(const steering::SteeringPolicy& p);

sim::SweepGrid sweep_grid_from_json(const nlohmann::json& j, std::vector<std::string>& violations);

/// Fully resolved config (layout inlined, requests omitted) in canonical form.
nlohmann::json to_json(const sim::SimConfig& cfg);
nlohmann::json layout_to_json(const radio::ScenarioLayout& layout);

/// SHA-256 (hex) of the canonical JSON plus the request stream, if replayed.
std::string config_hash(const sim::SimConfig& cfg);

/// SHA-256 (hex) of a byte string / file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace atsss::config
