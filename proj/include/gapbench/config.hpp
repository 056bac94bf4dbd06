#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace gapbench {

// Minimal TOML subset: [table] headers, key = value with strings, numbers,
// booleans, and flat arrays, plus # comments. Enough for experiment configs;
// JSON configs are accepted verbatim.
nlohmann::json parse_toml_lite(const std::string& text);

// Loads .toml or .json by extension.
nlohmann::json load_config_file(const std::string& path);

// Canonical serialization (sorted keys, shortest round-trip numbers) and its
// FNV-1a fingerprint, embedded in every report.
std::string canonical_json(const nlohmann::json& j);
std::string config_hash(const nlohmann::json& j);

}  // namespace gapbench
