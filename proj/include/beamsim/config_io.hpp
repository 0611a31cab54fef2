#pragma once

#include <cstdint>
#include <string>

#include "beamsim/params.hpp"

namespace beamsim {

/// Parses the flat "key = value" config text ('#' starts a comment; angles
/// carry a _deg suffix and are converted to radians on entry). Unknown keys
/// throw. The result is validated.
WorldConfig parse_config(const std::string& text);

/// Reads and parses a config file; empty file yields the defaults.
WorldConfig load_config(const std::string& path);

/// Serializes every key with unit comments; parse_config(serialize_config(c))
/// reproduces c exactly (doubles are written round-trip precise).
std::string serialize_config(const WorldConfig& config);

/// Applies one "key=value" override (same key set as the file format).
/// Does not re-validate; callers validate after the last override.
void apply_override(WorldConfig& config, const std::string& assignment);

/// FNV-1a hash of the serialized config, for run summaries.
std::string config_hash(const WorldConfig& config);

/// Shortest decimal string that parses back to exactly x (used for all
/// numeric file output).
std::string format_double(double x);

}  // namespace beamsim
