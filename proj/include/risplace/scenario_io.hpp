// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "risplace/scenario.hpp"

namespace risplace {

/// Parses and validates a JSON scenario. Syntax errors raise ParseError with
/// the line and column; schema and invariant violations raise
/// ValidationError whose field() is the key path, e.g. "obstacles[2].radius_m".
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes with the same schema; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& sc);

}  // namespace risplace
