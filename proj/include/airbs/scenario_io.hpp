#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "airbs/simulator.hpp"

namespace airbs {

/// Parses a scenario document. Missing keys take the Scenario defaults;
/// unknown keys are rejected so typos do not silently fall back.
Scenario parse_scenario(std::string_view json_text);

/// Full effective scenario, every key written out. Parsing the result gives
/// back an equal Scenario.
std::string scenario_to_json(const Scenario& s);

/// Throws IoError when the file cannot be read, InvalidArgument when malformed.
Scenario load_scenario(const std::filesystem::path& path);

/// Text of the built-in 7 km x 7 km picocell scenario (scenarios/picocell_7km.json).
std::string_view reference_scenario_json();
Scenario reference_scenario();

}  // namespace airbs
