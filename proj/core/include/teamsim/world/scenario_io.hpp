#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "teamsim/world/generator.hpp"
#include "teamsim/world/scenario.hpp"

namespace teamsim::world {

// Scenario file format. Throws InvalidConfig on schema or invariant errors.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

// Partial objects are allowed; missing keys keep their defaults.
ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& c);

}  // namespace teamsim::world
