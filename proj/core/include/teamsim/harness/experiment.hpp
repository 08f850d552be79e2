#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "teamsim/engine/bindings.hpp"
#include "teamsim/engine/metrics.hpp"
#include "teamsim/tdp/pattern.hpp"
#include "teamsim/world/generator.hpp"
#include "teamsim/world/scenario.hpp"

namespace teamsim::harness {

class InvalidExperiment : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PatternEntry {
    std::string label;  // CSV pattern column; defaults to the pattern name
    tdp::Pattern pattern;
    engine::Bindings bindings;  // complete: every actor bound
};

struct ExperimentConfig {
    // A generator config draws a fresh scenario per seed; a fixed scenario is
    // shared by every seed and only the session streams change.
    std::variant<world::ScenarioConfig, world::Scenario> scenario = world::ScenarioConfig{};
    std::vector<PatternEntry> patterns;
    std::vector<std::uint64_t> seeds;
    int max_ticks = 5000;
    std::optional<std::filesystem::path> out;

    void validate() const;  // throws InvalidExperiment
};

// A preset name, or a path to a .tdp file resolved against `base_dir`.
tdp::Pattern resolve_pattern(const std::string& name_or_file, const std::filesystem::path& base_dir = {});

// Relative file references resolve against `base_dir`. Throws
// InvalidExperiment for schema problems; pattern errors propagate.
ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment(const std::filesystem::path& path);

struct ResultRow {
    std::string pattern;
    std::uint64_t seed = 0;
    engine::Metrics metrics;
    int human_direct = 0;
    int human_indirect = 0;
    int agent_direct = 0;
};

struct ResultsTable {
    std::vector<std::string> patterns;  // declaration order
    std::vector<ResultRow> rows;        // ordered by (pattern, seed)
};

world::Scenario scenario_for_seed(const ExperimentConfig& config, std::uint64_t seed);

// Runs every (pattern, seed) pair. Patterns are compiled first so lint
// failures surface before any session runs. `threads` > 1 runs seeds
// concurrently without changing the result order.
ResultsTable run_experiment(const ExperimentConfig& config, unsigned threads = 1);

}  // namespace teamsim::harness
