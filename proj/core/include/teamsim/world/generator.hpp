#pragma once

#include <cstdint>
#include <string>

#include "teamsim/world/scenario.hpp"

namespace teamsim::world {

struct ScenarioConfig {
    std::string description = "An unknown drone was spotted near a military terrain.";
    int n_hypotheses = 3;
    int n_sources = 6;
    int n_sensitive = 1;
    int n_linked = 2;  // undiscovered sources unlocked by information questions
    int items_per_source = 10;
    double p_signal = 0.6;
    // Per-source signal rates spread around p_signal by up to
    // signal_variation * min(p_signal, 1 - p_signal).
    double signal_variation = 0.75;
    double reliability_mean = 0.7;
    GeneratorParams params;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Deterministic in (config, seed). Source order: open discovered sources,
// then sensitive ones, then question-linked undiscovered ones.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace teamsim::world
