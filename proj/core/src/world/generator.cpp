#include "teamsim/world/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "teamsim/rng.hpp"

namespace teamsim::world {
namespace {

constexpr std::array<std::string_view, 3> kDefaultHypotheses = {
    "preparations for an attack",
    "espionage",
    "false alarm",
};

constexpr std::array<std::string_view, 6> kOpenLabels = {
    "social media feed", "public camera stream", "news wire", "flight tracker", "local forum", "weather service",
};

bool unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void check(const ScenarioConfig& c) {
    if (c.n_hypotheses < 1) throw InvalidConfig("n_hypotheses must be >= 1");
    if (c.n_sources < 1) throw InvalidConfig("n_sources must be >= 1");
    if (c.items_per_source < 1) throw InvalidConfig("items_per_source must be >= 1");
    if (c.n_sensitive < 0 || c.n_linked < 0) throw InvalidConfig("source counts must be non-negative");
    if (c.n_sensitive + c.n_linked >= c.n_sources) {
        throw InvalidConfig("at least one open, discovered source is required");
    }
    if (!unit(c.p_signal)) throw InvalidConfig("p_signal outside [0, 1]");
    if (!unit(c.signal_variation)) throw InvalidConfig("signal_variation outside [0, 1]");
    if (!unit(c.reliability_mean)) throw InvalidConfig("reliability_mean outside [0, 1]");
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    check(config);
    Lcg rng(seed);

    Scenario s;
    s.description = config.description;
    s.seed = seed;
    s.generator = config.params;

    for (int i = 0; i < config.n_hypotheses; ++i) {
        Hypothesis h;
        h.id = "H" + std::to_string(i + 1);
        h.label = (config.n_hypotheses == 3) ? std::string(kDefaultHypotheses[static_cast<std::size_t>(i)])
                                             : "hypothesis " + std::to_string(i + 1);
        s.hypotheses.push_back(std::move(h));
    }
    s.ground_truth = s.hypotheses[rng.below(s.hypotheses.size())].id;

    const int n_open = config.n_sources - config.n_sensitive - config.n_linked;
    const double swing = config.signal_variation * std::min(config.p_signal, 1.0 - config.p_signal);
    for (int i = 0; i < config.n_sources; ++i) {
        Source src;
        src.id = "S" + std::to_string(i + 1);
        src.n_items = config.items_per_source;
        src.reliability_mean = config.reliability_mean;
        src.signal_rate = clamp01(config.p_signal + swing * (2.0 * rng.uniform01() - 1.0));
        if (i < n_open) {
            src.label = std::string(kOpenLabels[static_cast<std::size_t>(i) % kOpenLabels.size()]);
        } else if (i < n_open + config.n_sensitive) {
            src.sensitivity = Sensitivity::sensitive;
            src.label = "restricted intercept " + std::to_string(i - n_open + 1);
        } else {
            src.discovered = false;
            src.linked_question = s.hypotheses[rng.below(s.hypotheses.size())].id;
            src.label = "follow-up lead " + std::to_string(i - n_open - config.n_sensitive + 1);
        }
        s.sources.push_back(std::move(src));
    }

    s.validate();
    return s;
}

}  // namespace teamsim::world
