#pragma once

#include <stdexcept>
#include <string>

#include "teamsim/agents/profiles.hpp"
#include "teamsim/rng.hpp"
#include "teamsim/world/scenario.hpp"

namespace teamsim::agents {

class AlreadyProcessed : public std::logic_error {
public:
    explicit AlreadyProcessed(const std::string& id) : std::logic_error("item '" + id + "' is already processed") {}
};

class NotProcessed : public std::logic_error {
public:
    explicit NotProcessed(const std::string& id) : std::logic_error("item '" + id + "' has not been processed") {}
};

class AlreadyCorrected : public std::logic_error {
public:
    explicit AlreadyCorrected(const std::string& id) : std::logic_error("item '" + id + "' is already corrected") {}
};

// Draws a label for `true_class`: itself with probability `accuracy`,
// otherwise uniform over the remaining labels.
std::string draw_label(const world::Scenario& scenario, const std::string& true_class, double accuracy, Lcg& rng);

// Assigned class via draw_label, then reliability = true +/- noise, clamped.
world::ProcessingRecord execute_process(const world::Scenario& scenario, const world::InfoItem& item,
                                        const ProcessingSkill& skill, const std::string& actor, Lcg& rng);

world::ProcessingRecord apply_correction(const world::InfoItem& item, const std::string& new_class,
                                         double assessed_reliability);

}  // namespace teamsim::agents
