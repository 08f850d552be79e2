#include "teamsim/agents/processing.hpp"

#include <algorithm>

namespace teamsim::agents {

std::string draw_label(const world::Scenario& scenario, const std::string& true_class, double accuracy, Lcg& rng) {
    if (rng.bernoulli(accuracy)) return true_class;
    auto labels = scenario.class_labels();
    std::erase(labels, true_class);
    if (labels.empty()) return true_class;
    return labels[rng.below(labels.size())];
}

world::ProcessingRecord execute_process(const world::Scenario& scenario, const world::InfoItem& item,
                                        const ProcessingSkill& skill, const std::string& actor, Lcg& rng) {
    if (item.processed()) throw AlreadyProcessed(item.id);
    world::ProcessingRecord rec;
    rec.assigned_class = draw_label(scenario, item.true_class, skill.accuracy, rng);
    rec.assessed_reliability =
        clamp01(item.true_reliability + rng.uniform(-skill.reliability_noise, skill.reliability_noise));
    rec.processed_by = actor;
    return rec;
}

world::ProcessingRecord apply_correction(const world::InfoItem& item, const std::string& new_class,
                                         double assessed_reliability) {
    if (!item.processing) throw NotProcessed(item.id);
    if (item.processing->corrected) throw AlreadyCorrected(item.id);
    world::ProcessingRecord rec = *item.processing;
    rec.assigned_class = new_class;
    rec.assessed_reliability = assessed_reliability;
    rec.corrected = true;
    return rec;
}

}  // namespace teamsim::agents
