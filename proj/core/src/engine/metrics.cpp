#include "teamsim/engine/metrics.hpp"

namespace teamsim::engine {

nlohmann::ordered_json to_json(const Metrics& m, bool reveal_truth) {
    nlohmann::ordered_json j;
    j["decided"] = m.decided;
    j["ticks_to_decision"] = m.ticks_to_decision ? nlohmann::ordered_json(*m.ticks_to_decision) : nlohmann::ordered_json(nullptr);
    j["chosen"] = m.chosen ? nlohmann::ordered_json(*m.chosen) : nlohmann::ordered_json(nullptr);
    if (reveal_truth) {
        j["correct"] = m.correct ? nlohmann::ordered_json(*m.correct) : nlohmann::ordered_json(nullptr);
        j["mislabel_rate"] = m.mislabel_rate_final;
    }
    j["violations"] = m.violations;
    j["corrections_issued"] = m.corrections_issued;
    auto& w = j["workload"] = nlohmann::ordered_json::object();
    for (const auto& [actor, load] : m.workload) {
        w[actor] = {{"direct_actions", load.direct_actions}, {"indirect_ticks", load.indirect_ticks}};
    }
    j["sources_accessed"] = m.sources_accessed;
    return j;
}

}  // namespace teamsim::engine
