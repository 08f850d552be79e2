#include "teamsim/world/world_state.hpp"

#include <algorithm>
#include <utility>

namespace teamsim::world {

InfoItem sample_item(const Scenario& scenario, const Source& source, int index, Lcg& rng) {
    if (auto it = scenario.scripted_items.find(source.id); it != scenario.scripted_items.end()) {
        InfoItem item = it->second.at(static_cast<std::size_t>(index));
        item.processing.reset();
        return item;
    }
    InfoItem item;
    item.id = source.id + "-" + std::to_string(index + 1);
    item.source_id = source.id;
    if (rng.bernoulli(source.signal_rate)) {
        item.true_class = scenario.ground_truth;
    } else {
        auto labels = scenario.class_labels();
        std::erase(labels, scenario.ground_truth);
        item.true_class = labels[rng.below(labels.size())];
    }
    const double spread = scenario.generator.reliability_spread;
    item.true_reliability = clamp01(source.reliability_mean + rng.uniform(-spread, spread));
    return item;
}

WorldState::WorldState(std::shared_ptr<const Scenario> scenario, std::uint64_t seed) : scenario_(std::move(scenario)) {
    progress_.reserve(scenario_->sources.size());
    for (std::size_t i = 0; i < scenario_->sources.size(); ++i) {
        progress_.push_back({scenario_->sources[i].discovered, 0, Lcg(mix_seed(seed, i))});
    }
}

const SourceProgress& WorldState::progress(std::string_view source_id) const {
    auto idx = scenario_->source_index(source_id);
    if (!idx) throw UnknownSource(std::string(source_id));
    return progress_[*idx];
}

SourceProgress& WorldState::progress(std::string_view source_id) {
    return const_cast<SourceProgress&>(std::as_const(*this).progress(source_id));
}

InfoItem WorldState::sample_item(std::string_view source_id) {
    auto& prog = progress(source_id);
    const Source& src = scenario_->source(source_id);
    if (!prog.discovered) throw SourceUndiscovered(src.id);
    if (prog.sampled >= src.n_items) throw SourceExhausted(src.id);
    InfoItem item = world::sample_item(*scenario_, src, prog.sampled, prog.rng);
    ++prog.sampled;
    return item;
}

bool WorldState::discovered(std::string_view source_id) const { return progress(source_id).discovered; }

void WorldState::discover(std::string_view source_id) { progress(source_id).discovered = true; }

int WorldState::remaining(std::string_view source_id) const {
    return scenario_->source(source_id).n_items - progress(source_id).sampled;
}

std::optional<InformationQuestion> QuestionTracker::maybe_raise(const std::map<std::string, int>& tallies,
                                                                const std::string& hypothesis, int q_threshold,
                                                                WorldState& world, int tick) {
    if (raised_.contains(hypothesis)) return std::nullopt;
    auto it = tallies.find(hypothesis);
    if (it == tallies.end() || it->second < q_threshold) return std::nullopt;

    InformationQuestion q{hypothesis, tick, {}};
    for (const auto& s : world.scenario().sources) {
        if (s.linked_question == hypothesis && !world.discovered(s.id)) q.unlocked_sources.push_back(s.id);
    }
    if (q.unlocked_sources.empty()) return std::nullopt;
    for (const auto& id : q.unlocked_sources) world.discover(id);
    raised_.insert(hypothesis);
    return q;
}

std::map<std::string, int> evidence_tallies(std::span<const InfoItem> items) {
    std::map<std::string, int> out;
    for (const auto& item : items) {
        if (item.processing && item.processing->assigned_class != kNoise) ++out[item.processing->assigned_class];
    }
    return out;
}

}  // namespace teamsim::world
