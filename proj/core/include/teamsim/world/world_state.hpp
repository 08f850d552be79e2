#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "teamsim/rng.hpp"
#include "teamsim/world/scenario.hpp"

namespace teamsim::world {

// Draws the item at position `index` of `source`. Scripted sources return the
// hand-authored item; otherwise the class is the ground truth with
// probability signal_rate (else uniform over the other hypotheses and noise)
// and reliability is reliability_mean +/- reliability_spread, clamped.
InfoItem sample_item(const Scenario& scenario, const Source& source, int index, Lcg& rng);

struct SourceProgress {
    bool discovered = false;
    int sampled = 0;
    Lcg rng;

    friend bool operator==(const SourceProgress&, const SourceProgress&) = default;
};

// Per-session mutable view of a scenario's sources. Every source owns an
// independent generator stream derived from the session seed, so the k-th item
// of a source is the same under every team pattern.
class WorldState {
public:
    WorldState(std::shared_ptr<const Scenario> scenario, std::uint64_t seed);

    // Throws UnknownSource, SourceUndiscovered or SourceExhausted.
    InfoItem sample_item(std::string_view source_id);

    bool discovered(std::string_view source_id) const;
    void discover(std::string_view source_id);
    int remaining(std::string_view source_id) const;
    bool exhausted(std::string_view source_id) const { return remaining(source_id) == 0; }

    const Scenario& scenario() const { return *scenario_; }

    friend bool operator==(const WorldState&, const WorldState&) = default;

private:
    const SourceProgress& progress(std::string_view source_id) const;
    SourceProgress& progress(std::string_view source_id);

    std::shared_ptr<const Scenario> scenario_;
    std::vector<SourceProgress> progress_;
};

struct InformationQuestion {
    std::string hypothesis;
    int raised_at_tick = 0;
    std::vector<std::string> unlocked_sources;

    friend bool operator==(const InformationQuestion&, const InformationQuestion&) = default;
};

// Raises at most one question per hypothesis: once the processed-evidence
// tally for a hypothesis reaches q_threshold and it has linked undiscovered
// sources, those sources are discovered.
class QuestionTracker {
public:
    std::optional<InformationQuestion> maybe_raise(const std::map<std::string, int>& tallies,
                                                   const std::string& hypothesis, int q_threshold,
                                                   WorldState& world, int tick);

    bool raised(const std::string& hypothesis) const { return raised_.contains(hypothesis); }

    friend bool operator==(const QuestionTracker&, const QuestionTracker&) = default;

private:
    std::set<std::string> raised_;
};

// Processed items per assigned hypothesis (noise excluded).
std::map<std::string, int> evidence_tallies(std::span<const InfoItem> items);

}  // namespace teamsim::world
