#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "teamsim/agents/action.hpp"
#include "teamsim/agents/profiles.hpp"
#include "teamsim/rng.hpp"
#include "teamsim/tdp/pattern.hpp"
#include "teamsim/world/scenario.hpp"

namespace teamsim::agents {

struct SourceView {
    std::string id;
    world::Sensitivity sensitivity = world::Sensitivity::open;
    bool discovered = false;
    bool granted = false;
    bool denied = false;
    bool pending = false;
    int remaining = 0;
    double signal_rate = 0.0;

    bool sensitive() const { return sensitivity == world::Sensitivity::sensitive; }
};

struct AgentState {
    std::optional<std::string> guided_source;
    friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct HumanState {
    std::set<std::string> reviewed;  // agent-processed items already checked for mistakes
    friend bool operator==(const HumanState&, const HumanState&) = default;
};

// What an actor can see of the session when planning.
struct TeamView {
    const world::Scenario* scenario = nullptr;
    std::vector<SourceView> sources;        // declaration order
    std::vector<std::string> directed;      // sources the team chose to work first
    std::span<const world::InfoItem> items;  // sampling order
    std::set<std::string> agent_ids;
    std::map<std::string, AgentState> agent_states;
    // Some human may authorize access in the current pattern state.
    bool authorizer_present = false;

    const SourceView* find_source(std::string_view id) const;
};

struct Permissions {
    std::map<std::string, tdp::Work> work;  // by task
    tdp::InterventionSet interventions;

    tdp::Work work_on(std::string_view task) const;
    bool direct(std::string_view task) const { return work_on(task) == tdp::Work::direct; }
    bool may(tdp::Intervention i) const { return interventions.contains(i); }
};

// Next source a collector would take: guided source first, then the team's
// directed sources, then declaration order. Sensitive sources without a grant
// qualify only when `skip_sensitive` is false.
std::optional<std::string> collect_target(const TeamView& view, const AgentState& state, bool skip_sensitive);

// An agent defers on sensitive sources when its policy says so or when the
// pattern puts a human in charge of authorizations.
bool defers_on_sensitive(const TeamView& view, const AgentProfile& profile);

Action plan_agent_action(const std::string& actor, const TeamView& view, const AgentProfile& profile,
                         const AgentState& state, const Permissions& permitted, Lcg& rng);

// Mutates `state` (items reviewed for mistakes) and draws from `rng`.
Action plan_sim_human_action(const std::string& actor, const TeamView& view, const SimHumanProfile& profile,
                             HumanState& state, const Permissions& permitted, Lcg& rng);

// Throws world::UnknownSource for unknown ids and world::SourceUndiscovered
// for sources the team has not found yet.
AgentState apply_guidance(const AgentState& state, const TeamView& view, const std::string& source_id);

}  // namespace teamsim::agents
