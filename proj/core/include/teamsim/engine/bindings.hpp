#pragma once

#include <map>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "teamsim/agents/profiles.hpp"
#include "teamsim/tdp/pattern.hpp"

namespace teamsim::engine {

// A human played by a person through the session service.
struct LiveHuman {
    friend bool operator==(const LiveHuman&, const LiveHuman&) = default;
};

using ActorBinding = std::variant<agents::AgentProfile, agents::SimHumanProfile, LiveHuman>;
using Bindings = std::map<std::string, ActorBinding>;

// {"h": {"kind": "sim_human", ...}, "a": {"kind": "agent", ...}, "x": {"kind": "live"}}
Bindings bindings_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Bindings& b);

// Default profile for every actor of `pattern` not already present in `overrides`.
Bindings default_bindings(const tdp::Pattern& pattern, const Bindings& overrides = {});

}  // namespace teamsim::engine
