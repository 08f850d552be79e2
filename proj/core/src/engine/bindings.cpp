#include "teamsim/engine/bindings.hpp"

#include <stdexcept>

namespace teamsim::engine {

Bindings bindings_from_json(const nlohmann::json& j) {
    if (j.is_null()) return {};
    if (!j.is_object()) throw std::invalid_argument("bindings must be a JSON object");
    Bindings out;
    for (const auto& [actor, spec] : j.items()) {
        if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
            throw std::invalid_argument("binding for '" + actor + "' needs a string 'kind'");
        }
        const auto kind = spec.at("kind").get<std::string>();
        if (kind == "agent") {
            out.emplace(actor, agents::agent_profile_from_json(spec));
        } else if (kind == "sim_human") {
            out.emplace(actor, agents::sim_human_profile_from_json(spec));
        } else if (kind == "live") {
            out.emplace(actor, LiveHuman{});
        } else {
            throw std::invalid_argument("binding kind must be agent, sim_human or live; got '" + kind + "'");
        }
    }
    return out;
}

nlohmann::ordered_json to_json(const Bindings& b) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [actor, binding] : b) {
        if (const auto* a = std::get_if<agents::AgentProfile>(&binding)) {
            j[actor] = agents::to_json(*a);
        } else if (const auto* h = std::get_if<agents::SimHumanProfile>(&binding)) {
            j[actor] = agents::to_json(*h);
        } else {
            j[actor] = {{"kind", "live"}};
        }
    }
    return j;
}

Bindings default_bindings(const tdp::Pattern& pattern, const Bindings& overrides) {
    Bindings out = overrides;
    for (const auto& actor : pattern.actors) {
        if (out.contains(actor.id)) continue;
        if (actor.actor_class == tdp::ActorClass::agent) {
            out.emplace(actor.id, agents::AgentProfile{});
        } else {
            out.emplace(actor.id, agents::SimHumanProfile{});
        }
    }
    return out;
}

}  // namespace teamsim::engine
