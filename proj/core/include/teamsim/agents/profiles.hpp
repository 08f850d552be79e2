#pragma once

#include <nlohmann/json.hpp>

namespace teamsim::agents {

enum class SensitivePolicy { access, skip };

// Noise model shared by everyone who processes items.
struct ProcessingSkill {
    double accuracy = 1.0;           // probability the assigned class is the true class
    double reliability_noise = 0.0;  // half-width of reliability assessment noise
};

struct AgentProfile {
    int speed = 1;  // ticks per action
    double accuracy = 0.75;
    double reliability_noise = 0.15;
    SensitivePolicy sensitive_policy = SensitivePolicy::access;

    ProcessingSkill skill() const { return {accuracy, reliability_noise}; }
    void validate() const;  // throws std::invalid_argument

    friend bool operator==(const AgentProfile&, const AgentProfile&) = default;
};

struct SimHumanProfile {
    int speed = 8;
    double accuracy = 0.95;
    double reliability_noise = 0.05;
    double detection_prob = 0.5;  // chance of spotting an agent's mislabel while monitoring
    double guidance_skill = 0.7;  // chance a guidance pick is the signal-richest source

    ProcessingSkill skill() const { return {accuracy, reliability_noise}; }
    void validate() const;

    friend bool operator==(const SimHumanProfile&, const SimHumanProfile&) = default;
};

nlohmann::ordered_json to_json(const AgentProfile& p);
nlohmann::ordered_json to_json(const SimHumanProfile& p);

// Missing keys keep defaults; throws std::invalid_argument on bad values.
AgentProfile agent_profile_from_json(const nlohmann::json& j);
SimHumanProfile sim_human_profile_from_json(const nlohmann::json& j);

}  // namespace teamsim::agents
