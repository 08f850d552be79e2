#include "teamsim/agents/profiles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace teamsim::agents {
namespace {

void check_unit(double x, const char* what) {
    if (!(std::isfinite(x) && x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0, 1]");
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

void AgentProfile::validate() const {
    if (speed < 1) throw std::invalid_argument("agent speed must be >= 1");
    check_unit(accuracy, "agent accuracy");
    if (!(reliability_noise >= 0.0)) throw std::invalid_argument("agent reliability_noise must be >= 0");
}

void SimHumanProfile::validate() const {
    if (speed < 1) throw std::invalid_argument("human speed must be >= 1");
    check_unit(accuracy, "human accuracy");
    if (!(reliability_noise >= 0.0)) throw std::invalid_argument("human reliability_noise must be >= 0");
    check_unit(detection_prob, "detection_prob");
    check_unit(guidance_skill, "guidance_skill");
}

nlohmann::ordered_json to_json(const AgentProfile& p) {
    return {{"kind", "agent"},
            {"speed", p.speed},
            {"accuracy", p.accuracy},
            {"reliability_noise", p.reliability_noise},
            {"sensitive_policy", p.sensitive_policy == SensitivePolicy::access ? "access" : "skip"}};
}

nlohmann::ordered_json to_json(const SimHumanProfile& p) {
    return {{"kind", "sim_human"},
            {"speed", p.speed},
            {"accuracy", p.accuracy},
            {"reliability_noise", p.reliability_noise},
            {"detection_prob", p.detection_prob},
            {"guidance_skill", p.guidance_skill}};
}

AgentProfile agent_profile_from_json(const nlohmann::json& j) {
    AgentProfile p;
    maybe(j, "speed", p.speed);
    maybe(j, "accuracy", p.accuracy);
    maybe(j, "reliability_noise", p.reliability_noise);
    if (j.contains("sensitive_policy")) {
        std::string policy;
        maybe(j, "sensitive_policy", policy);
        if (policy == "access") {
            p.sensitive_policy = SensitivePolicy::access;
        } else if (policy == "skip") {
            p.sensitive_policy = SensitivePolicy::skip;
        } else {
            throw std::invalid_argument("sensitive_policy must be 'access' or 'skip'");
        }
    }
    p.validate();
    return p;
}

SimHumanProfile sim_human_profile_from_json(const nlohmann::json& j) {
    SimHumanProfile p;
    maybe(j, "speed", p.speed);
    maybe(j, "accuracy", p.accuracy);
    maybe(j, "reliability_noise", p.reliability_noise);
    maybe(j, "detection_prob", p.detection_prob);
    maybe(j, "guidance_skill", p.guidance_skill);
    p.validate();
    return p;
}

}  // namespace teamsim::agents
