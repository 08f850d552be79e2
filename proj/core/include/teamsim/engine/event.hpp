#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace teamsim::engine {

// Actor name used for engine-generated events.
inline constexpr std::string_view kSystemActor = "system";

struct SimEvent {
    int tick = 0;
    std::int64_t seq = 0;  // session-wide, gap-free
    std::string actor;
    std::string kind;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();
    nlohmann::ordered_json outcome = nlohmann::ordered_json::object();

    friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

// One JSON object per event with keys in the order tick, seq, actor, kind,
// payload, outcome.
nlohmann::ordered_json to_json(const SimEvent& e);
SimEvent event_from_json(const nlohmann::ordered_json& j);

// JSON-lines, LF-terminated.
std::string serialize_log(const std::vector<SimEvent>& log);
std::vector<SimEvent> parse_log(std::string_view text);  // throws std::invalid_argument

}  // namespace teamsim::engine
