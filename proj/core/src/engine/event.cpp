#include "teamsim/engine/event.hpp"

#include <stdexcept>

namespace teamsim::engine {

nlohmann::ordered_json to_json(const SimEvent& e) {
    nlohmann::ordered_json j;
    j["tick"] = e.tick;
    j["seq"] = e.seq;
    j["actor"] = e.actor;
    j["kind"] = e.kind;
    j["payload"] = e.payload;
    j["outcome"] = e.outcome;
    return j;
}

SimEvent event_from_json(const nlohmann::ordered_json& j) {
    try {
        SimEvent e;
        e.tick = j.at("tick").get<int>();
        e.seq = j.at("seq").get<std::int64_t>();
        e.actor = j.at("actor").get<std::string>();
        e.kind = j.at("kind").get<std::string>();
        e.payload = j.at("payload");
        e.outcome = j.at("outcome");
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw std::invalid_argument(std::string("malformed event: ") + ex.what());
    }
}

std::string serialize_log(const std::vector<SimEvent>& log) {
    std::string out;
    for (const auto& e : log) {
        out += to_json(e).dump();
        out += '\n';
    }
    return out;
}

std::vector<SimEvent> parse_log(std::string_view text) {
    std::vector<SimEvent> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty()) continue;
        try {
            out.push_back(event_from_json(nlohmann::ordered_json::parse(line)));
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument("log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace teamsim::engine
