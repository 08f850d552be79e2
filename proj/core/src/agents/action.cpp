#include "teamsim/agents/action.hpp"

namespace teamsim::agents {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string text(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string() || j.at(key).get_ref<const std::string&>().empty()) {
        throw MalformedAction(std::string("action needs a non-empty string '") + key + "'");
    }
    return j.at(key).get<std::string>();
}

}  // namespace

std::string_view Action::kind() const {
    return std::visit(overloaded{
                          [](const DirectSources&) { return std::string_view("direct_srcs"); },
                          [](const Collect&) { return std::string_view("collect"); },
                          [](const Process&) { return std::string_view("process"); },
                          [](const Correct&) { return std::string_view("correct"); },
                          [](const Guide&) { return std::string_view("guide"); },
                          [](const Authorize&) { return std::string_view("authorize"); },
                          [](const RequestAuthorization&) { return std::string_view("request_authorization"); },
                          [](const Command&) { return std::string_view("command"); },
                          [](const Idle&) { return std::string_view("idle"); },
                      },
                      payload);
}

nlohmann::ordered_json payload_to_json(const Action& a) {
    nlohmann::ordered_json j;
    j["kind"] = a.kind();
    std::visit(overloaded{
                   [&](const DirectSources& x) { j["source"] = x.source; },
                   [&](const Collect& x) { j["source"] = x.source; },
                   [&](const Process& x) { j["item"] = x.item; },
                   [&](const Correct& x) {
                       j["item"] = x.item;
                       j["class"] = x.new_class;
                       if (x.reliability) j["reliability"] = *x.reliability;
                   },
                   [&](const Guide& x) {
                       j["agent"] = x.agent;
                       j["source"] = x.source;
                   },
                   [&](const Authorize& x) {
                       j["source"] = x.source;
                       j["decision"] = x.grant ? "grant" : "deny";
                   },
                   [&](const RequestAuthorization& x) { j["source"] = x.source; },
                   [&](const Command& x) { j["name"] = x.name; },
                   [](const Idle&) {},
               },
               a.payload);
    return j;
}

Action action_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw MalformedAction("action must be a JSON object");
    Action a;
    if (j.contains("actor")) {
        if (!j.at("actor").is_string()) throw MalformedAction("'actor' must be a string");
        a.actor = j.at("actor").get<std::string>();
    }
    const std::string kind = text(j, "kind");
    if (kind == "direct_srcs") {
        a.payload = DirectSources{text(j, "source")};
    } else if (kind == "collect") {
        a.payload = Collect{text(j, "source")};
    } else if (kind == "process") {
        a.payload = Process{text(j, "item")};
    } else if (kind == "correct") {
        Correct c{text(j, "item"), text(j, "class"), std::nullopt};
        if (j.contains("reliability")) {
            if (!j.at("reliability").is_number()) throw MalformedAction("'reliability' must be a number");
            double r = j.at("reliability").get<double>();
            if (!(r >= 0.0 && r <= 1.0)) throw MalformedAction("'reliability' outside [0, 1]");
            c.reliability = r;
        }
        a.payload = std::move(c);
    } else if (kind == "guide") {
        a.payload = Guide{text(j, "agent"), text(j, "source")};
    } else if (kind == "authorize") {
        const std::string decision = text(j, "decision");
        if (decision != "grant" && decision != "deny") throw MalformedAction("'decision' must be grant or deny");
        a.payload = Authorize{text(j, "source"), decision == "grant"};
    } else if (kind == "request_authorization") {
        a.payload = RequestAuthorization{text(j, "source")};
    } else if (kind == "command") {
        a.payload = Command{text(j, "name")};
    } else if (kind == "idle") {
        a.payload = Idle{};
    } else {
        throw MalformedAction("unknown action kind '" + kind + "'");
    }
    return a;
}

}  // namespace teamsim::agents
