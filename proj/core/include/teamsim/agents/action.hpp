#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace teamsim::agents {

struct DirectSources {
    std::string source;
    friend bool operator==(const DirectSources&, const DirectSources&) = default;
};
struct Collect {
    std::string source;
    friend bool operator==(const Collect&, const Collect&) = default;
};
struct Process {
    std::string item;
    friend bool operator==(const Process&, const Process&) = default;
};
struct Correct {
    std::string item;
    std::string new_class;
    std::optional<double> reliability;  // keeps the previous assessment when absent
    friend bool operator==(const Correct&, const Correct&) = default;
};
struct Guide {
    std::string agent;
    std::string source;
    friend bool operator==(const Guide&, const Guide&) = default;
};
struct Authorize {
    std::string source;
    bool grant = true;
    friend bool operator==(const Authorize&, const Authorize&) = default;
};
// Emitted by collectors that will not touch a sensitive source unasked.
struct RequestAuthorization {
    std::string source;
    friend bool operator==(const RequestAuthorization&, const RequestAuthorization&) = default;
};
struct Command {
    std::string name;
    friend bool operator==(const Command&, const Command&) = default;
};
struct Idle {
    friend bool operator==(const Idle&, const Idle&) = default;
};

using ActionPayload =
    std::variant<DirectSources, Collect, Process, Correct, Guide, Authorize, RequestAuthorization, Command, Idle>;

struct Action {
    std::string actor;
    ActionPayload payload = Idle{};

    std::string_view kind() const;
    bool is_idle() const { return std::holds_alternative<Idle>(payload); }

    friend bool operator==(const Action&, const Action&) = default;
};

class MalformedAction : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Wire form: {"kind": "...", <payload fields>}; "actor" is optional.
nlohmann::ordered_json payload_to_json(const Action& a);
Action action_from_json(const nlohmann::json& j);  // throws MalformedAction

}  // namespace teamsim::agents
