#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace teamsim::tdp {

enum class ActorClass { human, agent };

// Work an actor performs on a task. `indirect` is supporting work such as
// monitoring: it does not advance the task itself.
enum class Work { none, direct, indirect };

enum class Intervention { correct, guide, authorize };

using InterventionSet = std::set<Intervention>;

enum class TriggerKind { command, request };

struct ActorDecl {
    std::string id;
    ActorClass actor_class = ActorClass::human;

    friend bool operator==(const ActorDecl&, const ActorDecl&) = default;
};

struct Allocation {
    std::string actor;
    std::string task;
    Work work = Work::direct;

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Dwell {
    int ticks = 1;
    std::string target;

    friend bool operator==(const Dwell&, const Dwell&) = default;
};

struct PatternState {
    std::string name;
    bool is_handover = false;
    std::vector<Allocation> allocations;
    std::map<std::string, InterventionSet> interventions;
    std::optional<Dwell> dwell;

    // Actors holding direct work on `task` in this state.
    std::set<std::string> direct_performers(std::string_view task) const;

    friend bool operator==(const PatternState&, const PatternState&) = default;
};

struct Trigger {
    TriggerKind kind = TriggerKind::command;
    std::string name;

    static Trigger command(std::string name) { return {TriggerKind::command, std::move(name)}; }
    static Trigger request(std::string name) { return {TriggerKind::request, std::move(name)}; }

    friend bool operator==(const Trigger&, const Trigger&) = default;
    friend auto operator<=>(const Trigger&, const Trigger&) = default;
};

struct Transition {
    std::string from;
    std::string to;
    Trigger trigger;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct Pattern {
    std::string name;
    std::vector<ActorDecl> actors;
    std::vector<std::string> tasks;
    std::vector<PatternState> states;
    std::vector<Transition> transitions;
    // Every `initial` declaration in source order. Exactly one is required
    // before the pattern can be compiled; the linter reports anything else.
    std::vector<std::string> initial_declarations;

    const ActorDecl* find_actor(std::string_view id) const;
    const PatternState* find_state(std::string_view name) const;
    bool has_task(std::string_view task) const;
    bool has_human() const;

    // The single initial state. Throws std::logic_error when the pattern does
    // not declare exactly one.
    const std::string& initial() const;

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

std::string_view to_string(ActorClass c);
std::string_view to_string(Work w);
std::string_view to_string(Intervention i);
std::string_view to_string(TriggerKind k);
std::string to_string(const Trigger& t);

std::optional<Intervention> parse_intervention(std::string_view s);
std::optional<Work> parse_work(std::string_view s);

}  // namespace teamsim::tdp
