#include "teamsim/tdp/pattern.hpp"

#include <algorithm>
#include <stdexcept>

#include "teamsim/tdp/errors.hpp"

namespace teamsim::tdp {

std::set<std::string> PatternState::direct_performers(std::string_view task) const {
    std::set<std::string> out;
    for (const auto& a : allocations) {
        if (a.task == task && a.work == Work::direct) out.insert(a.actor);
    }
    return out;
}

const ActorDecl* Pattern::find_actor(std::string_view id) const {
    auto it = std::find_if(actors.begin(), actors.end(), [&](const auto& a) { return a.id == id; });
    return it == actors.end() ? nullptr : &*it;
}

const PatternState* Pattern::find_state(std::string_view state) const {
    auto it = std::find_if(states.begin(), states.end(), [&](const auto& s) { return s.name == state; });
    return it == states.end() ? nullptr : &*it;
}

bool Pattern::has_task(std::string_view task) const {
    return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
}

bool Pattern::has_human() const {
    return std::any_of(actors.begin(), actors.end(),
                       [](const auto& a) { return a.actor_class == ActorClass::human; });
}

const std::string& Pattern::initial() const {
    if (initial_declarations.size() != 1) {
        throw std::logic_error("pattern '" + name + "' does not declare exactly one initial state");
    }
    return initial_declarations.front();
}

std::string_view to_string(ActorClass c) { return c == ActorClass::human ? "human" : "agent"; }

std::string_view to_string(Work w) {
    switch (w) {
        case Work::direct: return "direct";
        case Work::indirect: return "indirect";
        case Work::none: break;
    }
    return "none";
}

std::string_view to_string(Intervention i) {
    switch (i) {
        case Intervention::correct: return "correct";
        case Intervention::guide: return "guide";
        case Intervention::authorize: break;
    }
    return "authorize";
}

std::string_view to_string(TriggerKind k) { return k == TriggerKind::command ? "command" : "request"; }

std::string to_string(const Trigger& t) {
    return std::string(to_string(t.kind)) + "(\"" + t.name + "\")";
}

std::optional<Intervention> parse_intervention(std::string_view s) {
    if (s == "correct") return Intervention::correct;
    if (s == "guide") return Intervention::guide;
    if (s == "authorize") return Intervention::authorize;
    return std::nullopt;
}

std::optional<Work> parse_work(std::string_view s) {
    if (s == "direct") return Work::direct;
    if (s == "indirect") return Work::indirect;
    if (s == "none") return Work::none;
    return std::nullopt;
}

SyntaxError::SyntaxError(int line, int col, const std::string& what)
    : PatternError(std::to_string(line) + ":" + std::to_string(col) + ": syntax error: " + what),
      line_(line),
      col_(col) {}

DuplicateName::DuplicateName(std::string kind, std::string name)
    : PatternError("duplicate " + kind + " '" + name + "'"), kind_(std::move(kind)), name_(std::move(name)) {}

UnknownReference::UnknownReference(std::string kind, std::string name)
    : PatternError("unknown " + kind + " '" + name + "'"), kind_(std::move(kind)), name_(std::move(name)) {}

DuplicateTrigger::DuplicateTrigger(std::string state, std::string trigger)
    : PatternError("duplicate trigger " + trigger + " out of state '" + state + "'"),
      state_(std::move(state)),
      trigger_(std::move(trigger)) {}

}  // namespace teamsim::tdp
