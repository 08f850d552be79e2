#include "teamsim/tdp/machine.hpp"

#include <algorithm>

#include "teamsim/tdp/errors.hpp"

namespace teamsim::tdp {
namespace {

std::string summarize(const LintReport& report) {
    std::string msg = "pattern failed lint";
    for (const auto& f : report.findings) {
        if (f.severity == Severity::error) msg += "\n  " + format(f);
    }
    return msg;
}

}  // namespace

LintFailure::LintFailure(LintReport report) : std::runtime_error(summarize(report)), report_(std::move(report)) {}

PatternMachine::PatternMachine(Pattern p) : pattern_(std::move(p)) {
    current_ = index_of(pattern_.initial());
}

std::size_t PatternMachine::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < pattern_.states.size(); ++i) {
        if (pattern_.states[i].name == name) return i;
    }
    throw UnknownReference("state", std::string(name));
}

void PatternMachine::enter(std::size_t state_index) {
    current_ = state_index;
    ticks_in_state_ = 0;
}

StepResult PatternMachine::fire(const Trigger& trigger) {
    for (const auto& t : pattern_.transitions) {
        if (t.from == current() && t.trigger == trigger) {
            enter(index_of(t.to));
            return {true, current()};
        }
    }
    return {false, current()};
}

StepResult PatternMachine::tick() {
    ++ticks_in_state_;
    const auto& dwell = current_state().dwell;
    if (dwell && ticks_in_state_ >= dwell->ticks) {
        enter(index_of(dwell->target));
        return {true, current()};
    }
    return {false, current()};
}

Work PatternMachine::permitted_work(std::string_view actor, std::string_view task) const {
    if (!pattern_.find_actor(actor)) throw UnknownReference("actor", std::string(actor));
    if (!pattern_.has_task(task)) throw UnknownReference("task", std::string(task));
    for (const auto& a : current_state().allocations) {
        if (a.actor == actor && a.task == task) return a.work;
    }
    return Work::none;
}

InterventionSet PatternMachine::permitted_interventions(std::string_view actor) const {
    if (!pattern_.find_actor(actor)) throw UnknownReference("actor", std::string(actor));
    const auto& ivs = current_state().interventions;
    auto it = ivs.find(std::string(actor));
    return it == ivs.end() ? InterventionSet{} : it->second;
}

std::vector<std::string> PatternMachine::available_commands() const {
    std::vector<std::string> out;
    for (const auto& t : pattern_.transitions) {
        if (t.from == current() && t.trigger.kind == TriggerKind::command) out.push_back(t.trigger.name);
    }
    return out;
}

PatternMachine compile(Pattern p) {
    auto report = validate_pattern(p);
    if (report.has_errors()) throw LintFailure(std::move(report));
    return PatternMachine(std::move(p));
}

}  // namespace teamsim::tdp
