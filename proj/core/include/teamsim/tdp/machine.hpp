#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamsim/tdp/lint.hpp"
#include "teamsim/tdp/pattern.hpp"

namespace teamsim::tdp {

class LintFailure : public std::runtime_error {
public:
    explicit LintFailure(LintReport report);
    const LintReport& report() const { return report_; }

private:
    LintReport report_;
};

struct StepResult {
    bool changed = false;
    std::string new_state;
};

// Executable allocation state machine for a lint-clean pattern.
class PatternMachine {
public:
    const Pattern& pattern() const { return pattern_; }
    const std::string& current() const { return pattern_.states[current_].name; }
    const PatternState& current_state() const { return pattern_.states[current_]; }
    int ticks_in_state() const { return ticks_in_state_; }

    // Takes the transition matching (current, trigger) if one exists.
    StepResult fire(const Trigger& trigger);

    // Advances the dwell counter and follows a due dwell transition.
    StepResult tick();

    // Both throw UnknownReference for undeclared actors or tasks.
    Work permitted_work(std::string_view actor, std::string_view task) const;
    InterventionSet permitted_interventions(std::string_view actor) const;

    // Command trigger names with a transition out of the current state.
    std::vector<std::string> available_commands() const;

    friend bool operator==(const PatternMachine&, const PatternMachine&) = default;

private:
    friend PatternMachine compile(Pattern p);
    explicit PatternMachine(Pattern p);
    void enter(std::size_t state_index);
    std::size_t index_of(std::string_view name) const;

    Pattern pattern_;
    std::size_t current_ = 0;
    int ticks_in_state_ = 0;
};

// Throws LintFailure when validate_pattern reports any error-severity finding.
PatternMachine compile(Pattern p);

}  // namespace teamsim::tdp
