#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "teamsim/tdp/pattern.hpp"

namespace teamsim::tdp {

// R1 handover mediation, R2 monitoring in autonomy, R3 reachability,
// R4 initial uniqueness, R5 task coverage.
enum class Rule { R1, R2, R3, R4, R5 };
enum class Severity { error, warning };

inline constexpr Rule kAllRules[] = {Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::R5};

struct Finding {
    Rule rule = Rule::R1;
    Severity severity = Severity::error;
    std::string location;  // "state <name>", "transition <from> -> <to> ..." or "pattern"
    std::string message;
};

struct LintReport {
    std::vector<Finding> findings;

    bool empty() const { return findings.empty(); }
    bool has_errors() const;
    bool has_rule(Rule r) const;
    std::size_t count(Rule r) const;
};

// Per-rule overrides. A rule mapped to std::nullopt is disabled.
struct LintConfig {
    std::map<Rule, std::optional<Severity>> overrides;

    static Severity default_severity(Rule r);
    std::optional<Severity> severity(Rule r) const;

    // Every enabled rule reports as an error.
    static LintConfig strict();
};

LintReport validate_pattern(const Pattern& p, const LintConfig& config = {});

std::string_view to_string(Rule r);
std::string_view to_string(Severity s);
std::string format(const Finding& f);
nlohmann::json to_json(const LintReport& report);

}  // namespace teamsim::tdp
