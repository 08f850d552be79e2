#include "teamsim/tdp/lint.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace teamsim::tdp {
namespace {

struct Edge {
    std::string from;
    std::string to;
    std::string label;
};

// Explicit transitions followed by dwell edges, in declaration order.
std::vector<Edge> edges_of(const Pattern& p) {
    std::vector<Edge> out;
    for (const auto& t : p.transitions) {
        out.push_back({t.from, t.to, "transition " + t.from + " -> " + t.to + " on " + to_string(t.trigger)});
    }
    for (const auto& s : p.states) {
        if (s.dwell) {
            out.push_back({s.name, s.dwell->target,
                           "dwell " + s.name + " -> " + s.dwell->target + " after " +
                               std::to_string(s.dwell->ticks)});
        }
    }
    return out;
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::none_of(a.begin(), a.end(), [&](const auto& x) { return b.contains(x); });
}

class Linter {
public:
    Linter(const Pattern& p, const LintConfig& config) : p_(p), config_(config) {}

    LintReport run() {
        if (config_.severity(Rule::R1)) handover_mediation();
        if (config_.severity(Rule::R2)) monitoring_in_autonomy();
        if (config_.severity(Rule::R3)) reachability();
        if (config_.severity(Rule::R4)) initial_uniqueness();
        if (config_.severity(Rule::R5)) task_coverage();
        return std::move(report_);
    }

private:
    void add(Rule r, std::string location, std::string message) {
        report_.findings.push_back({r, *config_.severity(r), std::move(location), std::move(message)});
    }

    void handover_mediation() {
        for (const auto& e : edges_of(p_)) {
            const PatternState* from = p_.find_state(e.from);
            const PatternState* to = p_.find_state(e.to);
            if (!from || !to || from->is_handover || to->is_handover) continue;
            for (const auto& task : p_.tasks) {
                auto before = from->direct_performers(task);
                auto after = to->direct_performers(task);
                if (!before.empty() && !after.empty() && disjoint(before, after)) {
                    add(Rule::R1, e.label,
                        "direct work on '" + task + "' changes hands without a handover state");
                    break;
                }
            }
        }
    }

    void monitoring_in_autonomy() {
        if (!p_.has_human()) return;
        for (const auto& s : p_.states) {
            bool any_direct = false;
            bool all_agents = true;
            bool human_monitors = false;
            for (const auto& a : s.allocations) {
                const ActorDecl* actor = p_.find_actor(a.actor);
                bool human = actor && actor->actor_class == ActorClass::human;
                if (a.work == Work::direct) {
                    any_direct = true;
                    if (human) all_agents = false;
                } else if (a.work == Work::indirect && human) {
                    human_monitors = true;
                }
            }
            if (any_direct && all_agents && !human_monitors) {
                add(Rule::R2, "state " + s.name, "agents work autonomously and no human monitors them");
            }
        }
    }

    void reachability() {
        auto edges = edges_of(p_);
        for (const auto& e : edges) {
            if (!p_.find_state(e.from)) add(Rule::R3, e.label, "unknown source state '" + e.from + "'");
            if (!p_.find_state(e.to)) add(Rule::R3, e.label, "unknown target state '" + e.to + "'");
        }
        std::set<std::string> seen;
        std::deque<std::string> frontier;
        for (const auto& init : p_.initial_declarations) {
            if (p_.find_state(init) && seen.insert(init).second) frontier.push_back(init);
        }
        while (!frontier.empty()) {
            std::string cur = frontier.front();
            frontier.pop_front();
            for (const auto& e : edges) {
                if (e.from == cur && p_.find_state(e.to) && seen.insert(e.to).second) frontier.push_back(e.to);
            }
        }
        for (const auto& s : p_.states) {
            if (!seen.contains(s.name)) add(Rule::R3, "state " + s.name, "not reachable from the initial state");
        }
    }

    void initial_uniqueness() {
        const auto n = p_.initial_declarations.size();
        if (n == 0) {
            add(Rule::R4, "pattern", "no initial state declared");
        } else if (n > 1) {
            add(Rule::R4, "pattern", std::to_string(n) + " initial declarations; exactly one is required");
        }
        for (const auto& init : p_.initial_declarations) {
            if (!p_.find_state(init)) add(Rule::R4, "pattern", "initial state '" + init + "' is not declared");
        }
    }

    void task_coverage() {
        for (const auto& s : p_.states) {
            if (s.is_handover) continue;
            for (const auto& task : p_.tasks) {
                if (s.direct_performers(task).empty()) {
                    add(Rule::R5, "state " + s.name, "nobody does direct work on '" + task + "'");
                }
            }
        }
    }

    const Pattern& p_;
    const LintConfig& config_;
    LintReport report_;
};

}  // namespace

bool LintReport::has_errors() const {
    return std::any_of(findings.begin(), findings.end(),
                       [](const auto& f) { return f.severity == Severity::error; });
}

bool LintReport::has_rule(Rule r) const { return count(r) > 0; }

std::size_t LintReport::count(Rule r) const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [&](const auto& f) { return f.rule == r; }));
}

Severity LintConfig::default_severity(Rule r) {
    return (r == Rule::R2 || r == Rule::R5) ? Severity::warning : Severity::error;
}

std::optional<Severity> LintConfig::severity(Rule r) const {
    auto it = overrides.find(r);
    if (it != overrides.end()) return it->second;
    return default_severity(r);
}

LintConfig LintConfig::strict() {
    LintConfig c;
    for (Rule r : kAllRules) c.overrides[r] = Severity::error;
    return c;
}

LintReport validate_pattern(const Pattern& p, const LintConfig& config) { return Linter(p, config).run(); }

std::string_view to_string(Rule r) {
    switch (r) {
        case Rule::R1: return "R1";
        case Rule::R2: return "R2";
        case Rule::R3: return "R3";
        case Rule::R4: return "R4";
        case Rule::R5: break;
    }
    return "R5";
}

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

std::string format(const Finding& f) {
    return std::string(to_string(f.rule)) + " " + std::string(to_string(f.severity)) + " [" + f.location +
           "]: " + f.message;
}

nlohmann::json to_json(const LintReport& report) {
    auto arr = nlohmann::json::array();
    for (const auto& f : report.findings) {
        arr.push_back({{"rule", to_string(f.rule)},
                       {"severity", to_string(f.severity)},
                       {"location", f.location},
                       {"message", f.message}});
    }
    return arr;
}

}  // namespace teamsim::tdp
