#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>

#include "generators.hpp"
#include "teamsim/tdp/lint.hpp"
#include "teamsim/tdp/machine.hpp"
#include "teamsim/tdp/parser.hpp"
#include "teamsim/tdp/presets.hpp"

namespace teamsim::tdp {
namespace {

std::string phased_text() { return std::string(*preset_source("phased_autonomy")); }

Pattern r1_mutant() {
    std::string text = phased_text();
    const std::string anchor = "  initial manual;";
    text.insert(text.find(anchor), "  transition manual -> autonomous on command(\"jump\");\n");
    return parse_pattern(text);
}

Pattern r2_mutant() {
    Pattern p = load_preset("phased_autonomy");
    for (auto& s : p.states) {
        if (s.name != "autonomous") continue;
        std::erase_if(s.allocations, [](const Allocation& a) { return a.actor == "h"; });
    }
    return p;
}

TEST(Lint, EveryPresetIsClean) {
    for (const auto& preset : presets()) {
        EXPECT_TRUE(validate_pattern(load_preset(preset.name)).empty()) << preset.name;
        EXPECT_TRUE(validate_pattern(load_preset(preset.name), LintConfig::strict()).empty()) << preset.name;
    }
}

TEST(Lint, DirectManualToAutonomousIsR1Error) {
    auto report = validate_pattern(r1_mutant());
    ASSERT_EQ(report.findings.size(), 1u);
    const auto& f = report.findings[0];
    EXPECT_EQ(f.rule, Rule::R1);
    EXPECT_EQ(f.severity, Severity::error);
    EXPECT_EQ(f.location, "transition manual -> autonomous on command(\"jump\")");
    EXPECT_THROW(compile(r1_mutant()), LintFailure);
}

TEST(Lint, AutonomyWithoutMonitoringIsR2Warning) {
    auto report = validate_pattern(r2_mutant());
    ASSERT_EQ(report.findings.size(), 1u);
    EXPECT_EQ(report.findings[0].rule, Rule::R2);
    EXPECT_EQ(report.findings[0].severity, Severity::warning);
    EXPECT_EQ(report.findings[0].location, "state autonomous");
    EXPECT_FALSE(report.has_errors());
    EXPECT_NO_THROW(compile(r2_mutant()));
}

TEST(Lint, StrictElevatesWarnings) {
    auto report = validate_pattern(r2_mutant(), LintConfig::strict());
    ASSERT_EQ(report.findings.size(), 1u);
    EXPECT_EQ(report.findings[0].severity, Severity::error);
}

TEST(Lint, OverridesDisableOrDowngrade) {
    LintConfig off;
    off.overrides[Rule::R1] = std::nullopt;
    EXPECT_TRUE(validate_pattern(r1_mutant(), off).empty());

    LintConfig soft;
    soft.overrides[Rule::R1] = Severity::warning;
    auto report = validate_pattern(r1_mutant(), soft);
    ASSERT_EQ(report.count(Rule::R1), 1u);
    EXPECT_FALSE(report.has_errors());
}

TEST(Lint, DefaultSeverities) {
    EXPECT_EQ(LintConfig::default_severity(Rule::R1), Severity::error);
    EXPECT_EQ(LintConfig::default_severity(Rule::R2), Severity::warning);
    EXPECT_EQ(LintConfig::default_severity(Rule::R3), Severity::error);
    EXPECT_EQ(LintConfig::default_severity(Rule::R4), Severity::error);
    EXPECT_EQ(LintConfig::default_severity(Rule::R5), Severity::warning);
}

TEST(Lint, UnreachableState) {
    auto p = parse_pattern(
        "pattern m { actors: human h; tasks: t; state s { allocate h -> t [direct]; }"
        " state island { allocate h -> t [direct]; } initial s; }");
    auto report = validate_pattern(p);
    ASSERT_EQ(report.count(Rule::R3), 1u);
    EXPECT_EQ(report.findings[0].location, "state island");
}

TEST(Lint, DwellMakesTargetReachable) {
    auto p = parse_pattern(
        "pattern m { actors: human h; tasks: t; state s { allocate h -> t [direct]; dwell: 2 -> u; }"
        " state u { allocate h -> t [direct]; } initial s; }");
    EXPECT_TRUE(validate_pattern(p).empty());
}

TEST(Lint, InitialCount) {
    auto none = parse_pattern("pattern m { actors: human h; tasks: t; state s { allocate h -> t [direct]; } }");
    auto r = validate_pattern(none);
    EXPECT_EQ(r.count(Rule::R4), 1u);
    EXPECT_TRUE(r.has_errors());

    auto two = parse_pattern(
        "pattern m { actors: human h; tasks: t; state s { allocate h -> t [direct]; } initial s; initial s; }");
    EXPECT_EQ(validate_pattern(two).count(Rule::R4), 1u);
    EXPECT_THROW(compile(two), LintFailure);
}

TEST(Lint, UncoveredTaskIsR5OutsideHandovers) {
    auto p = parse_pattern(
        "pattern m { actors: human h; tasks: t, u; state s { allocate h -> t [direct]; }"
        " state x handover { allocate h -> t [direct]; dwell: 1 -> s; }"
        " transition s -> x on command(\"go\"); initial s; }");
    auto r = validate_pattern(p);
    ASSERT_EQ(r.findings.size(), 1u);
    EXPECT_EQ(r.findings[0].rule, Rule::R5);
    EXPECT_EQ(r.findings[0].location, "state s");
}

TEST(Lint, JsonReport) {
    auto j = to_json(validate_pattern(r2_mutant()));
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["rule"], "R2");
    EXPECT_EQ(j[0]["severity"], "warning");
    EXPECT_EQ(j[0]["location"], "state autonomous");
}

// Independent reading of handover mediation: collect every offending edge.
std::multiset<std::string> r1_oracle(const Pattern& p) {
    auto performers = [](const PatternState& s, const std::string& task) {
        std::set<std::string> out;
        for (const auto& a : s.allocations) {
            if (a.task == task && a.work == Work::direct) out.insert(a.actor);
        }
        return out;
    };
    auto offends = [&](const std::string& from, const std::string& to) {
        const PatternState* s = p.find_state(from);
        const PatternState* t = p.find_state(to);
        if (s->is_handover || t->is_handover) return false;
        for (const auto& task : p.tasks) {
            auto a = performers(*s, task);
            auto b = performers(*t, task);
            if (a.empty() || b.empty()) continue;
            std::set<std::string> both;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
            if (both.empty()) return true;
        }
        return false;
    };
    std::multiset<std::string> out;
    for (const auto& t : p.transitions) {
        if (offends(t.from, t.to)) out.insert(t.from + ">" + t.to);
    }
    for (const auto& s : p.states) {
        if (s.dwell && offends(s.name, s.dwell->target)) out.insert(s.name + ">" + s.dwell->target);
    }
    return out;
}

TEST(LintProperty, R1FlagsExactlyTheOffendingEdges) {
    Lcg rng(77);
    int flagged_patterns = 0;
    for (int i = 0; i < 2000; ++i) {
        Pattern p = testing::random_pattern(rng);
        std::multiset<std::string> got;
        auto report = validate_pattern(p);
        for (const auto& f : report.findings) {
            if (f.rule != Rule::R1) continue;
            // "transition A -> B on ..." or "dwell A -> B after n"
            auto first = f.location.find(' ') + 1;
            auto arrow = f.location.find(" -> ", first);
            auto end = f.location.find(' ', arrow + 4);
            got.insert(f.location.substr(first, arrow - first) + ">" + f.location.substr(arrow + 4, end - arrow - 4));
        }
        auto expected = r1_oracle(p);
        ASSERT_EQ(got, expected) << testing::to_dsl(p);
        if (!expected.empty()) ++flagged_patterns;
    }
    EXPECT_GT(flagged_patterns, 50);
}

TEST(LintProperty, EmptyReportMeansEveryRulePasses) {
    Lcg rng(5);
    for (int i = 0; i < 1000; ++i) {
        Pattern p = testing::random_pattern(rng);
        auto full = validate_pattern(p);
        for (Rule r : kAllRules) {
            LintConfig only;
            for (Rule other : kAllRules) {
                if (other != r) only.overrides[other] = std::nullopt;
            }
            EXPECT_EQ(validate_pattern(p, only).count(r), full.count(r));
        }
    }
}

}  // namespace
}  // namespace teamsim::tdp
