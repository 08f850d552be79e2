#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "audit.hpp"
#include "cli.hpp"
#include "oracle.hpp"
#include "teamsim/engine/session.hpp"
#include "teamsim/harness/experiment.hpp"
#include "teamsim/harness/results.hpp"
#include "teamsim/rng.hpp"
#include "teamsim/tdp/lint.hpp"
#include "teamsim/tdp/machine.hpp"
#include "teamsim/tdp/parser.hpp"
#include "teamsim/tdp/presets.hpp"
#include "teamsim/world/belief.hpp"
#include "teamsim/world/generator.hpp"
#include "teamsim/world/scenario_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace teamsim;

const fs::path kSource = TEAMSIM_SOURCE_DIR;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    return cli::run(args, out, err);
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("teamsim_acceptance_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

engine::Session batch(const tdp::Pattern& p, std::uint64_t seed, world::Scenario scenario,
                      engine::Bindings overrides = {}) {
    engine::SessionConfig c;
    c.seed = seed;
    return engine::Session::create(std::move(scenario), p, engine::default_bindings(p, overrides), c);
}

// Every session run directly by this suite is audited at the end.
struct AuditLedger {
    int sessions = 0;
    int executed = 0;
    std::vector<std::string> problems;

    void check(const tdp::Pattern& p, const engine::Session& s) {
        auto r = testing::audit_log(p, s.scenario(), s.log());
        ++sessions;
        executed += r.executed;
        for (const auto& u : r.unpermitted) problems.push_back(p.name + ": " + u);
        if (r.violations != s.metrics().violations || r.flagged_violations != s.metrics().violations) {
            problems.push_back(p.name + ": violation count mismatch");
        }
    }
};

AuditLedger ledger;

// Determinism / replay

Verdict determinism() {
    const auto start = std::chrono::steady_clock::now();
    TempDir dir("determinism");
    Lcg rng(2024);
    const auto presets = tdp::presets();
    int replays_ok = 0;
    std::size_t events = 0;
    for (int i = 0; i < 20; ++i) {
        world::ScenarioConfig c;
        c.n_hypotheses = 2 + static_cast<int>(rng.below(3));
        c.n_sources = 3 + static_cast<int>(rng.below(5));
        c.n_sensitive = static_cast<int>(rng.below(2));
        c.n_linked = std::min(static_cast<int>(rng.below(3)), c.n_sources - c.n_sensitive - 1);
        c.items_per_source = 3 + static_cast<int>(rng.below(10));
        c.p_signal = rng.uniform(0.3, 0.9);
        const auto scenario = world::generate_scenario(c, rng.next());
        const auto file = dir / ("scenario" + std::to_string(i) + ".json");
        world::save_scenario(scenario, file);
        const std::string preset(presets[rng.below(presets.size())].name);
        const auto seed = std::to_string(rng.next() % 100000);

        std::vector<std::string> logs;
        for (int run = 0; run < 2; ++run) {
            const auto out = dir / ("log" + std::to_string(i) + "_" + std::to_string(run) + ".jsonl");
            if (cli({"run", "--pattern", preset, "--scenario", file.string(), "--seed", seed, "--out", out.string()}) != 0) {
                return {false, "run failed for " + preset};
            }
            logs.push_back(slurp(out));
        }
        events += static_cast<std::size_t>(std::count(logs[0].begin(), logs[0].end(), '\n'));
        if (logs[0] != logs[1] || logs[0].empty()) return {false, "logs differ for " + preset + " seed " + seed};
        const auto log_path = dir / ("log" + std::to_string(i) + "_0.jsonl");
        if (cli({"replay", "--log", log_path.string(), "--scenario", file.string()}) != 0) {
            return {false, "replay diverged for " + preset + " seed " + seed};
        }
        ++replays_ok;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {secs < 5.0, std::to_string(replays_ok) + "/20 logs (" + std::to_string(events) +
                                 " events) identical and replayed in " + fmt("%.2f", secs) + " s"};
}

// Belief oracle

Verdict belief_oracle() {
    const std::vector<world::Hypothesis> hyps = {{"H1", ""}, {"H2", ""}, {"H3", ""}};
    const double lambda = 3.0;
    std::vector<testing::Evidence> alphabet;
    for (int h = -1; h < 3; ++h) {
        for (double r : {0.0, 0.5, 1.0}) alphabet.push_back({h, r});
    }
    auto fold = [&](const std::vector<testing::Evidence>& ev, double& worst_norm) {
        auto b = world::BeliefState::uniform(3);
        for (const auto& e : ev) {
            const std::string label = e.hypothesis < 0 ? std::string(world::kNoise) : hyps[e.hypothesis].id;
            b = world::update_belief(b, hyps, label, e.reliability, lambda);
            double sum = 0.0;
            for (double p : b.probabilities()) sum += p;
            worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
        }
        return b;
    };

    long sequences = 0;
    double worst_oracle = 0.0;
    double worst_norm = 0.0;
    double worst_perm = 0.0;
    std::vector<testing::Evidence> seq;
    std::function<void()> walk = [&] {
        ++sequences;
        const auto b = fold(seq, worst_norm);
        const auto o = testing::oracle_posterior(3, seq, lambda);
        for (std::size_t k = 0; k < 3; ++k) worst_oracle = std::max(worst_oracle, std::abs(b[k] - o[k]));

        std::vector<std::vector<testing::Evidence>> perms;
        perms.emplace_back(seq.rbegin(), seq.rend());
        for (std::size_t r = 1; r < seq.size(); ++r) {
            auto rot = seq;
            std::rotate(rot.begin(), rot.begin() + static_cast<long>(r), rot.end());
            perms.push_back(rot);
        }
        if (seq.size() >= 2) {
            auto sw = seq;
            std::swap(sw[0], sw[1]);
            perms.push_back(sw);
        }
        for (const auto& p : perms) {
            const auto bp = fold(p, worst_norm);
            for (std::size_t k = 0; k < 3; ++k) worst_perm = std::max(worst_perm, std::abs(b[k] - bp[k]));
        }
        if (seq.size() == 5) return;
        for (const auto& e : alphabet) {
            seq.push_back(e);
            walk();
            seq.pop_back();
        }
    };
    walk();
    const bool pass = sequences == 271453 && worst_oracle <= 1e-12 && worst_norm <= 1e-9 && worst_perm <= 1e-12;
    return {pass, std::to_string(sequences) + " sequences, oracle " + fmt("%.1e", worst_oracle) + ", norm " +
                      fmt("%.1e", worst_norm) + ", permutation " + fmt("%.1e", worst_perm)};
}

// Noiseless correctness

Verdict noiseless() {
    world::ScenarioConfig c;
    c.p_signal = 1.0;
    c.items_per_source = 60;
    c.params.tau = 0.9;
    agents::AgentProfile exact;
    exact.accuracy = 1.0;
    exact.reliability_noise = 0.0;
    const auto p = tdp::load_preset("autonomous_strict");
    int right = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto s = batch(p, seed, world::generate_scenario(c, seed), {{"a", exact}});
        const auto o = engine::run_to_completion(s);
        ledger.check(p, s);
        if (o.decided && o.chosen == s.scenario().ground_truth) ++right;
    }
    return {right == 100, std::to_string(right) + "/100 decided the ground truth"};
}

// CSV helpers

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::optional<double> csv_mean(const std::string& text, const std::string& pattern, const std::string& column) {
    const auto rows = csv_rows(text);
    if (rows.empty()) return std::nullopt;
    const auto& header = rows[0];
    const auto col = std::find(header.begin(), header.end(), column) - header.begin();
    for (const auto& r : rows) {
        if (r.size() == header.size() && r[0] == pattern && r[1] == "mean" && !r[col].empty()) {
            return std::stod(r[col]);
        }
    }
    return std::nullopt;
}

// Returns the recorded baseline, writing it on the first run.
std::string baseline(const std::string& name, const std::string& fresh, bool& recorded) {
    const auto path = kSource / "baselines" / name;
    recorded = !fs::exists(path);
    if (recorded) {
        fs::create_directories(path.parent_path());
        spit(path, fresh);
    }
    return slurp(path);
}

// Speed ordering

Verdict speed() {
    const auto config = harness::load_experiment(kSource / "experiments" / "speed.json");
    const auto table = harness::run_experiment(config);
    std::map<std::uint64_t, std::optional<int>> agent;
    std::map<std::uint64_t, std::optional<int>> human;
    for (const auto& r : table.rows) {
        (r.pattern == "manual" ? human : agent)[r.seed] = r.metrics.ticks_to_decision;
    }
    int faster = 0;
    double sum_a = 0.0;
    double sum_h = 0.0;
    for (const auto& [seed, a] : agent) {
        const auto& h = human[seed];
        if (a && h && *a < *h) ++faster;
        if (a) sum_a += *a;
        if (h) sum_h += *h;
    }
    const double ratio = (sum_h / static_cast<double>(human.size())) / (sum_a / static_cast<double>(agent.size()));

    bool recorded = false;
    const auto base = baseline("speed.csv", harness::format_results(table), recorded);
    const auto base_h = csv_mean(base, "manual", "ticks_to_decision");
    const auto base_a = csv_mean(base, "autonomous_strict", "ticks_to_decision");
    if (!base_h || !base_a) return {false, "baselines/speed.csv lacks mean rows"};
    const double base_ratio = *base_h / *base_a;
    const double drift = std::abs(ratio / base_ratio - 1.0);
    const bool pass = faster == 50 && agent.size() == 50 && drift <= 0.05;
    return {pass, "autonomous faster on " + std::to_string(faster) + "/50 seeds, mean ratio " + fmt("%.4g", ratio) +
                      " vs baseline " + fmt("%.4g", base_ratio) + (recorded ? " (baseline recorded)" : "")};
}

// Downside (2): unsupervised access to sensitive sources

Verdict sensitive_access() {
    world::ScenarioConfig small;
    small.n_sources = 3;
    small.n_sensitive = 1;
    small.n_linked = 0;
    small.items_per_source = 3;
    const auto strict = tdp::load_preset("autonomous_strict");
    int qualifying = 0;
    int qualifying_violated = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto scenario = world::generate_scenario(small, seed);
        auto s = batch(strict, seed, scenario, {{"a", agents::AgentProfile{}}});
        engine::run_to_completion(s);
        ledger.check(strict, s);
        const int horizon = s.metrics().ticks_to_decision.value_or(s.tick() + 1);
        // Open evidence is used up once every open item has been collected and processed.
        std::map<std::string, int> remaining;
        for (const auto& src : scenario.sources) {
            if (src.sensitivity == world::Sensitivity::open && src.discovered) remaining[src.id] = src.n_items;
        }
        std::map<std::string, std::string> item_source;
        int unprocessed = 0;
        int used_up_at = -1;
        for (const auto& e : s.log()) {
            if (e.outcome.value("status", std::string()) != "executed") continue;
            if (e.kind == "collect") {
                const auto src = e.payload.at("source").get<std::string>();
                if (!remaining.contains(src)) continue;
                --remaining[src];
                ++unprocessed;
                item_source[e.outcome.at("item").get<std::string>()] = src;
            } else if (e.kind == "process" && item_source.contains(e.payload.at("item").get<std::string>())) {
                --unprocessed;
            } else {
                continue;
            }
            const bool dry = std::all_of(remaining.begin(), remaining.end(), [](const auto& kv) {
                return kv.second == 0;
            });
            if (dry && unprocessed == 0 && used_up_at < 0) used_up_at = e.tick;
        }
        if (used_up_at >= 0 && used_up_at < horizon) {
            ++qualifying;
            if (s.metrics().violations >= 1) ++qualifying_violated;
        }
    }

    int human_led_violations = 0;
    for (const char* preset : {"manual", "collaborative"}) {
        const auto p = tdp::load_preset(preset);
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            for (const auto& sc : {world::generate_scenario({}, seed), world::generate_scenario(small, seed)}) {
                auto s = batch(p, seed, sc);
                engine::run_to_completion(s);
                ledger.check(p, s);
                human_led_violations += s.metrics().violations;
            }
        }
    }
    const bool pass = qualifying > 0 && qualifying_violated == qualifying && human_led_violations == 0;
    return {pass, "autonomous_strict violated on " + std::to_string(qualifying_violated) + "/" +
                      std::to_string(qualifying) + " qualifying seeds; manual+collaborative violations " +
                      std::to_string(human_led_violations)};
}

// Downside (1): uncorrected agent mistakes

Verdict mislabels() {
    const auto config = harness::load_experiment(kSource / "experiments" / "mislabel.json");
    const auto table = harness::run_experiment(config);
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& r : table.rows) {
        acc[r.pattern].first += r.metrics.mislabel_rate_final;
        acc[r.pattern].second += 1;
    }
    const double auto_rate = acc["autonomous_strict"].first / acc["autonomous_strict"].second;
    const double collab_rate = acc["collaborative"].first / acc["collaborative"].second;
    const auto fresh = harness::format_results(table);
    bool recorded = false;
    const bool same = baseline("mislabel.csv", fresh, recorded) == fresh;
    const bool pass = acc["autonomous_strict"].second == 50 && acc["collaborative"].second == 50 &&
                      auto_rate - collab_rate > 0.1 && same;
    return {pass, "autonomous " + fmt("%.4f", auto_rate) + " vs collaborative " + fmt("%.4f", collab_rate) +
                      ", baseline " + (recorded ? "recorded" : (same ? "byte-identical" : "differs"))};
}

// Lint suite

Verdict lint_suite() {
    std::vector<std::string> notes;
    for (const char* preset : {"phased_autonomy", "supervisory", "highly_autonomous", "collaborative", "manual"}) {
        if (!tdp::validate_pattern(tdp::load_preset(preset)).empty()) notes.push_back(std::string(preset) + " not clean");
    }
    std::string text(*tdp::preset_source("phased_autonomy"));
    auto r1_text = text;
    r1_text.insert(r1_text.find("  initial manual;"), "  transition manual -> autonomous on command(\"jump\");\n");
    const auto r1 = tdp::validate_pattern(tdp::parse_pattern(r1_text));
    const bool r1_ok = !r1.findings.empty() && r1.has_errors() &&
                       std::all_of(r1.findings.begin(), r1.findings.end(),
                                   [](const tdp::Finding& f) { return f.rule == tdp::Rule::R1; });
    if (!r1_ok) notes.push_back("R1 mutant not flagged as R1");

    auto r2_text = text;
    const std::string monitoring =
        "    allocate h -> collect [indirect];\n    allocate h -> process [indirect];\n    interventions h: authorize, correct;";
    r2_text.replace(r2_text.find(monitoring), monitoring.size(), "    interventions h: authorize, correct;");
    const auto r2 = tdp::validate_pattern(tdp::parse_pattern(r2_text));
    const bool r2_ok = r2.findings.size() == 1 && r2.findings[0].rule == tdp::Rule::R2 && !r2.has_errors();
    if (!r2_ok) notes.push_back("R2 mutant not flagged as an R2 warning");

    TempDir dir("lint");
    spit(dir / "r2.tdp", r2_text);
    const int relaxed = cli({"lint", "--pattern", (dir / "r2.tdp").string()});
    const int strict = cli({"lint", "--pattern", (dir / "r2.tdp").string(), "--strict"});
    if (relaxed != 0 || strict != 2) {
        notes.push_back("CLI exit codes " + std::to_string(relaxed) + "/" + std::to_string(strict));
    }
    std::string detail = "presets clean, R1 and R2 mutants flagged, --strict exits " + std::to_string(strict);
    if (!notes.empty()) {
        detail.clear();
        for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
    }
    return {notes.empty(), detail};
}

// Trace property

Verdict trace_property() {
    const auto p = tdp::load_preset("phased_autonomy");
    std::vector<tdp::Trigger> triggers;
    for (const auto& t : p.transitions) {
        if (std::find(triggers.begin(), triggers.end(), t.trigger) == triggers.end()) triggers.push_back(t.trigger);
    }
    // An empty optional stands for a clock tick.
    std::vector<std::optional<tdp::Trigger>> alphabet = {std::nullopt};
    for (const auto& t : triggers) alphabet.emplace_back(t);
    alphabet.emplace_back(tdp::Trigger::command("unknown"));

    long sequences = 0;
    long reached_both = 0;
    std::vector<std::string> bad;
    std::vector<std::size_t> seq;
    std::function<void()> walk = [&] {
        ++sequences;
        auto m = tdp::compile(p);
        std::vector<std::string> trace{m.current()};
        for (auto idx : seq) {
            const auto r = alphabet[idx] ? m.fire(*alphabet[idx]) : m.tick();
            if (r.changed) trace.push_back(m.current());
        }
        bool seen_manual = false;
        bool seen_auto = false;
        std::string last_end;
        bool handover_between = false;
        for (const auto& name : trace) {
            if (name == "manual" || name == "autonomous") {
                if (!last_end.empty() && last_end != name && !handover_between && bad.size() < 3) {
                    bad.push_back(last_end + "->" + name);
                }
                (name == "manual" ? seen_manual : seen_auto) = true;
                last_end = name;
                handover_between = false;
            } else if (p.find_state(name)->is_handover) {
                handover_between = true;
            }
        }
        if (seen_manual && seen_auto) ++reached_both;
        if (seq.size() == 6) return;
        for (std::size_t i = 0; i < alphabet.size(); ++i) {
            seq.push_back(i);
            walk();
            seq.pop_back();
        }
    };
    walk();
    return {bad.empty() && reached_both > 0, std::to_string(sequences) + " sequences over " +
                                                 std::to_string(alphabet.size()) + " symbols, " +
                                                 std::to_string(reached_both) + " reach both ends"};
}

// Permission soundness audit

Verdict permission_audit() {
    for (const auto& preset : tdp::presets()) {
        const auto p = tdp::load_preset(preset.name);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto s = batch(p, seed, world::generate_scenario({}, seed));
            engine::run_to_completion(s);
            ledger.check(p, s);
        }
    }
    std::string detail = std::to_string(ledger.sessions) + " sessions, " + std::to_string(ledger.executed) +
                         " executed actions, " + std::to_string(ledger.problems.size()) + " unpermitted";
    if (!ledger.problems.empty()) detail += " (first: " + ledger.problems.front() + ")";
    return {ledger.problems.empty() && ledger.executed > 0, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"determinism_replay", determinism},
        {"belief_oracle", belief_oracle},
        {"noiseless_correctness", noiseless},
        {"speed_ordering", speed},
        {"sensitive_source_access", sensitive_access},
        {"uncorrected_mislabels", mislabels},
        {"lint_suite", lint_suite},
        {"handover_trace_property", trace_property},
        {"permission_audit", permission_audit},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
