#include <gtest/gtest.h>

#include <set>

#include "audit.hpp"
#include "teamsim/engine/session.hpp"
#include "teamsim/tdp/machine.hpp"
#include "teamsim/tdp/parser.hpp"
#include "teamsim/tdp/presets.hpp"
#include "teamsim/world/generator.hpp"

namespace teamsim::engine {
namespace {

using tdp::load_preset;

world::Scenario default_scenario(std::uint64_t seed = 1) { return world::generate_scenario({}, seed); }

Session batch(const std::string& preset, std::uint64_t seed, Bindings overrides = {},
              world::Scenario scenario = default_scenario()) {
    auto p = load_preset(preset);
    SessionConfig c;
    c.seed = seed;
    return Session::create(std::move(scenario), p, default_bindings(p, overrides), c);
}

Session live(const std::string& preset, world::Scenario scenario = default_scenario(), Bindings overrides = {}) {
    auto p = load_preset(preset);
    overrides["h"] = LiveHuman{};
    SessionConfig c;
    c.live_mode = true;
    return Session::create(std::move(scenario), p, default_bindings(p, overrides), c);
}

bool contains_key(const nlohmann::ordered_json& j, const std::string& key) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (k == key || contains_key(v, key)) return true;
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (contains_key(v, key)) return true;
        }
    }
    return false;
}

TEST(SessionCreate, StartsAtTickZeroWithUniformBelief) {
    auto s = batch("manual", 1);
    EXPECT_EQ(s.tick(), 0);
    EXPECT_FALSE(s.finished());
    EXPECT_TRUE(s.log().empty());
    ASSERT_EQ(s.belief().size(), 3u);
    for (double p : s.belief().probabilities()) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
    EXPECT_EQ(s.machine().current(), "manual");
}

TEST(SessionCreate, BindingErrors) {
    auto strict = load_preset("autonomous_strict");
    EXPECT_THROW(Session::create(default_scenario(), strict, {{"a", agents::AgentProfile{}}, {"h", agents::SimHumanProfile{}}}, {}),
                 UnboundActor);
    EXPECT_THROW(Session::create(default_scenario(), strict, {}, {}), UnboundActor);
    EXPECT_THROW(Session::create(default_scenario(), strict, {{"a", agents::SimHumanProfile{}}}, {}), UnboundActor);
    auto manual = load_preset("manual");
    EXPECT_THROW(Session::create(default_scenario(), manual, {{"h", LiveHuman{}}}, {}), std::invalid_argument);
}

TEST(SessionCreate, DuplicateLiveHuman) {
    auto p = tdp::parse_pattern(
        "pattern two { actors: human h, human k; tasks: t; state s { allocate h -> t [direct]; } initial s; }");
    SessionConfig c;
    c.live_mode = true;
    EXPECT_THROW(Session::create(default_scenario(), p, {{"h", LiveHuman{}}, {"k", LiveHuman{}}}, c),
                 DuplicateLiveHuman);
}

TEST(SessionCreate, LintFailure) {
    auto p = tdp::parse_pattern(
        "pattern bad { actors: human h; tasks: t; state s { allocate h -> t [direct]; } }");
    EXPECT_THROW(Session::create(default_scenario(), p, {{"h", agents::SimHumanProfile{}}}, {}), tdp::LintFailure);
}

TEST(SessionStep, CooldownTickHasOnlyTheMarker) {
    agents::SimHumanProfile slow;
    slow.speed = 8;
    auto s = batch("manual", 1, {{"h", slow}});
    for (int t = 1; t < 8; ++t) {
        auto events = s.step();
        if (t == 1) {
            ASSERT_EQ(events.front().kind, "session_start");
            events.erase(events.begin());
        }
        ASSERT_EQ(events.size(), 1u) << "tick " << t;
        EXPECT_EQ(events[0].kind, "tick");
        EXPECT_EQ(events[0].actor, "system");
    }
    auto events = s.step();
    ASSERT_GT(events.size(), 1u);
    EXPECT_EQ(events[1].actor, "h");
}

TEST(SessionStep, UnauthorizedSensitiveCollectIsViolation) {
    world::ScenarioConfig c;
    c.n_sources = 2;
    c.n_sensitive = 1;
    c.n_linked = 0;
    c.items_per_source = 1;
    c.p_signal = 0.0;  // never decides from the open source alone
    auto s = batch("autonomous_strict", 1, {}, world::generate_scenario(c, 1));
    run_to_completion(s);
    int flagged = 0;
    for (const auto& e : s.log()) {
        if (e.kind == "collect" && e.outcome.value("violation", false)) {
            ++flagged;
            EXPECT_EQ(e.payload.at("source"), "S2");
        }
    }
    EXPECT_EQ(flagged, 1);
    EXPECT_EQ(s.metrics().violations, 1);
}

TEST(SessionStep, SingleHypothesisDecidesAtTickZero) {
    world::ScenarioConfig c;
    c.n_hypotheses = 1;
    auto s = batch("manual", 1, {}, world::generate_scenario(c, 3));
    EXPECT_TRUE(s.finished());
    EXPECT_EQ(s.tick(), 0);
    auto o = s.outcome();
    EXPECT_TRUE(o.decided);
    EXPECT_EQ(o.correct, true);
    EXPECT_EQ(o.metrics.ticks_to_decision, 0);
    EXPECT_THROW(s.step(), SessionFinished);
}

TEST(SessionStep, ZeroMaxTicks) {
    auto p = load_preset("autonomous_strict");
    SessionConfig c;
    c.max_ticks = 0;
    auto s = Session::create(default_scenario(), p, default_bindings(p), c);
    auto o = run_to_completion(s);
    EXPECT_FALSE(o.decided);
    EXPECT_FALSE(o.metrics.ticks_to_decision.has_value());
    EXPECT_FALSE(o.correct.has_value());
}

TEST(SessionStep, MaxTicksOverride) {
    auto s = batch("manual", 1);
    auto o = run_to_completion(s, 3);
    EXPECT_EQ(s.tick(), 3);
    EXPECT_FALSE(o.decided);
}

TEST(SessionStep, NoiselessAutonomyDecidesGroundTruth) {
    world::ScenarioConfig c;
    c.p_signal = 1.0;
    c.items_per_source = 50;
    agents::AgentProfile exact;
    exact.accuracy = 1.0;
    exact.reliability_noise = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto s = batch("autonomous_strict", seed, {{"a", exact}}, world::generate_scenario(c, seed));
        auto o = run_to_completion(s);
        ASSERT_TRUE(o.decided);
        EXPECT_EQ(o.chosen, s.scenario().ground_truth);
        EXPECT_EQ(o.correct, true);
    }
}

TEST(SessionStep, AutonomyBeatsManualOnMatchedSeeds) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto sc = default_scenario(seed);
        auto a = batch("autonomous_strict", seed, {}, sc);
        auto m = batch("manual", seed, {}, sc);
        auto oa = run_to_completion(a);
        auto om = run_to_completion(m);
        if (oa.decided && om.decided) EXPECT_LT(*oa.metrics.ticks_to_decision, *om.metrics.ticks_to_decision);
    }
}

TEST(SessionStep, EventsAreOrderedAndGapFree) {
    auto s = batch("collaborative", 4);
    run_to_completion(s);
    ASSERT_FALSE(s.log().empty());
    EXPECT_EQ(s.log()[0].kind, "session_start");
    EXPECT_EQ(s.log().back().kind, "finish");
    for (std::size_t i = 0; i < s.log().size(); ++i) {
        EXPECT_EQ(s.log()[i].seq, static_cast<std::int64_t>(i));
        if (i) EXPECT_GE(s.log()[i].tick, s.log()[i - 1].tick);
    }
}

TEST(SessionStep, QuestionsUnlockSources) {
    int raised = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto s = batch("autonomous_strict", seed);
        run_to_completion(s);
        for (const auto& q : s.questions()) {
            ++raised;
            for (const auto& src : q.unlocked_sources) EXPECT_EQ(*s.scenario().source(src).linked_question, q.hypothesis);
        }
    }
    EXPECT_GT(raised, 0);
}

TEST(LiveSession, ProcessWithoutAllocationIsRejected) {
    auto s = live("phased_autonomy");
    auto r = s.submit_human_action({"h", agents::Collect{"S1"}});
    EXPECT_TRUE(r.queued);
    s.step();
    s.submit_human_action({"h", agents::Command{"go_auto"}});
    for (int i = 0; i < 5; ++i) s.step();
    ASSERT_EQ(s.machine().current(), "autonomous");
    ASSERT_FALSE(s.items().empty());
    s.submit_human_action({"h", agents::Process{s.items().front().id}});
    auto events = s.step();
    auto it = std::find_if(events.begin(), events.end(), [](const auto& e) { return e.actor == "h"; });
    ASSERT_NE(it, events.end());
    EXPECT_EQ(it->kind, "process");
    EXPECT_EQ(it->outcome.at("status"), "rejected");
    EXPECT_EQ(it->outcome.at("reason"), "PermissionDenied");
}

TEST(LiveSession, CommandFiresImmediately) {
    auto s = live("phased_autonomy");
    auto r = s.submit_human_action({"h", agents::Command{"go_auto"}});
    EXPECT_FALSE(r.queued);
    EXPECT_EQ(s.machine().current(), "handover_to_auto");
    ASSERT_EQ(r.events.size(), 3u);  // header, submit, state_change
    EXPECT_EQ(r.events[1].kind, "submit");
    EXPECT_EQ(r.events[2].kind, "state_change");
    EXPECT_EQ(r.events[2].payload.at("cause"), "command:go_auto");
}

TEST(LiveSession, UnmatchedCommandIsHarmless) {
    auto s = live("phased_autonomy");
    s.submit_human_action({"h", agents::Command{"go_manual"}});
    EXPECT_EQ(s.machine().current(), "manual");
}

TEST(LiveSession, NewestQueuedActionWins) {
    auto s = live("manual");
    EXPECT_FALSE(s.submit_human_action({"h", agents::Collect{"S1"}}).replaced);
    EXPECT_TRUE(s.submit_human_action({"h", agents::Collect{"S2"}}).replaced);
    auto events = s.step();
    int human = 0;
    for (const auto& e : events) {
        if (e.actor != "h") continue;
        ++human;
        EXPECT_EQ(e.payload.at("source"), "S2");
    }
    EXPECT_EQ(human, 1);
}

TEST(LiveSession, GrantClearsPendingRequest) {
    agents::AgentProfile skip;
    skip.sensitive_policy = agents::SensitivePolicy::skip;
    world::ScenarioConfig c;
    c.items_per_source = 1;
    c.p_signal = 0.0;
    auto s = live("collaborative", world::generate_scenario(c, 2), {{"a", skip}});
    std::string sensitive;
    for (int i = 0; i < 200 && !s.finished() && s.pending_authorizations().empty(); ++i) {
        // The human processes whatever is waiting so the agent keeps collecting.
        for (const auto& item : s.items()) {
            if (!item.processed()) {
                s.submit_human_action({"h", agents::Process{item.id}});
                break;
            }
        }
        s.step();
    }
    ASSERT_FALSE(s.finished());
    ASSERT_EQ(s.pending_authorizations().size(), 1u);
    sensitive = s.pending_authorizations()[0];
    s.submit_human_action({"h", agents::Authorize{sensitive, true}});
    auto events = s.step();
    auto it = std::find_if(events.begin(), events.end(), [](const auto& e) { return e.kind == "authorize"; });
    ASSERT_NE(it, events.end());
    EXPECT_EQ(it->outcome.at("status"), "executed");
    EXPECT_EQ(it->outcome.at("was_pending"), true);
    EXPECT_TRUE(s.pending_authorizations().empty());
    EXPECT_TRUE(s.granted().contains(sensitive));
}

TEST(LiveSession, SubmitErrors) {
    auto b = batch("manual", 1);
    EXPECT_THROW(b.submit_human_action({"h", agents::Idle{}}), NotLiveMode);
    auto s = live("collaborative");
    EXPECT_THROW(s.submit_human_action({"a", agents::Collect{"S1"}}), std::invalid_argument);
    EXPECT_THROW(run_to_completion(s), std::logic_error);
}

TEST(LiveSession, SnapshotRedactsGroundTruth) {
    auto s = live("collaborative");
    for (int i = 0; i < 40 && !s.finished(); ++i) s.step();
    auto snap = s.snapshot();
    for (const char* key : {"true_class", "true_reliability", "ground_truth", "signal_rate", "correct",
                            "mislabel_rate"}) {
        EXPECT_FALSE(contains_key(snap, key)) << key;
    }
    ASSERT_TRUE(snap["permitted"].is_object());
    EXPECT_EQ(snap["permitted"]["actor"], "h");
    EXPECT_NE(snap.dump().find("\"items\""), std::string::npos);

    auto b = batch("collaborative", 1);
    run_to_completion(b);
    auto full = b.snapshot();
    EXPECT_TRUE(contains_key(full, "true_class"));
    EXPECT_TRUE(contains_key(full, "ground_truth"));
}

TEST(Snapshot, TickZero) {
    auto s = batch("phased_autonomy", 1);
    auto snap = s.snapshot();
    EXPECT_EQ(snap["tick"], 0);
    EXPECT_EQ(snap["status"], "running");
    EXPECT_EQ(snap["pattern"]["state"], "manual");
    EXPECT_EQ(snap["pattern"]["commands"], nlohmann::ordered_json::array({"go_auto"}));
    EXPECT_TRUE(snap["items"].empty());
    double sum = 0.0;
    for (const auto& h : snap["hypotheses"]) {
        EXPECT_DOUBLE_EQ(h["probability"].get<double>(), 1.0 / 3.0);
        sum += h["probability"].get<double>();
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Snapshot, BeliefSumsToOneThroughout) {
    auto s = batch("collaborative", 2);
    while (!s.finished()) {
        s.step();
        double sum = 0.0;
        const auto snap = s.snapshot();
        for (const auto& h : snap["hypotheses"]) sum += h["probability"].get<double>();
        ASSERT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(Replay, BatchSessionIsByteIdentical) {
    for (const char* preset : {"manual", "autonomous_strict", "collaborative", "phased_autonomy"}) {
        auto a = batch(preset, 7);
        auto b = batch(preset, 7);
        run_to_completion(a);
        run_to_completion(b);
        EXPECT_EQ(serialize_log(a.log()), serialize_log(b.log())) << preset;
        auto p = load_preset(preset);
        SessionConfig c;
        c.seed = 7;
        EXPECT_NO_THROW(verify_replay(default_scenario(), p, default_bindings(p), c, a.log()));
    }
}

TEST(Replay, LiveScheduleReproducesLog) {
    auto s = live("phased_autonomy");
    s.step();
    s.submit_human_action({"h", agents::Collect{"S1"}});
    s.step();
    s.step();
    s.submit_human_action({"h", agents::Command{"go_auto"}});
    for (int i = 0; i < 8; ++i) s.step();
    s.submit_human_action({"h", agents::Command{"go_manual"}});
    s.submit_human_action({"h", agents::Correct{"S1-1", "H2", std::nullopt}});
    for (int i = 0; i < 3 && !s.finished(); ++i) s.step();

    auto p = load_preset("phased_autonomy");
    auto r = verify_replay(default_scenario(), p, s.bindings(), s.config(), s.log());
    EXPECT_EQ(serialize_log(r.log()), serialize_log(s.log()));
}

TEST(Replay, TamperedLogDiverges) {
    auto s = batch("manual", 3);
    run_to_completion(s, 30);
    auto log = s.log();
    log[5].seq += 1;
    auto p = load_preset("manual");
    SessionConfig c;
    c.seed = 3;
    EXPECT_THROW(verify_replay(default_scenario(), p, default_bindings(p), c, log), ReplayDivergence);
}

TEST(Replay, DifferentSeedDiffers) {
    auto a = batch("autonomous_strict", 1);
    auto b = batch("autonomous_strict", 2);
    run_to_completion(a);
    run_to_completion(b);
    EXPECT_NE(serialize_log(a.log()), serialize_log(b.log()));
}

TEST(EventLog, ParseRoundTrip) {
    auto s = batch("collaborative", 5);
    run_to_completion(s);
    auto text = serialize_log(s.log());
    EXPECT_EQ(parse_log(text), s.log());
    EXPECT_EQ(text.back(), '\n');
    EXPECT_THROW(parse_log("{not json}\n"), std::invalid_argument);
}

// Many batch sessions across presets and seeds.
struct SessionCase {
    std::string preset;
    std::uint64_t seed;
};

std::vector<SessionCase> corpus() {
    std::vector<SessionCase> out;
    for (const auto& preset : tdp::presets()) {
        for (std::uint64_t seed = 1; seed <= 15; ++seed) out.push_back({std::string(preset.name), seed});
    }
    return out;
}

TEST(SessionProperty, BeliefMatchesFreshFoldEveryTick) {
    for (const auto& c : corpus()) {
        auto s = batch(c.preset, c.seed, {}, default_scenario(c.seed));
        while (!s.finished()) {
            s.step();
            ASSERT_TRUE(s.belief_consistent(1e-12)) << c.preset << " " << c.seed << " tick " << s.tick();
        }
    }
}

TEST(SessionProperty, ItemsAreConservedAndProcessingOnlyGrows) {
    for (const auto& c : corpus()) {
        auto s = batch(c.preset, c.seed, {}, default_scenario(c.seed));
        std::size_t processed_before = 0;
        std::size_t items_before = 0;
        while (!s.finished()) {
            s.step();
            std::set<std::string> ids;
            std::size_t processed = 0;
            for (const auto& item : s.items()) {
                ASSERT_TRUE(ids.insert(item.id).second) << "duplicate item " << item.id;
                processed += item.processed();
            }
            std::size_t collected = 0;
            for (const auto& e : s.log()) {
                collected += e.kind == "collect" && e.outcome.value("status", "") == "executed";
            }
            ASSERT_EQ(collected, s.items().size());
            ASSERT_GE(s.items().size(), items_before);
            ASSERT_GE(processed, processed_before);
            processed_before = processed;
            items_before = s.items().size();
        }
    }
}

TEST(SessionProperty, AuditFindsNoUnpermittedActionsAndExactViolations) {
    int executed = 0;
    for (const auto& c : corpus()) {
        auto s = batch(c.preset, c.seed, {}, default_scenario(c.seed));
        run_to_completion(s);
        auto audit = testing::audit_log(load_preset(c.preset), s.scenario(), s.log());
        executed += audit.executed;
        EXPECT_TRUE(audit.unpermitted.empty()) << c.preset << " " << c.seed << ": " << audit.unpermitted.front();
        EXPECT_EQ(audit.violations, s.metrics().violations);
        EXPECT_EQ(audit.flagged_violations, s.metrics().violations);
    }
    EXPECT_GT(executed, 1000);
}

TEST(SessionProperty, HumanLedPresetsNeverViolate) {
    for (const char* preset : {"manual", "collaborative"}) {
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            auto s = batch(preset, seed, {}, default_scenario(seed));
            run_to_completion(s);
            ASSERT_EQ(s.metrics().violations, 0) << preset << " " << seed;
        }
    }
}

}  // namespace
}  // namespace teamsim::engine
