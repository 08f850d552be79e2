#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "teamsim/agents/action.hpp"
#include "teamsim/agents/planner.hpp"
#include "teamsim/engine/bindings.hpp"
#include "teamsim/engine/event.hpp"
#include "teamsim/engine/metrics.hpp"
#include "teamsim/rng.hpp"
#include "teamsim/tdp/machine.hpp"
#include "teamsim/world/belief.hpp"
#include "teamsim/world/world_state.hpp"

namespace teamsim::engine {

class UnboundActor : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DuplicateLiveHuman : public std::invalid_argument {
public:
    DuplicateLiveHuman() : std::invalid_argument("at most one live human may be bound") {}
};

class SessionFinished : public std::logic_error {
public:
    SessionFinished() : std::logic_error("session has finished") {}
};

class NotLiveMode : public std::logic_error {
public:
    NotLiveMode() : std::logic_error("session is not in live mode") {}
};

class ReplayDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SessionConfig {
    int max_ticks = 5000;
    bool live_mode = false;
    std::optional<std::uint64_t> seed;  // defaults to the scenario seed

    friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

enum class SessionStatus { running, finished };
enum class FinishReason { decision, max_ticks, exhausted };

std::string_view to_string(SessionStatus s);
std::string_view to_string(FinishReason r);

struct SubmitResult {
    bool queued = false;    // non-command actions wait for the next step
    bool replaced = false;  // an earlier queued action was dropped
    std::vector<SimEvent> events;
};

struct Outcome {
    bool decided = false;
    std::optional<std::string> chosen;
    std::optional<bool> correct;
    Metrics metrics;
};

// One running analysis: a deterministic discrete-tick loop over a pattern
// machine, a scenario and its bound actors.
class Session {
public:
    // Throws tdp::LintFailure, UnboundActor, DuplicateLiveHuman or
    // world::InvalidConfig.
    static Session create(world::Scenario scenario, tdp::Pattern pattern, Bindings bindings, SessionConfig config);

    // Advances one tick and returns the events it produced.
    std::vector<SimEvent> step();

    // Live mode only. Commands fire the pattern machine at once; other
    // actions replace any queued action and run on the next step.
    SubmitResult submit_human_action(agents::Action action);

    nlohmann::ordered_json snapshot() const;

    int tick() const { return tick_; }
    SessionStatus status() const { return status_; }
    bool finished() const { return status_ == SessionStatus::finished; }
    std::optional<FinishReason> finish_reason() const { return finish_reason_; }
    const SessionConfig& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    const world::Scenario& scenario() const { return *scenario_; }
    const tdp::PatternMachine& machine() const { return machine_; }
    const Bindings& bindings() const { return bindings_; }
    const std::vector<world::InfoItem>& items() const { return items_; }
    const world::BeliefState& belief() const { return belief_; }
    const std::vector<world::InformationQuestion>& questions() const { return questions_; }
    const std::vector<std::string>& pending_authorizations() const { return pending_; }
    const std::set<std::string>& granted() const { return granted_; }
    const std::vector<SimEvent>& log() const { return log_; }
    const std::optional<std::string>& live_human() const { return live_human_; }
    std::optional<agents::Action> queued_action() const { return queued_; }

    // Metrics so far; the mislabel rate reflects the current processing records.
    Metrics metrics() const;
    Outcome outcome() const;

    // Recomputes the belief from every processing record and compares it with
    // the maintained one.
    bool belief_consistent(double tolerance = 1e-12) const;

private:
    struct ActorSlot {
        tdp::ActorDecl decl;
        ActorBinding binding;
        int last_action_tick = 0;
        Lcg rng;
        agents::AgentState agent_state;
        agents::HumanState human_state;
    };

    Session(std::shared_ptr<const world::Scenario> scenario, tdp::PatternMachine machine, Bindings bindings,
            SessionConfig config);

    SimEvent& emit(std::string actor, std::string kind, nlohmann::ordered_json payload,
                   nlohmann::ordered_json outcome = nlohmann::ordered_json::object());
    agents::TeamView view() const;
    agents::Permissions permissions_of(const std::string& actor) const;
    bool ready(const ActorSlot& slot) const;
    std::optional<agents::Action> next_action(ActorSlot& slot);
    void execute(ActorSlot& slot, const agents::Action& action);
    void fire(const tdp::Trigger& trigger, std::string_view cause);
    void on_evidence_changed();
    void evaluate_stop();
    void finish(FinishReason reason);
    ActorSlot* slot_of(std::string_view actor);
    world::InfoItem* find_item(std::string_view id);
    double mislabel_rate() const;

    std::shared_ptr<const world::Scenario> scenario_;
    tdp::PatternMachine machine_;
    Bindings bindings_;
    SessionConfig config_;
    std::uint64_t seed_ = 0;
    std::vector<ActorSlot> actors_;
    std::optional<std::string> live_human_;
    std::optional<agents::Action> queued_;

    int tick_ = 0;
    std::int64_t next_seq_ = 0;
    SessionStatus status_ = SessionStatus::running;
    std::optional<FinishReason> finish_reason_;

    world::WorldState world_;
    std::vector<world::InfoItem> items_;
    world::BeliefState belief_;
    world::QuestionTracker tracker_;
    std::vector<world::InformationQuestion> questions_;
    std::vector<std::string> pending_;
    std::set<std::string> granted_;
    std::set<std::string> denied_;
    std::vector<std::string> directed_;
    Metrics metrics_;
    std::vector<SimEvent> log_;
};

// Steps until a stop condition. `max_ticks` overrides the session limit.
// Throws std::logic_error for live sessions.
Outcome run_to_completion(Session& s, std::optional<int> max_ticks = std::nullopt);

struct ScheduledAction {
    int tick = 0;  // session tick at submission time
    agents::Action action;
};

// Re-runs a session, submitting each scheduled action when the session
// reaches its tick, until the session finishes or reaches `until_tick`.
Session replay(world::Scenario scenario, tdp::Pattern pattern, Bindings bindings, SessionConfig config,
               const std::vector<ScheduledAction>& schedule, std::optional<int> until_tick = std::nullopt);

// Live submissions recorded in a log, in order.
std::vector<ScheduledAction> schedule_from_log(const std::vector<SimEvent>& log);

// Replays and byte-compares against `recorded`; throws ReplayDivergence with
// the first differing line.
Session verify_replay(world::Scenario scenario, tdp::Pattern pattern, Bindings bindings, SessionConfig config,
                      const std::vector<SimEvent>& recorded);

}  // namespace teamsim::engine
