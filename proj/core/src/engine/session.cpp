#include "teamsim/engine/session.hpp"

#include <algorithm>
#include <cmath>

#include "teamsim/agents/processing.hpp"

namespace teamsim::engine {
namespace {

using oj = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

agents::ProcessingSkill skill_of(const ActorBinding& b) {
    return std::visit(overloaded{
                          [](const agents::AgentProfile& p) { return p.skill(); },
                          [](const agents::SimHumanProfile& p) { return p.skill(); },
                          // A live analyst's judgement is modelled with the default human skill.
                          [](const LiveHuman&) { return agents::SimHumanProfile{}.skill(); },
                      },
                      b);
}

// Keyed by actor id so an actor draws the same stream under every pattern.
std::uint64_t actor_stream(std::string_view id) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

int speed_of(const ActorBinding& b) {
    return std::visit(overloaded{
                          [](const agents::AgentProfile& p) { return p.speed; },
                          [](const agents::SimHumanProfile& p) { return p.speed; },
                          [](const LiveHuman&) { return 1; },
                      },
                      b);
}

}  // namespace

std::string_view to_string(SessionStatus s) { return s == SessionStatus::running ? "running" : "finished"; }

std::string_view to_string(FinishReason r) {
    switch (r) {
        case FinishReason::decision: return "decision";
        case FinishReason::max_ticks: return "max_ticks";
        case FinishReason::exhausted: break;
    }
    return "exhausted";
}

Session Session::create(world::Scenario scenario, tdp::Pattern pattern, Bindings bindings, SessionConfig config) {
    scenario.validate();
    if (config.max_ticks < 0) throw std::invalid_argument("max_ticks must be >= 0");
    auto machine = tdp::compile(std::move(pattern));
    const auto& p = machine.pattern();

    int live = 0;
    for (const auto& [id, binding] : bindings) {
        const tdp::ActorDecl* decl = p.find_actor(id);
        if (!decl) throw UnboundActor("binding names '" + id + "', which pattern '" + p.name + "' does not declare");
        const bool agent_binding = std::holds_alternative<agents::AgentProfile>(binding);
        if (agent_binding != (decl->actor_class == tdp::ActorClass::agent)) {
            throw UnboundActor("binding for '" + id + "' does not match its declared class " +
                               std::string(tdp::to_string(decl->actor_class)));
        }
        if (const auto* a = std::get_if<agents::AgentProfile>(&binding)) a->validate();
        if (const auto* h = std::get_if<agents::SimHumanProfile>(&binding)) h->validate();
        if (std::holds_alternative<LiveHuman>(binding)) {
            if (!config.live_mode) throw std::invalid_argument("a live human needs a live-mode session");
            ++live;
        }
    }
    if (live > 1) throw DuplicateLiveHuman();
    for (const auto& actor : p.actors) {
        if (!bindings.contains(actor.id)) throw UnboundActor("actor '" + actor.id + "' is not bound");
    }
    return Session(std::make_shared<const world::Scenario>(std::move(scenario)), std::move(machine),
                   std::move(bindings), config);
}

Session::Session(std::shared_ptr<const world::Scenario> scenario, tdp::PatternMachine machine, Bindings bindings,
                 SessionConfig config)
    : scenario_(std::move(scenario)),
      machine_(std::move(machine)),
      bindings_(std::move(bindings)),
      config_(config),
      seed_(config.seed.value_or(scenario_->seed)),
      world_(scenario_, seed_),
      belief_(world::BeliefState::uniform(scenario_->hypotheses.size())) {
    const auto& decls = machine_.pattern().actors;
    for (std::size_t i = 0; i < decls.size(); ++i) {
        const auto& binding = bindings_.at(decls[i].id);
        actors_.push_back({decls[i], binding, 0, Lcg(mix_seed(seed_, actor_stream(decls[i].id))), {}, {}});
        if (std::holds_alternative<LiveHuman>(binding)) live_human_ = decls[i].id;
        metrics_.workload[decls[i].id] = {};
    }

    if (world::decision_reached(belief_, scenario_->generator.tau)) finish(FinishReason::decision);
}

SimEvent& Session::emit(std::string actor, std::string kind, oj payload, oj outcome) {
    // The header that lets a log be replayed precedes the first real event.
    if (log_.empty()) {
        oj start;
        start["pattern"] = machine_.pattern().name;
        start["state"] = machine_.current();
        start["seed"] = seed_;
        start["scenario_seed"] = scenario_->seed;
        start["max_ticks"] = config_.max_ticks;
        start["live_mode"] = config_.live_mode;
        start["bindings"] = to_json(bindings_);
        log_.push_back({0, next_seq_++, std::string(kSystemActor), "session_start", std::move(start), oj::object()});
    }
    log_.push_back({tick_, next_seq_++, std::move(actor), std::move(kind), std::move(payload), std::move(outcome)});
    return log_.back();
}

agents::TeamView Session::view() const {
    agents::TeamView v;
    v.scenario = scenario_.get();
    for (const auto& src : scenario_->sources) {
        agents::SourceView sv;
        sv.id = src.id;
        sv.sensitivity = src.sensitivity;
        sv.discovered = world_.discovered(src.id);
        sv.granted = granted_.contains(src.id);
        sv.denied = denied_.contains(src.id);
        sv.pending = std::find(pending_.begin(), pending_.end(), src.id) != pending_.end();
        sv.remaining = world_.remaining(src.id);
        sv.signal_rate = src.signal_rate;
        v.sources.push_back(std::move(sv));
    }
    v.directed = directed_;
    v.items = items_;
    for (const auto& slot : actors_) {
        if (slot.decl.actor_class == tdp::ActorClass::agent) {
            v.agent_ids.insert(slot.decl.id);
            v.agent_states[slot.decl.id] = slot.agent_state;
        } else if (machine_.permitted_interventions(slot.decl.id).contains(tdp::Intervention::authorize)) {
            v.authorizer_present = true;
        }
    }
    return v;
}

agents::Permissions Session::permissions_of(const std::string& actor) const {
    agents::Permissions p;
    for (const auto& task : machine_.pattern().tasks) p.work[task] = machine_.permitted_work(actor, task);
    p.interventions = machine_.permitted_interventions(actor);
    return p;
}

bool Session::ready(const ActorSlot& slot) const { return tick_ - slot.last_action_tick >= speed_of(slot.binding); }

std::optional<agents::Action> Session::next_action(ActorSlot& slot) {
    if (std::holds_alternative<LiveHuman>(slot.binding)) {
        if (!queued_ || !ready(slot)) return std::nullopt;
        auto a = std::move(*queued_);
        queued_.reset();
        if (a.is_idle()) return std::nullopt;
        return a;
    }
    if (!ready(slot)) return std::nullopt;
    const auto v = view();
    const auto perm = permissions_of(slot.decl.id);
    agents::Action a;
    if (const auto* agent = std::get_if<agents::AgentProfile>(&slot.binding)) {
        a = agents::plan_agent_action(slot.decl.id, v, *agent, slot.agent_state, perm, slot.rng);
    } else {
        const auto& human = std::get<agents::SimHumanProfile>(slot.binding);
        a = agents::plan_sim_human_action(slot.decl.id, v, human, slot.human_state, perm, slot.rng);
    }
    if (a.is_idle()) return std::nullopt;
    return a;
}

Session::ActorSlot* Session::slot_of(std::string_view actor) {
    auto it = std::find_if(actors_.begin(), actors_.end(), [&](const auto& s) { return s.decl.id == actor; });
    return it == actors_.end() ? nullptr : &*it;
}

world::InfoItem* Session::find_item(std::string_view id) {
    auto it = std::find_if(items_.begin(), items_.end(), [&](const auto& i) { return i.id == id; });
    return it == items_.end() ? nullptr : &*it;
}

void Session::fire(const tdp::Trigger& trigger, std::string_view cause) {
    const std::string from = machine_.current();
    auto res = machine_.fire(trigger);
    if (res.changed) {
        emit(std::string(kSystemActor), "state_change", {{"from", from}, {"to", res.new_state}, {"cause", cause}});
    }
}

void Session::execute(ActorSlot& slot, const agents::Action& action) {
    const std::string& actor = slot.decl.id;
    slot.last_action_tick = tick_;
    const std::string kind(action.kind());
    const oj payload = agents::payload_to_json(action);
    const auto perm = permissions_of(actor);

    auto reject = [&](std::string reason, std::string detail) {
        emit(actor, kind, payload,
             {{"status", "rejected"}, {"reason", std::move(reason)}, {"detail", std::move(detail)}});
    };
    auto deny_task = [&](std::string_view task) {
        reject("PermissionDenied", "task " + std::string(task) + " is not a direct allocation of '" + actor +
                                       "' in state " + machine_.current());
    };
    auto deny_intervention = [&](tdp::Intervention iv) {
        reject("PermissionDenied", "intervention " + std::string(tdp::to_string(iv)) + " is not granted to '" +
                                       actor + "' in state " + machine_.current());
    };
    auto known_source = [&](const std::string& id) {
        if (scenario_->source_index(id)) return true;
        reject("UnknownSource", id);
        return false;
    };
    auto count_direct = [&] { ++metrics_.workload[actor].direct_actions; };

    std::visit(
        overloaded{
            [&](const agents::DirectSources& a) {
                if (!perm.direct("direct_srcs")) return deny_task("direct_srcs");
                if (!known_source(a.source)) return;
                if (!world_.discovered(a.source)) return reject("SourceUndiscovered", a.source);
                if (std::find(directed_.begin(), directed_.end(), a.source) == directed_.end()) {
                    directed_.push_back(a.source);
                }
                count_direct();
                emit(actor, kind, payload, {{"status", "executed"}});
            },
            [&](const agents::Collect& a) {
                if (!perm.direct("collect")) return deny_task("collect");
                if (!known_source(a.source)) return;
                if (!world_.discovered(a.source)) return reject("SourceUndiscovered", a.source);
                if (world_.exhausted(a.source)) return reject("SourceExhausted", a.source);
                const bool violation = scenario_->source(a.source).sensitivity == world::Sensitivity::sensitive &&
                                       !granted_.contains(a.source);
                items_.push_back(world_.sample_item(a.source));
                metrics_.sources_accessed.insert(a.source);
                if (violation) ++metrics_.violations;
                count_direct();
                emit(actor, kind, payload,
                     {{"status", "executed"}, {"item", items_.back().id}, {"violation", violation}});
            },
            [&](const agents::Process& a) {
                if (!perm.direct("process")) return deny_task("process");
                world::InfoItem* item = find_item(a.item);
                if (!item) return reject("UnknownItem", a.item);
                if (item->processed()) return reject("AlreadyProcessed", a.item);
                item->processing = agents::execute_process(*scenario_, *item, skill_of(slot.binding), actor, slot.rng);
                count_direct();
                emit(actor, kind, payload,
                     {{"status", "executed"},
                      {"assigned_class", item->processing->assigned_class},
                      {"assessed_reliability", item->processing->assessed_reliability}});
                on_evidence_changed();
            },
            [&](const agents::Correct& a) {
                if (!perm.may(tdp::Intervention::correct)) return deny_intervention(tdp::Intervention::correct);
                world::InfoItem* item = find_item(a.item);
                if (!item) return reject("UnknownItem", a.item);
                if (a.new_class != world::kNoise && !scenario_->hypothesis_index(a.new_class)) {
                    return reject("UnknownHypothesis", a.new_class);
                }
                if (!item->processing) return reject("NotProcessed", a.item);
                if (item->processing->corrected) return reject("AlreadyCorrected", a.item);
                const double r = a.reliability.value_or(item->processing->assessed_reliability);
                item->processing = agents::apply_correction(*item, a.new_class, r);
                ++metrics_.corrections_issued;
                emit(actor, kind, payload,
                     {{"status", "executed"},
                      {"assigned_class", item->processing->assigned_class},
                      {"assessed_reliability", item->processing->assessed_reliability}});
                on_evidence_changed();
            },
            [&](const agents::Guide& a) {
                if (!perm.may(tdp::Intervention::guide)) return deny_intervention(tdp::Intervention::guide);
                ActorSlot* target = slot_of(a.agent);
                if (!target || target->decl.actor_class != tdp::ActorClass::agent) {
                    return reject("UnknownAgent", a.agent);
                }
                try {
                    target->agent_state = agents::apply_guidance(target->agent_state, view(), a.source);
                } catch (const world::UnknownSource&) {
                    return reject("UnknownSource", a.source);
                } catch (const world::SourceUndiscovered&) {
                    return reject("SourceUndiscovered", a.source);
                }
                emit(actor, kind, payload, {{"status", "executed"}});
            },
            [&](const agents::Authorize& a) {
                if (!perm.may(tdp::Intervention::authorize)) return deny_intervention(tdp::Intervention::authorize);
                if (!known_source(a.source)) return;
                const auto it = std::find(pending_.begin(), pending_.end(), a.source);
                const bool was_pending = it != pending_.end();
                if (was_pending) pending_.erase(it);
                if (a.grant) {
                    granted_.insert(a.source);
                    denied_.erase(a.source);
                } else {
                    denied_.insert(a.source);
                    granted_.erase(a.source);
                }
                emit(actor, kind, payload, {{"status", "executed"}, {"was_pending", was_pending}});
            },
            [&](const agents::RequestAuthorization& a) {
                if (!perm.direct("collect")) return deny_task("collect");
                if (!known_source(a.source)) return;
                if (scenario_->source(a.source).sensitivity != world::Sensitivity::sensitive) {
                    return reject("NotSensitive", a.source);
                }
                if (granted_.contains(a.source)) return reject("AlreadyGranted", a.source);
                if (denied_.contains(a.source)) return reject("AccessDenied", a.source);
                if (std::find(pending_.begin(), pending_.end(), a.source) != pending_.end()) {
                    return reject("AlreadyPending", a.source);
                }
                pending_.push_back(a.source);
                count_direct();
                emit(actor, kind, payload, {{"status", "executed"}});
                fire(tdp::Trigger::request("authorize"), "request:authorize");
            },
            [&](const agents::Command& a) {
                if (slot.decl.actor_class != tdp::ActorClass::human) {
                    return reject("PermissionDenied", "only humans issue commands");
                }
                emit(actor, kind, payload, {{"status", "executed"}});
                fire(tdp::Trigger::command(a.name), "command:" + a.name);
            },
            [](const agents::Idle&) {},
        },
        action.payload);
}

void Session::on_evidence_changed() {
    belief_ = world::recompute_belief(items_, scenario_->hypotheses, scenario_->generator.lambda);
    const auto tallies = world::evidence_tallies(items_);
    for (const auto& h : scenario_->hypotheses) {
        auto q = tracker_.maybe_raise(tallies, h.id, scenario_->generator.q_threshold, world_, tick_);
        if (!q) continue;
        emit(std::string(kSystemActor), "question", {{"hypothesis", q->hypothesis}, {"unlocked", q->unlocked_sources}});
        questions_.push_back(std::move(*q));
    }
}

std::vector<SimEvent> Session::step() {
    if (finished()) throw SessionFinished();
    const std::size_t first = log_.size();
    ++tick_;
    emit(std::string(kSystemActor), "tick", {{"state", machine_.current()}});

    const std::string before = machine_.current();
    if (machine_.tick().changed) {
        emit(std::string(kSystemActor), "state_change",
             {{"from", before}, {"to", machine_.current()}, {"cause", "dwell"}});
    }

    for (auto& slot : actors_) {
        if (auto action = next_action(slot)) execute(slot, *action);
    }

    for (const auto& slot : actors_) {
        const auto& allocs = machine_.current_state().allocations;
        const bool indirect = std::any_of(allocs.begin(), allocs.end(), [&](const auto& a) {
            return a.actor == slot.decl.id && a.work == tdp::Work::indirect;
        });
        if (indirect) ++metrics_.workload[slot.decl.id].indirect_ticks;
    }

    evaluate_stop();
    return {log_.begin() + static_cast<std::ptrdiff_t>(first), log_.end()};
}

void Session::evaluate_stop() {
    if (world::decision_reached(belief_, scenario_->generator.tau)) return finish(FinishReason::decision);
    if (tick_ >= config_.max_ticks) return finish(FinishReason::max_ticks);
    const bool sources_dry = std::all_of(scenario_->sources.begin(), scenario_->sources.end(), [&](const auto& s) {
        return !world_.discovered(s.id) || world_.exhausted(s.id);
    });
    const bool all_processed = std::all_of(items_.begin(), items_.end(), [](const auto& i) { return i.processed(); });
    if (sources_dry && all_processed) finish(FinishReason::exhausted);
}

double Session::mislabel_rate() const {
    int processed = 0;
    int wrong = 0;
    for (const auto& item : items_) {
        if (!item.processed()) continue;
        ++processed;
        if (item.mislabeled()) ++wrong;
    }
    return processed == 0 ? 0.0 : static_cast<double>(wrong) / processed;
}

void Session::finish(FinishReason reason) {
    status_ = SessionStatus::finished;
    finish_reason_ = reason;
    oj payload;
    payload["reason"] = to_string(reason);
    if (reason == FinishReason::decision) {
        auto [chosen, p] = world::map_hypothesis(belief_, scenario_->hypotheses);
        metrics_.decided = true;
        metrics_.ticks_to_decision = tick_;
        metrics_.chosen = chosen;
        metrics_.correct = chosen == scenario_->ground_truth;
        payload["decided"] = true;
        payload["chosen"] = chosen;
        payload["probability"] = p;
    } else {
        payload["decided"] = false;
    }
    metrics_.mislabel_rate_final = mislabel_rate();
    if (!config_.live_mode) payload["correct"] = metrics_.correct ? oj(*metrics_.correct) : oj(nullptr);
    emit(std::string(kSystemActor), "finish", std::move(payload));
}

SubmitResult Session::submit_human_action(agents::Action action) {
    if (!config_.live_mode) throw NotLiveMode();
    if (finished()) throw SessionFinished();
    if (!live_human_) throw std::invalid_argument("no live human is bound to this session");
    if (action.actor.empty()) action.actor = *live_human_;
    if (action.actor != *live_human_) throw std::invalid_argument("actions must come from the live human");

    SubmitResult result;
    const std::size_t first = log_.size();
    const oj payload = agents::payload_to_json(action);
    if (const auto* cmd = std::get_if<agents::Command>(&action.payload)) {
        emit(action.actor, "submit", payload, {{"status", "fired"}});
        fire(tdp::Trigger::command(cmd->name), "command:" + cmd->name);
    } else {
        result.queued = true;
        result.replaced = queued_.has_value();
        emit(action.actor, "submit", payload, {{"status", "queued"}, {"replaced", result.replaced}});
        queued_ = std::move(action);
    }
    result.events.assign(log_.begin() + static_cast<std::ptrdiff_t>(first), log_.end());
    return result;
}

Metrics Session::metrics() const {
    Metrics m = metrics_;
    if (!finished()) m.mislabel_rate_final = mislabel_rate();
    return m;
}

Outcome Session::outcome() const {
    Metrics m = metrics();
    return {m.decided, m.chosen, m.correct, m};
}

bool Session::belief_consistent(double tolerance) const {
    const auto fresh = world::recompute_belief(items_, scenario_->hypotheses, scenario_->generator.lambda);
    if (fresh.size() != belief_.size()) return false;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        if (std::abs(fresh[i] - belief_[i]) > tolerance) return false;
    }
    return true;
}

oj Session::snapshot() const {
    const bool reveal = !config_.live_mode;
    oj j;
    j["tick"] = tick_;
    j["status"] = to_string(status_);
    j["finish_reason"] = finish_reason_ ? oj(to_string(*finish_reason_)) : oj(nullptr);
    j["live_mode"] = config_.live_mode;

    const auto& state = machine_.current_state();
    oj pattern;
    pattern["name"] = machine_.pattern().name;
    pattern["state"] = state.name;
    pattern["is_handover"] = state.is_handover;
    pattern["ticks_in_state"] = machine_.ticks_in_state();
    pattern["dwell"] = state.dwell ? oj{{"ticks", state.dwell->ticks}, {"target", state.dwell->target}} : oj(nullptr);
    pattern["commands"] = machine_.available_commands();
    j["pattern"] = std::move(pattern);

    auto& hyps = j["hypotheses"] = oj::array();
    for (std::size_t i = 0; i < scenario_->hypotheses.size(); ++i) {
        const auto& h = scenario_->hypotheses[i];
        hyps.push_back({{"id", h.id}, {"label", h.label}, {"probability", belief_[i]}});
    }
    auto [map_id, map_p] = world::map_hypothesis(belief_, scenario_->hypotheses);
    j["map"] = {{"hypothesis", map_id}, {"probability", map_p}};
    j["tau"] = scenario_->generator.tau;
    j["description"] = scenario_->description;

    auto& sources = j["sources"] = oj::array();
    for (const auto& src : scenario_->sources) {
        oj s;
        s["id"] = src.id;
        s["label"] = src.label;
        s["sensitivity"] = world::to_string(src.sensitivity);
        s["discovered"] = world_.discovered(src.id);
        s["granted"] = granted_.contains(src.id);
        s["denied"] = denied_.contains(src.id);
        s["pending"] = std::find(pending_.begin(), pending_.end(), src.id) != pending_.end();
        s["items_remaining"] = world_.remaining(src.id);
        if (reveal) s["signal_rate"] = src.signal_rate;
        sources.push_back(std::move(s));
    }

    auto& items = j["items"] = oj::array();
    auto& unprocessed = j["unprocessed"] = oj::array();
    for (const auto& item : items_) {
        if (!item.processing) {
            unprocessed.push_back({{"id", item.id}, {"source_id", item.source_id}});
            continue;
        }
        oj it;
        it["id"] = item.id;
        it["source_id"] = item.source_id;
        it["assigned_class"] = item.processing->assigned_class;
        it["assessed_reliability"] = item.processing->assessed_reliability;
        it["processed_by"] = item.processing->processed_by;
        it["corrected"] = item.processing->corrected;
        if (reveal) {
            it["true_class"] = item.true_class;
            it["true_reliability"] = item.true_reliability;
        }
        items.push_back(std::move(it));
    }

    j["pending_authorizations"] = pending_;
    auto& questions = j["questions"] = oj::array();
    for (const auto& q : questions_) {
        questions.push_back(
            {{"hypothesis", q.hypothesis}, {"raised_at_tick", q.raised_at_tick}, {"unlocked", q.unlocked_sources}});
    }

    if (live_human_) {
        const auto perm = permissions_of(*live_human_);
        oj work = oj::object();
        for (const auto& [task, w] : perm.work) work[task] = tdp::to_string(w);
        oj ivs = oj::array();
        for (auto iv : perm.interventions) ivs.push_back(tdp::to_string(iv));
        j["permitted"] = {{"actor", *live_human_},
                          {"work", std::move(work)},
                          {"interventions", std::move(ivs)},
                          {"commands", machine_.available_commands()}};
    } else {
        j["permitted"] = nullptr;
    }

    j["metrics"] = to_json(metrics(), reveal);
    if (reveal) j["ground_truth"] = scenario_->ground_truth;
    return j;
}

Outcome run_to_completion(Session& s, std::optional<int> max_ticks) {
    if (s.config().live_mode) throw std::logic_error("run_to_completion is for batch sessions");
    const int limit = max_ticks.value_or(s.config().max_ticks);
    while (!s.finished() && s.tick() < limit) s.step();
    return s.outcome();
}

Session replay(world::Scenario scenario, tdp::Pattern pattern, Bindings bindings, SessionConfig config,
               const std::vector<ScheduledAction>& schedule, std::optional<int> until_tick) {
    Session s = Session::create(std::move(scenario), std::move(pattern), std::move(bindings), config);
    std::size_t next = 0;
    for (;;) {
        while (next < schedule.size() && schedule[next].tick <= s.tick()) {
            if (!s.finished()) s.submit_human_action(schedule[next].action);
            ++next;
        }
        if (s.finished()) break;
        if (until_tick && s.tick() >= *until_tick) break;
        s.step();
    }
    return s;
}

std::vector<ScheduledAction> schedule_from_log(const std::vector<SimEvent>& log) {
    std::vector<ScheduledAction> out;
    for (const auto& e : log) {
        if (e.kind != "submit") continue;
        auto action = agents::action_from_json(nlohmann::json::parse(e.payload.dump()));
        action.actor = e.actor;
        out.push_back({e.tick, std::move(action)});
    }
    return out;
}

Session verify_replay(world::Scenario scenario, tdp::Pattern pattern, Bindings bindings, SessionConfig config,
                      const std::vector<SimEvent>& recorded) {
    std::optional<int> until;
    if (!recorded.empty()) until = recorded.back().tick;
    Session s = replay(std::move(scenario), std::move(pattern), std::move(bindings), config,
                       schedule_from_log(recorded), until);
    const auto& fresh = s.log();
    const std::size_t n = std::max(fresh.size(), recorded.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= fresh.size() || i >= recorded.size()) {
            throw ReplayDivergence("replay diverges at line " + std::to_string(i + 1) + ": logs differ in length (" +
                                   std::to_string(recorded.size()) + " recorded, " + std::to_string(fresh.size()) +
                                   " replayed)");
        }
        const auto a = to_json(recorded[i]).dump();
        const auto b = to_json(fresh[i]).dump();
        if (a != b) {
            throw ReplayDivergence("replay diverges at line " + std::to_string(i + 1) + "\n  recorded: " + a +
                                   "\n  replayed: " + b);
        }
    }
    return s;
}

}  // namespace teamsim::engine
