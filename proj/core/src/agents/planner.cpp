#include "teamsim/agents/planner.hpp"

#include <algorithm>

#include "teamsim/agents/processing.hpp"

namespace teamsim::agents {
namespace {

bool collectable(const SourceView& s, bool skip_sensitive) {
    return s.discovered && s.remaining > 0 && !s.denied && (!s.sensitive() || s.granted || !skip_sensitive);
}

// Process, then collect, then ask for access: the loop every worker runs.
std::optional<Action> work_like_agent(const std::string& actor, const TeamView& view, const AgentState& state,
                                      const Permissions& permitted, bool skip_sensitive) {
    if (permitted.direct("process")) {
        for (const auto& item : view.items) {
            if (!item.processed()) return Action{actor, Process{item.id}};
        }
    }
    if (permitted.direct("collect")) {
        if (auto target = collect_target(view, state, skip_sensitive)) return Action{actor, Collect{*target}};
        if (skip_sensitive) {
            for (const auto& s : view.sources) {
                if (s.discovered && s.remaining > 0 && s.sensitive() && !s.granted && !s.denied && !s.pending) {
                    return Action{actor, RequestAuthorization{s.id}};
                }
            }
        }
    }
    return std::nullopt;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::optional<Action> maybe_guide(const std::string& actor, const TeamView& view, const SimHumanProfile& profile,
                                  Lcg& rng) {
    std::vector<const SourceView*> candidates;
    for (const auto& s : view.sources) {
        if (collectable(s, true)) candidates.push_back(&s);
    }
    if (candidates.size() < 2) return std::nullopt;
    std::vector<double> rates;
    for (const auto* s : candidates) rates.push_back(s->signal_rate);
    const double mid = median(rates);

    for (const auto& agent : view.agent_ids) {
        auto it = view.agent_states.find(agent);
        const AgentState state = it == view.agent_states.end() ? AgentState{} : it->second;
        if (state.guided_source) {
            const SourceView* g = view.find_source(*state.guided_source);
            if (g && collectable(*g, true)) continue;  // still following earlier guidance
        }
        auto target = collect_target(view, state, true);
        if (!target) continue;
        const SourceView* current = view.find_source(*target);
        if (current->signal_rate >= mid) continue;

        const SourceView* pick = nullptr;
        if (rng.bernoulli(profile.guidance_skill)) {
            pick = *std::max_element(candidates.begin(), candidates.end(),
                                     [](const auto* a, const auto* b) { return a->signal_rate < b->signal_rate; });
        } else {
            pick = candidates[rng.below(candidates.size())];
        }
        if (pick->id != *target) return Action{actor, Guide{agent, pick->id}};
    }
    return std::nullopt;
}

}  // namespace

const SourceView* TeamView::find_source(std::string_view id) const {
    auto it = std::find_if(sources.begin(), sources.end(), [&](const auto& s) { return s.id == id; });
    return it == sources.end() ? nullptr : &*it;
}

tdp::Work Permissions::work_on(std::string_view task) const {
    auto it = work.find(std::string(task));
    return it == work.end() ? tdp::Work::none : it->second;
}

std::optional<std::string> collect_target(const TeamView& view, const AgentState& state, bool skip_sensitive) {
    if (state.guided_source) {
        const SourceView* s = view.find_source(*state.guided_source);
        if (s && collectable(*s, skip_sensitive)) return s->id;
    }
    for (const auto& id : view.directed) {
        const SourceView* s = view.find_source(id);
        if (s && collectable(*s, skip_sensitive)) return s->id;
    }
    for (const auto& s : view.sources) {
        if (collectable(s, skip_sensitive)) return s.id;
    }
    return std::nullopt;
}

bool defers_on_sensitive(const TeamView& view, const AgentProfile& profile) {
    return profile.sensitive_policy == SensitivePolicy::skip || view.authorizer_present;
}

Action plan_agent_action(const std::string& actor, const TeamView& view, const AgentProfile& profile,
                         const AgentState& state, const Permissions& permitted, Lcg& /*rng*/) {
    if (auto a = work_like_agent(actor, view, state, permitted, defers_on_sensitive(view, profile))) return *a;
    return Action{actor, Idle{}};
}

Action plan_sim_human_action(const std::string& actor, const TeamView& view, const SimHumanProfile& profile,
                             HumanState& state, const Permissions& permitted, Lcg& rng) {
    if (permitted.may(tdp::Intervention::authorize)) {
        for (const auto& s : view.sources) {
            if (s.pending) return Action{actor, Authorize{s.id, true}};
        }
    }

    const bool monitoring = permitted.work_on("process") != tdp::Work::none;
    if (monitoring && permitted.may(tdp::Intervention::correct)) {
        for (const auto& item : view.items) {
            if (!item.processing || item.processing->corrected) continue;
            if (!view.agent_ids.contains(item.processing->processed_by)) continue;
            if (!state.reviewed.insert(item.id).second) continue;
            if (item.mislabeled() && rng.bernoulli(profile.detection_prob)) {
                std::string relabel = draw_label(*view.scenario, item.true_class, profile.accuracy, rng);
                double r = clamp01(item.true_reliability +
                                   rng.uniform(-profile.reliability_noise, profile.reliability_noise));
                return Action{actor, Correct{item.id, std::move(relabel), r}};
            }
        }
    }

    if (auto a = work_like_agent(actor, view, AgentState{}, permitted, true)) return *a;

    if (permitted.may(tdp::Intervention::guide)) {
        if (auto a = maybe_guide(actor, view, profile, rng)) return *a;
    }
    return Action{actor, Idle{}};
}

AgentState apply_guidance(const AgentState& state, const TeamView& view, const std::string& source_id) {
    const SourceView* s = view.find_source(source_id);
    if (!s) throw world::UnknownSource(source_id);
    if (!s->discovered) throw world::SourceUndiscovered(source_id);
    AgentState next = state;
    next.guided_source = source_id;
    return next;
}

}  // namespace teamsim::agents
