#include "teamsim/world/scenario.hpp"

#include <cmath>
#include <set>

namespace teamsim::world {
namespace {

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidConfig(msg);
}

}  // namespace

std::string_view to_string(Sensitivity s) { return s == Sensitivity::open ? "open" : "sensitive"; }

void Scenario::validate() const {
    require(!hypotheses.empty(), "scenario needs at least one hypothesis");
    std::set<std::string> hyp_ids;
    for (const auto& h : hypotheses) {
        require(!h.id.empty(), "hypothesis id must not be empty");
        require(h.id != kNoise, "'noise' is reserved and cannot be a hypothesis id");
        require(hyp_ids.insert(h.id).second, "duplicate hypothesis id '" + h.id + "'");
    }
    require(hyp_ids.contains(ground_truth), "ground truth '" + ground_truth + "' is not a hypothesis");

    require(!sources.empty(), "scenario needs at least one source");
    std::set<std::string> src_ids;
    for (const auto& s : sources) {
        require(!s.id.empty(), "source id must not be empty");
        require(src_ids.insert(s.id).second, "duplicate source id '" + s.id + "'");
        require(s.n_items >= 1, "source '" + s.id + "' needs n_items >= 1");
        require(is_probability(s.signal_rate), "source '" + s.id + "' signal_rate outside [0, 1]");
        require(is_probability(s.reliability_mean), "source '" + s.id + "' reliability_mean outside [0, 1]");
        if (s.linked_question) {
            require(hyp_ids.contains(*s.linked_question),
                    "source '" + s.id + "' links unknown hypothesis '" + *s.linked_question + "'");
            require(!s.discovered, "question-linked source '" + s.id + "' must start undiscovered");
        }
    }

    const auto& g = generator;
    require(std::isfinite(g.lambda) && g.lambda > 1.0, "lambda must be > 1");
    require(std::isfinite(g.tau) && g.tau > 0.5 && g.tau <= 1.0, "tau must lie in (0.5, 1]");
    if (hypotheses.size() > 1) {
        require(g.tau > 1.0 / static_cast<double>(hypotheses.size()), "tau must exceed 1/|hypotheses|");
    }
    require(g.q_threshold >= 1, "q_threshold must be >= 1");
    require(std::isfinite(g.reliability_spread) && g.reliability_spread >= 0.0, "reliability_spread must be >= 0");

    std::set<std::string> item_ids;
    for (const auto& [source_id, items] : scripted_items) {
        require(src_ids.contains(source_id), "scripted items reference unknown source '" + source_id + "'");
        require(static_cast<int>(items.size()) == source(source_id).n_items,
                "source '" + source_id + "' n_items disagrees with its scripted items");
        for (const auto& item : items) {
            require(item_ids.insert(item.id).second, "duplicate item id '" + item.id + "'");
            require(item.source_id == source_id, "item '" + item.id + "' filed under the wrong source");
            require(item.true_class == kNoise || hyp_ids.contains(item.true_class),
                    "item '" + item.id + "' has unknown class '" + item.true_class + "'");
            require(is_probability(item.true_reliability), "item '" + item.id + "' reliability outside [0, 1]");
        }
    }
}

std::optional<std::size_t> Scenario::hypothesis_index(std::string_view id) const {
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        if (hypotheses[i].id == id) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Scenario::source_index(std::string_view id) const {
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (sources[i].id == id) return i;
    }
    return std::nullopt;
}

const Source& Scenario::source(std::string_view id) const {
    auto idx = source_index(id);
    if (!idx) throw UnknownSource(std::string(id));
    return sources[*idx];
}

std::vector<std::string> Scenario::class_labels() const {
    std::vector<std::string> out;
    out.reserve(hypotheses.size() + 1);
    for (const auto& h : hypotheses) out.push_back(h.id);
    out.emplace_back(kNoise);
    return out;
}

}  // namespace teamsim::world
