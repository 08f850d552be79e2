#include "teamsim/world/belief.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace teamsim::world {

BeliefState::BeliefState(std::vector<double> probabilities) : p_(std::move(probabilities)) {}

BeliefState BeliefState::uniform(std::size_t n) {
    return BeliefState(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double BeliefState::sum() const { return std::accumulate(p_.begin(), p_.end(), 0.0); }

double effective_lift(double lambda, double reliability) { return 1.0 + reliability * (lambda - 1.0); }

BeliefState update_belief(const BeliefState& b, std::span<const Hypothesis> hypotheses,
                          std::string_view assigned_class, double reliability, double lambda) {
    if (!(reliability >= 0.0 && reliability <= 1.0)) {
        throw std::invalid_argument("reliability outside [0, 1]");
    }
    if (b.size() != hypotheses.size()) throw std::invalid_argument("belief does not match hypotheses");
    if (assigned_class == kNoise) return b;

    std::size_t idx = hypotheses.size();
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        if (hypotheses[i].id == assigned_class) idx = i;
    }
    if (idx == hypotheses.size()) throw UnknownHypothesis(std::string(assigned_class));

    std::vector<double> w(b.probabilities().begin(), b.probabilities().end());
    w[idx] *= effective_lift(lambda, reliability);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return BeliefState(std::move(w));
}

BeliefState recompute_belief(std::span<const InfoItem> items, std::span<const Hypothesis> hypotheses,
                             double lambda) {
    auto b = BeliefState::uniform(hypotheses.size());
    for (const auto& item : items) {
        if (!item.processing) continue;
        b = update_belief(b, hypotheses, item.processing->assigned_class, item.processing->assessed_reliability,
                          lambda);
    }
    return b;
}

std::pair<std::string, double> map_hypothesis(const BeliefState& b, std::span<const Hypothesis> hypotheses) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < b.size(); ++i) {
        if (b[i] > b[best] || (b[i] == b[best] && hypotheses[i].id < hypotheses[best].id)) best = i;
    }
    return {hypotheses[best].id, b[best]};
}

bool decision_reached(const BeliefState& b, double tau) {
    for (double p : b.probabilities()) {
        if (p >= tau) return true;
    }
    return false;
}

}  // namespace teamsim::world
