#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "teamsim/world/scenario.hpp"

namespace teamsim::world {

// Posterior over the scenario's hypotheses, indexed in declaration order.
class BeliefState {
public:
    BeliefState() = default;
    explicit BeliefState(std::vector<double> probabilities);

    static BeliefState uniform(std::size_t n);

    std::span<const double> probabilities() const { return p_; }
    double operator[](std::size_t i) const { return p_[i]; }
    std::size_t size() const { return p_.size(); }
    double sum() const;

    friend bool operator==(const BeliefState&, const BeliefState&) = default;

private:
    std::vector<double> p_;
};

// L(r) = 1 + r (lambda - 1): no lift at r = 0, full lift lambda at r = 1.
double effective_lift(double lambda, double reliability);

// Multiplies the supported hypothesis by the effective lift and renormalizes.
// Noise leaves the belief unchanged. Throws UnknownHypothesis for a class
// that names no hypothesis, std::invalid_argument for r outside [0, 1].
BeliefState update_belief(const BeliefState& b, std::span<const Hypothesis> hypotheses,
                          std::string_view assigned_class, double reliability, double lambda);

// Fold of update_belief over every processed item, starting from uniform.
BeliefState recompute_belief(std::span<const InfoItem> items, std::span<const Hypothesis> hypotheses,
                             double lambda);

// MAP hypothesis; ties go to the lexicographically smallest id.
std::pair<std::string, double> map_hypothesis(const BeliefState& b, std::span<const Hypothesis> hypotheses);

// Inclusive: true iff max probability >= tau.
bool decision_reached(const BeliefState& b, double tau);

}  // namespace teamsim::world
