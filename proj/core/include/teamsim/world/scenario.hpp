#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace teamsim::world {

// Class label for items that support no hypothesis.
inline constexpr std::string_view kNoise = "noise";

class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnknownHypothesis : public std::out_of_range {
public:
    explicit UnknownHypothesis(const std::string& id) : std::out_of_range("unknown hypothesis '" + id + "'") {}
};

class UnknownSource : public std::out_of_range {
public:
    explicit UnknownSource(const std::string& id) : std::out_of_range("unknown source '" + id + "'") {}
};

class SourceExhausted : public std::runtime_error {
public:
    explicit SourceExhausted(const std::string& id) : std::runtime_error("source '" + id + "' is exhausted") {}
};

class SourceUndiscovered : public std::runtime_error {
public:
    explicit SourceUndiscovered(const std::string& id)
        : std::runtime_error("source '" + id + "' has not been discovered") {}
};

enum class Sensitivity { open, sensitive };

std::string_view to_string(Sensitivity s);

struct Hypothesis {
    std::string id;
    std::string label;

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct Source {
    std::string id;
    std::string label;
    Sensitivity sensitivity = Sensitivity::open;
    bool discovered = true;
    std::optional<std::string> linked_question;  // hypothesis whose question unlocks this source
    int n_items = 1;
    double signal_rate = 0.6;
    double reliability_mean = 0.7;

    friend bool operator==(const Source&, const Source&) = default;
};

struct ProcessingRecord {
    std::string assigned_class;  // hypothesis id or "noise"
    double assessed_reliability = 0.0;
    std::string processed_by;
    bool corrected = false;

    friend bool operator==(const ProcessingRecord&, const ProcessingRecord&) = default;
};

struct InfoItem {
    std::string id;
    std::string source_id;
    std::string true_class;
    double true_reliability = 0.0;
    std::optional<ProcessingRecord> processing;

    bool processed() const { return processing.has_value(); }
    bool mislabeled() const { return processing && processing->assigned_class != true_class; }

    friend bool operator==(const InfoItem&, const InfoItem&) = default;
};

struct GeneratorParams {
    double lambda = 3.0;               // likelihood lift of fully reliable support
    double tau = 0.9;                  // decision threshold on the MAP probability
    int q_threshold = 3;               // tally that raises an information question
    double reliability_spread = 0.2;   // half-width of item reliability noise

    friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

struct Scenario {
    std::string description;
    std::vector<Hypothesis> hypotheses;
    std::string ground_truth;
    std::vector<Source> sources;
    GeneratorParams generator;
    std::uint64_t seed = 0;
    // Hand-authored items per source id; sampling is disabled for these sources.
    std::map<std::string, std::vector<InfoItem>> scripted_items;

    // Throws InvalidConfig on any broken invariant.
    void validate() const;

    std::optional<std::size_t> hypothesis_index(std::string_view id) const;
    const Source& source(std::string_view id) const;  // throws UnknownSource
    std::optional<std::size_t> source_index(std::string_view id) const;

    // Hypothesis ids in declaration order followed by "noise".
    std::vector<std::string> class_labels() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace teamsim::world
