#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

namespace teamsim::engine {

struct Workload {
    int direct_actions = 0;
    int indirect_ticks = 0;

    friend bool operator==(const Workload&, const Workload&) = default;
};

struct Metrics {
    std::optional<int> ticks_to_decision;  // present iff decided
    bool decided = false;
    std::optional<bool> correct;  // only when decided
    std::optional<std::string> chosen;
    int violations = 0;
    int corrections_issued = 0;
    double mislabel_rate_final = 0.0;
    std::map<std::string, Workload> workload;
    std::set<std::string> sources_accessed;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

// `reveal_truth` false drops the fields that would leak ground truth to a
// live analyst (correct, mislabel rate).
nlohmann::ordered_json to_json(const Metrics& m, bool reveal_truth);

}  // namespace teamsim::engine
