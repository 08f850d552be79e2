#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teamsim/harness/experiment.hpp"

namespace teamsim::harness {

inline constexpr std::string_view kCsvHeader =
    "pattern,seed,decided,correct,ticks_to_decision,violations,corrections,mislabel_rate,human_direct,"
    "human_indirect,agent_direct";

inline constexpr int kCsvColumns = 11;

// Per-pattern summary over the non-empty values of each numeric column,
// booleans counted as 1/0. Std is the sample deviation, absent below n = 2.
struct ColumnSummary {
    std::optional<double> mean;
    std::optional<double> std;
};

struct PatternSummary {
    std::string pattern;
    std::vector<ColumnSummary> columns;  // columns 2..10 of the CSV
};

std::vector<PatternSummary> summarize(const ResultsTable& table);

// Header, data rows, then a mean and a std row per pattern. %.6g floats, LF.
std::string format_results(const ResultsTable& table);

// Throws std::runtime_error on I/O failure.
void emit_results(const ResultsTable& table, const std::filesystem::path& path);

// Shortest %.6g rendering used for every floating-point cell.
std::string format_number(double v);

}  // namespace teamsim::harness
