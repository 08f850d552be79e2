#include "teamsim/harness/results.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace teamsim::harness {
namespace {

// Numeric columns after pattern and seed, in header order.
std::vector<std::optional<double>> numeric_cells(const ResultRow& r) {
    const auto& m = r.metrics;
    auto opt_bool = [](const std::optional<bool>& b) -> std::optional<double> {
        if (!b) return std::nullopt;
        return *b ? 1.0 : 0.0;
    };
    std::optional<double> ticks;
    if (m.ticks_to_decision) ticks = *m.ticks_to_decision;
    return {m.decided ? 1.0 : 0.0,
            opt_bool(m.correct),
            ticks,
            static_cast<double>(m.violations),
            static_cast<double>(m.corrections_issued),
            m.mislabel_rate_final,
            static_cast<double>(r.human_direct),
            static_cast<double>(r.human_indirect),
            static_cast<double>(r.agent_direct)};
}

std::string data_row(const ResultRow& r) {
    const auto& m = r.metrics;
    std::string s = r.pattern + "," + std::to_string(r.seed) + ",";
    s += m.decided ? "1," : "0,";
    if (m.correct) s += *m.correct ? "1" : "0";
    s += ",";
    if (m.ticks_to_decision) s += std::to_string(*m.ticks_to_decision);
    s += "," + std::to_string(m.violations) + "," + std::to_string(m.corrections_issued) + ",";
    s += format_number(m.mislabel_rate_final);
    s += "," + std::to_string(r.human_direct) + "," + std::to_string(r.human_indirect) + "," +
         std::to_string(r.agent_direct);
    return s;
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<PatternSummary> summarize(const ResultsTable& table) {
    std::vector<PatternSummary> out;
    for (const auto& name : table.patterns) {
        std::vector<std::vector<double>> values;
        for (const auto& row : table.rows) {
            if (row.pattern != name) continue;
            auto cells = numeric_cells(row);
            values.resize(cells.size());
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (cells[c]) values[c].push_back(*cells[c]);
            }
        }
        PatternSummary s{name, {}};
        for (const auto& col : values) {
            ColumnSummary cs;
            const auto n = static_cast<double>(col.size());
            if (!col.empty()) {
                double sum = 0.0;
                for (double v : col) sum += v;
                cs.mean = sum / n;
            }
            if (col.size() >= 2) {
                double ss = 0.0;
                for (double v : col) ss += (v - *cs.mean) * (v - *cs.mean);
                cs.std = std::sqrt(ss / (n - 1.0));
            }
            s.columns.push_back(cs);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string format_results(const ResultsTable& table) {
    std::string out(kCsvHeader);
    out += "\n";
    for (const auto& row : table.rows) out += data_row(row) + "\n";
    for (const auto& s : summarize(table)) {
        for (bool is_mean : {true, false}) {
            out += s.pattern + (is_mean ? ",mean" : ",std");
            for (std::size_t c = 0; c < kCsvColumns - 2; ++c) {
                out += ",";
                const auto& v = c < s.columns.size() ? (is_mean ? s.columns[c].mean : s.columns[c].std)
                                                     : std::optional<double>();
                if (v) out += format_number(*v);
            }
            out += "\n";
        }
    }
    return out;
}

void emit_results(const ResultsTable& table, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << format_results(table);
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace teamsim::harness
