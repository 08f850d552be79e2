#include "teamsim/harness/experiment.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "teamsim/engine/session.hpp"
#include "teamsim/tdp/machine.hpp"
#include "teamsim/tdp/parser.hpp"
#include "teamsim/tdp/presets.hpp"
#include "teamsim/world/scenario_io.hpp"

namespace teamsim::harness {
namespace {

std::filesystem::path resolve_path(const std::string& p, const std::filesystem::path& base) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path;
}

bool non_negative_integer(const nlohmann::json& j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

std::vector<std::uint64_t> parse_seeds(const nlohmann::json& j) {
    std::vector<std::uint64_t> seeds;
    if (j.is_array()) {
        for (const auto& s : j) {
            if (!non_negative_integer(s)) throw InvalidExperiment("seeds must be non-negative integers");
            seeds.push_back(s.get<std::uint64_t>());
        }
    } else if (j.is_object()) {
        if (!j.contains("from") || !j.contains("to") || !non_negative_integer(j.at("from")) ||
            !non_negative_integer(j.at("to"))) {
            throw InvalidExperiment("seed range needs non-negative integers 'from' and 'to'");
        }
        const auto from = j.at("from").get<std::uint64_t>();
        const auto to = j.at("to").get<std::uint64_t>();
        for (auto s = from; s <= to; ++s) seeds.push_back(s);
    } else {
        throw InvalidExperiment("seeds must be an array or a {from, to} range");
    }
    return seeds;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (patterns.empty()) throw InvalidExperiment("an experiment needs at least one pattern");
    if (seeds.empty()) throw InvalidExperiment("an experiment needs at least one seed");
    if (max_ticks < 0) throw InvalidExperiment("max_ticks must be >= 0");
    if (const auto* s = std::get_if<world::Scenario>(&scenario)) s->validate();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            if (patterns[k].label == patterns[i].label) {
                throw InvalidExperiment("pattern label '" + patterns[i].label + "' is used twice; set 'label'");
            }
        }
    }
}

tdp::Pattern resolve_pattern(const std::string& name_or_file, const std::filesystem::path& base_dir) {
    if (tdp::preset_source(name_or_file)) return tdp::load_preset(name_or_file);
    const auto path = resolve_path(name_or_file, base_dir);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidExperiment("'" + name_or_file + "' is neither a preset nor a readable pattern file");
    std::stringstream ss;
    ss << in.rdbuf();
    return tdp::parse_pattern(ss.str());
}

ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw InvalidExperiment("experiment config must be a JSON object");
    ExperimentConfig c;

    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        if (!s.is_object()) throw InvalidExperiment("'scenario' must be an object");
        if (s.contains("file")) {
            c.scenario = world::load_scenario(resolve_path(s.at("file").get<std::string>(), base_dir));
        } else {
            c.scenario = world::scenario_config_from_json(s);
        }
    }

    if (!j.contains("patterns") || !j.at("patterns").is_array()) {
        throw InvalidExperiment("'patterns' must be an array");
    }
    for (const auto& p : j.at("patterns")) {
        if (!p.is_object() || !p.contains("name_or_file") || !p.at("name_or_file").is_string()) {
            throw InvalidExperiment("each pattern entry needs a string 'name_or_file'");
        }
        PatternEntry e;
        e.pattern = resolve_pattern(p.at("name_or_file").get<std::string>(), base_dir);
        e.label = p.contains("label") ? p.at("label").get<std::string>() : e.pattern.name;
        e.bindings = engine::default_bindings(
            e.pattern, engine::bindings_from_json(p.contains("bindings") ? p.at("bindings") : nlohmann::json()));
        c.patterns.push_back(std::move(e));
    }

    if (!j.contains("seeds")) throw InvalidExperiment("'seeds' is required");
    c.seeds = parse_seeds(j.at("seeds"));
    if (j.contains("max_ticks")) {
        if (!j.at("max_ticks").is_number_integer()) throw InvalidExperiment("'max_ticks' must be an integer");
        c.max_ticks = j.at("max_ticks").get<int>();
    }
    if (j.contains("out") && !j.at("out").is_null()) c.out = resolve_path(j.at("out").get<std::string>(), base_dir);
    c.validate();
    return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidExperiment("cannot read experiment config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidExperiment(path.string() + ": " + e.what());
    }
    return experiment_from_json(j, path.parent_path());
}

world::Scenario scenario_for_seed(const ExperimentConfig& config, std::uint64_t seed) {
    if (const auto* fixed = std::get_if<world::Scenario>(&config.scenario)) return *fixed;
    return world::generate_scenario(std::get<world::ScenarioConfig>(config.scenario), seed);
}

ResultsTable run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    for (const auto& e : config.patterns) (void)tdp::compile(e.pattern);

    ResultsTable table;
    for (const auto& e : config.patterns) table.patterns.push_back(e.label);
    const std::size_t n_seeds = config.seeds.size();
    table.rows.resize(config.patterns.size() * n_seeds);

    auto run_one = [&](std::size_t job) {
        const auto& entry = config.patterns[job / n_seeds];
        const auto seed = config.seeds[job % n_seeds];
        engine::SessionConfig sc;
        sc.max_ticks = config.max_ticks;
        sc.seed = seed;
        auto session = engine::Session::create(scenario_for_seed(config, seed), entry.pattern, entry.bindings, sc);
        engine::run_to_completion(session);

        ResultRow row;
        row.pattern = entry.label;
        row.seed = seed;
        row.metrics = session.metrics();
        for (const auto& actor : entry.pattern.actors) {
            const auto& w = row.metrics.workload.at(actor.id);
            if (actor.actor_class == tdp::ActorClass::human) {
                row.human_direct += w.direct_actions;
                row.human_indirect += w.indirect_ticks;
            } else {
                row.agent_direct += w.direct_actions;
            }
        }
        table.rows[job] = std::move(row);
    };

    const std::size_t jobs = table.rows.size();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
    if (threads == 1) {
        for (std::size_t j = 0; j < jobs; ++j) run_one(j);
        return table;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t j = next++; j < jobs; j = next++) run_one(j);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return table;
}

}  // namespace teamsim::harness
