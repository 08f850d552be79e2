#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

#include "teamsim/engine/session.hpp"
#include "teamsim/harness/experiment.hpp"
#include "teamsim/harness/results.hpp"
#include "teamsim/tdp/errors.hpp"
#include "teamsim/tdp/lint.hpp"
#include "teamsim/tdp/machine.hpp"
#include "teamsim/world/generator.hpp"
#include "teamsim/world/scenario_io.hpp"

#ifdef TEAMSIM_HAVE_SERVICE
#include "teamsim/service/server.hpp"
#endif

namespace teamsim::cli {
namespace {

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Usage("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) throw Usage("cannot write " + path);
}

world::Scenario scenario_arg(const std::string& path, std::uint64_t seed) {
    if (path.empty()) return world::generate_scenario({}, seed);
    return world::load_scenario(path);
}

struct RunArgs {
    std::string scenario;
    std::string pattern;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_ticks;
    std::string bindings;
    std::string out;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
    const std::uint64_t seed = a.seed.value_or(1);
    auto scenario = scenario_arg(a.scenario, seed);
    auto pattern = harness::resolve_pattern(a.pattern);
    engine::Bindings overrides;
    if (!a.bindings.empty()) overrides = engine::bindings_from_json(nlohmann::json::parse(read_file(a.bindings)));
    auto bindings = engine::default_bindings(pattern, overrides);
    engine::SessionConfig config;
    if (a.max_ticks) config.max_ticks = *a.max_ticks;
    config.seed = a.seed;

    auto session = engine::Session::create(std::move(scenario), std::move(pattern), std::move(bindings), config);
    engine::run_to_completion(session);
    const auto log = engine::serialize_log(session.log());
    if (!a.out.empty()) write_file(a.out, log);

    nlohmann::ordered_json summary;
    summary["pattern"] = session.machine().pattern().name;
    summary["seed"] = session.seed();
    summary["ticks"] = session.tick();
    summary["finish_reason"] = to_string(*session.finish_reason());
    summary["metrics"] = engine::to_json(session.metrics(), true);
    out << summary.dump() << "\n";
    return kOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path, unsigned threads,
                   std::ostream& out) {
    auto config = harness::load_experiment(config_path);
    auto table = harness::run_experiment(config, threads);
    std::optional<std::filesystem::path> dest = config.out;
    if (!out_path.empty()) dest = out_path;
    if (dest) {
        harness::emit_results(table, *dest);
    } else {
        out << harness::format_results(table);
    }
    return kOk;
}

int cmd_lint(const std::string& pattern_arg, bool strict, bool json, std::ostream& out, std::ostream& err) {
    tdp::Pattern pattern;
    try {
        pattern = harness::resolve_pattern(pattern_arg);
    } catch (const tdp::SyntaxError& e) {
        err << pattern_arg << ":" << e.line() << ":" << e.col() << ": " << e.what() << "\n";
        return kLintFailure;
    } catch (const tdp::PatternError& e) {
        err << pattern_arg << ": " << e.what() << "\n";
        return kLintFailure;
    }
    const auto report = tdp::validate_pattern(pattern, strict ? tdp::LintConfig::strict() : tdp::LintConfig{});
    if (json) {
        out << tdp::to_json(report).dump(2) << "\n";
    } else {
        for (const auto& f : report.findings) out << pattern.name << ": " << tdp::format(f) << "\n";
        if (report.findings.empty()) out << pattern.name << ": clean\n";
    }
    return report.has_errors() ? kLintFailure : kOk;
}

int cmd_replay(const std::string& log_path, const std::string& scenario_path, const std::string& pattern_arg,
               std::ostream& out, std::ostream& err) {
    const std::string text = read_file(log_path);
    std::vector<engine::SimEvent> recorded;
    try {
        recorded = engine::parse_log(text);
    } catch (const std::exception& e) {
        err << "replay: log does not parse: " << e.what() << "\n";
        return kReplayDivergence;
    }
    if (recorded.empty() || recorded.front().kind != "session_start") {
        err << "replay: log does not begin with session_start\n";
        return kReplayDivergence;
    }

    std::optional<world::Scenario> given;
    if (!scenario_path.empty()) given = world::load_scenario(scenario_path);

    // Everything below comes from the log itself, so a header that no longer
    // rebuilds a session counts as divergence.
    engine::Session session = [&] {
        const auto& start = recorded.front().payload;
        try {
            engine::SessionConfig config;
            config.max_ticks = start.at("max_ticks").get<int>();
            config.live_mode = start.at("live_mode").get<bool>();
            config.seed = start.at("seed").get<std::uint64_t>();
            auto scenario = given ? *given : world::generate_scenario({}, start.at("scenario_seed").get<std::uint64_t>());
            auto pattern = harness::resolve_pattern(pattern_arg.empty() ? start.at("pattern").get<std::string>()
                                                                        : pattern_arg);
            auto bindings = engine::bindings_from_json(nlohmann::json::parse(start.at("bindings").dump()));
            const auto schedule = engine::schedule_from_log(recorded);
            return engine::replay(std::move(scenario), std::move(pattern), std::move(bindings), config, schedule,
                                  recorded.back().tick);
        } catch (const engine::ReplayDivergence&) {
            throw;
        } catch (const std::exception& e) {
            throw engine::ReplayDivergence(std::string("session_start header is unusable: ") + e.what());
        }
    }();

    const std::string fresh = engine::serialize_log(session.log());
    if (fresh == text) {
        out << "replay: identical (" << recorded.size() << " events)\n";
        return kOk;
    }
    std::size_t line = 1;
    std::size_t i = 0;
    for (; i < fresh.size() && i < text.size() && fresh[i] == text[i]; ++i) {
        if (text[i] == '\n') ++line;
    }
    auto line_at = [](const std::string& s, std::size_t pos) {
        const auto begin = s.rfind('\n', pos == 0 ? 0 : pos - 1);
        const auto from = begin == std::string::npos || pos == 0 ? 0 : begin + 1;
        const auto end = s.find('\n', from);
        return s.substr(from, end == std::string::npos ? std::string::npos : end - from);
    };
    err << "replay: divergence at line " << line << "\n  recorded: " << line_at(text, i)
        << "\n  replayed: " << line_at(fresh, i) << "\n";
    return kReplayDivergence;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"teamsim: human-agent teaming simulator", "teamsim"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run one batch session and write its event log");
    run_cmd->add_option("--scenario", run_args.scenario, "Scenario JSON (default: generated from --seed)");
    run_cmd->add_option("--pattern", run_args.pattern, "Preset name or .tdp file")->required();
    run_cmd->add_option("--seed", run_args.seed, "Session seed");
    run_cmd->add_option("--max-ticks", run_args.max_ticks, "Tick limit")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--bindings", run_args.bindings, "JSON file of actor profile overrides");
    run_cmd->add_option("--out", run_args.out, "Event log path (JSON lines)");

    std::string exp_config;
    std::string exp_out;
    unsigned threads = 1;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a pattern comparison and emit a CSV table");
    exp_cmd->add_option("--config", exp_config, "Experiment JSON")->required();
    exp_cmd->add_option("--out", exp_out, "CSV path (overrides the config)");
    exp_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string lint_pattern;
    bool strict = false;
    bool lint_json = false;
    auto* lint_cmd = app.add_subcommand("lint", "Check a pattern against the design rules");
    lint_cmd->add_option("--pattern", lint_pattern, "Preset name or .tdp file")->required();
    lint_cmd->add_flag("--strict", strict, "Treat warnings as errors");
    lint_cmd->add_flag("--json", lint_json, "Print the report as JSON");

    std::string replay_log;
    std::string replay_scenario;
    std::string replay_pattern;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a logged session and compare byte for byte");
    replay_cmd->add_option("--log", replay_log, "Event log to verify")->required();
    replay_cmd->add_option("--scenario", replay_scenario, "Scenario JSON the session used");
    replay_cmd->add_option("--pattern", replay_pattern, "Pattern the session used (default: from the log)");

    std::uint64_t gen_seed = 1;
    std::string gen_config;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("generate", "Write a generated scenario as JSON");
    gen_cmd->add_option("--seed", gen_seed, "Generator seed");
    gen_cmd->add_option("--config", gen_config, "Generator config JSON (default settings when absent)");
    gen_cmd->add_option("--out", gen_out, "Scenario path (default: stdout)");

    int port = 8080;
    std::string address = "127.0.0.1";
    std::string scenario_dir = "scenarios";
    std::string log_dir = "logs";
    int tick_ms = 0;
    auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP/WebSocket session service");
    serve_cmd->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--address", address, "Interface to bind");
    serve_cmd->add_option("--scenario-dir", scenario_dir, "Directory of scenario JSON files");
    serve_cmd->add_option("--log-dir", log_dir, "Where finished session logs are written");
    serve_cmd->add_option("--tick-ms", tick_ms, "Default tick interval for live sessions (0 = client-stepped)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "teamsim: " << e.what() << "\n";
        for (auto* sub : app.get_subcommands()) err << sub->help();
        if (app.get_subcommands().empty()) err << app.help();
        return kUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_args, out);
        if (exp_cmd->parsed()) return cmd_experiment(exp_config, exp_out, threads, out);
        if (lint_cmd->parsed()) return cmd_lint(lint_pattern, strict, lint_json, out, err);
        if (replay_cmd->parsed()) return cmd_replay(replay_log, replay_scenario, replay_pattern, out, err);
        if (gen_cmd->parsed()) {
            world::ScenarioConfig config;
            if (!gen_config.empty()) config = world::scenario_config_from_json(nlohmann::json::parse(read_file(gen_config)));
            const auto text = world::to_json(world::generate_scenario(config, gen_seed)).dump(2) + "\n";
            if (gen_out.empty()) {
                out << text;
            } else {
                write_file(gen_out, text);
            }
            return kOk;
        }
        if (serve_cmd->parsed()) {
#ifdef TEAMSIM_HAVE_SERVICE
            service::ServerOptions opts;
            opts.address = address;
            opts.port = static_cast<unsigned short>(port);
            opts.scenario_dir = scenario_dir;
            opts.log_dir = log_dir;
            opts.default_tick_ms = tick_ms;
            return service::serve(opts, out);
#else
            err << "teamsim: built without the session service\n";
            return kUsage;
#endif
        }
    } catch (const tdp::LintFailure& e) {
        err << "teamsim: " << e.what() << "\n";
        for (const auto& f : e.report().findings) err << "  " << tdp::format(f) << "\n";
        return kLintFailure;
    } catch (const engine::ReplayDivergence& e) {
        err << "replay: " << e.what() << "\n";
        return kReplayDivergence;
    } catch (const std::exception& e) {
        err << "teamsim: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace teamsim::cli
