#include <benchmark/benchmark.h>

#include <string>

#include "teamsim/engine/session.hpp"
#include "teamsim/tdp/machine.hpp"
#include "teamsim/tdp/parser.hpp"
#include "teamsim/tdp/presets.hpp"
#include "teamsim/world/belief.hpp"
#include "teamsim/world/generator.hpp"

namespace {

using namespace teamsim;

void BM_ParsePattern(benchmark::State& state) {
    const std::string text(*tdp::preset_source("phased_autonomy"));
    for (auto _ : state) benchmark::DoNotOptimize(tdp::parse_pattern(text));
}
BENCHMARK(BM_ParsePattern);

void BM_CompileWithLint(benchmark::State& state) {
    const auto p = tdp::load_preset("phased_autonomy");
    for (auto _ : state) benchmark::DoNotOptimize(tdp::compile(p));
}
BENCHMARK(BM_CompileWithLint);

void BM_BeliefUpdate(benchmark::State& state) {
    const std::vector<world::Hypothesis> hyps = {{"H1", ""}, {"H2", ""}, {"H3", ""}};
    auto b = world::BeliefState::uniform(3);
    int i = 0;
    for (auto _ : state) {
        b = world::update_belief(b, hyps, hyps[i++ % 3].id, 0.5, 3.0);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_BeliefUpdate);

void BM_SessionRun(benchmark::State& state, const char* preset) {
    const auto p = tdp::load_preset(preset);
    const auto scenario = world::generate_scenario({}, 1);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        engine::SessionConfig c;
        c.seed = ++seed;
        auto s = engine::Session::create(scenario, p, engine::default_bindings(p), c);
        benchmark::DoNotOptimize(engine::run_to_completion(s));
    }
}
BENCHMARK_CAPTURE(BM_SessionRun, autonomous_strict, "autonomous_strict");
BENCHMARK_CAPTURE(BM_SessionRun, collaborative, "collaborative");
BENCHMARK_CAPTURE(BM_SessionRun, manual, "manual");

}  // namespace

BENCHMARK_MAIN();
