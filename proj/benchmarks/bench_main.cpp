#include "aramaid/ara.hpp"
#include "aramaid/drilling.hpp"
#include "aramaid/inference.hpp"
#include "aramaid/model_format.hpp"

#include <benchmark/benchmark.h>

using namespace aramaid;

namespace
{

const Diagram& drilling()
{
    static const Diagram d = build_drilling_model();
    return d;
}

void BM_DefenderTable(benchmark::State& state)
{
    const std::vector<std::string> axes{"DP", "DF", "DT", "DR", "UC", "UA"};
    for (auto _ : state)
        benchmark::DoNotOptimize(decision_table(drilling(), "defender", axes));
}
BENCHMARK(BM_DefenderTable)->Unit(benchmark::kMillisecond);

void BM_AttackerTable(benchmark::State& state)
{
    const std::vector<std::string> axes{"DP", "DF", "DT", "UC", "DR", "AP"};
    for (auto _ : state)
        benchmark::DoNotOptimize(decision_table(drilling(), "attacker", axes));
}
BENCHMARK(BM_AttackerTable)->Unit(benchmark::kMillisecond);

void BM_PolicyEu(benchmark::State& state)
{
    Policy p;
    p.fix("DP", "none").fix("DF", "no_forensic").fix("DT", "share").set_rule("DR", {"stop", "continue"}).fix("AP", "perpetrate");
    const auto engine = state.range(0) == 0 ? Engine::elimination : Engine::enumeration;
    for (auto _ : state)
        benchmark::DoNotOptimize(expected_utility(drilling(), "defender", p, {}, engine));
}
BENCHMARK(BM_PolicyEu)->Arg(0)->Arg(1)->ArgName("enumeration");

void BM_Forecast(benchmark::State& state)
{
    const auto doc = default_drilling_beliefs();
    const auto draws = static_cast<std::uint64_t>(state.range(0));
    ForecastOptions options;
    options.threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(forecast_attack(drilling(), doc.beliefs, doc.uncertainty, draws, 1, options));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * draws));
}
BENCHMARK(BM_Forecast)->Args({1000, 1})->Args({1000, 4})->ArgNames({"draws", "threads"})->Unit(benchmark::kMillisecond);

void BM_SolveDefender(benchmark::State& state)
{
    const auto doc = default_drilling_beliefs();
    const auto fc = forecast_attack(drilling(), doc.beliefs, doc.uncertainty, 200, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_defender(drilling(), fc));
}
BENCHMARK(BM_SolveDefender)->Unit(benchmark::kMillisecond);

void BM_ParseModel(benchmark::State& state)
{
    const std::string text = serialize_model(drilling());
    for (auto _ : state)
        benchmark::DoNotOptimize(parse_model(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseModel);

}  // namespace

BENCHMARK_MAIN();
