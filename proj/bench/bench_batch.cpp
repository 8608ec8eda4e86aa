#include <benchmark/benchmark.h>

#include "phasegp/kinetics.hpp"
#include "phasegp/parallel.hpp"
#include "phasegp/problem.hpp"

using namespace phasegp;

namespace {

KineticsProblem const& problem()
{
    static KineticsProblem const p = [] {
        SynthSpec spec;
        spec.samples_per_trajectory = 60;
        return KineticsProblem(generate_synthetic_datasets(spec), Grammar {}, TreeLimits { 15, 6 }, {}, LmOptions { 2 });
    }();
    return p;
}

std::vector<Individual> const& population()
{
    static std::vector<Individual> const pop = [] {
        std::vector<Individual> out;
        for (std::uint64_t i = 0; i < 64; ++i) {
            auto rng = make_stream(77, { i });
            out.push_back(random_individual(rng, problem().grammar(), problem().limits()));
        }
        return out;
    }();
    return pop;
}

void BM_Serial(benchmark::State& state)
{
    for (auto _ : state) {
        auto batch = population();
        evaluate_batch_serial(problem(), batch);
        benchmark::DoNotOptimize(batch.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(population().size()));
}

void BM_OpenMP(benchmark::State& state)
{
    int const workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto batch = population();
        evaluate_batch(problem(), batch, workers);
        benchmark::DoNotOptimize(batch.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(population().size()));
}

}  // namespace

BENCHMARK(BM_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OpenMP)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
