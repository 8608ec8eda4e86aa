#include "phasegp/parallel.hpp"

#include <cstddef>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phasegp {

namespace {

void evaluate_one(Problem const& problem, Individual& ind) noexcept
{
    try {
        ind.fitness = problem.evaluate(ind);
    } catch (...) {
        ind.fitness = std::numeric_limits<double>::infinity();
    }
}

}  // namespace

int available_workers() noexcept
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void evaluate_batch_serial(Problem const& problem, std::span<Individual> batch)
{
    for (auto& ind : batch) {
        if (!ind.fitness) {
            evaluate_one(problem, ind);
        }
    }
}

void evaluate_batch(Problem const& problem, std::span<Individual> batch, int workers)
{
    if (workers <= 0) {
        workers = available_workers();
    }
    auto const n = static_cast<std::ptrdiff_t>(batch.size());
    // evaluation cost varies wildly between candidates
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto& ind = batch[static_cast<std::size_t>(i)];
        if (!ind.fitness) {
            evaluate_one(problem, ind);
        }
    }
}

}  // namespace phasegp
