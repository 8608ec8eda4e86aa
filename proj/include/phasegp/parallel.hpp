#pragma once

#include <span>

#include "phasegp/alps.hpp"

namespace phasegp {

int available_workers() noexcept;

// Assigns a fitness to every individual in the batch that has none. The
// OpenMP kernel and the serial reference produce identical results: each
// evaluation only touches its own individual.
void evaluate_batch(Problem const& problem, std::span<Individual> batch, int workers);
void evaluate_batch_serial(Problem const& problem, std::span<Individual> batch);

}  // namespace phasegp
