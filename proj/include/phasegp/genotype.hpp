#pragma once

#include <optional>
#include <span>
#include <vector>

#include "phasegp/expr.hpp"
#include "phasegp/model_file.hpp"
#include "phasegp/rng.hpp"

namespace phasegp {

struct Individual {
    TreeSet trees;
    int age { 1 };
    std::optional<double> fitness;  // NMSE or penalty; lower is better
};

struct OperatorConfig {
    Grammar grammar;
    TreeLimits limits;
    double crossover_probability { 0.25 };  // per tree slot
    double mutation_probability { 0.10 };   // per individual
    int max_retries { 16 };                 // subtree-swap attempts before giving up
};

enum class Manipulation {
    ReplaceSubtree,
    ChangeFunction,
    ReplaceTerminal,
    PerturbParameter,
    PerturbAllParameters,
};

inline constexpr std::array kAllManipulations {
    Manipulation::ReplaceSubtree, Manipulation::ChangeFunction, Manipulation::ReplaceTerminal,
    Manipulation::PerturbParameter, Manipulation::PerturbAllParameters
};

Individual random_individual(Rng& rng, Grammar const& grammar, TreeLimits const& limits);

// Child starts as a copy of `a`. Each of the four slots independently swaps a
// random subtree with one taken from `b`'s tree with crossover_probability.
Individual crossover(Individual const& a, Individual const& b, OperatorConfig const& config, Rng& rng);

// With mutation_probability, applies one manipulation to one random tree.
Individual mutate(Individual const& ind, OperatorConfig const& config, Rng& rng);

bool applicable(Manipulation m, Tree const& tree, Grammar const& grammar);
Tree manipulate(Tree const& tree, Manipulation m, OperatorConfig const& config, Rng& rng);

// Strict weak order: lower fitness first, missing fitness last, then lower age.
bool better(Individual const& a, Individual const& b) noexcept;
void sort_best_first(std::vector<Individual>& pool);

// index = floor(N * u^pressure) over a pool sorted best-first.
std::size_t select_generalized_rank(std::size_t pool_size, double pressure, Rng& rng);
std::size_t select_generalized_rank(std::span<Individual const> pool, double pressure, Rng& rng);

}  // namespace phasegp
