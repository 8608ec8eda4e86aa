#include "phasegp/genotype.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phasegp {

Individual random_individual(Rng& rng, Grammar const& grammar, TreeLimits const& limits)
{
    Individual ind;
    for (auto& t : ind.trees) {
        t = random_tree(rng, grammar, limits.max_nodes, limits.max_depth);
    }
    return ind;
}

namespace {

    Tree swap_subtree(Tree const& receiver, Tree const& donor, OperatorConfig const& config, Rng& rng)
    {
        for (int attempt = 0; attempt < config.max_retries; ++attempt) {
            auto const i = uniform_index(rng, receiver.size());
            auto const j = uniform_index(rng, donor.size());
            if (receiver.size() - receiver.subtree_size(i) + donor.subtree_size(j) > config.limits.max_nodes) {
                continue;
            }
            if (receiver.level(i) - 1 + donor.subtree_depth(j) > config.limits.max_depth) {
                continue;
            }
            return receiver.replace_subtree(i, donor.subtree(j));
        }
        return receiver;
    }

    std::vector<std::size_t> positions(Tree const& tree, auto predicate)
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < tree.size(); ++i) {
            if (predicate(tree[i])) {
                out.push_back(i);
            }
        }
        return out;
    }

    std::vector<Symbol> alternatives(Symbol s, Grammar const& grammar)
    {
        std::vector<Symbol> out;
        for (auto f : grammar.functions) {
            if (f != s && arity(f) == arity(s)) {
                out.push_back(f);
            }
        }
        return out;
    }

    double perturbed(double value, Rng& rng)
    {
        double const factor = std::normal_distribution<double>(1.0, 0.5)(rng);
        double const next = value * factor;
        return std::isfinite(next) ? next : value;
    }

}  // namespace

Individual crossover(Individual const& a, Individual const& b, OperatorConfig const& config, Rng& rng)
{
    Individual child;
    child.trees = a.trees;
    child.age = 1 + std::max(a.age, b.age);
    for (std::size_t k = 0; k < kNumEquations; ++k) {
        if (uniform01(rng) < config.crossover_probability) {
            child.trees[k] = swap_subtree(child.trees[k], b.trees[k], config, rng);
        }
    }
    return child;
}

bool applicable(Manipulation m, Tree const& tree, Grammar const& grammar)
{
    switch (m) {
    case Manipulation::ReplaceSubtree:
    case Manipulation::ReplaceTerminal:
        return true;
    case Manipulation::ChangeFunction:
        return std::any_of(tree.nodes().begin(), tree.nodes().end(), [&](Node const& n) {
            return is_function(n.symbol) && !alternatives(n.symbol, grammar).empty();
        });
    case Manipulation::PerturbParameter:
    case Manipulation::PerturbAllParameters:
        return tree.parameter_count() > 0;
    }
    return false;
}

Tree manipulate(Tree const& tree, Manipulation m, OperatorConfig const& config, Rng& rng)
{
    auto const& grammar = config.grammar;
    switch (m) {
    case Manipulation::ReplaceSubtree: {
        auto const i = uniform_index(rng, tree.size());
        auto const rest = tree.size() - tree.subtree_size(i);
        auto const level = tree.level(i);
        if (rest >= config.limits.max_nodes || level > config.limits.max_depth) {
            return tree;  // input already violates the limits
        }
        return tree.replace_subtree(
            i, random_tree(rng, grammar, config.limits.max_nodes - rest, config.limits.max_depth - level + 1));
    }
    case Manipulation::ChangeFunction: {
        auto const candidates = positions(tree, [&](Node const& n) {
            return is_function(n.symbol) && !alternatives(n.symbol, grammar).empty();
        });
        if (candidates.empty()) {
            return tree;
        }
        auto const i = candidates[uniform_index(rng, candidates.size())];
        auto const options = alternatives(tree[i].symbol, grammar);
        return tree.with_node(i, Node::function(options[uniform_index(rng, options.size())]));
    }
    case Manipulation::ReplaceTerminal: {
        auto const candidates = positions(tree, [](Node const& n) { return is_terminal(n.symbol); });
        auto const i = candidates[uniform_index(rng, candidates.size())];
        return tree.with_node(i, random_terminal(rng, grammar));
    }
    case Manipulation::PerturbParameter: {
        auto const candidates = positions(tree, [](Node const& n) { return n.symbol == Symbol::Parameter; });
        if (candidates.empty()) {
            return tree;
        }
        auto const i = candidates[uniform_index(rng, candidates.size())];
        return tree.with_node(i, Node::parameter(perturbed(tree[i].value, rng)));
    }
    case Manipulation::PerturbAllParameters: {
        auto params = extract_params(tree);
        for (auto& p : params) {
            p = perturbed(p, rng);
        }
        return inject_params(tree, params);
    }
    }
    return tree;
}

Individual mutate(Individual const& ind, OperatorConfig const& config, Rng& rng)
{
    if (uniform01(rng) >= config.mutation_probability) {
        return ind;
    }
    Individual out = ind;
    auto const k = uniform_index(rng, kNumEquations);
    auto const& tree = ind.trees[k];

    std::vector<Manipulation> options;
    for (auto m : kAllManipulations) {
        if (applicable(m, tree, config.grammar)) {
            options.push_back(m);
        }
    }
    out.trees[k] = manipulate(tree, options[uniform_index(rng, options.size())], config, rng);
    if (!(out.trees[k] == tree)) {
        out.fitness.reset();
    }
    return out;
}

bool better(Individual const& a, Individual const& b) noexcept
{
    bool const has_a = a.fitness && !std::isnan(*a.fitness);
    bool const has_b = b.fitness && !std::isnan(*b.fitness);
    if (has_a != has_b) {
        return has_a;
    }
    if (has_a && *a.fitness != *b.fitness) {
        return *a.fitness < *b.fitness;
    }
    return a.age < b.age;
}

void sort_best_first(std::vector<Individual>& pool)
{
    std::stable_sort(pool.begin(), pool.end(), better);
}

std::size_t select_generalized_rank(std::size_t pool_size, double pressure, Rng& rng)
{
    if (pool_size == 0) {
        throw std::invalid_argument("cannot select from an empty pool");
    }
    if (!(pressure >= 1.0)) {
        throw std::invalid_argument("selection pressure must be >= 1");
    }
    double const u = uniform01(rng);
    auto const index = static_cast<std::size_t>(std::floor(static_cast<double>(pool_size) * std::pow(u, pressure)));
    return std::min(index, pool_size - 1);
}

std::size_t select_generalized_rank(std::span<Individual const> pool, double pressure, Rng& rng)
{
    return select_generalized_rank(pool.size(), pressure, rng);
}

}  // namespace phasegp
