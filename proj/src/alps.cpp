#include "phasegp/alps.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "phasegp/parallel.hpp"

namespace phasegp {

namespace {

enum StreamKind : std::uint64_t { kBreed = 0, kSeed = 1 };

void require(bool ok, char const* field, char const* rule)
{
    if (!ok) {
        throw std::invalid_argument(std::string("invalid ALPS configuration: ") + field + " " + rule);
    }
}

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

std::vector<Individual const*> sorted_view(std::vector<Individual> const& population)
{
    std::vector<Individual const*> view;
    view.reserve(population.size());
    for (auto const& ind : population) {
        view.push_back(&ind);
    }
    std::stable_sort(view.begin(), view.end(), [](auto const* a, auto const* b) { return better(*a, *b); });
    return view;
}

}  // namespace

void validate(AlpsConfig const& c)
{
    require(c.population_size >= 1, "population_size", "must be at least 1");
    require(c.max_layers >= 1, "max_layers", "must be at least 1");
    require(c.age_gap >= 1, "age_gap", "must be at least 1");
    require(c.elites <= c.population_size, "elites", "must not exceed population_size");
    require(c.max_generations >= 0, "max_generations", "must be non-negative");
    require(in_unit_interval(c.crossover_probability), "crossover_probability", "must lie in [0, 1]");
    require(in_unit_interval(c.mutation_probability), "mutation_probability", "must lie in [0, 1]");
    require(c.selection_pressure >= 1.0 && std::isfinite(c.selection_pressure), "selection_pressure",
        "must be >= 1");
    require(c.workers >= 0, "workers", "must be non-negative");
}

int layer_age_limit(std::size_t layer, int age_gap)
{
    int const i = static_cast<int>(layer);
    int const s = i == 0 ? 1 : i == 1 ? 2 : i * i;
    return age_gap * s;
}

AlpsEngine::AlpsEngine(AlpsConfig config, Problem const& problem)
    : config_(config)
    , problem_(problem)
{
    validate(config_);
    operators_.grammar = problem.grammar();
    operators_.limits = problem.limits();
    operators_.crossover_probability = config_.crossover_probability;
    operators_.mutation_probability = config_.mutation_probability;
}

std::vector<Individual> AlpsEngine::fresh_individuals(int generation, std::size_t count) const
{
    std::vector<Individual> out;
    out.reserve(count);
    for (std::size_t slot = 0; slot < count; ++slot) {
        auto rng = make_stream(config_.master_seed, { static_cast<std::uint64_t>(generation), 0, slot, kSeed });
        out.push_back(random_individual(rng, operators_.grammar, operators_.limits));
    }
    evaluate_all(out);
    return out;
}

void AlpsEngine::evaluate_all(std::vector<Individual>& batch) const
{
    if (config_.workers == 1) {
        evaluate_batch_serial(problem_, batch);
    } else {
        evaluate_batch(problem_, batch, config_.workers);
    }
}

EngineState AlpsEngine::initialize() const
{
    EngineState state;
    state.layers.push_back(Layer { 0, std::nullopt, fresh_individuals(0, config_.population_size) });
    state.best_ever = *sorted_view(state.layers[0].population).front();
    state.reseeded = true;
    record(state);
    return state;
}

void AlpsEngine::step(EngineState& state) const
{
    int const generation = state.generation + 1;
    auto const n_layers = state.layers.size();
    state.births.clear();
    state.reseeded = false;

    // Breed every layer from its mating pool, top layer first. All pools are
    // built from the previous generation's populations.
    std::vector<std::vector<Individual>> next(n_layers);
    for (std::size_t layer = n_layers; layer-- > 0;) {
        std::vector<Individual> pool_members;
        std::size_t const lowest = layer - std::min(layer, config_.mating_pool_range);
        for (std::size_t l = lowest; l <= layer; ++l) {
            auto const& pop = state.layers[l].population;
            pool_members.insert(pool_members.end(), pop.begin(), pop.end());
        }
        if (pool_members.empty()) {
            continue;
        }
        auto const pool = sorted_view(pool_members);
        auto const own = sorted_view(state.layers[layer].population);

        auto& offspring = next[layer];
        offspring.reserve(config_.population_size);
        std::size_t const n_elites = std::min(config_.elites, own.size());
        for (std::size_t e = 0; e < n_elites; ++e) {
            Individual elite = *own[e];
            ++elite.age;
            offspring.push_back(std::move(elite));
        }
        for (std::size_t slot = n_elites; slot < config_.population_size; ++slot) {
            auto rng = make_stream(config_.master_seed,
                { static_cast<std::uint64_t>(generation), layer, slot, kBreed });
            auto const& a = *pool[select_generalized_rank(pool.size(), config_.selection_pressure, rng)];
            auto const& b = *pool[select_generalized_rank(pool.size(), config_.selection_pressure, rng)];
            Individual child = mutate(crossover(a, b, operators_, rng), operators_, rng);
            if (child.trees == a.trees) {
                child.fitness = a.fitness;  // evaluation is deterministic
            }
            state.births.push_back(Birth { layer, child.age, a.age, b.age });
            offspring.push_back(std::move(child));
        }
    }

    // One batch in layer-major, slot-minor order.
    std::vector<Individual> batch;
    for (auto& offspring : next) {
        std::move(offspring.begin(), offspring.end(), std::back_inserter(batch));
    }
    evaluate_all(batch);
    auto it = batch.begin();
    for (std::size_t layer = 0; layer < n_layers; ++layer) {
        auto const count = next[layer].size();
        if (count == 0) {
            continue;
        }
        state.layers[layer].population.assign(std::make_move_iterator(it),
            std::make_move_iterator(it + static_cast<std::ptrdiff_t>(count)));
        it += static_cast<std::ptrdiff_t>(count);
    }

    open_layer_if_due(state, generation);
    migrate(state);

    if (generation % config_.age_gap == 0) {
        auto& bottom = state.layers[0].population;
        auto fresh = fresh_individuals(generation, config_.population_size);
        if (state.layers.size() == 1) {
            // nowhere to migrate to: the elites survive reseeding
            auto const keep = sorted_view(bottom);
            std::size_t const n_keep = std::min(config_.elites, keep.size());
            std::vector<Individual> kept;
            for (std::size_t e = 0; e < n_keep; ++e) {
                kept.push_back(*keep[e]);
            }
            fresh.resize(config_.population_size - n_keep);
            kept.insert(kept.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
            bottom = std::move(kept);
        } else {
            bottom = std::move(fresh);
        }
        state.reseeded = true;
    }

    state.generation = generation;
    record(state);
}

void AlpsEngine::open_layer_if_due(EngineState& state, int generation) const
{
    if (state.layers.size() >= config_.max_layers) {
        return;
    }
    auto& top = state.layers.back();
    int const limit = layer_age_limit(top.index, config_.age_gap);
    // the oldest lineage has age generation + 1
    if (generation >= limit) {
        top.age_limit = limit;
        state.layers.push_back(Layer { top.index + 1, std::nullopt, {} });
    }
}

void AlpsEngine::migrate(EngineState& state) const
{
    for (std::size_t layer = 0; layer + 1 < state.layers.size(); ++layer) {
        int const limit = *state.layers[layer].age_limit;
        auto& source = state.layers[layer].population;
        auto const split = std::stable_partition(source.begin(), source.end(),
            [limit](Individual const& ind) { return ind.age <= limit; });
        if (split == source.end()) {
            continue;
        }
        auto& target = state.layers[layer + 1].population;
        target.insert(target.end(), std::make_move_iterator(split), std::make_move_iterator(source.end()));
        source.erase(split, source.end());
        if (target.size() > config_.population_size) {
            // migrants displace the worst residents, and are themselves
            // dropped when worse than everyone already there
            sort_best_first(target);
            target.resize(config_.population_size);
        }
    }
}

void AlpsEngine::record(EngineState& state) const
{
    for (auto const& layer : state.layers) {
        if (layer.population.empty()) {
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        double age = 0.0;
        for (auto const& ind : layer.population) {
            double const f = ind.fitness.value_or(std::numeric_limits<double>::infinity());
            best = std::min(best, f);
            sum += f;
            age += ind.age;
            if (ind.fitness && (!state.best_ever.fitness || *ind.fitness < *state.best_ever.fitness)) {
                state.best_ever = ind;
            }
        }
        auto const n = static_cast<double>(layer.population.size());
        state.history.push_back(LayerStats { state.generation, layer.index, best, sum / n, age / n });
    }
}

RunResult run(AlpsConfig const& config, Problem const& problem, RunHooks const& hooks)
{
    AlpsEngine const engine(config, problem);
    auto state = engine.initialize();
    if (hooks.on_generation) {
        hooks.on_generation(state);
    }
    RunResult result;
    while (state.generation < config.max_generations) {
        if (hooks.should_stop && hooks.should_stop()) {
            result.stopped_early = true;
            break;
        }
        engine.step(state);
        if (hooks.on_generation) {
            hooks.on_generation(state);
        }
    }
    result.best = state.best_ever;
    result.history = std::move(state.history);
    result.generations = state.generation;
    return result;
}

void write_history_csv(std::ostream& out, std::vector<LayerStats> const& history)
{
    out << "generation,layer,best_nmse,mean_nmse,mean_age\n";
    for (auto const& h : history) {
        out << h.generation << ',' << h.layer << ',' << format_number(h.best) << ',' << format_number(h.mean) << ','
            << format_number(h.mean_age) << '\n';
    }
}

}  // namespace phasegp
