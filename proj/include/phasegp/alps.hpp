#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "phasegp/genotype.hpp"

namespace phasegp {

enum class AgingScheme { Polynomial };

struct AlpsConfig {
    std::size_t population_size { 200 };  // per layer
    std::size_t max_layers { 16 };
    int age_gap { 8 };
    AgingScheme aging_scheme { AgingScheme::Polynomial };
    std::size_t mating_pool_range { 1 };  // layers below the current one that may supply parents
    std::size_t elites { 1 };
    int max_generations { 2000 };
    double crossover_probability { 0.25 };
    double mutation_probability { 0.10 };
    double selection_pressure { 5.0 };
    std::uint64_t master_seed { 0 };
    int workers { 0 };  // 0: one per available core

    friend bool operator==(AlpsConfig const&, AlpsConfig const&) = default;
};

// Throws std::invalid_argument naming the offending field.
void validate(AlpsConfig const& config);

// age_gap * s(i) with s = 1, 2, 4, 9, 16, 25, ... (s(i) = i^2 for i >= 2).
// The engine treats the highest open layer as unbounded.
int layer_age_limit(std::size_t layer, int age_gap);

// What the engine evolves against. evaluate() may refine numeric parameters
// of the individual in place and must be safe to call concurrently.
class Problem {
public:
    virtual ~Problem() = default;
    virtual Grammar const& grammar() const = 0;
    virtual TreeLimits const& limits() const = 0;
    virtual double evaluate(Individual& ind) const = 0;
};

struct Layer {
    std::size_t index { 0 };
    std::optional<int> age_limit;  // empty for the top layer
    std::vector<Individual> population;
};

struct LayerStats {
    int generation;
    std::size_t layer;
    double best;
    double mean;
    double mean_age;
};

// Parent/child ages of one reproduction event, kept for tracing.
struct Birth {
    std::size_t layer;
    int child_age;
    int parent_a_age;
    int parent_b_age;
};

struct EngineState {
    std::vector<Layer> layers;
    int generation { 0 };
    Individual best_ever;
    std::vector<LayerStats> history;
    std::vector<Birth> births;  // reproduction events of the last generation
    bool reseeded { false };    // layer 0 was reseeded in the last generation
};

class AlpsEngine {
public:
    AlpsEngine(AlpsConfig config, Problem const& problem);

    EngineState initialize() const;
    void step(EngineState& state) const;

    AlpsConfig const& config() const noexcept { return config_; }
    OperatorConfig const& operators() const noexcept { return operators_; }

private:
    std::vector<Individual> fresh_individuals(int generation, std::size_t count) const;
    void evaluate_all(std::vector<Individual>& batch) const;
    void open_layer_if_due(EngineState& state, int generation) const;
    void migrate(EngineState& state) const;
    void record(EngineState& state) const;

    AlpsConfig config_;
    Problem const& problem_;
    OperatorConfig operators_;
};

struct RunHooks {
    std::function<bool()> should_stop;
    std::function<void(EngineState const&)> on_generation;
};

struct RunResult {
    Individual best;
    std::vector<LayerStats> history;
    int generations { 0 };
    bool stopped_early { false };
};

RunResult run(AlpsConfig const& config, Problem const& problem, RunHooks const& hooks = {});

void write_history_csv(std::ostream& out, std::vector<LayerStats> const& history);

}  // namespace phasegp
