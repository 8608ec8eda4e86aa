#include <gtest/gtest.h>

#include <fstream>

#include "phasegp/config.hpp"
#include "support.hpp"

using namespace phasegp;

namespace {

std::string key_of(std::string const& text)
{
    try {
        parse_config(text);
    } catch (ConfigError const& e) {
        return e.key();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return {};
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults)
{
    auto const c = parse_config("");
    EXPECT_EQ(c, RunConfig {});
    EXPECT_EQ(c.alps.population_size, 200u);
    EXPECT_EQ(c.alps.max_layers, 16u);
    EXPECT_EQ(c.alps.age_gap, 8);
    EXPECT_EQ(c.alps.elites, 1u);
    EXPECT_EQ(c.alps.max_generations, 2000);
    EXPECT_EQ(c.alps.crossover_probability, 0.25);
    EXPECT_EQ(c.alps.mutation_probability, 0.10);
    EXPECT_EQ(c.alps.selection_pressure, 5.0);
    EXPECT_EQ(c.alps.mating_pool_range, 1u);
    EXPECT_EQ(c.functions.size(), 7u);
}

TEST(Config, ParsesEverySection)
{
    auto const c = parse_config(R"(
# desk run
[data]
datasets = a.csv, sub/b.csv
train_fraction = 0.5

[alps]
population_size = 50
max_layers = 3
age_gap = 4
aging_scheme = polynomial
mating_pool_range = 2
elites = 2
max_generations = 50
crossover_probability = 0.3
mutation_probability = 0.2
selection_pressure = 3
seed = 42
workers = 4

[tree]
max_nodes = 20
max_depth = 7
functions = add, mul, aq
param_min = -1
param_max = 1

[ode]
rel_tol = 1e-7
abs_tol = 1e-9
max_steps = 5000

[memetic]
max_iters = 5

[output]
model = out/best.model
history = out/h.csv
report = out/r.txt
)");
    ASSERT_EQ(c.datasets.size(), 2u);
    EXPECT_EQ(c.datasets[1], "sub/b.csv");
    EXPECT_EQ(c.train_fraction, 0.5);
    EXPECT_EQ(c.alps.population_size, 50u);
    EXPECT_EQ(c.alps.max_layers, 3u);
    EXPECT_EQ(c.alps.age_gap, 4);
    EXPECT_EQ(c.alps.mating_pool_range, 2u);
    EXPECT_EQ(c.alps.elites, 2u);
    EXPECT_EQ(c.alps.max_generations, 50);
    EXPECT_EQ(c.alps.crossover_probability, 0.3);
    EXPECT_EQ(c.alps.mutation_probability, 0.2);
    EXPECT_EQ(c.alps.selection_pressure, 3.0);
    EXPECT_EQ(c.alps.master_seed, 42u);
    EXPECT_EQ(c.alps.workers, 4);
    EXPECT_EQ(c.limits, (TreeLimits { 20, 7 }));
    EXPECT_EQ(c.functions, (std::vector { Symbol::Add, Symbol::Mul, Symbol::AQ }));
    EXPECT_EQ(c.param_min, -1.0);
    EXPECT_EQ(c.tolerances.rel, 1e-7);
    EXPECT_EQ(c.tolerances.max_steps, 5000u);
    EXPECT_EQ(c.memetic.max_iters, 5);
    EXPECT_EQ(c.model_path, "out/best.model");
    EXPECT_EQ(c.grammar().functions, c.functions);
    EXPECT_EQ(c.grammar().param_max, 1.0);
}

TEST(Config, RejectsUnknownKeysByName)
{
    EXPECT_EQ(key_of("[alps]\npopulaton_size = 5\n"), "alps.populaton_size");
    EXPECT_EQ(key_of("[gp]\nsize = 5\n"), "gp.size");
}

TEST(Config, RejectsBadValues)
{
    EXPECT_EQ(key_of("[alps]\npopulation_size = many\n"), "alps.population_size");
    EXPECT_EQ(key_of("[alps]\npopulation_size = -3\n"), "alps.population_size");
    EXPECT_EQ(key_of("[alps]\npopulation_size = 0\n"), "alps.population_size");
    EXPECT_EQ(key_of("[alps]\ncrossover_probability = 1.5\n"), "alps.crossover_probability");
    EXPECT_EQ(key_of("[alps]\nselection_pressure = 0.5\n"), "alps.selection_pressure");
    EXPECT_EQ(key_of("[alps]\naging_scheme = linear\n"), "alps.aging_scheme");
    EXPECT_EQ(key_of("[alps]\nelites = 300\n"), "alps.elites");
    EXPECT_EQ(key_of("[tree]\nfunctions = add, sin\n"), "tree.functions");
    EXPECT_EQ(key_of("[tree]\nparam_min = 2\nparam_max = 1\n"), "tree.param_min");
    EXPECT_EQ(key_of("[ode]\nrel_tol = 0\n"), "ode.rel_tol");
    EXPECT_EQ(key_of("[ode]\nabs_tol = nan\n"), "ode.abs_tol");
    EXPECT_EQ(key_of("[data]\ntrain_fraction = 0\n"), "data.train_fraction");
    EXPECT_THROW(parse_config("[alps\nx = 1\n"), ConfigError);
}

TEST(Config, FormatParseRoundTrip)
{
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto rng = make_stream(31, { i });
        std::uniform_real_distribution<double> u(0.0, 1.0);
        RunConfig c;
        c.datasets = { "x.csv", "dir/y.csv" };
        c.train_fraction = 0.01 + 0.99 * u(rng);
        c.alps.population_size = 1 + rng() % 500;
        c.alps.max_layers = 1 + rng() % 20;
        c.alps.age_gap = 1 + static_cast<int>(rng() % 20);
        c.alps.mating_pool_range = rng() % 4;
        c.alps.elites = rng() % (c.alps.population_size + 1);
        c.alps.max_generations = static_cast<int>(rng() % 5000);
        c.alps.crossover_probability = u(rng);
        c.alps.mutation_probability = u(rng);
        c.alps.selection_pressure = 1.0 + 9.0 * u(rng);
        c.alps.master_seed = rng();
        c.alps.workers = static_cast<int>(rng() % 9);
        c.limits = TreeLimits { 1 + rng() % 60, 1 + rng() % 15 };
        c.functions = { Symbol::Tanh, Symbol::Div };
        c.param_min = -100.0 * u(rng);
        c.param_max = 100.0 * u(rng);
        c.tolerances = Tolerances { 1e-3 * u(rng) + 1e-12, 1e-5 * u(rng) + 1e-14, 1 + rng() % 100000 };
        c.memetic.max_iters = static_cast<int>(rng() % 30);
        c.model_path = "m" + std::to_string(i) + ".model";
        EXPECT_EQ(parse_config(format_config(c)), c) << format_config(c);
    }
}

TEST(Config, LoadResolvesPathsAgainstTheConfigDirectory)
{
    auto const dir = fixtures::scratch_dir("config_load");
    std::ofstream(dir / "a.csv") << "x";
    std::ofstream(dir / "run.ini") << "[data]\ndatasets = a.csv\n[output]\nmodel = best.model\n";
    auto const c = load_config(dir / "run.ini");
    ASSERT_EQ(c.datasets.size(), 1u);
    EXPECT_EQ(c.datasets[0], dir / "a.csv");
    EXPECT_EQ(c.model_path, dir / "best.model");
    EXPECT_EQ(c.history_path, dir / "history.csv");
}

TEST(Config, LoadNamesMissingDataset)
{
    auto const dir = fixtures::scratch_dir("config_missing");
    std::ofstream(dir / "run.ini") << "[data]\ndatasets = gone.csv\n";
    try {
        load_config(dir / "run.ini");
        FAIL();
    } catch (ConfigError const& e) {
        EXPECT_EQ(e.key(), "data.datasets");
        EXPECT_NE(std::string(e.what()).find("gone.csv"), std::string::npos);
    }
    std::ofstream(dir / "empty.ini") << "[alps]\nseed = 1\n";
    EXPECT_THROW(load_config(dir / "empty.ini"), ConfigError);
    EXPECT_THROW(load_config(dir / "absent.ini"), ConfigError);
}

TEST(Config, SaveLoadRoundTrip)
{
    auto const dir = fixtures::scratch_dir("config_save");
    std::ofstream(dir / "d.csv") << "x";
    RunConfig c;
    c.datasets = { dir / "d.csv" };
    c.model_path = dir / "m.model";
    c.history_path = dir / "h.csv";
    c.report_path = dir / "r.txt";
    c.alps.master_seed = 99;
    save_config(dir / "c.ini", c);
    EXPECT_EQ(load_config(dir / "c.ini"), c);
}
