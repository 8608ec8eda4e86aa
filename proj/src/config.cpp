#include "phasegp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace phasegp {

namespace pt = boost::property_tree;

ConfigError::ConfigError(std::string key, std::string const& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message)
    , key_(std::move(key))
{
}

Grammar RunConfig::grammar() const
{
    Grammar g;
    g.functions = functions;
    g.param_min = param_min;
    g.param_max = param_max;
    return g;
}

namespace {

template <typename T>
T parse_number(std::string const& key, std::string_view text)
{
    auto const b = text.find_first_not_of(" \t");
    auto const e = text.find_last_not_of(" \t");
    if (b == std::string_view::npos) {
        throw ConfigError(key, "empty value");
    }
    text = text.substr(b, e - b + 1);
    char const* first = text.data();
    char const* last = text.data() + text.size();
    if (*first == '+') {
        ++first;
    }
    T value {};
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc {} || ptr != last) {
        throw ConfigError(key, "cannot parse '" + std::string(text) + "' as a number");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw ConfigError(key, "value must be finite");
        }
    }
    return value;
}

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto const comma = text.find(',', start);
        auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        auto const b = item.find_first_not_of(" \t");
        if (b != std::string_view::npos) {
            auto const e = item.find_last_not_of(" \t");
            out.emplace_back(item.substr(b, e - b + 1));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

using Setter = std::function<void(RunConfig&, std::string const& key, std::string const& value)>;

template <typename T, typename Member>
Setter number(Member member)
{
    return [member](RunConfig& c, std::string const& key, std::string const& value) {
        std::invoke(member, c) = parse_number<T>(key, value);
    };
}

std::map<std::string, Setter> const& setters()
{
    static std::map<std::string, Setter> const table {
        { "data.datasets",
            [](RunConfig& c, std::string const&, std::string const& v) {
                c.datasets.clear();
                for (auto const& item : split_list(v)) {
                    c.datasets.emplace_back(item);
                }
            } },
        { "data.train_fraction", number<double>([](RunConfig& c) -> double& { return c.train_fraction; }) },
        { "alps.population_size", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.alps.population_size; }) },
        { "alps.max_layers", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.alps.max_layers; }) },
        { "alps.age_gap", number<int>([](RunConfig& c) -> int& { return c.alps.age_gap; }) },
        { "alps.aging_scheme",
            [](RunConfig& c, std::string const& key, std::string const& v) {
                if (v != "polynomial") {
                    throw ConfigError(key, "unsupported aging scheme '" + v + "' (expected polynomial)");
                }
                c.alps.aging_scheme = AgingScheme::Polynomial;
            } },
        { "alps.mating_pool_range", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.alps.mating_pool_range; }) },
        { "alps.elites", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.alps.elites; }) },
        { "alps.max_generations", number<int>([](RunConfig& c) -> int& { return c.alps.max_generations; }) },
        { "alps.crossover_probability", number<double>([](RunConfig& c) -> double& { return c.alps.crossover_probability; }) },
        { "alps.mutation_probability", number<double>([](RunConfig& c) -> double& { return c.alps.mutation_probability; }) },
        { "alps.selection_pressure", number<double>([](RunConfig& c) -> double& { return c.alps.selection_pressure; }) },
        { "alps.seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.alps.master_seed; }) },
        { "alps.workers", number<int>([](RunConfig& c) -> int& { return c.alps.workers; }) },
        { "tree.max_nodes", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.limits.max_nodes; }) },
        { "tree.max_depth", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.limits.max_depth; }) },
        { "tree.functions",
            [](RunConfig& c, std::string const& key, std::string const& v) {
                c.functions.clear();
                for (auto const& word : split_list(v)) {
                    auto const s = symbol_from_keyword(word);
                    if (!s || !is_function(*s)) {
                        throw ConfigError(key, "unknown function '" + word + "'");
                    }
                    c.functions.push_back(*s);
                }
            } },
        { "tree.param_min", number<double>([](RunConfig& c) -> double& { return c.param_min; }) },
        { "tree.param_max", number<double>([](RunConfig& c) -> double& { return c.param_max; }) },
        { "ode.rel_tol", number<double>([](RunConfig& c) -> double& { return c.tolerances.rel; }) },
        { "ode.abs_tol", number<double>([](RunConfig& c) -> double& { return c.tolerances.abs; }) },
        { "ode.max_steps", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.tolerances.max_steps; }) },
        { "memetic.max_iters", number<int>([](RunConfig& c) -> int& { return c.memetic.max_iters; }) },
        { "output.model", [](RunConfig& c, std::string const&, std::string const& v) { c.model_path = v; } },
        { "output.history", [](RunConfig& c, std::string const&, std::string const& v) { c.history_path = v; } },
        { "output.report", [](RunConfig& c, std::string const&, std::string const& v) { c.report_path = v; } },
    };
    return table;
}

void check(bool ok, char const* key, char const* rule)
{
    if (!ok) {
        throw ConfigError(key, rule);
    }
}

}  // namespace

void validate(RunConfig const& c)
{
    check(c.train_fraction > 0.0 && c.train_fraction <= 1.0, "data.train_fraction", "must lie in (0, 1]");
    check(c.alps.population_size >= 1, "alps.population_size", "must be at least 1");
    check(c.alps.max_layers >= 1, "alps.max_layers", "must be at least 1");
    check(c.alps.age_gap >= 1, "alps.age_gap", "must be at least 1");
    check(c.alps.elites <= c.alps.population_size, "alps.elites", "must not exceed population_size");
    check(c.alps.max_generations >= 0, "alps.max_generations", "must be non-negative");
    check(c.alps.crossover_probability >= 0.0 && c.alps.crossover_probability <= 1.0, "alps.crossover_probability",
        "must lie in [0, 1]");
    check(c.alps.mutation_probability >= 0.0 && c.alps.mutation_probability <= 1.0, "alps.mutation_probability",
        "must lie in [0, 1]");
    check(c.alps.selection_pressure >= 1.0, "alps.selection_pressure", "must be >= 1");
    check(c.alps.workers >= 0, "alps.workers", "must be non-negative");
    check(c.limits.max_nodes >= 1, "tree.max_nodes", "must be at least 1");
    check(c.limits.max_depth >= 1, "tree.max_depth", "must be at least 1");
    check(c.param_min <= c.param_max, "tree.param_min", "must not exceed tree.param_max");
    check(c.tolerances.rel > 0.0, "ode.rel_tol", "must be positive");
    check(c.tolerances.abs > 0.0, "ode.abs_tol", "must be positive");
    check(c.tolerances.max_steps >= 1, "ode.max_steps", "must be at least 1");
    check(c.memetic.max_iters >= 0, "memetic.max_iters", "must be non-negative");
}

RunConfig parse_config(std::string_view text)
{
    pt::ptree tree;
    std::istringstream in { std::string(text) };
    try {
        pt::read_ini(in, tree);
    } catch (pt::ini_parser_error const& e) {
        throw ConfigError("", "malformed configuration: " + e.message() + " on line " + std::to_string(e.line()));
    }

    RunConfig config;
    auto const& table = setters();
    for (auto const& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(section, "key outside of a section");
        }
        for (auto const& [name, value] : body) {
            std::string const key = section + "." + name;
            auto const it = table.find(key);
            if (it == table.end()) {
                throw ConfigError(key, "unknown key");
            }
            it->second(config, key, value.data());
        }
    }
    validate(config);
    return config;
}

std::string format_config(RunConfig const& c)
{
    std::ostringstream out;
    auto join_paths = [](std::vector<std::filesystem::path> const& paths) {
        std::string s;
        for (std::size_t i = 0; i < paths.size(); ++i) {
            s += (i ? ", " : "") + paths[i].string();
        }
        return s;
    };
    std::string functions;
    for (std::size_t i = 0; i < c.functions.size(); ++i) {
        functions += (i ? "," : "") + std::string(symbol_keyword(c.functions[i]));
    }

    out << "[data]\n"
        << "datasets = " << join_paths(c.datasets) << '\n'
        << "train_fraction = " << format_number(c.train_fraction) << "\n\n"
        << "[alps]\n"
        << "population_size = " << c.alps.population_size << '\n'
        << "max_layers = " << c.alps.max_layers << '\n'
        << "age_gap = " << c.alps.age_gap << '\n'
        << "aging_scheme = polynomial\n"
        << "mating_pool_range = " << c.alps.mating_pool_range << '\n'
        << "elites = " << c.alps.elites << '\n'
        << "max_generations = " << c.alps.max_generations << '\n'
        << "crossover_probability = " << format_number(c.alps.crossover_probability) << '\n'
        << "mutation_probability = " << format_number(c.alps.mutation_probability) << '\n'
        << "selection_pressure = " << format_number(c.alps.selection_pressure) << '\n'
        << "seed = " << c.alps.master_seed << '\n'
        << "workers = " << c.alps.workers << "\n\n"
        << "[tree]\n"
        << "max_nodes = " << c.limits.max_nodes << '\n'
        << "max_depth = " << c.limits.max_depth << '\n'
        << "functions = " << functions << '\n'
        << "param_min = " << format_number(c.param_min) << '\n'
        << "param_max = " << format_number(c.param_max) << "\n\n"
        << "[ode]\n"
        << "rel_tol = " << format_number(c.tolerances.rel) << '\n'
        << "abs_tol = " << format_number(c.tolerances.abs) << '\n'
        << "max_steps = " << c.tolerances.max_steps << "\n\n"
        << "[memetic]\n"
        << "max_iters = " << c.memetic.max_iters << "\n\n"
        << "[output]\n"
        << "model = " << c.model_path.string() << '\n'
        << "history = " << c.history_path.string() << '\n'
        << "report = " << c.report_path.string() << '\n';
    return out.str();
}

RunConfig load_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open configuration " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    auto config = parse_config(text.str());

    auto const base = path.parent_path();
    auto resolve = [&](std::filesystem::path& p) {
        if (p.is_relative()) {
            p = base / p;
        }
    };
    if (config.datasets.empty()) {
        throw ConfigError("data.datasets", "at least one dataset is required");
    }
    for (auto& p : config.datasets) {
        resolve(p);
        if (!std::filesystem::exists(p)) {
            throw ConfigError("data.datasets", "dataset not found: " + p.string());
        }
    }
    resolve(config.model_path);
    resolve(config.history_path);
    resolve(config.report_path);
    return config;
}

void save_config(std::filesystem::path const& path, RunConfig const& config)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ConfigError("", "cannot write configuration " + path.string());
    }
    out << format_config(config);
}

}  // namespace phasegp
