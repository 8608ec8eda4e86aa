#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasegp/alps.hpp"
#include "phasegp/config.hpp"
#include "phasegp/dataset.hpp"
#include "phasegp/kinetics.hpp"
#include "phasegp/model_file.hpp"
#include "phasegp/problem.hpp"

namespace phasegp::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input or output that cannot be read, parsed or written.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out;
};

std::vector<double> parse_rates(std::string const& text)
{
    std::vector<double> rates;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto const comma = text.find(',', start);
        auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        auto const b = item.find_first_not_of(" \t");
        auto const e = item.find_last_not_of(" \t");
        if (b == std::string::npos) {
            throw UsageError("--rates: empty entry");
        }
        item = item.substr(b, e - b + 1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc {} || ptr != item.data() + item.size()) {
            throw UsageError("--rates: cannot parse '" + item + "'");
        }
        rates.push_back(v);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return rates;
}

void write_text(fs::path const& path, std::string const& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) {
        throw DataError("cannot write " + path.string());
    }
}

void ensure_directory(fs::path const& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw DataError("cannot create output directory " + dir.string());
    }
}

TreeSet load_model(fs::path const& path)
{
    try {
        return read_model(path);
    } catch (std::exception const& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string label_of(fs::path const& path, Dataset const& data)
{
    return path.filename().string() + " (ks=" + format_number(data.ks) + ")";
}

struct SynthArgs {
    std::string rates;
    double noise { 0.0 };
    std::size_t samples { 200 };
    double t_start { 830.0 };
    double t_end { 34.0 };
};

int cmd_synth(SynthArgs const& a, Common const& common, std::ostream& out)
{
    SynthSpec spec;
    spec.cooling_rates = parse_rates(a.rates);
    spec.noise_sd = a.noise;
    spec.samples_per_trajectory = a.samples;
    spec.t_start = a.t_start;
    spec.t_end = a.t_end;
    spec.seed = common.seed.value_or(0);
    try {
        validate(spec);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }

    fs::path const dir = common.out.empty() ? fs::path(".") : fs::path(common.out);
    ensure_directory(dir);
    auto const datasets = generate_synthetic_datasets(spec);

    nlohmann::ordered_json manifest;
    manifest["generator"] = "reference four-equation system";
    manifest["seed"] = spec.seed;
    manifest["noise_sd"] = spec.noise_sd;
    manifest["samples_per_trajectory"] = spec.samples_per_trajectory;
    manifest["t_start"] = spec.t_start;
    manifest["t_end"] = spec.t_end;
    manifest["initial_state"] = kAustenitizedState;
    manifest["files"] = nlohmann::ordered_json::array();
    for (auto const& d : datasets) {
        auto const name = dataset_filename(d.ks);
        try {
            write_dataset(dir / name, d);
        } catch (std::exception const& e) {
            throw DataError(e.what());
        }
        manifest["files"].push_back({ { "file", name }, { "ks", d.ks }, { "rows", d.size() } });
        out << "wrote " << (dir / name).string() << '\n';
    }
    manifest["model"] = "reference.model";
    write_text(dir / "reference.model", format_model(reference_system().trees));
    write_text(dir / "manifest.json", manifest.dump(2) + '\n');
    out << "wrote " << (dir / "reference.model").string() << '\n';
    out << "wrote " << (dir / "manifest.json").string() << '\n';
    return kOk;
}

struct FitArgs {
    std::string config;
    std::optional<int> generations;
    std::optional<double> stop_after_seconds;
};

int cmd_fit(FitArgs const& a, Common const& common, std::ostream& out)
{
    RunConfig config;
    std::vector<Dataset> datasets;
    std::vector<std::string> labels;
    try {
        config = load_config(a.config);
        if (common.seed) {
            config.alps.master_seed = *common.seed;
        }
        if (common.workers) {
            config.alps.workers = *common.workers;
        }
        if (a.generations) {
            config.alps.max_generations = *a.generations;
        }
        validate(config);
        validate(config.alps);
        for (auto const& p : config.datasets) {
            auto d = load_dataset(p);
            auto const keep = static_cast<std::size_t>(std::ceil(config.train_fraction * static_cast<double>(d.size()) - 1e-9));
            labels.push_back(label_of(p, d));
            datasets.push_back(d.head(std::max<std::size_t>(1, keep)));
        }
    } catch (std::exception const& e) {
        throw DataError(e.what());
    }

    if (!common.out.empty()) {
        fs::path const dir(common.out);
        ensure_directory(dir);
        config.model_path = dir / config.model_path.filename();
        config.history_path = dir / config.history_path.filename();
        config.report_path = dir / config.report_path.filename();
    }

    KineticsProblem const problem(datasets, config.grammar(), config.limits, config.tolerances, config.memetic);
    RunHooks hooks;
    if (a.stop_after_seconds) {
        auto const deadline = std::chrono::steady_clock::now()
            + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(*a.stop_after_seconds));
        hooks.should_stop = [deadline] { return std::chrono::steady_clock::now() >= deadline; };
    }
    auto const result = run(config.alps, problem, hooks);

    auto const report = evaluate(result.best, datasets, config.tolerances);
    std::ostringstream history;
    write_history_csv(history, result.history);
    write_text(config.model_path, format_model(result.best.trees));
    write_text(config.history_path, history.str());
    write_text(config.report_path, format_report(report, result.best.trees, labels));

    out << "generations: " << result.generations << (result.stopped_early ? " (stopped early)" : "") << '\n'
        << "best NMSE: " << format_number(report.total) << '\n'
        << "model: " << config.model_path.string() << '\n'
        << "history: " << config.history_path.string() << '\n'
        << "report: " << config.report_path.string() << '\n';
    return kOk;
}

struct EvalArgs {
    std::string model;
    std::vector<std::string> datasets;
};

int cmd_eval(EvalArgs const& a, Common const& common, std::ostream& out)
{
    auto const trees = load_model(a.model);
    std::vector<Dataset> datasets;
    std::vector<std::string> labels;
    for (auto const& p : a.datasets) {
        try {
            datasets.push_back(load_dataset(p));
        } catch (DatasetError const& e) {
            throw DataError(e.what());
        }
        labels.push_back(label_of(p, datasets.back()));
    }
    auto const text = format_report(evaluate(DESystem { trees }, datasets), trees, labels);
    out << text;
    if (!common.out.empty()) {
        write_text(common.out, text);
    }
    return kOk;
}

struct SimulateArgs {
    std::string model;
    std::string data;
};

int cmd_simulate(SimulateArgs const& a, Common const& common, std::ostream& out)
{
    if (common.out.empty()) {
        throw UsageError("simulate: --out is required");
    }
    auto const trees = load_model(a.model);
    Dataset data;
    try {
        data = load_dataset(a.data);
    } catch (DatasetError const& e) {
        throw DataError(e.what());
    }
    auto const run = integrate_rk45(DESystem { trees }, data.initial_state(), data.exogenous());
    if (!run.ok()) {
        throw std::runtime_error("integration failed at t=" + format_number(run.failure->time));
    }
    Predictions pred { run.trajectory.samples };
    try {
        write_dataset(common.out, data, &pred);
    } catch (std::exception const& e) {
        throw DataError(e.what());
    }
    out << "wrote " << common.out << " (" << data.size() << " rows)\n";
    return kOk;
}

}  // namespace

std::string format_report(FitnessReport const& report, TreeSet const& trees, std::span<std::string const> labels)
{
    std::ostringstream s;
    s << "total NMSE: " << format_number(report.total) << '\n';
    if (report.penalized) {
        s << "penalized: integration failed (progress " << format_number(report.progress) << ")\n";
    }
    s << "\nper dataset:\n";
    for (std::size_t i = 0; i < report.per_dataset.size(); ++i) {
        s << "  " << (i < labels.size() ? labels[i] : "dataset " + std::to_string(i)) << ": "
          << format_number(report.per_dataset[i]) << '\n';
    }
    s << "\nper variable:\n";
    constexpr std::array<std::string_view, kNumEquations> names { "P1dot", "P2dot", "P3dot", "RA" };
    for (std::size_t k = 0; k < kNumEquations; ++k) {
        s << "  " << names[k] << ": " << format_number(report.per_variable[k]) << '\n';
    }
    s << "\nequations:\n";
    for (std::size_t k = 0; k < kNumEquations; ++k) {
        s << "  d(" << names[k] << ")/dt = " << format_infix(trees[k]) << '\n';
    }
    return s.str();
}

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app { "Evolve and evaluate phase-kinetics ODE models", "phasegp" };
    app.require_subcommand(1);
    Common common;
    app.add_option("--seed", common.seed, "Master random seed");
    app.add_option("--workers", common.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", common.out, "Output directory or file");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Write synthetic trajectories from the reference system")->fallthrough();
    s->add_option("--rates", synth.rates, "Comma-separated cooling rates in K/s")->required();
    s->add_option("--noise", synth.noise, "Relative noise on the rate columns");
    s->add_option("--samples", synth.samples, "Samples per trajectory");
    s->add_option("--t-start", synth.t_start, "Start temperature");
    s->add_option("--t-end", synth.t_end, "End temperature");

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Run the evolutionary search")->fallthrough();
    f->add_option("--config", fit.config, "Run configuration (INI)")->required();
    f->add_option("--generations", fit.generations, "Override alps.max_generations");
    f->add_option("--stop-after-seconds", fit.stop_after_seconds, "Wall-clock bound; keeps the best so far");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Report NMSE of a model on datasets")->fallthrough();
    e->add_option("--model", ev.model, "Model file")->required();
    e->add_option("datasets", ev.datasets, "Dataset CSV files")->required();

    SimulateArgs sim;
    auto* m = app.add_subcommand("simulate", "Write a dataset with prediction columns")->fallthrough();
    m->add_option("--model", sim.model, "Model file")->required();
    m->add_option("--data", sim.data, "Dataset CSV file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (CLI::ParseError const& pe) {
        int const code = app.exit(pe, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*s) {
            return cmd_synth(synth, common, out);
        }
        if (*f) {
            return cmd_fit(fit, common, out);
        }
        if (*e) {
            return cmd_eval(ev, common, out);
        }
        return cmd_simulate(sim, common, out);
    } catch (UsageError const& x) {
        err << "error: " << x.what() << '\n';
        return kUsageError;
    } catch (DataError const& x) {
        err << "error: " << x.what() << '\n';
        return kDataError;
    } catch (std::exception const& x) {
        err << "error: " << x.what() << '\n';
        return kRuntimeFailure;
    }
}

int run(int argc, char** argv)
{
    std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace phasegp::cli
