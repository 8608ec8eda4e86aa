#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "phasegp/dataset.hpp"
#include "phasegp/kinetics.hpp"
#include "support.hpp"

using namespace phasegp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> const& args)
{
    std::ostringstream out, err;
    int const code = cli::run(args, out, err);
    return { code, out.str(), err.str() };
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double total_of(std::string const& report)
{
    auto const pos = report.find("total NMSE: ");
    EXPECT_NE(pos, std::string::npos) << report;
    return std::stod(report.substr(pos + 12));
}

std::string desk_config(fs::path const& dir, std::string const& extra = "")
{
    return "[data]\ndatasets = " + (dir / "ks_40.csv").string() + ", " + (dir / "ks_80.csv").string()
        + "\n[alps]\npopulation_size = 8\nmax_layers = 2\nmax_generations = 4\n"
          "[tree]\nmax_nodes = 8\nmax_depth = 4\n"
          "[memetic]\nmax_iters = 2\n"
        + extra;
}

}  // namespace

TEST(Cli, SynthWritesFilesAndManifest)
{
    auto const dir = fixtures::scratch_dir("cli_synth");
    auto const r = call({ "synth", "--rates", "0.6,2.5,10,40,80", "--seed", "1", "--out", dir.string() });
    ASSERT_EQ(r.code, 0) << r.err;
    for (auto const* name : { "ks_0.6.csv", "ks_2.5.csv", "ks_10.csv", "ks_40.csv", "ks_80.csv", "manifest.json",
             "reference.model" }) {
        EXPECT_TRUE(fs::exists(dir / name)) << name;
    }
    auto const manifest = slurp(dir / "manifest.json");
    EXPECT_NE(manifest.find("\"seed\": 1"), std::string::npos);
    EXPECT_NE(manifest.find("ks_0.6.csv"), std::string::npos);
    EXPECT_EQ(load_dataset(dir / "ks_10.csv"), generate_synthetic_datasets(SynthSpec { { 10.0 } })[0]);
}

TEST(Cli, SynthIsByteIdenticalAcrossRuns)
{
    auto const a = fixtures::scratch_dir("cli_synth_a");
    auto const b = fixtures::scratch_dir("cli_synth_b");
    for (auto const& dir : { a, b }) {
        ASSERT_EQ(call({ "synth", "--rates", "2.5,40", "--noise", "0.05", "--seed", "7", "--out", dir.string() }).code, 0);
    }
    for (auto const* name : { "ks_2.5.csv", "ks_40.csv", "manifest.json" }) {
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
}

TEST(Cli, SynthUsageErrors)
{
    EXPECT_EQ(call({ "synth", "--rates", "" }).code, cli::kUsageError);
    EXPECT_EQ(call({ "synth", "--rates", "1,,2" }).code, cli::kUsageError);
    EXPECT_EQ(call({ "synth", "--rates", "fast" }).code, cli::kUsageError);
    EXPECT_EQ(call({ "synth", "--rates", "0.1" }).code, cli::kUsageError);
    EXPECT_EQ(call({ "synth" }).code, cli::kUsageError);
    EXPECT_EQ(call({}).code, cli::kUsageError);
    EXPECT_EQ(call({ "frobnicate" }).code, cli::kUsageError);
    EXPECT_EQ(call({ "--help" }).code, cli::kOk);
}

TEST(Cli, SynthUnwritableOutput)
{
    auto const dir = fixtures::scratch_dir("cli_synth_blocked");
    std::ofstream(dir / "file") << "x";
    auto const r = call({ "synth", "--rates", "10", "--out", (dir / "file" / "sub").string() });
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, EvalReferenceOnItsOwnData)
{
    auto const dir = fixtures::scratch_dir("cli_eval");
    ASSERT_EQ(call({ "synth", "--rates", "0.6,2.5,10,40,80", "--seed", "1", "--out", dir.string() }).code, 0);
    std::vector<std::string> args { "eval", "--model", (dir / "reference.model").string() };
    for (auto const* name : { "ks_0.6.csv", "ks_2.5.csv", "ks_10.csv", "ks_40.csv", "ks_80.csv" }) {
        args.push_back((dir / name).string());
    }
    auto const r = call(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(total_of(r.out), 1e-6);
    EXPECT_NE(r.out.find("per dataset:"), std::string::npos);
    EXPECT_NE(r.out.find("per variable:"), std::string::npos);
    EXPECT_NE(r.out.find("d(RA)/dt = "), std::string::npos);
    EXPECT_NE(r.out.find("AQ(3.591, tanh((2.2151 * RA)))"), std::string::npos);
}

TEST(Cli, EvalIgnoresSeedOfNoiseFreeData)
{
    auto const a = fixtures::scratch_dir("cli_eval_a");
    auto const b = fixtures::scratch_dir("cli_eval_b");
    ASSERT_EQ(call({ "synth", "--rates", "10", "--seed", "1", "--out", a.string() }).code, 0);
    ASSERT_EQ(call({ "synth", "--rates", "10", "--seed", "2", "--out", b.string() }).code, 0);
    std::ofstream(a / "perturbed.model") << "[P1]\n(const 0.001)\n[P2]\n(const 0)\n[P3]\n(const 0)\n[RA]\n(const -0.001)\n";
    auto const ra = call({ "eval", "--model", (a / "perturbed.model").string(), (a / "ks_10.csv").string() });
    auto const rb = call({ "eval", "--model", (a / "perturbed.model").string(), (b / "ks_10.csv").string() });
    ASSERT_EQ(ra.code, 0);
    EXPECT_EQ(total_of(ra.out), total_of(rb.out));
}

TEST(Cli, EvalDataErrors)
{
    auto const dir = fixtures::scratch_dir("cli_eval_bad");
    ASSERT_EQ(call({ "synth", "--rates", "10", "--out", dir.string() }).code, 0);
    std::ofstream(dir / "corrupt.model") << "[P1]\n(add (const 1)\n";
    EXPECT_EQ(call({ "eval", "--model", (dir / "corrupt.model").string(), (dir / "ks_10.csv").string() }).code,
        cli::kDataError);
    EXPECT_EQ(call({ "eval", "--model", (dir / "absent.model").string(), (dir / "ks_10.csv").string() }).code,
        cli::kDataError);
    auto const r = call({ "eval", "--model", (dir / "reference.model").string(), (dir / "nope.csv").string() });
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_NE(r.err.find("nope.csv"), std::string::npos);
    EXPECT_EQ(call({ "eval", "--model", (dir / "reference.model").string() }).code, cli::kUsageError);
}

TEST(Cli, SimulateReproducesTargets)
{
    auto const dir = fixtures::scratch_dir("cli_sim");
    ASSERT_EQ(call({ "synth", "--rates", "0.6", "--out", dir.string() }).code, 0);
    auto const out = dir / "pred.csv";
    auto const r = call({ "simulate", "--model", (dir / "reference.model").string(), "--data",
        (dir / "ks_0.6.csv").string(), "--out", out.string() });
    ASSERT_EQ(r.code, 0) << r.err;

    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "ks,T,t,p1dot,p2dot,p3dot,p4dot,ra,pred_p1dot,pred_p2dot,pred_p3dot,pred_ra");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::vector<double> v;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            v.push_back(std::stod(cell));
        }
        ASSERT_EQ(v.size(), 12u);
        EXPECT_NEAR(v[8], v[3], 1e-6);
        EXPECT_NEAR(v[9], v[4], 1e-6);
        EXPECT_NEAR(v[10], v[5], 1e-6);
        EXPECT_NEAR(v[11], v[7], 1e-6);
        ++rows;
    }
    EXPECT_EQ(rows, 200u);
}

TEST(Cli, SimulateZeroModelAndSingleRow)
{
    auto const dir = fixtures::scratch_dir("cli_sim_zero");
    std::ofstream(dir / "zero.model") << "[P1]\n(const 0)\n[P2]\n(const 0)\n[P3]\n(const 0)\n[RA]\n(const 0)\n";
    std::ofstream(dir / "one.csv") << "ks,T,t,p1dot,p2dot,p3dot,p4dot,ra\n5,800,0,0.1,0.2,0.3,0,0.4\n";
    std::ofstream(dir / "three.csv") << "ks,T,t,p1dot,p2dot,p3dot,p4dot,ra\n5,800,0,0.1,0.2,0.3,0,0.4\n"
                                        "5,795,1,0,0,0,0,0.4\n5,790,2,0,0,0,0,0.4\n";
    for (auto const* name : { "one.csv", "three.csv" }) {
        auto const out = dir / ("pred_" + std::string(name));
        auto const r = call({ "simulate", "--model", (dir / "zero.model").string(), "--data", (dir / name).string(),
            "--out", out.string() });
        ASSERT_EQ(r.code, 0) << r.err;
        std::ifstream in(out);
        std::string line;
        std::getline(in, line);
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            EXPECT_EQ(line.substr(line.size() - 16), ",0.1,0.2,0.3,0.4") << line;
            ++rows;
        }
        EXPECT_EQ(rows, std::string(name) == "one.csv" ? 1u : 3u);
    }
    EXPECT_EQ(call({ "simulate", "--model", (dir / "zero.model").string(), "--data", (dir / "one.csv").string() }).code,
        cli::kUsageError);
}

TEST(Cli, SimulateFailingModel)
{
    auto const dir = fixtures::scratch_dir("cli_sim_fail");
    std::ofstream(dir / "bad.model") << "[P1]\n(div (const 1) (const 0))\n[P2]\n(const 0)\n[P3]\n(const 0)\n[RA]\n(const 0)\n";
    std::ofstream(dir / "d.csv") << "ks,T,t,p1dot,p2dot,p3dot,p4dot,ra\n5,800,0,0,0,0,0,1\n5,795,1,0,0,0,0,1\n";
    auto const r = call({ "simulate", "--model", (dir / "bad.model").string(), "--data", (dir / "d.csv").string(),
        "--out", (dir / "p.csv").string() });
    EXPECT_EQ(r.code, cli::kRuntimeFailure);
}

TEST(Cli, FitWritesArtifacts)
{
    auto const dir = fixtures::scratch_dir("cli_fit");
    ASSERT_EQ(call({ "synth", "--rates", "40,80", "--samples", "40", "--out", dir.string() }).code, 0);
    std::ofstream(dir / "run.ini") << desk_config(dir);
    auto const r = call({ "fit", "--config", (dir / "run.ini").string(), "--seed", "3", "--out", (dir / "out").string() });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NO_THROW(read_model(dir / "out" / "best.model"));
    auto const report = slurp(dir / "out" / "report.txt");
    double const total = total_of(report);
    EXPECT_TRUE(std::isfinite(total));
    EXPECT_NE(report.find("d(P1dot)/dt = "), std::string::npos);
    auto const history = slurp(dir / "out" / "history.csv");
    EXPECT_EQ(history.rfind("generation,layer,best_nmse,mean_nmse,mean_age\n", 0), 0u);
}

TEST(Cli, FitIsDeterministic)
{
    auto const dir = fixtures::scratch_dir("cli_fit_det");
    ASSERT_EQ(call({ "synth", "--rates", "40,80", "--samples", "40", "--out", dir.string() }).code, 0);
    std::ofstream(dir / "run.ini") << desk_config(dir);
    auto fit = [&](std::string const& workers, std::string const& out) {
        auto const r = call({ "fit", "--config", (dir / "run.ini").string(), "--seed", "11", "--workers", workers,
            "--out", (dir / out).string() });
        EXPECT_EQ(r.code, 0) << r.err;
        return slurp(dir / out / "best.model");
    };
    auto const a = fit("1", "a");
    EXPECT_EQ(a, fit("1", "b"));
    EXPECT_EQ(a, fit("4", "c"));
}

TEST(Cli, FitConfigErrorsStopBeforeEvolution)
{
    auto const dir = fixtures::scratch_dir("cli_fit_bad");
    std::ofstream(dir / "missing.ini") << "[data]\ndatasets = " << (dir / "gone.csv").string() << "\n";
    auto const r = call({ "fit", "--config", (dir / "missing.ini").string(), "--out", (dir / "out").string() });
    EXPECT_EQ(r.code, cli::kDataError);
    EXPECT_NE(r.err.find("gone.csv"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "out"));

    std::ofstream(dir / "typo.ini") << "[alps]\npopulation = 3\n";
    auto const t = call({ "fit", "--config", (dir / "typo.ini").string() });
    EXPECT_EQ(t.code, cli::kDataError);
    EXPECT_NE(t.err.find("alps.population"), std::string::npos);
    EXPECT_EQ(call({ "fit" }).code, cli::kUsageError);
    EXPECT_EQ(call({ "fit", "--config", (dir / "absent.ini").string() }).code, cli::kDataError);
}

TEST(Cli, FitStopsOnTheClock)
{
    auto const dir = fixtures::scratch_dir("cli_fit_clock");
    ASSERT_EQ(call({ "synth", "--rates", "40,80", "--samples", "40", "--out", dir.string() }).code, 0);
    std::ofstream(dir / "run.ini") << desk_config(dir);
    auto const r = call({ "fit", "--config", (dir / "run.ini").string(), "--stop-after-seconds", "0", "--out",
        (dir / "out").string() });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("generations: 0 (stopped early)"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(dir / "out" / "best.model"));
}

TEST(Cli, FitInputsAreNotModified)
{
    auto const dir = fixtures::scratch_dir("cli_fit_inputs");
    ASSERT_EQ(call({ "synth", "--rates", "40,80", "--samples", "40", "--out", dir.string() }).code, 0);
    std::ofstream(dir / "run.ini") << desk_config(dir);
    auto const before = slurp(dir / "ks_40.csv") + slurp(dir / "run.ini");
    ASSERT_EQ(call({ "fit", "--config", (dir / "run.ini").string(), "--out", (dir / "out").string() }).code, 0);
    EXPECT_EQ(slurp(dir / "ks_40.csv") + slurp(dir / "run.ini"), before);
}
