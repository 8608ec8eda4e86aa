#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "phasegp/alps.hpp"
#include "phasegp/kinetics.hpp"

namespace phasegp::fixtures {

// Right-hand sides of the published model, typed in directly from the
// printed formulas. Used to check the tree encoding independently.
inline double aq(double x, double y) { return x / std::sqrt(1.0 + y * y); }

inline StateVector reference_rhs_by_hand(double p1, double p2, double p3, double ra, double ks)
{
    double const f1 = (aq(3.591, std::tanh(2.2151 * ra)) + -3.031)
            * (6.4351e-2 * p1 + aq(4.2717, (56.255 * ks) * (56.255 * ks))) * 5.1832
        + 5.0527e-4;
    double const f2
        = (0.96475 * p1 * (0.96475 * p2 + -7.6099e-5) * 0.68128 + 1.0441 * p3 * 1.0441 * p2 * -3.9235 + 2.5571e-5)
            * 0.65098
        + 2.0752e-7;
    double const f3
        = (3.1903e-4 * p1 + 0.99678 * p3 * std::tanh(std::tanh(-406.1 * p1 + 0.75539)) * -9.0097e-2) * 0.63386
        + 1.4733e-5;
    double const f4 = (aq(0.50793, 9.0808 * ra + -3.368) + 0.91246 * p1 * (aq(-1.5443e-3, 0.7967 * p1) + 0.12045)
                          + -0.28694)
            * 6.6264e-2
        + 1.3127e-2;
    return { f1, f2, f3, f4 };
}

// d(P1dot)/dt = c * P1dot; the other three derivatives are zero.
inline DESystem planted_system(double c)
{
    return DESystem { { Tree::binary(Symbol::Mul, Tree::constant(c), Tree::variable(Variable::P1dot)),
        Tree::constant(0.0), Tree::constant(0.0), Tree::constant(0.0) } };
}

// Cheap problem for engine tests: fit y = x^2 + x on a few points with the
// first tree only. The remaining trees are ignored.
class ToyRegression final : public Problem {
public:
    ToyRegression()
    {
        grammar_.variables = { Variable::P1dot };
        grammar_.functions = { Symbol::Add, Symbol::Mul, Symbol::Square };
        limits_ = TreeLimits { 15, 6 };
    }
    Grammar const& grammar() const override { return grammar_; }
    TreeLimits const& limits() const override { return limits_; }
    double evaluate(Individual& ind) const override
    {
        double sse = 0.0;
        for (int i = -5; i <= 5; ++i) {
            double const x = 0.3 * i;
            double const y = phasegp::evaluate(ind.trees[0], EvalState { x, 0, 0, 0, 0, 0 });
            sse += (y - (x * x + x)) * (y - (x * x + x));
        }
        return std::isfinite(sse) ? sse / 11.0 : 1e300;
    }

private:
    Grammar grammar_;
    TreeLimits limits_;
};

// Sum of squares over every parameter of single-leaf trees. The optimum is 0.
class SphereProblem final : public Problem {
public:
    SphereProblem()
    {
        grammar_.functions.clear();
        grammar_.variables.clear();
        limits_ = TreeLimits { 1, 1 };
    }
    Grammar const& grammar() const override { return grammar_; }
    TreeLimits const& limits() const override { return limits_; }
    double evaluate(Individual& ind) const override
    {
        double s = 0.0;
        for (double v : extract_params(ind.trees)) {
            s += v * v;
        }
        return s;
    }

private:
    Grammar grammar_;
    TreeLimits limits_;
};

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(std::string const& name)
{
    auto const dir = std::filesystem::temp_directory_path() / ("phasegp_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace phasegp::fixtures
