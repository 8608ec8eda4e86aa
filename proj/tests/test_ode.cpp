#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "phasegp/kinetics.hpp"
#include "phasegp/ode.hpp"
#include "support.hpp"

using namespace phasegp;

namespace {

Tree c(double v) { return Tree::constant(v); }
Tree var(Variable v) { return Tree::variable(v); }
Tree mul(Tree const& a, Tree const& b) { return Tree::binary(Symbol::Mul, a, b); }

DESystem system_of(Tree p1, Tree p2 = c(0), Tree p3 = c(0), Tree ra = c(0))
{
    return DESystem { { std::move(p1), std::move(p2), std::move(p3), std::move(ra) } };
}

struct Grid {
    std::vector<double> t;
    std::vector<double> temperature;
    double ks;

    ExogenousSignal exo() const { return { t, temperature, ks }; }
};

Grid linear_grid(double t_end, std::size_t n, double ks = 1.0, double t_start_temp = 830.0)
{
    Grid g { {}, {}, ks };
    for (std::size_t i = 0; i < n; ++i) {
        double const t = n == 1 ? 0.0 : t_end * static_cast<double>(i) / static_cast<double>(n - 1);
        g.t.push_back(t);
        g.temperature.push_back(t_start_temp - ks * t);
    }
    return g;
}

double max_decay_error(Tolerances const& tol, std::size_t points = 11)
{
    auto const grid = linear_grid(1.0, points);
    auto const run = integrate_rk45(system_of(mul(c(-1), var(Variable::P1dot))), { 1, 0, 0, 0 }, grid.exo(), tol);
    EXPECT_TRUE(run.ok());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
        worst = std::max(worst, std::abs(run.trajectory.samples[i][0] - std::exp(-grid.t[i])));
    }
    return worst;
}

}  // namespace

TEST(Ode, ExponentialDecay)
{
    EXPECT_LT(max_decay_error({ 1e-8, 1e-8, 100000 }), 1e-6);
    EXPECT_LT(max_decay_error({ 1e-10, 1e-12, 100000 }), 1e-9);
}

TEST(Ode, ErrorShrinksAsToleranceHalves)
{
    // Only the end points are requested so the step size is free; with a
    // dense grid the steps are clipped and the error stops depending on tol.
    for (double base : { 1e-6, 1e-8 }) {
        double previous = max_decay_error({ base, base, 100000 }, 2);
        for (int i = 1; i <= 5; ++i) {
            double const tol = base / std::pow(2.0, i);
            double const err = max_decay_error({ tol, tol, 100000 }, 2);
            EXPECT_LT(err, previous) << "base " << base << ", halving " << i;
            previous = err;
        }
    }
}

TEST(Ode, HarmonicOscillator)
{
    // y1' = y2, y2' = -y1 with y(0) = (0, 1): y1 = sin t, y2 = cos t
    auto const grid = linear_grid(10.0, 101);
    auto const sys = system_of(var(Variable::P2dot), mul(c(-1), var(Variable::P1dot)));
    auto const run = integrate_rk45(sys, { 0, 1, 0, 0 }, grid.exo(), { 1e-10, 1e-12, 100000 });
    ASSERT_TRUE(run.ok());
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
        EXPECT_NEAR(run.trajectory.samples[i][0], std::sin(grid.t[i]), 1e-8);
        EXPECT_NEAR(run.trajectory.samples[i][1], std::cos(grid.t[i]), 1e-8);
    }
}

TEST(Ode, ExogenousInputs)
{
    // y' = T with T = 830 - ks t integrates to 830 t - ks t^2 / 2; z' = Ks gives ks t
    auto const grid = linear_grid(20.0, 41, 2.5);
    auto const sys = system_of(var(Variable::T), var(Variable::Ks));
    auto const run = integrate_rk45(sys, { 0, 0, 0, 0 }, grid.exo());
    ASSERT_TRUE(run.ok());
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
        double const t = grid.t[i];
        EXPECT_NEAR(run.trajectory.samples[i][0], 830.0 * t - 1.25 * t * t, 1e-6 * (1 + 830.0 * t));
        EXPECT_NEAR(run.trajectory.samples[i][1], 2.5 * t, 1e-9);
    }
}

TEST(Ode, SamplesLandOnTheGrid)
{
    auto const grid = linear_grid(5.0, 7);
    auto const run = integrate_rk45(system_of(c(1), c(2), c(3), c(-0.1)), { 0, 0, 0, 1 }, grid.exo());
    ASSERT_TRUE(run.ok());
    ASSERT_EQ(run.trajectory.samples.size(), 7u);
    EXPECT_EQ(run.trajectory.samples[0], (StateVector { 0, 0, 0, 1 }));
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_NEAR(run.trajectory.samples[i][2], 3.0 * grid.t[i], 1e-12);
    }
}

TEST(Ode, SingleRowReturnsInitialState)
{
    auto const grid = linear_grid(0.0, 1);
    auto const run = integrate_rk45(system_of(c(1)), { 0.5, 0, 0, 1 }, grid.exo());
    ASSERT_TRUE(run.ok());
    ASSERT_EQ(run.trajectory.samples.size(), 1u);
    EXPECT_EQ(run.trajectory.samples[0], (StateVector { 0.5, 0, 0, 1 }));
}

TEST(Ode, BlowUpReportsProgress)
{
    // y' = y^2 from y(0) = 1 explodes at t = 1, half way through [0, 2]
    auto const grid = linear_grid(2.0, 21);
    auto const sys = system_of(Tree::unary(Symbol::Square, var(Variable::P1dot)));
    auto const run = integrate_rk45(sys, { 1, 0, 0, 0 }, grid.exo());
    ASSERT_FALSE(run.ok());
    EXPECT_NEAR(run.failure->progress, 0.5, 0.01);
    EXPECT_LE(run.trajectory.samples.size(), 11u);
}

TEST(Ode, NonFiniteRightHandSideFails)
{
    // division by zero everywhere
    auto const grid = linear_grid(1.0, 5);
    auto const sys = system_of(Tree::binary(Symbol::Div, c(1), c(0)));
    auto const run = integrate_rk45(sys, { 0, 0, 0, 0 }, grid.exo());
    ASSERT_FALSE(run.ok());
    EXPECT_EQ(run.failure->reason, FailureReason::NonFinite);
    EXPECT_EQ(run.failure->progress, 0.0);
}

TEST(Ode, StepBudget)
{
    auto const grid = linear_grid(100.0, 3);
    auto const sys = system_of(var(Variable::P2dot), mul(c(-100), var(Variable::P1dot)));
    auto const run = integrate_rk45(sys, { 0, 1, 0, 0 }, grid.exo(), { 1e-8, 1e-10, 5 });
    ASSERT_FALSE(run.ok());
    EXPECT_EQ(run.failure->reason, FailureReason::MaxSteps);
    EXPECT_LT(run.failure->progress, 1.0);
}

TEST(Ode, RejectsBadInputs)
{
    Grid g { { 0.0, 1.0, 1.0 }, { 800, 799, 798 }, 1.0 };
    EXPECT_THROW(integrate_rk45(system_of(c(0)), { 0, 0, 0, 0 }, g.exo()), std::invalid_argument);
    auto const ok = linear_grid(1.0, 3);
    EXPECT_THROW(integrate_rk45(system_of(c(0)), { NAN, 0, 0, 0 }, ok.exo()), std::invalid_argument);
    EXPECT_THROW(integrate_rk45(system_of(c(0)), { 0, 0, 0, 0 }, ok.exo(), { 0.0, 1e-8, 10 }), std::invalid_argument);
}

TEST(Ode, TemperatureInterpolation)
{
    Grid const g { { 0.0, 1.0, 3.0 }, { 800.0, 790.0, 770.0 }, 10.0 };
    auto const exo = g.exo();
    EXPECT_EQ(temperature_at(exo, -1.0), 800.0);
    EXPECT_EQ(temperature_at(exo, 0.5), 795.0);
    EXPECT_EQ(temperature_at(exo, 2.0), 780.0);
    EXPECT_EQ(temperature_at(exo, 9.0), 770.0);
}

TEST(Ode, RhsThrowsOnNonFinite)
{
    auto const grid = linear_grid(1.0, 2);
    auto const sys = system_of(Tree::binary(Symbol::Div, c(1), var(Variable::RA)));
    EXPECT_THROW(rhs(sys, { 0, 0, 0, 0 }, 0.0, grid.exo()), NonFiniteError);
    EXPECT_EQ(rhs(sys, { 0, 0, 0, 4 }, 0.0, grid.exo())[0], 0.25);
}

TEST(Ode, ReferenceSystemAgainstFixedStepRk4)
{
    // Independent integrator: classical RK4 with a small fixed step on the
    // hand-written right-hand sides.
    double const ks = 40.0;
    auto const grid = linear_grid((830.0 - 34.0) / ks, 60, ks);
    auto const run = integrate_rk45(reference_system(), kAustenitizedState, grid.exo(), { 1e-10, 1e-12, 1000000 });
    ASSERT_TRUE(run.ok());

    auto f = [ks](StateVector const& y) { return fixtures::reference_rhs_by_hand(y[0], y[1], y[2], y[3], ks); };
    StateVector y = kAustenitizedState;
    int const sub = 400;
    for (std::size_t i = 1; i < grid.t.size(); ++i) {
        double const h = (grid.t[i] - grid.t[i - 1]) / sub;
        for (int s = 0; s < sub; ++s) {
            auto shifted = [&](StateVector const& k, double w) {
                StateVector out;
                for (std::size_t j = 0; j < 4; ++j) {
                    out[j] = y[j] + w * h * k[j];
                }
                return out;
            };
            auto const k1 = f(y);
            auto const k2 = f(shifted(k1, 0.5));
            auto const k3 = f(shifted(k2, 0.5));
            auto const k4 = f(shifted(k3, 1.0));
            for (std::size_t j = 0; j < 4; ++j) {
                y[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
            }
        }
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_NEAR(run.trajectory.samples[i][j], y[j], 1e-7 * std::max(1.0, std::abs(y[j])))
                << "row " << i << " column " << j;
        }
    }
}
