#include "phasegp/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace phasegp {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// difference between the 5th and embedded 4th order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
constexpr double kMinStep = 1e-9;

bool all_finite(StateVector const& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Right-hand side restricted to one grid interval, where the temperature is
// a linear function of time.
class IntervalRhs {
public:
    IntervalRhs(DESystem const& system, double ks)
        : system_(system)
        , ks_(ks)
    {
    }

    void set_interval(double t0, double t1, double temp0, double temp1)
    {
        t0_ = t0;
        temp0_ = temp0;
        slope_ = t1 > t0 ? (temp1 - temp0) / (t1 - t0) : 0.0;
    }

    // Returns false when any component is non-finite.
    bool operator()(double t, StateVector const& y, StateVector& out) const
    {
        EvalState const state { y[0], y[1], y[2], y[3], ks_, temp0_ + slope_ * (t - t0_) };
        bool finite = true;
        for (std::size_t k = 0; k < kNumEquations; ++k) {
            out[k] = evaluate(system_.trees[k], state);
            finite = finite && std::isfinite(out[k]);
        }
        return finite;
    }

private:
    DESystem const& system_;
    double ks_;
    double t0_ { 0.0 };
    double temp0_ { 0.0 };
    double slope_ { 0.0 };
};

double error_norm(StateVector const& err, StateVector const& y, StateVector const& y_new, Tolerances const& tol)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < kNumEquations; ++i) {
        double const scale = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y_new[i]));
        double const r = err[i] / scale;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(kNumEquations));
}

double rms_scaled(StateVector const& v, StateVector const& y, Tolerances const& tol)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < kNumEquations; ++i) {
        double const r = v[i] / (tol.abs + tol.rel * std::abs(y[i]));
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(kNumEquations));
}

// Starting step size estimate (Hairer, Norsett & Wanner, II.4).
double initial_step(IntervalRhs const& f, double t0, StateVector const& y0, StateVector const& f0,
    Tolerances const& tol, double h_max)
{
    double const d0 = rms_scaled(y0, y0, tol);
    double const d1 = rms_scaled(f0, y0, tol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, h_max);

    StateVector y1;
    for (std::size_t i = 0; i < kNumEquations; ++i) {
        y1[i] = y0[i] + h0 * f0[i];
    }
    StateVector f1;
    if (!f(t0 + h0, y1, f1)) {
        return std::max(h0, kMinStep);
    }
    StateVector diff;
    for (std::size_t i = 0; i < kNumEquations; ++i) {
        diff[i] = f1[i] - f0[i];
    }
    double const d2 = rms_scaled(diff, y0, tol) / h0;
    double const dmax = std::max(d1, d2);
    double const h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::clamp(std::min(100.0 * h0, h1), kMinStep, h_max);
}

}  // namespace

void validate(ExogenousSignal const& exo)
{
    if (exo.t.empty()) {
        throw std::invalid_argument("exogenous signal has no samples");
    }
    if (exo.t.size() != exo.temperature.size()) {
        throw std::invalid_argument("time and temperature columns differ in length");
    }
    for (std::size_t i = 1; i < exo.t.size(); ++i) {
        if (!(exo.t[i] > exo.t[i - 1])) {
            throw std::invalid_argument("time grid must be strictly increasing");
        }
    }
}

double temperature_at(ExogenousSignal const& exo, double t)
{
    auto const& ts = exo.t;
    if (t <= ts.front()) {
        return exo.temperature.front();
    }
    if (t >= ts.back()) {
        return exo.temperature.back();
    }
    auto const it = std::upper_bound(ts.begin(), ts.end(), t);
    auto const k = static_cast<std::size_t>(it - ts.begin()) - 1;
    double const w = (t - ts[k]) / (ts[k + 1] - ts[k]);
    return exo.temperature[k] + w * (exo.temperature[k + 1] - exo.temperature[k]);
}

NonFiniteError::NonFiniteError(double time)
    : std::runtime_error("right-hand side is not finite at t = " + std::to_string(time))
    , time_(time)
{
}

StateVector rhs(DESystem const& system, StateVector const& y, double t, ExogenousSignal const& exo)
{
    EvalState const state { y[0], y[1], y[2], y[3], exo.ks, temperature_at(exo, t) };
    StateVector out;
    for (std::size_t k = 0; k < kNumEquations; ++k) {
        out[k] = evaluate(system.trees[k], state);
        if (!std::isfinite(out[k])) {
            throw NonFiniteError(t);
        }
    }
    return out;
}

Integration integrate_rk45(DESystem const& system, StateVector const& y0, ExogenousSignal const& exo,
    Tolerances const& tol)
{
    if (!all_finite(y0)) {
        throw std::invalid_argument("initial state must be finite");
    }
    if (!(tol.rel > 0.0) || !(tol.abs > 0.0)) {
        throw std::invalid_argument("integration tolerances must be positive");
    }
    validate(exo);

    Integration result;
    auto& samples = result.trajectory.samples;
    samples.reserve(exo.t.size());
    samples.push_back(y0);
    if (exo.t.size() == 1) {
        return result;
    }

    double const t_begin = exo.t.front();
    double const span = exo.t.back() - t_begin;
    auto fail = [&](FailureReason reason, double t) {
        result.failure = IntegrationFailure { reason, t, (t - t_begin) / span };
        return result;
    };

    IntervalRhs f(system, exo.ks);
    f.set_interval(exo.t[0], exo.t[1], exo.temperature[0], exo.temperature[1]);

    StateVector y = y0;
    StateVector k1, k2, k3, k4, k5, k6, k7, ytmp, y_new, err;
    if (!f(t_begin, y, k1)) {
        return fail(FailureReason::NonFinite, t_begin);
    }
    double h = initial_step(f, t_begin, y, k1, tol, span);
    double t = t_begin;
    std::size_t steps = 0;

    for (std::size_t k = 0; k + 1 < exo.t.size(); ++k) {
        double const t_next = exo.t[k + 1];
        f.set_interval(exo.t[k], t_next, exo.temperature[k], exo.temperature[k + 1]);

        while (t < t_next) {
            if (steps++ >= tol.max_steps) {
                return fail(FailureReason::MaxSteps, t);
            }
            bool const clipped = t + h >= t_next;
            double const step = clipped ? t_next - t : h;

            auto stage = [&](auto const& combine, double tc, StateVector& out) {
                for (std::size_t i = 0; i < kNumEquations; ++i) {
                    ytmp[i] = y[i] + step * combine(i);
                }
                return f(tc, ytmp, out);
            };
            bool finite = stage([&](std::size_t i) { return a21 * k1[i]; }, t + c2 * step, k2)
                && stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }, t + c3 * step, k3)
                && stage([&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; }, t + c4 * step, k4)
                && stage([&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; },
                    t + c5 * step, k5)
                && stage([&](std::size_t i) {
                       return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
                   },
                    t + step, k6);

            double norm = std::numeric_limits<double>::infinity();
            if (finite) {
                for (std::size_t i = 0; i < kNumEquations; ++i) {
                    y_new[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
                }
                finite = all_finite(y_new) && f(t + step, y_new, k7);
                if (finite) {
                    for (std::size_t i = 0; i < kNumEquations; ++i) {
                        err[i] = step
                            * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                    }
                    norm = error_norm(err, y, y_new, tol);
                }
            }

            if (norm <= 1.0) {
                t = clipped ? t_next : t + step;
                y = y_new;
                k1 = k7;
                double const factor
                    = norm == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(norm, -0.2), kMinFactor, kMaxFactor);
                double const proposal = step * factor;
                h = std::clamp(clipped ? std::max(h, proposal) : proposal, kMinStep, span);
            } else {
                // non-finite stages are treated as a rejected step
                double const factor = std::isfinite(norm) ? std::max(kMinFactor, kSafety * std::pow(norm, -0.2)) : 0.25;
                h = step * factor;
                if (h < kMinStep) {
                    return fail(finite ? FailureReason::StepUnderflow : FailureReason::NonFinite, t);
                }
            }
        }
        samples.push_back(y);
    }
    return result;
}

}  // namespace phasegp
