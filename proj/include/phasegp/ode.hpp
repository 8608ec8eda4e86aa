#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "phasegp/model_file.hpp"

namespace phasegp {

// State integrated over time: [P1dot, P2dot, P3dot, RA]. The trees give the
// time derivative of each entry.
using StateVector = std::array<double, kNumEquations>;

struct DESystem {
    TreeSet trees;

    std::size_t parameter_count() const noexcept { return phasegp::parameter_count(trees); }
    std::vector<double> parameters() const { return extract_params(trees); }
    DESystem with_parameters(std::span<double const> theta) const { return { inject_params(trees, theta) }; }
};

// Exogenous inputs of one trajectory: the measured time/temperature columns
// and the constant cooling rate. Views into data owned elsewhere.
struct ExogenousSignal {
    std::span<double const> t;
    std::span<double const> temperature;
    double ks { 0.0 };
};

void validate(ExogenousSignal const& exo);

// Linear interpolation of the temperature column, clamped at the ends.
double temperature_at(ExogenousSignal const& exo, double t);

class NonFiniteError : public std::runtime_error {
public:
    explicit NonFiniteError(double time);
    double time() const noexcept { return time_; }

private:
    double time_;
};

// Evaluates the four right-hand sides at (y, t). Throws NonFiniteError.
StateVector rhs(DESystem const& system, StateVector const& y, double t, ExogenousSignal const& exo);

struct Tolerances {
    double rel { 1e-6 };
    double abs { 1e-8 };
    std::size_t max_steps { 100000 };

    friend bool operator==(Tolerances const&, Tolerances const&) = default;
};

struct Trajectory {
    std::vector<StateVector> samples;  // one per grid point
};

enum class FailureReason { NonFinite, StepUnderflow, MaxSteps };

struct IntegrationFailure {
    FailureReason reason;
    double time;
    double progress;  // fraction of [t0, t_end] completed
};

struct Integration {
    Trajectory trajectory;                  // samples up to the failure point
    std::optional<IntegrationFailure> failure;

    bool ok() const noexcept { return !failure.has_value(); }
};

// Dormand-Prince 5(4) with adaptive step control. Steps are aligned with the
// grid, so every sample is produced at exactly the requested time.
Integration integrate_rk45(DESystem const& system, StateVector const& y0, ExogenousSignal const& exo,
    Tolerances const& tol = {});

}  // namespace phasegp
