#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasegp/dataset.hpp"
#include "phasegp/ode.hpp"

namespace phasegp {

// Isothermal transformed fraction X = 1 - exp(-k t^n).
struct JmakParams {
    double k;  // rate, t^-n
    double n;  // Avrami exponent
};

double jmak_fraction(JmakParams const& p, double t);

// Athermal martensite fraction X = 1 - exp(-alpha (Ms - T)) below Ms, else 0.
struct KmParams {
    double alpha { 0.011 };  // 1/K
    double ms;               // martensite start, deg C
};

double km_fraction(KmParams const& p, double temperature);

// The published four-equation model for d(P1dot)/dt, d(P2dot)/dt,
// d(P3dot)/dt and d(RA)/dt with its fitted constants. Constants that appear
// twice in an equation are stored as two separate parameter nodes.
DESystem reference_system();

// Austenitized start: no transformation in progress, all austenite.
inline constexpr StateVector kAustenitizedState { 0.0, 0.0, 0.0, 1.0 };

struct SynthSpec {
    std::vector<double> cooling_rates { 0.6, 2.5, 10.0, 40.0, 80.0 };  // K/s
    double t_start { 830.0 };  // deg C
    double t_end { 34.0 };     // deg C
    std::size_t samples_per_trajectory { 200 };
    double noise_sd { 0.0 };  // relative, applied to the rate columns
    std::uint64_t seed { 0 };
};

void validate(SynthSpec const& spec);

class SynthesisError : public std::runtime_error {
public:
    SynthesisError(double ks, std::string const& message);
    double ks() const noexcept { return ks_; }

private:
    double ks_;
};

// One trajectory per cooling rate on the linear cooling grid
// T(t) = t_start - ks t, integrated from `initial`.
std::vector<Dataset> generate_synthetic_datasets(SynthSpec const& spec, DESystem const& system,
    StateVector const& initial = kAustenitizedState, Tolerances const& tol = {});
std::vector<Dataset> generate_synthetic_datasets(SynthSpec const& spec);

// "ks_<rate>.csv"
std::string dataset_filename(double ks);

}  // namespace phasegp
