#include "phasegp/kinetics.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace phasegp {

double jmak_fraction(JmakParams const& p, double t)
{
    if (!(p.k > 0.0) || !(p.n > 0.0)) {
        throw std::invalid_argument("JMAK parameters k and n must be positive");
    }
    if (t < 0.0) {
        throw std::invalid_argument("JMAK time must be non-negative");
    }
    return -std::expm1(-p.k * std::pow(t, p.n));
}

double km_fraction(KmParams const& p, double temperature)
{
    if (!(p.alpha > 0.0)) {
        throw std::invalid_argument("Koistinen-Marburger alpha must be positive");
    }
    if (temperature >= p.ms) {
        return 0.0;
    }
    return -std::expm1(-p.alpha * (p.ms - temperature));
}

namespace {

    Tree c(double v) { return Tree::constant(v); }
    Tree var(Variable v) { return Tree::variable(v); }
    Tree add(Tree const& a, Tree const& b) { return Tree::binary(Symbol::Add, a, b); }
    Tree mul(Tree const& a, Tree const& b) { return Tree::binary(Symbol::Mul, a, b); }
    Tree aq(Tree const& a, Tree const& b) { return Tree::binary(Symbol::AQ, a, b); }
    Tree tanh_of(Tree const& a) { return Tree::unary(Symbol::Tanh, a); }
    Tree square(Tree const& a) { return Tree::unary(Symbol::Square, a); }

    // ((AQ(c0, tanh(c1 RA)) + c2) (c3 P1 + AQ(c4, (c5 Ks)^2)) c6) + c7
    Tree ferrite_rate()
    {
        auto const p1 = var(Variable::P1dot);
        auto const left = add(aq(c(3.591), tanh_of(mul(c(2.2151), var(Variable::RA)))), c(-3.031));
        auto const right = add(mul(c(6.4351e-2), p1), aq(c(4.2717), square(mul(c(56.255), var(Variable::Ks)))));
        return add(mul(mul(left, right), c(5.1832)), c(5.0527e-4));
    }

    // ((c0 P1 (c0 P2 + c1) c2 + c3 P3 c3 P2 c4) + c5) c6 + c7
    Tree pearlite_rate()
    {
        double const c0 = 0.96475, c1 = -7.6099e-5, c2 = 0.68128, c3 = 1.0441, c4 = -3.9235, c5 = 2.5571e-5,
                     c6 = 0.65098, c7 = 2.0752e-7;
        auto const p1 = var(Variable::P1dot);
        auto const p2 = var(Variable::P2dot);
        auto const p3 = var(Variable::P3dot);
        auto const first = mul(mul(mul(c(c0), p1), add(mul(c(c0), p2), c(c1))), c(c2));
        auto const second = mul(mul(mul(mul(c(c3), p3), c(c3)), p2), c(c4));
        return add(mul(add(add(first, second), c(c5)), c(c6)), c(c7));
    }

    // (c0 P1 + c1 P3 tanh(tanh(c2 P1 + c3)) c4) c5 + c6
    Tree bainite_rate()
    {
        auto const p1 = var(Variable::P1dot);
        auto const p3 = var(Variable::P3dot);
        auto const damped = tanh_of(tanh_of(add(mul(c(-406.1), p1), c(0.75539))));
        auto const inner = add(mul(c(3.1903e-4), p1), mul(mul(mul(c(0.99678), p3), damped), c(-9.0097e-2)));
        return add(mul(inner, c(0.63386)), c(1.4733e-5));
    }

    // (AQ(c0, c1 RA + c2) + c3 P1 (AQ(c4, c5 P1) + c6) + c7) c8 + c9
    Tree retained_austenite_rate()
    {
        auto const p1 = var(Variable::P1dot);
        auto const ra = var(Variable::RA);
        auto const first = aq(c(0.50793), add(mul(c(9.0808), ra), c(-3.368)));
        auto const second = mul(mul(c(0.91246), p1), add(aq(c(-1.5443e-3), mul(c(0.7967), p1)), c(0.12045)));
        return add(mul(add(add(first, second), c(-0.28694)), c(6.6264e-2)), c(1.3127e-2));
    }

}  // namespace

DESystem reference_system()
{
    return DESystem { { ferrite_rate(), pearlite_rate(), bainite_rate(), retained_austenite_rate() } };
}

SynthesisError::SynthesisError(double ks, std::string const& message)
    : std::runtime_error("cooling rate " + format_number(ks) + ": " + message)
    , ks_(ks)
{
}

void validate(SynthSpec const& spec)
{
    if (spec.cooling_rates.empty()) {
        throw std::invalid_argument("at least one cooling rate is required");
    }
    for (double ks : spec.cooling_rates) {
        if (!(ks >= 0.6 && ks <= 120.0)) {
            throw std::invalid_argument("cooling rate " + format_number(ks) + " outside [0.6, 120] K/s");
        }
    }
    if (!(spec.t_start > spec.t_end)) {
        throw std::invalid_argument("start temperature must exceed end temperature");
    }
    if (spec.samples_per_trajectory < 1) {
        throw std::invalid_argument("samples_per_trajectory must be at least 1");
    }
    if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) {
        throw std::invalid_argument("noise_sd must be a non-negative number");
    }
}

std::vector<Dataset> generate_synthetic_datasets(SynthSpec const& spec, DESystem const& system,
    StateVector const& initial, Tolerances const& tol)
{
    validate(spec);
    auto const n_rates = spec.cooling_rates.size();
    std::vector<Dataset> out(n_rates);
    std::vector<std::optional<std::string>> errors(n_rates);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(n_rates); ++r) {
        auto const idx = static_cast<std::size_t>(r);
        double const ks = spec.cooling_rates[idx];
        auto const n = spec.samples_per_trajectory;
        Dataset data;
        data.ks = ks;
        double const duration = (spec.t_start - spec.t_end) / ks;
        for (std::size_t i = 0; i < n; ++i) {
            double const t = n == 1 ? 0.0 : duration * static_cast<double>(i) / static_cast<double>(n - 1);
            data.t.push_back(t);
            data.temperature.push_back(spec.t_start - ks * t);
        }

        try {
            auto const run = integrate_rk45(system, initial, data.exogenous(), tol);
            if (!run.ok()) {
                errors[idx] = "integration failed at t = " + format_number(run.failure->time);
                continue;
            }
            for (auto const& y : run.trajectory.samples) {
                data.p1dot.push_back(y[0]);
                data.p2dot.push_back(y[1]);
                data.p3dot.push_back(y[2]);
                data.p4dot.push_back(0.0);
                data.ra.push_back(y[3]);
            }
        } catch (std::exception const& e) {
            errors[idx] = e.what();
            continue;
        }

        if (spec.noise_sd > 0.0) {
            // row 0 stays exact: it is the initial condition
            auto rng = make_stream(spec.seed, { idx });
            std::normal_distribution<double> noise(0.0, spec.noise_sd);
            for (std::size_t i = 1; i < n; ++i) {
                for (auto* column : { &data.p1dot, &data.p2dot, &data.p3dot }) {
                    (*column)[i] *= 1.0 + noise(rng);
                }
            }
        }
        out[idx] = std::move(data);
    }

    for (std::size_t r = 0; r < n_rates; ++r) {
        if (errors[r]) {
            throw SynthesisError(spec.cooling_rates[r], *errors[r]);
        }
    }
    return out;
}

std::vector<Dataset> generate_synthetic_datasets(SynthSpec const& spec)
{
    return generate_synthetic_datasets(spec, reference_system());
}

std::string dataset_filename(double ks) { return "ks_" + format_number(ks) + ".csv"; }

}  // namespace phasegp
