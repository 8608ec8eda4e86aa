#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "phasegp/dataset.hpp"
#include "phasegp/genotype.hpp"
#include "phasegp/ode.hpp"

namespace phasegp {

// Candidates whose integration fails score kPenaltyBase + (1 - progress).
inline constexpr double kPenaltyBase = 10.0;

struct FitnessReport {
    double total { 0.0 };               // mean NMSE over (dataset x variable) cells
    std::vector<double> per_dataset;    // mean over the four variables
    std::array<double, kNumEquations> per_variable {};  // mean over datasets
    bool penalized { false };
    double progress { 1.0 };            // integration progress of the failing dataset
};

// mean((pred - target)^2) / var(target), population variance. A constant
// target falls back to the plain mean squared error.
double nmse(std::span<double const> pred, std::span<double const> target);

FitnessReport evaluate(DESystem const& system, std::span<Dataset const> datasets, Tolerances const& tol = {});
FitnessReport evaluate(Individual const& ind, std::span<Dataset const> datasets, Tolerances const& tol = {});

// The fitness objective written as a stacked residual vector r(theta) with
// sum(r^2) == evaluate(...).total, over the parameters of a fixed tree set.
class ResidualModel {
public:
    ResidualModel(TreeSet structure, std::span<Dataset const> datasets, Tolerances tol);

    std::size_t parameter_count() const noexcept { return parameter_count_; }
    std::size_t residual_count() const noexcept { return residual_count_; }

    // False when the integration fails for any dataset.
    bool residuals(std::span<double const> theta, Eigen::VectorXd& r) const;
    // sum(r^2), or +inf when the integration fails.
    double objective(std::span<double const> theta) const;
    // Central differences with step max(1e-6, 1e-6 |theta_i|). Columns whose
    // perturbed integrations fail fall back to one-sided or zero.
    void jacobian(std::span<double const> theta, Eigen::VectorXd const& r, Eigen::MatrixXd& jac) const;
    // 2 J^T r
    Eigen::VectorXd gradient(std::span<double const> theta) const;

    static double fd_step(double theta) noexcept;

private:
    TreeSet structure_;
    std::span<Dataset const> datasets_;
    Tolerances tol_;
    std::vector<double> scale_;  // 1 / sqrt(C * n * var) per (dataset, variable) cell
    std::size_t parameter_count_;
    std::size_t residual_count_;
};

struct LmOptions {
    int max_iters { 10 };
    double initial_damping { 1e-3 };
    double max_damping { 1e12 };

    friend bool operator==(LmOptions const&, LmOptions const&) = default;
};

struct OptimizeResult {
    Individual individual;
    FitnessReport report;
    bool improved { false };
    int iterations { 0 };
};

// Levenberg-Marquardt on the numeric parameters of `ind`, through the full
// ODE solve, with a geodesic-acceleration correction on each step. The
// parameters are written back only if the total improves.
OptimizeResult optimize_params(Individual const& ind, std::span<Dataset const> datasets, Tolerances const& tol = {},
    LmOptions const& options = {});

}  // namespace phasegp
