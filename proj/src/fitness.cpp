#include "phasegp/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace phasegp {

namespace {

struct Moments {
    double mean;
    double variance;
};

Moments moments(std::span<double const> x)
{
    double sum = 0.0;
    double peak = 0.0;
    for (double v : x) {
        sum += v;
        peak = std::max(peak, std::abs(v));
    }
    double const mean = sum / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    double var = ss / static_cast<double>(x.size());
    // rounding noise of a constant column counts as zero variance
    double const floor = 1e-12 * peak;
    if (var <= floor * floor) {
        var = 0.0;
    }
    return { mean, var };
}

double normalizer(std::span<double const> target)
{
    double const var = moments(target).variance;
    return var > 0.0 ? var : 1.0;
}

FitnessReport penalty(std::size_t datasets, double progress)
{
    FitnessReport report;
    report.penalized = true;
    report.progress = std::clamp(progress, 0.0, 1.0);
    report.total = kPenaltyBase + (1.0 - report.progress);
    report.per_dataset.assign(datasets, std::numeric_limits<double>::quiet_NaN());
    report.per_variable.fill(std::numeric_limits<double>::quiet_NaN());
    return report;
}

// Second-order correction along the Gauss-Newton direction v: the
// directional second derivative of r is taken by finite differences and the
// correction is kept only while it stays small against v.
void add_geodesic_acceleration(ResidualModel const& model, std::span<double const> theta, Eigen::VectorXd const& r,
    Eigen::MatrixXd const& jac, Eigen::LDLT<Eigen::MatrixXd> const& ldlt, Eigen::VectorXd& step,
    std::vector<double>& probe, Eigen::VectorXd& r_probe)
{
    constexpr double kProbe = 0.1;
    constexpr double kMaxRatio = 0.75;
    for (std::size_t j = 0; j < probe.size(); ++j) {
        probe[j] = theta[j] + kProbe * step[static_cast<Eigen::Index>(j)];
    }
    if (!model.residuals(probe, r_probe)) {
        return;
    }
    Eigen::VectorXd const curvature = (2.0 / kProbe) * ((r_probe - r) / kProbe - jac * step);
    Eigen::VectorXd const accel = -0.5 * ldlt.solve(jac.transpose() * curvature);
    if (accel.allFinite() && accel.norm() <= kMaxRatio * step.norm()) {
        step += accel;
    }
}

}  // namespace

double nmse(std::span<double const> pred, std::span<double const> target)
{
    if (pred.size() != target.size() || target.empty()) {
        throw std::invalid_argument("nmse needs two non-empty sequences of equal length");
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double const d = pred[i] - target[i];
        sse += d * d;
    }
    return sse / static_cast<double>(pred.size()) / normalizer(target);
}

FitnessReport evaluate(DESystem const& system, std::span<Dataset const> datasets, Tolerances const& tol)
{
    if (datasets.empty()) {
        throw std::invalid_argument("evaluation needs at least one dataset");
    }
    FitnessReport report;
    report.per_dataset.assign(datasets.size(), 0.0);
    report.per_variable.fill(0.0);
    std::vector<double> column;

    for (std::size_t d = 0; d < datasets.size(); ++d) {
        auto const& data = datasets[d];
        auto const run = integrate_rk45(system, data.initial_state(), data.exogenous(), tol);
        if (!run.ok()) {
            return penalty(datasets.size(), run.failure->progress);
        }
        auto const& samples = run.trajectory.samples;
        for (std::size_t k = 0; k < kNumEquations; ++k) {
            column.resize(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i) {
                column[i] = samples[i][k];
            }
            double const cell = nmse(column, data.target(k));
            report.per_dataset[d] += cell / static_cast<double>(kNumEquations);
            report.per_variable[k] += cell / static_cast<double>(datasets.size());
            report.total += cell;
        }
    }
    report.total /= static_cast<double>(datasets.size() * kNumEquations);
    if (!std::isfinite(report.total)) {
        return penalty(datasets.size(), 1.0);
    }
    return report;
}

FitnessReport evaluate(Individual const& ind, std::span<Dataset const> datasets, Tolerances const& tol)
{
    return evaluate(DESystem { ind.trees }, datasets, tol);
}

ResidualModel::ResidualModel(TreeSet structure, std::span<Dataset const> datasets, Tolerances tol)
    : structure_(std::move(structure))
    , datasets_(datasets)
    , tol_(tol)
    , parameter_count_(phasegp::parameter_count(structure_))
    , residual_count_(0)
{
    if (datasets.empty()) {
        throw std::invalid_argument("residual model needs at least one dataset");
    }
    double const cells = static_cast<double>(datasets.size() * kNumEquations);
    for (auto const& data : datasets) {
        for (std::size_t k = 0; k < kNumEquations; ++k) {
            auto const target = data.target(k);
            scale_.push_back(1.0 / std::sqrt(cells * static_cast<double>(target.size()) * normalizer(target)));
        }
        residual_count_ += data.size() * kNumEquations;
    }
}

double ResidualModel::fd_step(double theta) noexcept { return std::max(1e-6, 1e-6 * std::abs(theta)); }

bool ResidualModel::residuals(std::span<double const> theta, Eigen::VectorXd& r) const
{
    DESystem const system { inject_params(structure_, theta) };
    r.resize(static_cast<Eigen::Index>(residual_count_));
    Eigen::Index row = 0;
    for (std::size_t d = 0; d < datasets_.size(); ++d) {
        auto const& data = datasets_[d];
        auto const run = integrate_rk45(system, data.initial_state(), data.exogenous(), tol_);
        if (!run.ok()) {
            return false;
        }
        auto const& samples = run.trajectory.samples;
        for (std::size_t k = 0; k < kNumEquations; ++k) {
            auto const target = data.target(k);
            double const s = scale_[d * kNumEquations + k];
            for (std::size_t i = 0; i < samples.size(); ++i) {
                r[row++] = (samples[i][k] - target[i]) * s;
            }
        }
    }
    return r.allFinite();
}

double ResidualModel::objective(std::span<double const> theta) const
{
    Eigen::VectorXd r;
    if (!residuals(theta, r)) {
        return std::numeric_limits<double>::infinity();
    }
    return r.squaredNorm();
}

void ResidualModel::jacobian(std::span<double const> theta, Eigen::VectorXd const& r, Eigen::MatrixXd& jac) const
{
    auto const n = static_cast<Eigen::Index>(parameter_count_);
    jac.setZero(static_cast<Eigen::Index>(residual_count_), n);
    std::vector<double> probe(theta.begin(), theta.end());
    Eigen::VectorXd plus, minus;
    for (Eigen::Index j = 0; j < n; ++j) {
        auto const idx = static_cast<std::size_t>(j);
        double const h = fd_step(theta[idx]);
        probe[idx] = theta[idx] + h;
        bool const ok_plus = residuals(probe, plus);
        probe[idx] = theta[idx] - h;
        bool const ok_minus = residuals(probe, minus);
        probe[idx] = theta[idx];
        if (ok_plus && ok_minus) {
            jac.col(j) = (plus - minus) / (2.0 * h);
        } else if (ok_plus) {
            jac.col(j) = (plus - r) / h;
        } else if (ok_minus) {
            jac.col(j) = (r - minus) / h;
        }
    }
}

Eigen::VectorXd ResidualModel::gradient(std::span<double const> theta) const
{
    Eigen::VectorXd r;
    if (!residuals(theta, r)) {
        throw std::runtime_error("integration failed at the gradient point");
    }
    Eigen::MatrixXd jac;
    jacobian(theta, r, jac);
    return 2.0 * jac.transpose() * r;
}

OptimizeResult optimize_params(Individual const& ind, std::span<Dataset const> datasets, Tolerances const& tol,
    LmOptions const& options)
{
    OptimizeResult result { ind, evaluate(ind, datasets, tol), false, 0 };
    result.individual.fitness = result.report.total;
    if (result.report.penalized || parameter_count(ind.trees) == 0) {
        return result;
    }

    ResidualModel const model(ind.trees, datasets, tol);
    auto const n = static_cast<Eigen::Index>(model.parameter_count());
    std::vector<double> theta = extract_params(ind.trees);
    Eigen::VectorXd r;
    if (!model.residuals(theta, r)) {
        return result;
    }
    double f = r.squaredNorm();
    double lambda = options.initial_damping;
    bool moved = false;

    Eigen::MatrixXd jac;
    Eigen::VectorXd r_trial;
    Eigen::VectorXd r_probe;
    std::vector<double> trial(theta.size());
    std::vector<double> probe(theta.size());
    for (int iter = 0; iter < options.max_iters && f > 0.0; ++iter) {
        ++result.iterations;
        model.jacobian(theta, r, jac);
        Eigen::MatrixXd const normal = jac.transpose() * jac;
        Eigen::VectorXd const grad = jac.transpose() * r;
        if (!grad.allFinite() || grad.squaredNorm() == 0.0) {
            break;
        }
        Eigen::VectorXd const diag = normal.diagonal();
        double const diag_floor = std::max(1e-12 * diag.maxCoeff(), std::numeric_limits<double>::min());

        bool accepted = false;
        while (lambda <= options.max_damping) {
            Eigen::MatrixXd damped = normal;
            for (Eigen::Index j = 0; j < n; ++j) {
                damped(j, j) += lambda * std::max(diag[j], diag_floor);
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            Eigen::VectorXd step = ldlt.solve(-grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            add_geodesic_acceleration(model, theta, r, jac, ldlt, step, probe, r_probe);
            bool finite = true;
            for (Eigen::Index j = 0; j < n; ++j) {
                trial[static_cast<std::size_t>(j)] = theta[static_cast<std::size_t>(j)] + step[j];
                finite = finite && std::isfinite(trial[static_cast<std::size_t>(j)]);
            }
            if (finite && model.residuals(trial, r_trial)) {
                double const f_trial = r_trial.squaredNorm();
                if (f_trial < f) {
                    theta = trial;
                    r = r_trial;
                    f = f_trial;
                    lambda = std::max(lambda / 10.0, 1e-12);
                    accepted = true;
                    moved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            break;
        }
    }

    if (!moved) {
        return result;
    }
    Individual candidate = ind;
    candidate.trees = inject_params(ind.trees, theta);
    auto report = evaluate(candidate, datasets, tol);
    if (!report.penalized && report.total < result.report.total) {
        candidate.fitness = report.total;
        result.individual = std::move(candidate);
        result.report = std::move(report);
        result.improved = true;
    }
    return result;
}

}  // namespace phasegp
