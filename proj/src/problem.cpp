#include "phasegp/problem.hpp"

#include <stdexcept>

namespace phasegp {

KineticsProblem::KineticsProblem(std::vector<Dataset> datasets, Grammar grammar, TreeLimits limits, Tolerances tol,
    LmOptions lm, bool memetic)
    : datasets_(std::move(datasets))
    , grammar_(std::move(grammar))
    , limits_(limits)
    , tol_(tol)
    , lm_(lm)
    , memetic_(memetic)
{
    if (datasets_.empty()) {
        throw std::invalid_argument("the problem needs at least one dataset");
    }
}

double KineticsProblem::evaluate(Individual& ind) const
{
    if (!memetic_ || lm_.max_iters <= 0) {
        return phasegp::evaluate(ind, datasets_, tol_).total;
    }
    auto result = optimize_params(ind, datasets_, tol_, lm_);
    ind.trees = std::move(result.individual.trees);
    return result.report.total;
}

}  // namespace phasegp
