#pragma once

#include <vector>

#include "phasegp/alps.hpp"
#include "phasegp/dataset.hpp"
#include "phasegp/fitness.hpp"

namespace phasegp {

// Evolves a four-equation ODE system against trajectory data. Every freshly
// evaluated candidate first has its numeric parameters refined by
// Levenberg-Marquardt; the refined values replace the originals.
class KineticsProblem final : public Problem {
public:
    KineticsProblem(std::vector<Dataset> datasets, Grammar grammar, TreeLimits limits, Tolerances tol = {},
        LmOptions lm = {}, bool memetic = true);

    Grammar const& grammar() const override { return grammar_; }
    TreeLimits const& limits() const override { return limits_; }
    double evaluate(Individual& ind) const override;

    std::vector<Dataset> const& datasets() const noexcept { return datasets_; }
    Tolerances const& tolerances() const noexcept { return tol_; }

private:
    std::vector<Dataset> datasets_;
    Grammar grammar_;
    TreeLimits limits_;
    Tolerances tol_;
    LmOptions lm_;
    bool memetic_;
};

}  // namespace phasegp
