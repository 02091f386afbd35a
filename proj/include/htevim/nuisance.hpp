#pragma once

#include "htevim/learners.hpp"
#include "htevim/options.hpp"
#include "htevim/rng.hpp"
#include "htevim/types.hpp"

namespace htevim {

// Fold assignment for cross-fitting, stratified by treatment arm so every
// training split keeps both arms.
std::vector<int> crossfit_folds(const VectorXd& A, int folds, const Rng& rng);

// Outcome regression: one joint fit of Y on (A, W) with A as the first
// feature, then predictions with A forced to 0 and to 1. With folds >= 2 each
// row is predicted by the model trained on the other folds (folds == n gives
// leave-one-out); foldmap receives the assignment.
void fit_outcome(const Dataset& data, const Learner& learner, int folds,
                 const Rng& rng, VectorXd& q0, VectorXd& q1,
                 std::optional<std::vector<int>>& foldmap);

// Propensity: binary-probability fit of A on W, clamped to bounds. Same
// cross-fitting contract as fit_outcome.
VectorXd fit_propensity(const Dataset& data, const Learner& learner, int folds,
                        const PropensityBounds& bounds, const Rng& rng);

// Full nuisance stage driven by options:
//   crossfit.folds   0/1 = none (default 0)
//   propensity.lo / propensity.hi   truncation bounds
//   outcome.learner / propensity.learner   role learner specs
// known_g, when given, bypasses the propensity fit (randomized designs with
// known assignment probabilities); it is still truncated.
NuisanceFits fit_nuisance(const Dataset& data, const Options& opt,
                          const Rng& rng, const VectorXd* known_g = nullptr);

}  // namespace htevim
