#pragma once

#include "htevim/learners.hpp"
#include "htevim/options.hpp"
#include "htevim/rng.hpp"
#include "htevim/types.hpp"

namespace htevim {

// AIPW pseudo-outcome, whose conditional mean given W is the CATE:
//   phi_i = (2A_i - 1)/g(A_i|W_i) * (Y_i - Qbar(A_i, W_i)) + q1_i - q0_i.
VectorXd pseudo_outcome(const Dataset& data, const NuisanceFits& nuisance);

// S-learner CATE: difference of the two outcome-regression arms.
VectorXd cate_s_learner(const NuisanceFits& nuisance);

// DR-learner CATE: regress the pseudo-outcome on the full covariate set.
VectorXd cate_dr_learner(const Dataset& data, const VectorXd& phi,
                         const Learner& learner);

// Projections onto the complement of the subset. With -s empty (s = all
// covariates) they degenerate to empirical means.
VectorXd project_tau_s(const Dataset& data, const VectorXd& tau,
                       const SubsetSpec& subset, const Learner& learner);
VectorXd project_gamma_s(const Dataset& data, const VectorXd& tau,
                         const SubsetSpec& subset, const Learner& learner);

// τ via the requested metalearner plus both projections for one subset.
// Learner roles: "cate" for the DR regression, "projection" for tau_s and
// gamma_s (same spec reused for both).
CateFits fit_cate(const Dataset& data, const NuisanceFits& nuisance,
                  const SubsetSpec& subset, Metalearner metalearner,
                  const Options& opt, const Rng& rng);

}  // namespace htevim
