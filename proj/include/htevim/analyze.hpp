#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htevim/csv.hpp"
#include "htevim/estimate.hpp"
#include "htevim/options.hpp"
#include "htevim/rng.hpp"
#include "htevim/types.hpp"

namespace htevim {

struct AnalyzeConfig {
  std::vector<Family> families = {Family::kEe, Family::kTmle};
  std::vector<Estimand> estimands = {Estimand::kVima};  // analyze_subset only
  Metalearner metalearner = Metalearner::kS;
  int folds = 10;  // nuisance cross-fitting (0 = off)
  std::uint64_t seed = 1;
  double level = 0.95;
  Options learner_opt;
};

// One VIMa row per (covariate, family), nuisances shared across covariates.
// Rows are sorted by the TMLE point estimate, descending (first requested
// family when TMLE is absent); covariate order breaks ties. A failed fit
// leaves the numeric cells empty and marks converged as "failed".
// Columns: covariate, family, psi, se, ci_lo, ci_hi, iterations, converged.
Table rank_vims(const Dataset& data, const AnalyzeConfig& cfg);

// Estimates for one declared subset; same columns plus a leading estimand
// column since several estimands may be requested.
Table analyze_subset(const Dataset& data, const SubsetSpec& subset,
                     const AnalyzeConfig& cfg);

// Synthetic stand-in for the ACTG175 trial shape documented in
// docs/actg175_schema.md: 12 baseline covariates (5 continuous, 7 binary),
// randomized treatment, CD4-like continuous outcome whose treatment effect
// varies mainly with baseline CD4.
Dataset actg_lookalike(int n, const Rng& rng);

}  // namespace htevim
