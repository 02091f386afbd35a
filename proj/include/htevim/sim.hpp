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

// Benchmark data-generating distribution:
//   W1, W2 ~ iid Unif(-1, 1)
//   A | W  ~ Bernoulli(expit(0.1 W1 W2 - 0.4 W1))
//   tau(W) = W1^2 (W1 + 7/5) + (5 W2 / 3)^2
//   Y | A,W ~ Normal(A tau + W1 W2 + 2 W2^2 - W1, 1)
// The "null" variant keeps W and A but drops the treatment term (tau == 0).
double true_tau(double w1, double w2);
double true_propensity(double w1, double w2);

// Draw order per row is fixed (w1, w2, treatment uniform, outcome normal) so
// streams are reproducible across platforms and worker counts.
Dataset generate(const std::string& dgp, int n, const Rng& rng);

struct TruthValues {
  double psi1 = 0.0;
  double psi2 = 0.0;
  double psi3 = 0.0;  // NaN when psi1 = 0
};

// Closed-form uniform-moment values. Supported subsets of the two
// covariates: {1}, {2}, {1,2} (0-based {0}, {1}, {0,1}).
TruthValues truths(const std::string& dgp, const SubsetSpec& subset);

extern const std::vector<int> kDeskNGrid;   // {200, 1000, 5000}
extern const std::vector<int> kPaperNGrid;  // {200, ..., 20000}

struct SimConfig {
  std::vector<int> n_grid = kDeskNGrid;
  int reps = 200;
  std::vector<Estimand> estimands = {Estimand::kVte, Estimand::kVima,
                                     Estimand::kVimb};
  std::vector<Family> families = {Family::kSs, Family::kEe, Family::kTmle};
  Metalearner metalearner = Metalearner::kS;
  SubsetSpec subset{{0}};
  std::string dgp = "benchmark";
  uint64_t seed = 1;
  int workers = 1;
  double level = 0.95;
  Options learner_opt;  // learner/crossfit/tmle knobs for the sessions
};

struct SimOutput {
  Table metrics;     // n, estimand, family, metalearner, mse, abs_bias,
                     // coverage, oracle_coverage, ci_width, n_failed
  Table replicates;  // per-replicate audit rows
  std::string metadata;
  int total_failed = 0;
};

// Runs reps x n_grid replicates (parallel up to cfg.workers), aggregates the
// four paper metrics plus mean CI width per (n, estimand, family). Replicate
// seeds depend only on (seed, n, rep); aggregation order is fixed, so output
// is byte-identical for any worker count.
SimOutput run_replicates(const SimConfig& cfg);

// metrics.csv, replicates.csv, metadata.txt under out_dir.
void write_sim_output(const SimOutput& out, const std::string& out_dir);

}  // namespace htevim
