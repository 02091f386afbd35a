#pragma once

#include <memory>
#include <string>
#include <vector>

#include "htevim/lasso.hpp"
#include "htevim/learners.hpp"
#include "htevim/options.hpp"
#include "htevim/rng.hpp"

namespace htevim {

// Highly adaptive lasso, zeroth order: indicator basis functions
//   phi_{s,r}(x) = prod_{j in s} 1{ knot_r[j] <= x[j] }
// over covariate subsets s with 1 <= |s| <= max_interaction_degree, knots taken
// from observed rows. L1-penalised least squares on that basis, lambda chosen
// by cross-validated MSE.

struct HalConfig {
  int max_interaction_degree = 2;
  int max_knots = 200;          // rows kept as knots after thinning
  int lambda_count = 50;
  double lambda_min_ratio = 1e-3;
  int cv_folds = 5;
  double tol = 1e-7;
  // Final lambda = lambda_scale * CV choice. Values below 1 undersmooth,
  // which reduces the plug-in bias of substitution estimators built on the
  // fit; 1 keeps the pure CV selection.
  double lambda_scale = 1.0;
};

HalConfig hal_config_from_options(const Options& opt);

struct HalBasisColumn {
  std::vector<int> subset;   // covariate indices, ascending
  std::vector<double> knot;  // thresholds, one per subset entry
};

struct HalBasis {
  std::vector<HalBasisColumn> columns;  // after dedup
  MatrixXd design;                      // training design, n x columns.size()
  int raw_column_count = 0;             // before dedup
};

// Thin rows to at most max_knots knots (sort rows lexicographically, take
// evenly spaced picks; with one covariate this reduces to marginal
// quantiles), expand to indicator columns, drop duplicate columns.
HalBasis hal_basis(const MatrixXd& X, const HalConfig& cfg);

// Evaluate the basis columns at new points.
MatrixXd hal_design(const std::vector<HalBasisColumn>& columns,
                    const MatrixXd& X);

class HalModel : public FittedModel {
 public:
  HalModel(std::vector<HalBasisColumn> columns, LassoFit fit, Task task);
  VectorXd predict(const MatrixXd& X) const override;

  const LassoFit& fit() const { return fit_; }
  const std::vector<HalBasisColumn>& columns() const { return columns_; }
  int nonzero_count() const;

 private:
  std::vector<HalBasisColumn> columns_;
  LassoFit fit_;
  Task task_;
};

struct HalFitResult {
  std::unique_ptr<HalModel> model;
  std::vector<double> lambdas;
  std::vector<double> cv_mse;
  int chosen_index = 0;
  int raw_column_count = 0;
  int basis_column_count = 0;
};

HalFitResult hal_fit(const MatrixXd& X, const VectorXd& y,
                     const VectorXd* weights, Task task, const HalConfig& cfg,
                     const Rng& rng);

std::shared_ptr<Learner> make_hal_learner(const HalConfig& cfg, const Rng& rng);

}  // namespace htevim
