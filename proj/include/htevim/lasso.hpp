#pragma once

#include <Eigen/Core>

#include <vector>

#include "htevim/rng.hpp"

namespace htevim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// L1-penalised weighted least squares, solved by cyclic coordinate descent on
// the centred, sqrt-weight-scaled problem. The intercept is unpenalised and
// recovered from the centring identities.
//
//   minimise (1/2n) sum_i w_i (y_i - b0 - x_i'b)^2 + lambda * |b|_1

struct LassoConfig {
  int lambda_count = 50;
  double lambda_min_ratio = 1e-3;
  double tol = 1e-7;
  int max_iter = 100000;
};

struct LassoFit {
  double intercept = 0.0;
  VectorXd beta;
  double lambda = 0.0;
  int iterations = 0;
};

// Smallest lambda that zeroes every coefficient, then a log-spaced grid down
// to lambda_max * min_ratio. Weights are normalised to mean one internally.
std::vector<double> make_lambda_grid(const MatrixXd& X, const VectorXd& y,
                                     const VectorXd* weights,
                                     const LassoConfig& cfg);

// Full path at the given grid (descending order expected); warm starts between
// consecutive lambdas, active-set sweeps inside each solve.
std::vector<LassoFit> lasso_path(const MatrixXd& X, const VectorXd& y,
                                 const VectorXd* weights,
                                 const std::vector<double>& lambdas,
                                 const LassoConfig& cfg);

struct LassoCvResult {
  LassoFit fit;                    // refit on all data at the chosen lambda
  std::vector<double> lambdas;     // grid used
  std::vector<double> cv_mse;      // mean held-out MSE per lambda
  int chosen_index = 0;
};

// K-fold cross-validation over a shared grid computed from the full data;
// picks the lambda with minimal held-out MSE (ties -> largest lambda, i.e.
// first index), then refits on everything.
LassoCvResult lasso_cv(const MatrixXd& X, const VectorXd& y,
                       const VectorXd* weights, int folds,
                       const LassoConfig& cfg, const Rng& rng);

}  // namespace htevim
