#include "htevim/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace htevim {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Centred, sqrt-weight-scaled working copies shared by path and grid code.
struct Standardised {
  MatrixXd X;        // sw .* (X - colmean)
  VectorXd y;        // sw .* (y - ybar)
  VectorXd colmean;
  VectorXd colnorm2; // squared column norms / n
  double ybar = 0.0;
  double yvar = 0.0; // weighted variance of y, convergence scale
  Eigen::Index n = 0;
};

Standardised standardise(const MatrixXd& X, const VectorXd& y,
                         const VectorXd* weights) {
  if (X.rows() != y.size())
    throw std::invalid_argument("lasso: X/y row mismatch");
  if (X.rows() == 0) throw std::invalid_argument("lasso: empty data");

  Standardised s;
  s.n = X.rows();
  VectorXd w = weights ? *weights : VectorXd::Ones(s.n);
  if (w.size() != s.n) throw std::invalid_argument("lasso: weight length mismatch");
  const double wsum = w.sum();
  if (wsum <= 0.0) throw std::invalid_argument("lasso: weights sum to zero");
  w *= static_cast<double>(s.n) / wsum;

  const VectorXd sw = w.array().sqrt();
  s.ybar = (w.array() * y.array()).sum() / s.n;
  s.colmean = (X.array().colwise() * w.array()).colwise().sum() / s.n;
  s.X = (X.rowwise() - s.colmean.transpose()).array().colwise() * sw.array();
  s.y = sw.array() * (y.array() - s.ybar);
  s.colnorm2 = s.X.colwise().squaredNorm() / static_cast<double>(s.n);
  s.yvar = s.y.squaredNorm() / static_cast<double>(s.n);
  return s;
}

int solve_at_lambda(const Standardised& s, double lambda, VectorXd& beta,
                    VectorXd& resid, const LassoConfig& cfg) {
  const Eigen::Index p = s.X.cols();
  const double n = static_cast<double>(s.n);
  // Stop once the largest single-coordinate objective decrease drops below
  // tol times the variance of y, i.e. further sweeps cannot move the fit.
  const double thresh = cfg.tol * std::max(s.yvar, 1e-300);
  std::vector<int> active;
  active.reserve(p);

  auto sweep = [&](const std::vector<int>& cols) {
    double max_drop = 0.0;
    for (int j : cols) {
      if (s.colnorm2[j] <= 0.0) continue;
      const double old = beta[j];
      const double rho = s.X.col(j).dot(resid) / n + s.colnorm2[j] * old;
      const double next = soft_threshold(rho, lambda) / s.colnorm2[j];
      if (next != old) {
        resid -= (next - old) * s.X.col(j);
        beta[j] = next;
        max_drop = std::max(max_drop,
                            s.colnorm2[j] * (next - old) * (next - old));
      }
    }
    return max_drop;
  };

  std::vector<int> all(p);
  std::iota(all.begin(), all.end(), 0);

  int iterations = 0;
  for (;;) {
    // One full sweep to refresh the active set.
    ++iterations;
    if (sweep(all) <= thresh) break;
    active.clear();
    for (Eigen::Index j = 0; j < p; ++j)
      if (beta[j] != 0.0) active.push_back(static_cast<int>(j));
    // Inner loop on the active set until stable.
    while (iterations < cfg.max_iter) {
      ++iterations;
      if (sweep(active) <= thresh) break;
    }
    if (iterations >= cfg.max_iter) break;
  }
  return iterations;
}

}  // namespace

std::vector<double> make_lambda_grid(const MatrixXd& X, const VectorXd& y,
                                     const VectorXd* weights,
                                     const LassoConfig& cfg) {
  if (cfg.lambda_count < 1)
    throw std::invalid_argument("lasso: lambda_count must be >= 1");
  const Standardised s = standardise(X, y, weights);
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < s.X.cols(); ++j)
    lambda_max = std::max(lambda_max,
                          std::abs(s.X.col(j).dot(s.y)) / static_cast<double>(s.n));
  if (lambda_max <= 0.0) lambda_max = 1.0;  // constant y or empty design

  std::vector<double> grid(cfg.lambda_count);
  if (cfg.lambda_count == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  const double lmin = std::log(lambda_max * cfg.lambda_min_ratio);
  const double lmax = std::log(lambda_max);
  for (int k = 0; k < cfg.lambda_count; ++k)
    grid[k] = std::exp(lmax + (lmin - lmax) * k / (cfg.lambda_count - 1));
  return grid;
}

std::vector<LassoFit> lasso_path(const MatrixXd& X, const VectorXd& y,
                                 const VectorXd* weights,
                                 const std::vector<double>& lambdas,
                                 const LassoConfig& cfg) {
  const Standardised s = standardise(X, y, weights);
  const Eigen::Index p = s.X.cols();

  std::vector<LassoFit> path;
  path.reserve(lambdas.size());
  VectorXd beta = VectorXd::Zero(p);
  VectorXd resid = s.y;
  for (double lambda : lambdas) {
    LassoFit fit;
    fit.lambda = lambda;
    fit.iterations = solve_at_lambda(s, lambda, beta, resid, cfg);
    fit.beta = beta;
    fit.intercept = s.ybar - s.colmean.dot(beta);
    path.push_back(std::move(fit));
  }
  return path;
}

LassoCvResult lasso_cv(const MatrixXd& X, const VectorXd& y,
                       const VectorXd* weights, int folds,
                       const LassoConfig& cfg, const Rng& rng) {
  const Eigen::Index n = X.rows();
  if (folds < 2) throw std::invalid_argument("lasso_cv: folds must be >= 2");
  if (n < folds) folds = static_cast<int>(n);
  if (folds < 2) {
    // Degenerate data: fall back to the largest-lambda fit.
    LassoCvResult r;
    r.lambdas = make_lambda_grid(X, y, weights, cfg);
    r.cv_mse.assign(r.lambdas.size(), std::numeric_limits<double>::quiet_NaN());
    r.fit = lasso_path(X, y, weights, {r.lambdas.front()}, cfg).front();
    return r;
  }

  LassoCvResult r;
  r.lambdas = make_lambda_grid(X, y, weights, cfg);
  const size_t L = r.lambdas.size();
  std::vector<double> sse(L, 0.0), count(L, 0.0);

  Rng fold_rng = rng.derive(0x4356u);
  const std::vector<int> perm = fold_rng.permutation(static_cast<int>(n));
  std::vector<int> fold_of(n);
  for (Eigen::Index i = 0; i < n; ++i)
    fold_of[perm[i]] = static_cast<int>(i % folds);

  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold_of[i] == f ? test : train).push_back(static_cast<int>(i));
    MatrixXd Xtr(train.size(), X.cols());
    VectorXd ytr(train.size());
    VectorXd wtr(train.size());
    for (size_t k = 0; k < train.size(); ++k) {
      Xtr.row(k) = X.row(train[k]);
      ytr[k] = y[train[k]];
      wtr[k] = weights ? (*weights)[train[k]] : 1.0;
    }
    const auto path = lasso_path(Xtr, ytr, &wtr, r.lambdas, cfg);
    for (size_t l = 0; l < L; ++l) {
      for (int i : test) {
        const double pred = path[l].intercept + X.row(i).dot(path[l].beta);
        const double wt = weights ? (*weights)[i] : 1.0;
        sse[l] += wt * (y[i] - pred) * (y[i] - pred);
        count[l] += wt;
      }
    }
  }

  r.cv_mse.resize(L);
  int best = 0;
  for (size_t l = 0; l < L; ++l) {
    r.cv_mse[l] = sse[l] / std::max(count[l], 1e-300);
    if (r.cv_mse[l] < r.cv_mse[best]) best = static_cast<int>(l);
  }
  r.chosen_index = best;

  const std::vector<double> head(r.lambdas.begin(),
                                 r.lambdas.begin() + best + 1);
  r.fit = lasso_path(X, y, weights, head, cfg).back();
  return r;
}

}  // namespace htevim
