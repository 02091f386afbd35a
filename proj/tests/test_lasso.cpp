#include <cmath>

#include "doctest.h"
#include "htevim/lasso.hpp"
#include "htevim/rng.hpp"

using namespace htevim;

namespace {

MatrixXd random_design(Rng& rng, int n, int p) {
  MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal(0, 1);
  return X;
}

}  // namespace

TEST_SUITE("lasso") {

TEST_CASE("grid starts at the smallest lambda that zeroes everything") {
  Rng rng(201);
  MatrixXd X = random_design(rng, 100, 5);
  VectorXd y = X.col(0) * 2.0 + X.col(2);
  LassoConfig cfg;
  const auto grid = make_lambda_grid(X, y, nullptr, cfg);
  REQUIRE(grid.size() == 50);
  CHECK(grid.front() > grid.back());
  CHECK(grid.back() == doctest::Approx(grid.front() * 1e-3).epsilon(1e-10));
  const auto path = lasso_path(X, y, nullptr, {grid.front()}, cfg);
  CHECK(path.front().beta.cwiseAbs().maxCoeff() == 0.0);
  // Just below lambda_max something must activate.
  const auto path2 = lasso_path(X, y, nullptr, {grid.front() * 0.99}, cfg);
  CHECK(path2.front().beta.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("single-covariate solution matches the soft threshold formula") {
  // With one standardized column, beta = S(x'y/n, lambda) / (x'x/n).
  Rng rng(202);
  const int n = 400;
  MatrixXd X(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal(0, 1);
    y[i] = 0.8 * X(i, 0) + rng.normal(0, 0.3);
  }
  const double xc = X.col(0).mean();
  const double yc = y.mean();
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (X(i, 0) - xc) * (y[i] - yc);
    sxx += (X(i, 0) - xc) * (X(i, 0) - xc);
  }
  const double lambda = 0.1;
  const double rho = sxy / n;
  const double expect =
      (rho > lambda ? rho - lambda : (rho < -lambda ? rho + lambda : 0.0)) /
      (sxx / n);
  const auto path = lasso_path(X, y, nullptr, {lambda}, {});
  CHECK(path.front().beta[0] == doctest::Approx(expect).epsilon(1e-6));
  CHECK(path.front().intercept ==
        doctest::Approx(yc - xc * path.front().beta[0]).epsilon(1e-6));
}

TEST_CASE("tiny lambda approaches the least squares fit") {
  Rng rng(203);
  const int n = 300;
  MatrixXd X = random_design(rng, n, 3);
  VectorXd beta_true(3);
  beta_true << 1.0, -2.0, 0.5;
  VectorXd y = X * beta_true;
  for (int i = 0; i < n; ++i) y[i] += 4.0 + rng.normal(0, 0.05);
  const auto path = lasso_path(X, y, nullptr, {1e-8}, {});
  const VectorXd resid =
      y - (X * path.front().beta).array().matrix() -
      VectorXd::Constant(n, path.front().intercept);
  // Normal equations hold at the optimum when the penalty is negligible.
  CHECK((X.transpose() * resid).cwiseAbs().maxCoeff() / n < 1e-4);
  CHECK(std::abs(resid.mean()) < 1e-6);
}

TEST_CASE("intercept is never penalized") {
  // Pure-intercept data: huge lambda, intercept still fits the mean.
  MatrixXd X(5, 1);
  X << 1, 2, 3, 4, 5;
  VectorXd y = VectorXd::Constant(5, 42.0);
  const auto path = lasso_path(X, y, nullptr, {1e6}, {});
  CHECK(path.front().beta[0] == 0.0);
  CHECK(path.front().intercept == doctest::Approx(42.0));
}

TEST_CASE("warm started path is decreasing in penalty") {
  Rng rng(204);
  MatrixXd X = random_design(rng, 150, 8);
  VectorXd y = X.col(1) - 0.5 * X.col(4);
  for (int i = 0; i < 150; ++i) y[i] += rng.normal(0, 0.2);
  LassoConfig cfg;
  const auto grid = make_lambda_grid(X, y, nullptr, cfg);
  const auto path = lasso_path(X, y, nullptr, grid, cfg);
  REQUIRE(path.size() == grid.size());
  double prev_l1 = 0.0;
  int drops = 0;
  for (const auto& fit : path) {
    const double l1 = fit.beta.cwiseAbs().sum();
    if (l1 < prev_l1 - 1e-9) ++drops;
    prev_l1 = l1;
  }
  CHECK(drops == 0);  // L1 norm grows monotonically as lambda shrinks
}

TEST_CASE("constant-weight fit equals unweighted fit") {
  Rng rng(205);
  MatrixXd X = random_design(rng, 120, 4);
  VectorXd y = X.col(0) + X.col(3);
  for (int i = 0; i < 120; ++i) y[i] += rng.normal(0, 0.3);
  const VectorXd w = VectorXd::Constant(120, 2.5);
  const auto a = lasso_path(X, y, nullptr, {0.05}, {});
  const auto b = lasso_path(X, y, &w, {0.05}, {});
  CHECK((a.front().beta - b.front().beta).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(a.front().intercept == doctest::Approx(b.front().intercept).epsilon(1e-8));
}

TEST_CASE("cv selects a sensible lambda deterministically") {
  Rng rng(206);
  const int n = 200;
  MatrixXd X = random_design(rng, n, 10);
  VectorXd y = 2.0 * X.col(0) - 1.5 * X.col(5);
  for (int i = 0; i < n; ++i) y[i] += rng.normal(0, 0.5);
  LassoConfig cfg;
  Rng cv_rng(77);
  const auto r1 = lasso_cv(X, y, nullptr, 5, cfg, cv_rng);
  const auto r2 = lasso_cv(X, y, nullptr, 5, cfg, cv_rng);
  CHECK(r1.chosen_index == r2.chosen_index);
  CHECK((r1.fit.beta - r2.fit.beta).cwiseAbs().maxCoeff() == 0.0);
  // The chosen model keeps the true signals and predicts well.
  CHECK(std::abs(r1.fit.beta[0]) > 1.0);
  CHECK(std::abs(r1.fit.beta[5]) > 0.8);
  REQUIRE(r1.cv_mse.size() == r1.lambdas.size());
  CHECK(r1.cv_mse[r1.chosen_index] <= r1.cv_mse.front());
  CHECK(r1.fit.lambda == r1.lambdas[r1.chosen_index]);
}

TEST_CASE("cv tie-break prefers the largest lambda") {
  // Constant response: every lambda has identical CV risk, so index 0 wins.
  MatrixXd X(20, 2);
  Rng rng(207);
  X = random_design(rng, 20, 2);
  VectorXd y = VectorXd::Constant(20, 3.0);
  const auto r = lasso_cv(X, y, nullptr, 4, {}, rng);
  CHECK(r.chosen_index == 0);
  CHECK(r.fit.intercept == doctest::Approx(3.0));
}

TEST_CASE("degenerate inputs throw") {
  MatrixXd X(3, 1);
  X << 1, 2, 3;
  VectorXd y(2);
  y << 1, 2;
  CHECK_THROWS(lasso_path(X, y, nullptr, {0.1}, {}));
  VectorXd y3(3);
  y3 << 1, 2, 3;
  VectorXd wbad = VectorXd::Zero(3);
  CHECK_THROWS(lasso_path(X, y3, &wbad, {0.1}, {}));
  CHECK_THROWS(lasso_cv(X, y3, nullptr, 1, {}, Rng(1)));
}

}  // TEST_SUITE
