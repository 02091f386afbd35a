#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "htevim/hal.hpp"
#include "htevim/rng.hpp"

using namespace htevim;

TEST_SUITE("hal") {

TEST_CASE("raw column count enumerates subsets x knots") {
  // p = 2, n = 3, degree 2, no thinning: subsets {0}, {1}, {0,1} each with
  // 3 knot rows -> 9 raw columns.
  MatrixXd X(3, 2);
  X << 0.1, 1.0,
       0.5, 0.2,
       0.9, 0.7;
  HalConfig cfg;
  const HalBasis basis = hal_basis(X, cfg);
  CHECK(basis.raw_column_count == 9);
  // The all-ones column (knot at the componentwise minimum of each subset)
  // deduplicates across subsets.
  CHECK(basis.columns.size() < 9);
  CHECK(basis.design.rows() == 3);
  CHECK(basis.design.cols() == static_cast<Eigen::Index>(basis.columns.size()));
}

TEST_CASE("design entries are indicators evaluated at knots") {
  MatrixXd X(4, 1);
  X << 1.0, 2.0, 3.0, 4.0;
  HalConfig cfg;
  const HalBasis basis = hal_basis(X, cfg);
  for (Eigen::Index c = 0; c < basis.design.cols(); ++c)
    for (Eigen::Index i = 0; i < 4; ++i) {
      const double expect =
          X(i, 0) >= basis.columns[c].knot[0] ? 1.0 : 0.0;
      CHECK(basis.design(i, c) == expect);
    }
}

TEST_CASE("stored design matches re-evaluated design") {
  Rng rng(301);
  MatrixXd X(40, 3);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform(-1, 1);
  HalConfig cfg;
  cfg.max_knots = 15;
  const HalBasis basis = hal_basis(X, cfg);
  const MatrixXd D = hal_design(basis.columns, X);
  CHECK((D - basis.design).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("columns are monotone in each coordinate") {
  Rng rng(302);
  MatrixXd X(30, 2);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 2; ++j) X(i, j) = rng.uniform(0, 1);
  const HalBasis basis = hal_basis(X, {});
  // Componentwise-larger points can only turn indicators on, never off.
  MatrixXd lo(1, 2), hi(1, 2);
  for (int t = 0; t < 20; ++t) {
    lo(0, 0) = rng.uniform(0, 1);
    lo(0, 1) = rng.uniform(0, 1);
    hi(0, 0) = lo(0, 0) + rng.uniform(0, 0.5);
    hi(0, 1) = lo(0, 1) + rng.uniform(0, 0.5);
    const MatrixXd dlo = hal_design(basis.columns, lo);
    const MatrixXd dhi = hal_design(basis.columns, hi);
    for (Eigen::Index c = 0; c < dlo.cols(); ++c)
      CHECK(dhi(0, c) >= dlo(0, c));
  }
}

TEST_CASE("knot thinning caps column counts and keeps extremes") {
  Rng rng(303);
  const int n = 500;
  MatrixXd X(n, 1);
  for (int i = 0; i < n; ++i) X(i, 0) = rng.normal(0, 1);
  HalConfig cfg;
  cfg.max_knots = 20;
  const HalBasis basis = hal_basis(X, cfg);
  CHECK(basis.raw_column_count == 20);
  std::set<double> knots;
  for (const auto& col : basis.columns) knots.insert(col.knot[0]);
  CHECK(knots.count(X.col(0).minCoeff()) == 1);
  CHECK(knots.count(X.col(0).maxCoeff()) == 1);
  // Thinned knots are close to evenly spaced marginal quantiles.
  std::vector<double> sorted(X.data(), X.data() + n);
  std::sort(sorted.begin(), sorted.end());
  for (const auto& col : basis.columns) {
    const auto pos = std::lower_bound(sorted.begin(), sorted.end(),
                                      col.knot[0]) - sorted.begin();
    bool near_grid = false;
    for (int k = 0; k < 20; ++k) {
      const double target = static_cast<double>(k) * (n - 1) / 19.0;
      if (std::abs(target - static_cast<double>(pos)) < 1.0) near_grid = true;
    }
    CHECK(near_grid);
  }
}

TEST_CASE("interaction degree is capped by dimension") {
  MatrixXd X(5, 2);
  Rng rng(304);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = rng.uniform(0, 1);
    X(i, 1) = rng.uniform(0, 1);
  }
  HalConfig cfg;
  cfg.max_interaction_degree = 7;  // > p, silently capped
  const HalBasis b = hal_basis(X, cfg);
  for (const auto& col : b.columns) CHECK(col.subset.size() <= 2);
}

TEST_CASE("constant response gives an intercept-only model") {
  MatrixXd X(10, 2);
  Rng rng(305);
  for (int i = 0; i < 10; ++i) {
    X(i, 0) = rng.uniform(0, 1);
    X(i, 1) = rng.uniform(0, 1);
  }
  const VectorXd y = VectorXd::Constant(10, 1.25);
  const HalFitResult r = hal_fit(X, y, nullptr, Task::kRegression, {}, Rng(1));
  CHECK(r.model->nonzero_count() == 0);
  CHECK(r.model->predict(X)[3] == doctest::Approx(1.25));
}

TEST_CASE("fit recovers a monotone step function") {
  Rng rng(306);
  const int n = 300;
  MatrixXd X(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.uniform(0, 1);
    y[i] = (X(i, 0) >= 0.5 ? 2.0 : 0.0) + rng.normal(0, 0.05);
  }
  HalConfig cfg;
  cfg.cv_folds = 4;
  const HalFitResult r = hal_fit(X, y, nullptr, Task::kRegression, cfg, Rng(9));
  MatrixXd probe(2, 1);
  probe << 0.25, 0.75;
  const VectorXd p = r.model->predict(probe);
  CHECK(p[0] == doctest::Approx(0.0).epsilon(0.1));
  CHECK(p[1] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("predictions are piecewise constant between knots") {
  Rng rng(307);
  const int n = 50;
  MatrixXd X(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.uniform(0, 1);
    y[i] = std::sin(6.0 * X(i, 0));
  }
  const HalFitResult r = hal_fit(X, y, nullptr, Task::kRegression, {}, Rng(2));
  // Between two adjacent sample points there is no knot, so the prediction
  // cannot change there.
  std::vector<double> xs(X.data(), X.data() + n);
  std::sort(xs.begin(), xs.end());
  MatrixXd probe(2, 1);
  probe << xs[10] + 1e-9, xs[11] - 1e-9;
  const VectorXd p = r.model->predict(probe);
  CHECK(p[0] == p[1]);
}

TEST_CASE("lambda_scale below one fits at least as aggressively") {
  Rng rng(308);
  const int n = 150;
  MatrixXd X(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.uniform(-1, 1);
    y[i] = X(i, 0) * X(i, 0) + rng.normal(0, 0.1);
  }
  HalConfig cv_cfg;
  const HalFitResult a = hal_fit(X, y, nullptr, Task::kRegression, cv_cfg, Rng(4));
  HalConfig us_cfg;
  us_cfg.lambda_scale = 0.2;
  const HalFitResult b = hal_fit(X, y, nullptr, Task::kRegression, us_cfg, Rng(4));
  CHECK(a.chosen_index == b.chosen_index);  // same CV choice underneath
  const VectorXd ra = y - a.model->predict(X);
  const VectorXd rb = y - b.model->predict(X);
  CHECK(rb.squaredNorm() <= ra.squaredNorm() + 1e-12);
  CHECK(b.model->nonzero_count() >= a.model->nonzero_count());
}

TEST_CASE("binary task clips probabilities") {
  MatrixXd X(20, 1);
  VectorXd y(20);
  Rng rng(309);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = i;
    y[i] = i < 10 ? 0.0 : 1.0;
  }
  const HalFitResult r = hal_fit(X, y, nullptr, Task::kBinaryProb, {}, Rng(3));
  const VectorXd p = r.model->predict(X);
  CHECK(p.minCoeff() >= kProbClip);
  CHECK(p.maxCoeff() <= 1.0 - kProbClip);
}

}  // TEST_SUITE
