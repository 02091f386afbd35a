#include "htevim/nuisance.hpp"

#include <algorithm>
#include <stdexcept>

namespace htevim {

std::vector<int> crossfit_folds(const VectorXd& A, int folds, const Rng& rng) {
  const Eigen::Index n = A.size();
  if (folds < 2 || folds > n)
    throw std::invalid_argument("crossfit_folds: folds must be in [2, n]");

  std::vector<int> fold_of(n);
  if (folds == n) {  // leave-one-out
    for (Eigen::Index i = 0; i < n; ++i) fold_of[i] = static_cast<int>(i);
    return fold_of;
  }

  // Deal fold labels cyclically within each arm, in permuted order.
  Rng fold_rng = rng.derive(0x4346u);
  const std::vector<int> perm = fold_rng.permutation(static_cast<int>(n));
  int next[2] = {0, 0};
  for (int i : perm) {
    const int arm = A[i] != 0.0 ? 1 : 0;
    fold_of[i] = next[arm] % folds;
    ++next[arm];
  }
  return fold_of;
}

namespace {

MatrixXd outcome_design(const Dataset& data) {
  MatrixXd X(data.n(), data.p() + 1);
  X.col(0) = data.A;
  X.rightCols(data.p()) = data.W;
  return X;
}

// Fit on train rows, predict the given design on test rows.
void crossfit_predict(const MatrixXd& X, const VectorXd& y,
                      const std::vector<int>& fold_of, int folds,
                      const Learner& learner, Task task,
                      const std::vector<const MatrixXd*>& targets,
                      std::vector<VectorXd*>& outputs) {
  const Eigen::Index n = X.rows();
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold_of[i] == f ? test : train).push_back(static_cast<int>(i));
    if (test.empty()) continue;
    if (train.empty())
      throw std::runtime_error("cross-fitting left an empty training fold");
    MatrixXd Xtr(train.size(), X.cols());
    VectorXd ytr(train.size());
    for (size_t k = 0; k < train.size(); ++k) {
      Xtr.row(k) = X.row(train[k]);
      ytr[k] = y[train[k]];
    }
    const auto model = learner.fit(Xtr, ytr, nullptr, task);
    for (size_t t = 0; t < targets.size(); ++t) {
      MatrixXd Xte(test.size(), targets[t]->cols());
      for (size_t k = 0; k < test.size(); ++k)
        Xte.row(k) = targets[t]->row(test[k]);
      const VectorXd pred = model->predict(Xte);
      for (size_t k = 0; k < test.size(); ++k)
        (*outputs[t])[test[k]] = pred[k];
    }
  }
}

}  // namespace

void fit_outcome(const Dataset& data, const Learner& learner, int folds,
                 const Rng& rng, VectorXd& q0, VectorXd& q1,
                 std::optional<std::vector<int>>& foldmap) {
  const Eigen::Index n = data.n();
  const MatrixXd X = outcome_design(data);
  MatrixXd X0 = X, X1 = X;
  X0.col(0).setZero();
  X1.col(0).setOnes();

  const bool binary_y = (data.Y.array() == 0.0 || data.Y.array() == 1.0).all();
  const Task task = binary_y ? Task::kBinaryProb : Task::kRegression;

  q0.resize(n);
  q1.resize(n);
  if (folds >= 2) {
    const std::vector<int> fold_of = crossfit_folds(data.A, folds, rng);
    std::vector<const MatrixXd*> targets = {&X0, &X1};
    std::vector<VectorXd*> outputs = {&q0, &q1};
    crossfit_predict(X, data.Y, fold_of, folds, learner, task, targets, outputs);
    foldmap = fold_of;
  } else {
    const auto model = learner.fit(X, data.Y, nullptr, task);
    q0 = model->predict(X0);
    q1 = model->predict(X1);
    foldmap.reset();
  }
  if (!q0.allFinite() || !q1.allFinite())
    throw std::runtime_error("outcome fit produced non-finite predictions");
}

VectorXd fit_propensity(const Dataset& data, const Learner& learner, int folds,
                        const PropensityBounds& bounds, const Rng& rng) {
  const Eigen::Index n = data.n();
  VectorXd g1(n);
  if (folds >= 2) {
    const std::vector<int> fold_of = crossfit_folds(data.A, folds, rng);
    std::vector<const MatrixXd*> targets = {&data.W};
    std::vector<VectorXd*> outputs = {&g1};
    crossfit_predict(data.W, data.A, fold_of, folds, learner, Task::kBinaryProb,
                     targets, outputs);
  } else {
    const auto model = learner.fit(data.W, data.A, nullptr, Task::kBinaryProb);
    g1 = model->predict(data.W);
  }
  if (!g1.allFinite())
    throw std::runtime_error("propensity fit produced non-finite predictions");
  return truncate_propensity(g1, bounds);
}

NuisanceFits fit_nuisance(const Dataset& data, const Options& opt,
                          const Rng& rng, const VectorXd* known_g) {
  require_valid(data);
  const int folds = opt.get_int("crossfit.folds", 0);
  if (folds > data.n())
    throw std::invalid_argument("crossfit.folds exceeds sample size");
  PropensityBounds bounds;
  bounds.lo = opt.get_double("propensity.lo", bounds.lo);
  bounds.hi = opt.get_double("propensity.hi", bounds.hi);

  NuisanceFits fits;
  const auto outcome = make_role_learner("outcome", opt, rng.derive(0x5159u));
  fits.outcome_learner = describe_role_learner("outcome", opt);
  fit_outcome(data, *outcome, folds, rng.derive(0x5159u), fits.q0, fits.q1,
              fits.foldmap);

  if (known_g) {
    if (known_g->size() != data.n())
      throw std::invalid_argument("known propensity length mismatch");
    fits.g1 = truncate_propensity(*known_g, bounds);
    fits.propensity_learner = "known";
  } else {
    const auto prop = make_role_learner("propensity", opt, rng.derive(0x4731u));
    fits.propensity_learner = describe_role_learner("propensity", opt);
    fits.g1 = fit_propensity(data, *prop, folds, bounds, rng.derive(0x4731u));
  }
  return fits;
}

}  // namespace htevim
