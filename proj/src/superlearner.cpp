#include "htevim/superlearner.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace htevim {

VectorXd nnls(const MatrixXd& A, const VectorXd& b, double tol, int max_iter) {
  const Eigen::Index m = A.cols();
  if (max_iter <= 0) max_iter = 3 * static_cast<int>(m) + 30;

  VectorXd x = VectorXd::Zero(m);
  std::vector<bool> passive(m, false);
  VectorXd w = A.transpose() * (b - A * x);

  auto solve_passive = [&](VectorXd& z) {
    std::vector<int> idx;
    for (Eigen::Index j = 0; j < m; ++j)
      if (passive[j]) idx.push_back(static_cast<int>(j));
    z.setZero(m);
    if (idx.empty()) return;
    MatrixXd Ap(A.rows(), idx.size());
    for (size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
    MatrixXd gram = Ap.transpose() * Ap;
    gram.diagonal().array() += 1e-12;
    const VectorXd zp = Eigen::LDLT<MatrixXd>(gram).solve(Ap.transpose() * b);
    for (size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[k];
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    int jstar = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < m; ++j)
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        jstar = static_cast<int>(j);
      }
    if (jstar < 0) break;
    passive[jstar] = true;

    VectorXd z;
    for (int inner = 0; inner < max_iter; ++inner) {
      solve_passive(z);
      bool all_pos = true;
      for (Eigen::Index j = 0; j < m; ++j)
        if (passive[j] && z[j] <= tol) {
          all_pos = false;
          break;
        }
      if (all_pos) {
        x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < m; ++j)
        if (passive[j] && z[j] <= tol)
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < m; ++j)
        if (passive[j] && x[j] <= tol) {
          passive[j] = false;
          x[j] = 0.0;
        }
    }
    w = A.transpose() * (b - A * x);
  }
  return x.cwiseMax(0.0);
}

namespace {

double risk_of(const VectorXd& y, const VectorXd& pred, const VectorXd& w,
               Task task) {
  const Eigen::Index n = y.size();
  double acc = 0.0, wsum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (task == Task::kBinaryProb) {
      const double p = std::clamp(pred[i], kProbClip, 1.0 - kProbClip);
      acc -= w[i] * (y[i] * std::log(p) + (1.0 - y[i]) * std::log1p(-p));
    } else {
      acc += w[i] * (y[i] - pred[i]) * (y[i] - pred[i]);
    }
    wsum += w[i];
  }
  return acc / std::max(wsum, 1e-300);
}

class SuperLearnerLearner : public Learner {
 public:
  SuperLearnerLearner(SuperLearnerConfig cfg, Rng rng)
      : cfg_(std::move(cfg)), rng_(rng) {
    if (cfg_.library.empty())
      throw std::invalid_argument("super learner: empty library");
  }

  std::string name() const override { return "sl"; }

  std::unique_ptr<FittedModel> fit(const MatrixXd& X, const VectorXd& y,
                                   const VectorXd* weights,
                                   Task task) const override {
    const Eigen::Index n = X.rows();
    if (n != y.size())
      throw std::invalid_argument("super learner: X/y row mismatch");
    if (n == 0) throw std::invalid_argument("super learner: empty data");
    const VectorXd w = weights ? *weights : VectorXd::Ones(n);
    const size_t m = cfg_.library.size();

    int folds = std::min<int>(cfg_.folds, static_cast<int>(n));
    if (folds < 2) return fit_without_cv(X, y, weights, task);

    // Fold assignment from a deterministic permutation.
    Rng fold_rng = rng_.derive(0x464Fu);
    const std::vector<int> perm = fold_rng.permutation(static_cast<int>(n));
    std::vector<int> fold_of(n);
    for (Eigen::Index i = 0; i < n; ++i)
      fold_of[perm[i]] = static_cast<int>(i % folds);

    MatrixXd oof = MatrixXd::Constant(n, static_cast<Eigen::Index>(m),
                                      std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> failed(m, false);

    for (int f = 0; f < folds; ++f) {
      std::vector<int> train, test;
      for (Eigen::Index i = 0; i < n; ++i)
        (fold_of[i] == f ? test : train).push_back(static_cast<int>(i));
      MatrixXd Xtr(train.size(), X.cols()), Xte(test.size(), X.cols());
      VectorXd ytr(train.size()), wtr(train.size());
      for (size_t k = 0; k < train.size(); ++k) {
        Xtr.row(k) = X.row(train[k]);
        ytr[k] = y[train[k]];
        wtr[k] = w[train[k]];
      }
      for (size_t k = 0; k < test.size(); ++k) Xte.row(k) = X.row(test[k]);

      for (size_t l = 0; l < m; ++l) {
        if (failed[l]) continue;
        try {
          auto model = cfg_.library[l]->fit(Xtr, ytr, &wtr, task);
          const VectorXd pred = model->predict(Xte);
          if (!pred.allFinite()) throw std::runtime_error("non-finite prediction");
          for (size_t k = 0; k < test.size(); ++k)
            oof(test[k], static_cast<Eigen::Index>(l)) = pred[k];
        } catch (const std::exception&) {
          failed[l] = true;
        }
      }
    }

    std::vector<int> alive;
    for (size_t l = 0; l < m; ++l)
      if (!failed[l]) alive.push_back(static_cast<int>(l));
    if (alive.empty())
      throw std::runtime_error("super learner: every library member failed");

    std::vector<SuperLearnerModel::MemberInfo> members(m);
    for (size_t l = 0; l < m; ++l) {
      members[l].name = cfg_.library[l]->name();
      members[l].failed = failed[l];
      members[l].cv_risk = failed[l]
                               ? std::numeric_limits<double>::quiet_NaN()
                               : risk_of(y, oof.col(static_cast<Eigen::Index>(l)),
                                         w, task);
    }

    // Meta step on the surviving columns.
    VectorXd weights_alive;
    if (cfg_.meta == SuperLearnerConfig::Meta::kDiscrete) {
      weights_alive = VectorXd::Zero(static_cast<Eigen::Index>(alive.size()));
      int best = 0;
      for (size_t k = 1; k < alive.size(); ++k)
        if (members[alive[k]].cv_risk < members[alive[best]].cv_risk)
          best = static_cast<int>(k);
      weights_alive[best] = 1.0;
    } else {
      MatrixXd A(n, static_cast<Eigen::Index>(alive.size()));
      for (size_t k = 0; k < alive.size(); ++k)
        A.col(static_cast<Eigen::Index>(k)) = oof.col(alive[k]);
      const VectorXd sw = w.array().sqrt();
      const MatrixXd Aw = A.array().colwise() * sw.array();
      const VectorXd bw = y.array() * sw.array();
      weights_alive = nnls(Aw, bw);
      const double total = weights_alive.sum();
      if (total <= 0.0) {
        // NNLS degenerated to all zeros: fall back to the discrete pick.
        weights_alive.setZero();
        int best = 0;
        for (size_t k = 1; k < alive.size(); ++k)
          if (members[alive[k]].cv_risk < members[alive[best]].cv_risk)
            best = static_cast<int>(k);
        weights_alive[best] = 1.0;
      } else {
        weights_alive /= total;
      }
    }
    for (size_t k = 0; k < alive.size(); ++k)
      members[alive[k]].weight = weights_alive[static_cast<Eigen::Index>(k)];

    // Refit members carrying weight on the full data.
    std::vector<std::unique_ptr<FittedModel>> models(m);
    bool any_failed = std::any_of(failed.begin(), failed.end(),
                                  [](bool b) { return b; });
    for (size_t l = 0; l < m; ++l) {
      if (members[l].weight <= 0.0) continue;
      try {
        models[l] = cfg_.library[l]->fit(X, y, weights, task);
      } catch (const std::exception&) {
        members[l].failed = true;
        members[l].weight = 0.0;
        any_failed = true;
      }
    }
    double remaining = 0.0;
    for (const auto& mi : members) remaining += mi.weight;
    if (remaining <= 0.0)
      throw std::runtime_error("super learner: full-data refits all failed");
    for (auto& mi : members) mi.weight /= remaining;

    return std::make_unique<SuperLearnerModel>(std::move(models),
                                               std::move(members), task,
                                               any_failed);
  }

 private:
  // Too little data to cross-validate: first member that fits wins.
  std::unique_ptr<FittedModel> fit_without_cv(const MatrixXd& X,
                                              const VectorXd& y,
                                              const VectorXd* weights,
                                              Task task) const {
    const size_t m = cfg_.library.size();
    std::vector<std::unique_ptr<FittedModel>> models(m);
    std::vector<SuperLearnerModel::MemberInfo> members(m);
    bool any_failed = false;
    for (size_t l = 0; l < m; ++l) {
      members[l].name = cfg_.library[l]->name();
      members[l].cv_risk = std::numeric_limits<double>::quiet_NaN();
    }
    for (size_t l = 0; l < m; ++l) {
      try {
        models[l] = cfg_.library[l]->fit(X, y, weights, task);
        members[l].weight = 1.0;
        return std::make_unique<SuperLearnerModel>(std::move(models),
                                                   std::move(members), task,
                                                   any_failed);
      } catch (const std::exception&) {
        members[l].failed = true;
        any_failed = true;
      }
    }
    throw std::runtime_error("super learner: every library member failed");
  }

  SuperLearnerConfig cfg_;
  Rng rng_;
};

}  // namespace

SuperLearnerModel::SuperLearnerModel(
    std::vector<std::unique_ptr<FittedModel>> models,
    std::vector<MemberInfo> members, Task task, bool any_failed)
    : models_(std::move(models)), members_(std::move(members)), task_(task),
      any_failed_(any_failed) {}

VectorXd SuperLearnerModel::predict(const MatrixXd& X) const {
  VectorXd out = VectorXd::Zero(X.rows());
  for (size_t l = 0; l < members_.size(); ++l) {
    if (members_[l].weight <= 0.0 || !models_[l]) continue;
    out += members_[l].weight * models_[l]->predict(X);
  }
  if (task_ == Task::kBinaryProb)
    out = out.cwiseMax(kProbClip).cwiseMin(1.0 - kProbClip);
  return out;
}

std::shared_ptr<Learner> make_super_learner(const SuperLearnerConfig& cfg,
                                            const Rng& rng) {
  return std::make_shared<SuperLearnerLearner>(cfg, rng);
}

}  // namespace htevim
