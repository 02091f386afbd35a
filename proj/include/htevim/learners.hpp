#pragma once

#include "htevim/options.hpp"
#include "htevim/rng.hpp"
#include "htevim/types.hpp"

#include <memory>
#include <string>

namespace htevim {

enum class Task { kRegression, kBinaryProb };

// Clip applied to binary-probability predictions so they stay inside (0, 1).
constexpr double kProbClip = 1e-6;

class FittedModel {
 public:
  virtual ~FittedModel() = default;
  virtual VectorXd predict(const MatrixXd& X) const = 0;
  // Set when the fit hit a soft failure (non-convergence, dropped candidate).
  virtual bool warning() const { return false; }
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  // weights may be null (unweighted). Throws on unusable input; soft issues
  // are reported through FittedModel::warning().
  virtual std::unique_ptr<FittedModel> fit(const MatrixXd& X, const VectorXd& y,
                                           const VectorXd* weights,
                                           Task task) const = 0;
};

// Polynomial expansion used by the linear learners: intercept-free matrix of
// [x_j] for degree 1, plus [x_j^2, x_j*x_k] for degree 2.
MatrixXd poly_basis(const MatrixXd& X, int degree);

struct OlsConfig {
  int degree = 1;            // 1 = linear, 2 = quadratic with interactions
  double ridge_jitter = 1e-10;
};

struct LogisticConfig {
  int degree = 1;
  double grad_tol = 1e-8;
  int max_iter = 100;
};

struct TreeConfig {
  int max_depth = 4;
  int min_leaf = 10;
};

std::shared_ptr<Learner> make_ols_learner(const OlsConfig& cfg);
std::shared_ptr<Learner> make_logistic_learner(const LogisticConfig& cfg);
std::shared_ptr<Learner> make_tree_learner(const TreeConfig& cfg);
std::shared_ptr<Learner> make_mean_learner();
std::shared_ptr<Learner> make_constant_learner(double value);

// Builds a single learner from its config name: ols, ols_poly, logistic,
// logistic_poly, tree, hal, mean, constant. Hyperparameters come from the
// option groups (ols.*, tree.*, hal.*, constant.*).
std::shared_ptr<Learner> make_base_learner(const std::string& name,
                                           const Options& opt, const Rng& rng);

// Builds the learner configured for a pipeline role ("outcome", "propensity",
// "cate", "projection"), honoring <role>.learner and, for super learners,
// <role>.sl.library / <role>.sl.folds / <role>.sl.meta.
std::shared_ptr<Learner> make_role_learner(const std::string& role,
                                           const Options& opt, const Rng& rng);

// Human-readable description of the learner a role resolves to (for output
// metadata).
std::string describe_role_learner(const std::string& role, const Options& opt);

}  // namespace htevim
