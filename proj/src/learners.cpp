#include "htevim/learners.hpp"

#include "htevim/hal.hpp"
#include "htevim/superlearner.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace htevim {

namespace {

VectorXd clip_probs(VectorXd p) {
  return p.cwiseMax(kProbClip).cwiseMin(1.0 - kProbClip);
}

void check_xy(const MatrixXd& X, const VectorXd& y, const VectorXd* w) {
  if (X.rows() != y.size())
    throw std::invalid_argument("learner fit: X/y row mismatch");
  if (X.rows() == 0) throw std::invalid_argument("learner fit: empty data");
  if (w) {
    if (w->size() != y.size())
      throw std::invalid_argument("learner fit: weight length mismatch");
    if ((w->array() < 0.0).any())
      throw std::invalid_argument("learner fit: negative weight");
    if (w->sum() <= 0.0)
      throw std::invalid_argument("learner fit: weights sum to zero");
  }
}

double weighted_mean(const VectorXd& y, const VectorXd* w) {
  if (!w) return y.mean();
  return (w->array() * y.array()).sum() / w->sum();
}

// ---------------------------------------------------------------------------
// Constant / mean

class ConstantModel : public FittedModel {
 public:
  ConstantModel(double value, Task task) : value_(value) {
    if (task == Task::kBinaryProb)
      value_ = std::clamp(value_, kProbClip, 1.0 - kProbClip);
  }
  VectorXd predict(const MatrixXd& X) const override {
    return VectorXd::Constant(X.rows(), value_);
  }

 private:
  double value_;
};

class MeanLearner : public Learner {
 public:
  std::string name() const override { return "mean"; }
  std::unique_ptr<FittedModel> fit(const MatrixXd& X, const VectorXd& y,
                                   const VectorXd* w, Task task) const override {
    check_xy(X, y, w);
    return std::make_unique<ConstantModel>(weighted_mean(y, w), task);
  }
};

class ConstantLearner : public Learner {
 public:
  explicit ConstantLearner(double value) : value_(value) {}
  std::string name() const override { return "constant"; }
  std::unique_ptr<FittedModel> fit(const MatrixXd& X, const VectorXd& y,
                                   const VectorXd* w, Task task) const override {
    check_xy(X, y, w);
    return std::make_unique<ConstantModel>(value_, task);
  }

 private:
  double value_;
};

// ---------------------------------------------------------------------------
// Ordinary least squares with optional polynomial basis

class OlsModel : public FittedModel {
 public:
  OlsModel(VectorXd beta, double intercept, int degree, Task task)
      : beta_(std::move(beta)), intercept_(intercept), degree_(degree), task_(task) {}

  VectorXd predict(const MatrixXd& X) const override {
    const MatrixXd B = poly_basis(X, degree_);
    VectorXd out = (B * beta_).array() + intercept_;
    if (task_ == Task::kBinaryProb) out = clip_probs(out);
    return out;
  }

 private:
  VectorXd beta_;
  double intercept_;
  int degree_;
  Task task_;
};

class OlsLearner : public Learner {
 public:
  explicit OlsLearner(const OlsConfig& cfg) : cfg_(cfg) {}
  std::string name() const override {
    return cfg_.degree >= 2 ? "ols_poly" : "ols";
  }

  std::unique_ptr<FittedModel> fit(const MatrixXd& X, const VectorXd& y,
                                   const VectorXd* w, Task task) const override {
    check_xy(X, y, w);
    const MatrixXd B = poly_basis(X, cfg_.degree);
    const Eigen::Index n = B.rows(), d = B.cols();
    VectorXd wv = w ? *w : VectorXd::Ones(n);
    wv *= static_cast<double>(n) / wv.sum();

    const VectorXd sw = wv.array().sqrt();
    const double ybar = (wv.array() * y.array()).sum() / n;
    const VectorXd colmean = (B.array().colwise() * wv.array()).colwise().sum() / n;
    MatrixXd Bs = (B.rowwise() - colmean.transpose()).array().colwise() * sw.array();
    const VectorXd ys = sw.array() * (y.array() - ybar);

    MatrixXd gram = Bs.transpose() * Bs / static_cast<double>(n);
    const VectorXd rhs = Bs.transpose() * ys / static_cast<double>(n);

    VectorXd beta = solve_spd(gram, rhs, d);
    const double intercept = ybar - colmean.dot(beta);
    return std::make_unique<OlsModel>(std::move(beta), intercept, cfg_.degree, task);
  }

 private:
  VectorXd solve_spd(const MatrixXd& gram, const VectorXd& rhs, Eigen::Index d) const {
    Eigen::LDLT<MatrixXd> ldlt(gram);
    VectorXd beta = ldlt.solve(rhs);
    const double resid = (gram * beta - rhs).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (!beta.allFinite() || resid > 1e-8 * scale) {
      // Singular design: jitter the diagonal and resolve.
      MatrixXd g = gram;
      g.diagonal().array() += cfg_.ridge_jitter;
      beta = Eigen::LDLT<MatrixXd>(g).solve(rhs);
      if (!beta.allFinite())
        throw std::runtime_error("ols: solve failed even with ridge jitter");
    }
    return beta;
  }

  OlsConfig cfg_;
};

// ---------------------------------------------------------------------------
// Logistic regression (IRLS)

class LogisticModel : public FittedModel {
 public:
  LogisticModel(VectorXd beta, double intercept, int degree, bool warning)
      : beta_(std::move(beta)), intercept_(intercept), degree_(degree),
        warning_(warning) {}

  VectorXd predict(const MatrixXd& X) const override {
    const MatrixXd B = poly_basis(X, degree_);
    VectorXd eta = (B * beta_).array() + intercept_;
    VectorXd p(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) p[i] = expit(eta[i]);
    return clip_probs(p);
  }

  bool warning() const override { return warning_; }

 private:
  VectorXd beta_;
  double intercept_;
  int degree_;
  bool warning_;
};

class LogisticLearner : public Learner {
 public:
  explicit LogisticLearner(const LogisticConfig& cfg) : cfg_(cfg) {}
  std::string name() const override {
    return cfg_.degree >= 2 ? "logistic_poly" : "logistic";
  }

  std::unique_ptr<FittedModel> fit(const MatrixXd& X, const VectorXd& y,
                                   const VectorXd* w, Task task) const override {
    check_xy(X, y, w);
    if (task != Task::kBinaryProb)
      throw std::invalid_argument("logistic learner supports binary-probability only");
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw std::invalid_argument("logistic learner: response must be 0/1");

    const MatrixXd B = poly_basis(X, cfg_.degree);
    const Eigen::Index n = B.rows(), d = B.cols();
    VectorXd wv = w ? *w : VectorXd::Ones(n);
    wv *= static_cast<double>(n) / wv.sum();

    // Design with explicit intercept column.
    MatrixXd D(n, d + 1);
    D.col(0).setOnes();
    D.rightCols(d) = B;

    VectorXd coef = VectorXd::Zero(d + 1);
    bool converged = false;
    for (int it = 0; it < cfg_.max_iter; ++it) {
      VectorXd eta = D * coef;
      VectorXd p(n), s(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        p[i] = expit(eta[i]);
        s[i] = std::max(p[i] * (1.0 - p[i]), 1e-10) * wv[i];
      }
      const VectorXd grad = D.transpose() * (wv.array() * (y - p).array()).matrix() /
                            static_cast<double>(n);
      if (grad.cwiseAbs().maxCoeff() <= cfg_.grad_tol) {
        converged = true;
        break;
      }
      MatrixXd hess = D.transpose() * (D.array().colwise() * s.array()).matrix() /
                      static_cast<double>(n);
      hess.diagonal().array() += 1e-10;
      const VectorXd step = Eigen::LDLT<MatrixXd>(hess).solve(grad);
      if (!step.allFinite())
        throw std::runtime_error("logistic: IRLS step failed");
      coef += step;
    }
    return std::make_unique<LogisticModel>(coef.tail(d), coef[0], cfg_.degree,
                                           !converged);
  }

 private:
  LogisticConfig cfg_;
};

// ---------------------------------------------------------------------------
// Regression tree (variance-reduction splits)

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  int left = -1;
  int right = -1;
  bool is_leaf() const { return feature < 0; }
};

class TreeModel : public FittedModel {
 public:
  TreeModel(std::vector<TreeNode> nodes, Task task)
      : nodes_(std::move(nodes)), task_(task) {}

  VectorXd predict(const MatrixXd& X) const override {
    VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      int node = 0;
      while (!nodes_[node].is_leaf())
        node = X(i, nodes_[node].feature) < nodes_[node].threshold
                   ? nodes_[node].left
                   : nodes_[node].right;
      out[i] = nodes_[node].value;
    }
    if (task_ == Task::kBinaryProb) out = clip_probs(out);
    return out;
  }

 private:
  std::vector<TreeNode> nodes_;
  Task task_;
};

class TreeLearner : public Learner {
 public:
  explicit TreeLearner(const TreeConfig& cfg) : cfg_(cfg) {
    if (cfg_.min_leaf < 1) throw std::invalid_argument("tree: min_leaf must be >= 1");
  }
  std::string name() const override { return "tree"; }

  std::unique_ptr<FittedModel> fit(const MatrixXd& X, const VectorXd& y,
                                   const VectorXd* w, Task task) const override {
    check_xy(X, y, w);
    VectorXd wv = w ? *w : VectorXd::Ones(X.rows());
    std::vector<int> rows(X.rows());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<TreeNode> nodes;
    grow(X, y, wv, rows, 0, nodes);
    return std::make_unique<TreeModel>(std::move(nodes), task);
  }

 private:
  int grow(const MatrixXd& X, const VectorXd& y, const VectorXd& w,
           const std::vector<int>& rows, int depth,
           std::vector<TreeNode>& nodes) const {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    double sw = 0.0, swy = 0.0;
    for (int i : rows) {
      sw += w[i];
      swy += w[i] * y[i];
    }
    nodes[id].value = sw > 0.0 ? swy / sw : 0.0;

    if (depth >= cfg_.max_depth ||
        static_cast<int>(rows.size()) < 2 * cfg_.min_leaf)
      return id;

    int best_feature = -1;
    double best_threshold = 0.0, best_gain = 0.0;
    std::vector<std::pair<double, int>> order(rows.size());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      for (size_t k = 0; k < rows.size(); ++k)
        order[k] = {X(rows[k], j), rows[k]};
      std::sort(order.begin(), order.end());

      double lw = 0.0, lwy = 0.0, lwyy = 0.0;
      double tw = 0.0, twy = 0.0, twyy = 0.0;
      for (int i : rows) {
        tw += w[i];
        twy += w[i] * y[i];
        twyy += w[i] * y[i] * y[i];
      }
      const double parent_sse = twyy - twy * twy / std::max(tw, 1e-300);

      for (size_t k = 0; k + 1 < order.size(); ++k) {
        const int i = order[k].second;
        lw += w[i];
        lwy += w[i] * y[i];
        lwyy += w[i] * y[i] * y[i];
        if (static_cast<int>(k) + 1 < cfg_.min_leaf) continue;
        if (static_cast<int>(order.size() - k) - 1 < cfg_.min_leaf) continue;
        if (order[k].first == order[k + 1].first) continue;  // no cut between ties
        const double rw = tw - lw, rwy = twy - lwy, rwyy = twyy - lwyy;
        if (lw <= 0.0 || rw <= 0.0) continue;
        const double sse = (lwyy - lwy * lwy / lw) + (rwyy - rwy * rwy / rw);
        const double gain = parent_sse - sse;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(j);
          best_threshold = 0.5 * (order[k].first + order[k + 1].first);
        }
      }
    }

    if (best_feature < 0 || best_gain <= 0.0) return id;

    std::vector<int> left, right;
    for (int i : rows)
      (X(i, best_feature) < best_threshold ? left : right).push_back(i);
    if (left.empty() || right.empty()) return id;

    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    nodes[id].left = grow(X, y, w, left, depth + 1, nodes);
    nodes[id].right = grow(X, y, w, right, depth + 1, nodes);
    return id;
  }

  TreeConfig cfg_;
};

}  // namespace

MatrixXd poly_basis(const MatrixXd& X, int degree) {
  if (degree < 1 || degree > 2)
    throw std::invalid_argument("poly_basis: degree must be 1 or 2");
  if (degree == 1) return X;
  const Eigen::Index n = X.rows(), p = X.cols();
  const Eigen::Index extra = p + p * (p - 1) / 2;
  MatrixXd B(n, p + extra);
  B.leftCols(p) = X;
  Eigen::Index c = p;
  for (Eigen::Index j = 0; j < p; ++j) B.col(c++) = X.col(j).cwiseProduct(X.col(j));
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = j + 1; k < p; ++k)
      B.col(c++) = X.col(j).cwiseProduct(X.col(k));
  return B;
}

std::shared_ptr<Learner> make_ols_learner(const OlsConfig& cfg) {
  return std::make_shared<OlsLearner>(cfg);
}
std::shared_ptr<Learner> make_logistic_learner(const LogisticConfig& cfg) {
  return std::make_shared<LogisticLearner>(cfg);
}
std::shared_ptr<Learner> make_tree_learner(const TreeConfig& cfg) {
  return std::make_shared<TreeLearner>(cfg);
}
std::shared_ptr<Learner> make_mean_learner() {
  return std::make_shared<MeanLearner>();
}
std::shared_ptr<Learner> make_constant_learner(double value) {
  return std::make_shared<ConstantLearner>(value);
}

std::shared_ptr<Learner> make_base_learner(const std::string& name,
                                           const Options& opt, const Rng& rng) {
  if (name == "mean") return make_mean_learner();
  if (name == "constant")
    return make_constant_learner(opt.get_double("constant.value", 0.0));
  if (name == "ols" || name == "ols_poly") {
    OlsConfig cfg;
    cfg.degree = opt.get_int("ols.degree", name == "ols_poly" ? 2 : 1);
    return make_ols_learner(cfg);
  }
  if (name == "logistic" || name == "logistic_poly") {
    LogisticConfig cfg;
    cfg.degree = opt.get_int("logistic.degree", name == "logistic_poly" ? 2 : 1);
    return make_logistic_learner(cfg);
  }
  if (name == "tree") {
    TreeConfig cfg;
    cfg.max_depth = opt.get_int("tree.max_depth", 4);
    cfg.min_leaf = opt.get_int("tree.min_leaf", 10);
    return make_tree_learner(cfg);
  }
  if (name == "hal") {
    HalConfig cfg = hal_config_from_options(opt);
    return make_hal_learner(cfg, rng.derive(0x4841u));
  }
  throw std::invalid_argument("unknown learner: " + name);
}

namespace {

const std::vector<std::string> kDefaultLibrary = {"ols_poly", "tree", "hal"};

std::string role_learner_name(const std::string& role, const Options& opt) {
  std::string fallback = "sl";
  if (role == "propensity") fallback = "logistic_poly";
  return opt.get_string(role + ".learner", fallback);
}

}  // namespace

std::shared_ptr<Learner> make_role_learner(const std::string& role,
                                           const Options& opt, const Rng& rng) {
  const std::string name = role_learner_name(role, opt);
  if (name != "sl") return make_base_learner(name, opt, rng);

  SuperLearnerConfig cfg;
  const auto lib = opt.get_list(role + ".sl.library", kDefaultLibrary);
  int k = 0;
  for (const auto& entry : lib)
    cfg.library.push_back(make_base_learner(entry, opt, rng.derive(0x4C49u, k++)));
  cfg.folds = opt.get_int(role + ".sl.folds", 10);
  const std::string meta = opt.get_string(role + ".sl.meta", "nnls");
  if (meta == "nnls") {
    cfg.meta = SuperLearnerConfig::Meta::kNnls;
  } else if (meta == "discrete") {
    cfg.meta = SuperLearnerConfig::Meta::kDiscrete;
  } else {
    throw std::invalid_argument(role + ".sl.meta must be nnls or discrete");
  }
  return make_super_learner(cfg, rng.derive(0x534Cu));
}

std::string describe_role_learner(const std::string& role, const Options& opt) {
  const std::string name = role_learner_name(role, opt);
  if (name != "sl") return name;
  std::string out = "sl(";
  const auto lib = opt.get_list(role + ".sl.library", kDefaultLibrary);
  for (size_t i = 0; i < lib.size(); ++i) out += (i ? "," : "") + lib[i];
  out += ";folds=" + std::to_string(opt.get_int(role + ".sl.folds", 10));
  out += ";meta=" + opt.get_string(role + ".sl.meta", "nnls") + ")";
  return out;
}

}  // namespace htevim
