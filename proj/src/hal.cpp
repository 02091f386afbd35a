#include "htevim/hal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace htevim {

HalConfig hal_config_from_options(const Options& opt) {
  HalConfig cfg;
  cfg.max_interaction_degree =
      opt.get_int("hal.max_interaction_degree", cfg.max_interaction_degree);
  cfg.max_knots = opt.get_int("hal.max_knots", cfg.max_knots);
  cfg.lambda_count = opt.get_int("hal.lambda_count", cfg.lambda_count);
  cfg.lambda_min_ratio =
      opt.get_double("hal.lambda_min_ratio", cfg.lambda_min_ratio);
  cfg.cv_folds = opt.get_int("hal.cv_folds", cfg.cv_folds);
  cfg.tol = opt.get_double("hal.tol", cfg.tol);
  cfg.lambda_scale = opt.get_double("hal.lambda_scale", cfg.lambda_scale);
  return cfg;
}

namespace {

// Knot rows for one basis dimension: rows sorted lexicographically by the
// subset's coordinates, then evenly spaced picks (endpoints included) down to
// at most max_knots. With a single coordinate this is marginal-quantile
// thinning.
std::vector<int> thin_knot_rows(const MatrixXd& X, const std::vector<int>& subset,
                                int max_knots) {
  const Eigen::Index n = X.rows();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (int j : subset) {
      if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
    }
    return a < b;
  });
  if (max_knots >= n || max_knots <= 0) return order;
  std::vector<int> picks;
  picks.reserve(max_knots);
  if (max_knots == 1) {
    picks.push_back(order[0]);
    return picks;
  }
  for (int k = 0; k < max_knots; ++k) {
    const auto idx = static_cast<Eigen::Index>(
        std::llround(static_cast<double>(k) * (n - 1) / (max_knots - 1)));
    picks.push_back(order[idx]);
  }
  return picks;
}

void enumerate_subsets(int p, int max_degree,
                       std::vector<std::vector<int>>& out) {
  std::vector<int> current;
  auto rec = [&](auto&& self, int start) -> void {
    if (!current.empty()) out.push_back(current);
    if (static_cast<int>(current.size()) >= max_degree) return;
    for (int j = start; j < p; ++j) {
      current.push_back(j);
      self(self, j + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
}

std::vector<uint64_t> pack_column(const VectorXd& col) {
  const Eigen::Index n = col.size();
  std::vector<uint64_t> bits((n + 63) / 64, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    if (col[i] != 0.0) bits[i / 64] |= uint64_t{1} << (i % 64);
  return bits;
}

}  // namespace

HalBasis hal_basis(const MatrixXd& X, const HalConfig& cfg) {
  if (X.rows() == 0) throw std::invalid_argument("hal_basis: empty data");
  const Eigen::Index n = X.rows();
  const int p = static_cast<int>(X.cols());
  const int degree = std::min(cfg.max_interaction_degree, p);
  if (degree < 1) throw std::invalid_argument("hal_basis: degree must be >= 1");

  std::vector<std::vector<int>> subsets;
  enumerate_subsets(p, degree, subsets);

  HalBasis basis;
  std::map<std::vector<uint64_t>, int> seen;
  std::vector<VectorXd> cols;
  for (const auto& s : subsets) {
    const std::vector<int> knot_rows = thin_knot_rows(X, s, cfg.max_knots);
    for (int r : knot_rows) {
      VectorXd col(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double v = 1.0;
        for (int j : s)
          if (X(i, j) < X(r, j)) {
            v = 0.0;
            break;
          }
        col[i] = v;
      }
      ++basis.raw_column_count;
      auto key = pack_column(col);
      if (seen.emplace(std::move(key), static_cast<int>(cols.size())).second) {
        HalBasisColumn desc;
        desc.subset = s;
        for (int j : s) desc.knot.push_back(X(r, j));
        basis.columns.push_back(std::move(desc));
        cols.push_back(std::move(col));
      }
    }
  }

  basis.design.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c)
    basis.design.col(static_cast<Eigen::Index>(c)) = cols[c];
  return basis;
}

MatrixXd hal_design(const std::vector<HalBasisColumn>& columns,
                    const MatrixXd& X) {
  const Eigen::Index n = X.rows();
  MatrixXd D(n, static_cast<Eigen::Index>(columns.size()));
  for (size_t c = 0; c < columns.size(); ++c) {
    const auto& desc = columns[c];
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = 1.0;
      for (size_t k = 0; k < desc.subset.size(); ++k)
        if (X(i, desc.subset[k]) < desc.knot[k]) {
          v = 0.0;
          break;
        }
      D(i, static_cast<Eigen::Index>(c)) = v;
    }
  }
  return D;
}

HalModel::HalModel(std::vector<HalBasisColumn> columns, LassoFit fit, Task task)
    : columns_(std::move(columns)), fit_(std::move(fit)), task_(task) {}

VectorXd HalModel::predict(const MatrixXd& X) const {
  const MatrixXd D = hal_design(columns_, X);
  VectorXd out = (D * fit_.beta).array() + fit_.intercept;
  if (task_ == Task::kBinaryProb)
    out = out.cwiseMax(kProbClip).cwiseMin(1.0 - kProbClip);
  return out;
}

int HalModel::nonzero_count() const {
  int k = 0;
  for (Eigen::Index j = 0; j < fit_.beta.size(); ++j)
    if (fit_.beta[j] != 0.0) ++k;
  return k;
}

HalFitResult hal_fit(const MatrixXd& X, const VectorXd& y,
                     const VectorXd* weights, Task task, const HalConfig& cfg,
                     const Rng& rng) {
  if (X.rows() != y.size())
    throw std::invalid_argument("hal_fit: X/y row mismatch");

  HalFitResult result;
  const double ymin = y.minCoeff(), ymax = y.maxCoeff();
  if (ymin == ymax || X.rows() < 2) {
    // Constant response (or a single row): intercept-only model.
    LassoFit fit;
    fit.intercept = ymin;
    fit.beta = VectorXd::Zero(0);
    result.model = std::make_unique<HalModel>(std::vector<HalBasisColumn>{},
                                              std::move(fit), task);
    return result;
  }

  HalBasis basis = hal_basis(X, cfg);
  result.raw_column_count = basis.raw_column_count;
  result.basis_column_count = static_cast<int>(basis.columns.size());

  LassoConfig lcfg;
  lcfg.lambda_count = cfg.lambda_count;
  lcfg.lambda_min_ratio = cfg.lambda_min_ratio;
  lcfg.tol = cfg.tol;

  LassoCvResult cv =
      lasso_cv(basis.design, y, weights, cfg.cv_folds, lcfg, rng);
  result.lambdas = std::move(cv.lambdas);
  result.cv_mse = std::move(cv.cv_mse);
  result.chosen_index = cv.chosen_index;

  LassoFit fit = std::move(cv.fit);
  if (cfg.lambda_scale != 1.0) {
    if (!(cfg.lambda_scale > 0.0))
      throw std::invalid_argument("hal_fit: lambda_scale must be positive");
    // Continue the warm-started path from the CV choice down to the scaled
    // lambda in geometric steps.
    std::vector<double> tail;
    const double target = fit.lambda * cfg.lambda_scale;
    for (double l = fit.lambda * 0.7; l > target; l *= 0.7) tail.push_back(l);
    tail.push_back(target);
    std::vector<double> grid(result.lambdas.begin(),
                             result.lambdas.begin() + result.chosen_index + 1);
    grid.insert(grid.end(), tail.begin(), tail.end());
    fit = lasso_path(basis.design, y, weights, grid, lcfg).back();
  }
  result.model = std::make_unique<HalModel>(std::move(basis.columns),
                                            std::move(fit), task);
  return result;
}

namespace {

class HalLearner : public Learner {
 public:
  HalLearner(HalConfig cfg, Rng rng) : cfg_(cfg), rng_(rng) {}
  std::string name() const override { return "hal"; }
  std::unique_ptr<FittedModel> fit(const MatrixXd& X, const VectorXd& y,
                                   const VectorXd* w, Task task) const override {
    return hal_fit(X, y, w, task, cfg_, rng_).model;
  }

 private:
  HalConfig cfg_;
  Rng rng_;
};

}  // namespace

std::shared_ptr<Learner> make_hal_learner(const HalConfig& cfg, const Rng& rng) {
  return std::make_shared<HalLearner>(cfg, rng);
}

}  // namespace htevim
