#pragma once

#include <memory>
#include <string>
#include <vector>

#include "htevim/learners.hpp"
#include "htevim/rng.hpp"

namespace htevim {

// Non-negative least squares (Lawson-Hanson active set):
//   minimise |A x - b|^2  subject to  x >= 0.
VectorXd nnls(const MatrixXd& A, const VectorXd& b, double tol = 1e-10,
              int max_iter = 0);

struct SuperLearnerConfig {
  enum class Meta { kNnls, kDiscrete };
  std::vector<std::shared_ptr<Learner>> library;
  int folds = 10;
  Meta meta = Meta::kNnls;
};

// Stacked ensemble: out-of-fold predictions from each library member, risks
// (MSE for regression, negative log-likelihood for probabilities) on those
// held-out predictions, then either the single best learner (discrete) or an
// NNLS convex combination. Members whose fit throws are dropped with a
// warning; if every member fails the fit throws.
class SuperLearnerModel : public FittedModel {
 public:
  struct MemberInfo {
    std::string name;
    double weight = 0.0;
    double cv_risk = 0.0;
    bool failed = false;
  };

  SuperLearnerModel(std::vector<std::unique_ptr<FittedModel>> models,
                    std::vector<MemberInfo> members, Task task,
                    bool any_failed);

  VectorXd predict(const MatrixXd& X) const override;
  bool warning() const override { return any_failed_; }

  const std::vector<MemberInfo>& members() const { return members_; }

 private:
  std::vector<std::unique_ptr<FittedModel>> models_;  // weight-aligned, may be null
  std::vector<MemberInfo> members_;
  Task task_;
  bool any_failed_;
};

std::shared_ptr<Learner> make_super_learner(const SuperLearnerConfig& cfg,
                                            const Rng& rng);

}  // namespace htevim
