#include "htevim/cate.hpp"

#include <stdexcept>

namespace htevim {

VectorXd pseudo_outcome(const Dataset& data, const NuisanceFits& nuisance) {
  const Eigen::Index n = data.n();
  if (nuisance.q0.size() != n || nuisance.g1.size() != n)
    throw std::invalid_argument("pseudo_outcome: nuisance/dataset mismatch");
  const VectorXd qA = nuisance.q_at(data.A);
  const VectorXd gA = nuisance.g_at(data.A);
  VectorXd phi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = 2.0 * data.A[i] - 1.0;
    phi[i] = sign / gA[i] * (data.Y[i] - qA[i]) + nuisance.q1[i] - nuisance.q0[i];
  }
  return phi;
}

VectorXd cate_s_learner(const NuisanceFits& nuisance) {
  return nuisance.q1 - nuisance.q0;
}

VectorXd cate_dr_learner(const Dataset& data, const VectorXd& phi,
                         const Learner& learner) {
  const auto model = learner.fit(data.W, phi, nullptr, Task::kRegression);
  VectorXd tau = model->predict(data.W);
  if (!tau.allFinite())
    throw std::runtime_error("DR-learner produced non-finite CATE");
  return tau;
}

namespace {

MatrixXd complement_design(const Dataset& data, const std::vector<int>& comp) {
  MatrixXd X(data.n(), static_cast<Eigen::Index>(comp.size()));
  for (size_t k = 0; k < comp.size(); ++k) X.col(k) = data.W.col(comp[k]);
  return X;
}

VectorXd project_onto_complement(const Dataset& data, const VectorXd& target,
                                 const SubsetSpec& subset,
                                 const Learner& learner) {
  const std::vector<int> comp =
      subset_complement(subset, static_cast<int>(data.p()));
  if (comp.empty())
    return VectorXd::Constant(data.n(), target.mean());
  const MatrixXd X = complement_design(data, comp);
  const auto model = learner.fit(X, target, nullptr, Task::kRegression);
  VectorXd out = model->predict(X);
  if (!out.allFinite())
    throw std::runtime_error("projection produced non-finite values");
  return out;
}

}  // namespace

VectorXd project_tau_s(const Dataset& data, const VectorXd& tau,
                       const SubsetSpec& subset, const Learner& learner) {
  return project_onto_complement(data, tau, subset, learner);
}

VectorXd project_gamma_s(const Dataset& data, const VectorXd& tau,
                         const SubsetSpec& subset, const Learner& learner) {
  const VectorXd tau2 = tau.cwiseProduct(tau);
  return project_onto_complement(data, tau2, subset, learner);
}

CateFits fit_cate(const Dataset& data, const NuisanceFits& nuisance,
                  const SubsetSpec& subset, Metalearner metalearner,
                  const Options& opt, const Rng& rng) {
  CateFits fits;
  fits.subset = subset;
  fits.metalearner = metalearner;
  if (metalearner == Metalearner::kS) {
    fits.tau = cate_s_learner(nuisance);
  } else {
    const VectorXd phi = pseudo_outcome(data, nuisance);
    const auto learner = make_role_learner("cate", opt, rng.derive(0x4452u));
    fits.tau = cate_dr_learner(data, phi, *learner);
  }
  const auto projector = make_role_learner("projection", opt, rng.derive(0x5053u));
  fits.tau_s = project_tau_s(data, fits.tau, subset, *projector);
  const auto projector2 =
      make_role_learner("projection", opt, rng.derive(0x5053u, 1));
  fits.gamma_s = project_gamma_s(data, fits.tau, subset, *projector2);
  return fits;
}

}  // namespace htevim
