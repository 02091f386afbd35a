#include "htevim/estimate.hpp"

#include <stdexcept>

#include "htevim/cate.hpp"
#include "htevim/estimators.hpp"
#include "htevim/inference.hpp"

namespace htevim {

EstimationSession::EstimationSession(Dataset data, Options opt, const Rng& rng,
                                     const VectorXd* known_g)
    : data_(std::move(data)), opt_(std::move(opt)), rng_(rng) {
  require_valid(data_);
  if (known_g) known_g_ = *known_g;
  tmle_cfg_ = tmle_config_from_options(opt_);
}

const NuisanceFits& EstimationSession::nuisance() {
  if (!nuisance_) {
    nuisance_ = fit_nuisance(data_, opt_, rng_.derive(0x4E55u),
                             known_g_ ? &*known_g_ : nullptr);
  }
  return *nuisance_;
}

const VectorXd& EstimationSession::pseudo() {
  if (!phi_) phi_ = pseudo_outcome(data_, nuisance());
  return *phi_;
}

const VectorXd& EstimationSession::tau(Metalearner m) {
  const int key = static_cast<int>(m);
  auto it = tau_.find(key);
  if (it != tau_.end()) return it->second;

  VectorXd tau;
  if (m == Metalearner::kS) {
    tau = cate_s_learner(nuisance());
  } else {
    const auto learner = make_role_learner("cate", opt_, rng_.derive(0x4452u));
    tau = cate_dr_learner(data_, pseudo(), *learner);
  }
  return tau_.emplace(key, std::move(tau)).first->second;
}

const CateFits& EstimationSession::cate(const SubsetSpec& subset,
                                        Metalearner m) {
  const CateKey key{static_cast<int>(m), subset.indices};
  auto it = cate_.find(key);
  if (it != cate_.end()) return it->second;

  CateFits fits;
  fits.subset = subset;
  fits.metalearner = m;
  fits.tau = tau(m);
  const Rng proj_rng = rng_.derive(0x5053u, subset.indices.empty()
                                                ? 0
                                                : subset.indices.front() + 1);
  const auto projector = make_role_learner("projection", opt_, proj_rng);
  fits.tau_s = project_tau_s(data_, fits.tau, subset, *projector);
  const auto projector2 =
      make_role_learner("projection", opt_, proj_rng.derive(1u));
  fits.gamma_s = project_gamma_s(data_, fits.tau, subset, *projector2);
  return cate_.emplace(key, std::move(fits)).first->second;
}

const TmleVteResult& EstimationSession::targeted_vte(Metalearner m) {
  const int key = static_cast<int>(m);
  auto it = tmle_vte_.find(key);
  if (it != tmle_vte_.end()) return it->second;
  TmleVteResult r = tmle_vte(data_, nuisance(), tau(m), tmle_cfg_);
  return tmle_vte_.emplace(key, std::move(r)).first->second;
}

const TmleVimaResult& EstimationSession::targeted_vima(const SubsetSpec& subset,
                                                       Metalearner m) {
  const CateKey key{static_cast<int>(m), subset.indices};
  auto it = tmle_vima_.find(key);
  if (it != tmle_vima_.end()) return it->second;
  TmleVimaResult r = tmle_vima(data_, nuisance(), cate(subset, m), tmle_cfg_);
  r.diag.subset_label = subset.label(data_.names);
  return tmle_vima_.emplace(key, std::move(r)).first->second;
}

EstimateReport EstimationSession::run(const EstimateRequest& req) {
  if (req.family == Family::kOracle)
    throw std::invalid_argument(
        "oracle family is a simulation stub, not an estimator");
  if (req.estimand != Estimand::kVte && req.subset.empty())
    throw std::invalid_argument("vima/vimb need a non-empty covariate subset");

  EstimateReport report;
  report.estimand = req.estimand;
  report.family = req.family;
  report.n = data_.n();

  const NuisanceFits& nui = nuisance();
  double psi = 0.0;
  VectorXd eic;

  switch (req.estimand) {
    case Estimand::kVte: {
      if (req.family == Family::kSs) {
        const VectorXd& t = tau(req.metalearner);
        psi = vte_ss(t);
        eic = eic_vte(data_, nui.g1, nui.q0, nui.q1, t, psi);
      } else if (req.family == Family::kEe) {
        const VectorXd& t = tau(req.metalearner);
        psi = vte_ee(t, pseudo());
        eic = ee_eic_vte(t, pseudo(), psi);
      } else {
        const TmleVteResult& r = targeted_vte(req.metalearner);
        psi = r.psi1;
        eic = eic_vte(data_, nui.g1, r.q0, r.q1, r.tau, psi);
        report.diagnostics = r.diag;
      }
      break;
    }
    case Estimand::kVima: {
      const CateFits& c = cate(req.subset, req.metalearner);
      if (req.family == Family::kSs) {
        psi = vima_ss(c.tau_s, c.gamma_s);
        eic = eic_vima(data_, nui.g1, nui.q0, nui.q1, c.tau, c.tau_s, psi);
      } else if (req.family == Family::kEe) {
        psi = vima_ee(c.tau, c.tau_s, pseudo());
        eic = ee_eic_vima(c.tau, c.tau_s, pseudo(), psi);
      } else {
        const TmleVimaResult& r = targeted_vima(req.subset, req.metalearner);
        psi = r.psi2;
        eic = eic_vima(data_, nui.g1, r.q0, r.q1, r.tau, r.tau_s, psi);
        report.diagnostics = r.diag;
      }
      break;
    }
    case Estimand::kVimb: {
      if (req.family == Family::kTmle) {
        const TmleVimaResult& rv = targeted_vima(req.subset, req.metalearner);
        const TmleVteResult& rt = targeted_vte(req.metalearner);
        const TmleVimbResult r = tmle_vimb(data_, nui, rv, rt);
        psi = r.psi3;
        eic = r.eic;
        report.diagnostics = r.diag;
      } else {
        const CateFits& c = cate(req.subset, req.metalearner);
        double psi1, psi2;
        VectorXd e1, e2;
        if (req.family == Family::kSs) {
          psi1 = vte_ss(c.tau);
          psi2 = vima_ss(c.tau_s, c.gamma_s);
          e1 = eic_vte(data_, nui.g1, nui.q0, nui.q1, c.tau, psi1);
          e2 = eic_vima(data_, nui.g1, nui.q0, nui.q1, c.tau, c.tau_s, psi2);
        } else {
          psi1 = vte_ee(c.tau, pseudo());
          psi2 = vima_ee(c.tau, c.tau_s, pseudo());
          e1 = ee_eic_vte(c.tau, pseudo(), psi1);
          e2 = ee_eic_vima(c.tau, c.tau_s, pseudo(), psi2);
        }
        psi = vimb_point(psi2, psi1);
        eic = vimb_delta_eic(e2, e1, psi, psi1);
      }
      break;
    }
  }

  const WaldCi ci = wald_ci(psi, eic, req.level);
  report.psi = psi;
  report.se = ci.se;
  report.ci_lo = ci.lo;
  report.ci_hi = ci.hi;
  if (report.diagnostics.subset_label.empty() && !req.subset.empty())
    report.diagnostics.subset_label = req.subset.label(data_.names);
  return report;
}

std::vector<EstimateReport> estimate_all(const Dataset& data,
                                         const std::vector<EstimateRequest>& reqs,
                                         const Options& opt, const Rng& rng,
                                         const VectorXd* known_g) {
  EstimationSession session(data, opt, rng, known_g);
  std::vector<EstimateReport> out;
  out.reserve(reqs.size());
  for (const auto& req : reqs) out.push_back(session.run(req));
  return out;
}

}  // namespace htevim
