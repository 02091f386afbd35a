#include "htevim/tmle.hpp"

#include <cmath>
#include <stdexcept>

#include "htevim/estimators.hpp"
#include "htevim/inference.hpp"

namespace htevim {

TmleConfig tmle_config_from_options(const Options& opt) {
  TmleConfig cfg;
  cfg.eps1 = opt.get_double("tmle.eps1", cfg.eps1);
  cfg.eps2 = opt.get_double("tmle.eps2", cfg.eps2);
  cfg.max_iter = opt.get_int("tmle.max_iter", cfg.max_iter);
  return cfg;
}

VectorXd score_d1(const Dataset& data, const VectorXd& g1, const VectorXd& q0,
                  const VectorXd& q1, const VectorXd& tau,
                  const VectorXd& tau_s) {
  const Eigen::Index n = data.n();
  VectorXd d1(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool treated = data.A[i] != 0.0;
    const double g = treated ? g1[i] : 1.0 - g1[i];
    const double resid = data.Y[i] - (treated ? q1[i] : q0[i]);
    const double sign = treated ? 1.0 : -1.0;
    d1[i] = 2.0 * (tau[i] - tau_s[i]) * sign / g * resid;
  }
  return d1;
}

VectorXd score_d2(const VectorXd& tau, const VectorXd& tau_s) {
  return 2.0 * tau_s.array() * (tau.array() - tau_s.array());
}

Scores vima_scores(const Dataset& data, const VectorXd& g1, const VectorXd& q0,
                   const VectorXd& q1, const VectorXd& tau,
                   const VectorXd& tau_s, const VectorXd& gamma_s,
                   double psi2) {
  Scores s;
  s.d1 = score_d1(data, g1, q0, q1, tau, tau_s);
  s.d2 = score_d2(tau, tau_s);
  s.d_ws = tau.array().square() - gamma_s.array() -
           2.0 * tau_s.array() * (tau.array() - tau_s.array());
  s.d_wms = gamma_s.array() - tau_s.array().square() - psi2;
  return s;
}

double pnd1_weighted_loss_form(const Dataset& data, const VectorXd& g1,
                               const VectorXd& q0, const VectorXd& q1,
                               const VectorXd& tau, const VectorXd& tau_s) {
  const Eigen::Index n = data.n();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool treated = data.A[i] != 0.0;
    const double w = 1.0 / (treated ? g1[i] : 1.0 - g1[i]);
    const double h = 2.0 * (tau[i] - tau_s[i]) * (treated ? 1.0 : -1.0);
    const double resid = data.Y[i] - (treated ? q1[i] : q0[i]);
    acc += w * h * resid;
  }
  return acc / static_cast<double>(n);
}

VectorXd eic_vima(const Dataset& data, const VectorXd& g1, const VectorXd& q0,
                  const VectorXd& q1, const VectorXd& tau,
                  const VectorXd& tau_s, double psi2) {
  const VectorXd d1 = score_d1(data, g1, q0, q1, tau, tau_s);
  return d1.array() + (tau.array() - tau_s.array()).square() - psi2;
}

VectorXd eic_vte(const Dataset& data, const VectorXd& g1, const VectorXd& q0,
                 const VectorXd& q1, const VectorXd& tau, double psi1) {
  const VectorXd taubar = VectorXd::Constant(tau.size(), tau.mean());
  const VectorXd d1 = score_d1(data, g1, q0, q1, tau, taubar);
  return d1.array() + (tau.array() - taubar.array()).square() - psi1;
}

namespace {

double threshold_for(double sigma, Eigen::Index n) {
  return sigma / (std::sqrt(static_cast<double>(n)) *
                  std::log(static_cast<double>(n)));
}

void check_finite(const VectorXd& v, const char* what) {
  if (!v.allFinite())
    throw std::runtime_error(std::string("targeting produced non-finite ") +
                             what);
}

}  // namespace

TmleVimaResult tmle_vima(const Dataset& data, const NuisanceFits& nuisance,
                         const CateFits& cate, const TmleConfig& cfg) {
  const Eigen::Index n = data.n();
  TmleVimaResult r;
  r.q0 = nuisance.q0;
  r.q1 = nuisance.q1;
  r.tau = cate.tau;
  r.tau_s = cate.tau_s;
  const VectorXd& g1 = nuisance.g1;

  VectorXd d1 = score_d1(data, g1, r.q0, r.q1, r.tau, r.tau_s);
  VectorXd d2 = score_d2(r.tau, r.tau_s);
  const double sigma1 = sample_sd(d1);
  const double sigma2 = sample_sd(d2);
  const double thr1 = threshold_for(sigma1, n);
  const double thr2 = threshold_for(sigma2, n);

  double pnd1 = d1.mean();
  double pnd2 = d2.mean();
  int iter = 0;
  bool converged = false;
  while (true) {
    if (std::abs(pnd1) <= thr1 && std::abs(pnd2) <= thr2) {
      converged = true;
      break;
    }
    if (iter >= cfg.max_iter) break;

    // Outcome step: fluctuate both arms along 2(tau - tau_s)(2A-1); tau moves
    // with the arm difference.
    const VectorXd h = 2.0 * (r.tau - r.tau_s);
    r.q1 += cfg.eps1 * pnd1 * h;
    r.q0 -= cfg.eps1 * pnd1 * h;
    r.tau += 2.0 * cfg.eps1 * pnd1 * h;

    // Projection step against d2 recomputed at the fresh tau.
    pnd2 = score_d2(r.tau, r.tau_s).mean();
    r.tau_s += cfg.eps2 * pnd2 * 2.0 * r.tau_s;

    ++iter;
    check_finite(r.tau, "tau");
    check_finite(r.tau_s, "tau_s");
    pnd1 = score_d1(data, g1, r.q0, r.q1, r.tau, r.tau_s).mean();
    pnd2 = score_d2(r.tau, r.tau_s).mean();
    if (!std::isfinite(pnd1) || !std::isfinite(pnd2))
      throw std::runtime_error("targeting produced non-finite score mean");
  }

  // Single-step offset for gamma_s: solves P_n[tau*^2 - gamma_s*] = 0.
  const double eps3 =
      (r.tau.array().square() - cate.gamma_s.array()).mean();
  r.gamma_s = cate.gamma_s.array() + eps3;

  r.psi2 = vima_ss(r.tau_s, r.gamma_s);

  r.diag.iterations = iter;
  r.diag.score1_mean = pnd1;
  r.diag.score2_mean = pnd2;
  r.diag.score1_threshold = thr1;
  r.diag.score2_threshold = thr2;
  r.diag.gamma_step_residual =
      (r.tau.array().square() - r.gamma_s.array()).mean();
  r.diag.converged = converged;
  return r;
}

TmleVteResult tmle_vte(const Dataset& data, const NuisanceFits& nuisance,
                       const VectorXd& tau0, const TmleConfig& cfg) {
  const Eigen::Index n = data.n();
  TmleVteResult r;
  r.q0 = nuisance.q0;
  r.q1 = nuisance.q1;
  r.tau = tau0;
  const VectorXd& g1 = nuisance.g1;

  auto score = [&]() {
    const VectorXd taubar = VectorXd::Constant(n, r.tau.mean());
    return score_d1(data, g1, r.q0, r.q1, r.tau, taubar);
  };

  VectorXd d = score();
  const double sigma = sample_sd(d);
  const double thr = threshold_for(sigma, n);

  double pnd = d.mean();
  int iter = 0;
  bool converged = false;
  while (true) {
    if (std::abs(pnd) <= thr) {
      converged = true;
      break;
    }
    if (iter >= cfg.max_iter) break;

    const VectorXd h = 2.0 * (r.tau.array() - r.tau.mean());
    r.q1 += cfg.eps1 * pnd * h;
    r.q0 -= cfg.eps1 * pnd * h;
    r.tau += 2.0 * cfg.eps1 * pnd * h;

    ++iter;
    check_finite(r.tau, "tau");
    pnd = score().mean();
    if (!std::isfinite(pnd))
      throw std::runtime_error("targeting produced non-finite score mean");
  }

  r.psi1 = vte_ss(r.tau);
  r.diag.iterations = iter;
  r.diag.score1_mean = pnd;
  r.diag.score1_threshold = thr;
  r.diag.converged = converged;
  return r;
}

TmleVimbResult tmle_vimb(const Dataset& data, const NuisanceFits& nuisance,
                         const TmleVimaResult& vima, const TmleVteResult& vte) {
  TmleVimbResult r;
  r.psi3 = vimb_point(vima.psi2, vte.psi1);
  const VectorXd d_vima = eic_vima(data, nuisance.g1, vima.q0, vima.q1,
                                   vima.tau, vima.tau_s, vima.psi2);
  const VectorXd d_vte =
      eic_vte(data, nuisance.g1, vte.q0, vte.q1, vte.tau, vte.psi1);
  r.eic = (d_vima - r.psi3 * d_vte) / vte.psi1;

  r.diag = vima.diag;
  r.diag.iterations = vima.diag.iterations + vte.diag.iterations;
  r.diag.converged = vima.diag.converged && vte.diag.converged;
  return r;
}

}  // namespace htevim
