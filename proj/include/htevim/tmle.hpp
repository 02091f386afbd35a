#pragma once

#include "htevim/options.hpp"
#include "htevim/types.hpp"

namespace htevim {

struct TmleConfig {
  double eps1 = 1e-4;
  double eps2 = 1e-4;
  int max_iter = 50000;
};

TmleConfig tmle_config_from_options(const Options& opt);

// Score components of the VIMa EIC decomposition:
//   d1    = 2(tau - tau_s)(2A-1)/g(A|W) * (Y - Qbar(A,W))   [outcome part]
//   d2    = 2 tau_s (tau - tau_s)                           [projection part]
//   d_ws  = tau^2 - gamma_s - 2 tau_s (tau - tau_s)
//   d_wms = gamma_s - tau_s^2 - psi2
// d1 + d_ws + d_wms reconstructs the full EIC.
struct Scores {
  VectorXd d1;
  VectorXd d2;
  VectorXd d_ws;
  VectorXd d_wms;
};

VectorXd score_d1(const Dataset& data, const VectorXd& g1, const VectorXd& q0,
                  const VectorXd& q1, const VectorXd& tau,
                  const VectorXd& tau_s);
VectorXd score_d2(const VectorXd& tau, const VectorXd& tau_s);
Scores vima_scores(const Dataset& data, const VectorXd& g1, const VectorXd& q0,
                   const VectorXd& q1, const VectorXd& tau,
                   const VectorXd& tau_s, const VectorXd& gamma_s, double psi2);

// P_n D1 computed the weighted-loss way: clever covariate 2(tau-tau_s)(2A-1)
// without the 1/g factor, 1/g carried as observation weights. Matches
// mean(score_d1) up to float association; kept as a separate path so the
// equivalence is checkable.
double pnd1_weighted_loss_form(const Dataset& data, const VectorXd& g1,
                               const VectorXd& q0, const VectorXd& q1,
                               const VectorXd& tau, const VectorXd& tau_s);

// Full EICs (the d-decomposition above collapses to these).
VectorXd eic_vima(const Dataset& data, const VectorXd& g1, const VectorXd& q0,
                  const VectorXd& q1, const VectorXd& tau,
                  const VectorXd& tau_s, double psi2);
VectorXd eic_vte(const Dataset& data, const VectorXd& g1, const VectorXd& q0,
                 const VectorXd& q1, const VectorXd& tau, double psi1);

// Iterative targeting for VIMa. Fluctuates Qbar (both arms, tau carried
// along) against d1 and tau_s against d2 with fixed step sizes until both
// empirical score means fall below sd(initial score)/(sqrt(n) log n), then
// applies the single-step gamma_s offset so P_n[tau*^2 - gamma_s*] = 0.
struct TmleVimaResult {
  VectorXd q0, q1, tau, tau_s, gamma_s;
  double psi2 = 0.0;
  Diagnostics diag;
};

TmleVimaResult tmle_vima(const Dataset& data, const NuisanceFits& nuisance,
                         const CateFits& cate, const TmleConfig& cfg);

// Same loop with the single VTE score: clever covariate 2(tau - taubar)(2A-1),
// taubar recomputed every iteration.
struct TmleVteResult {
  VectorXd q0, q1, tau;
  double psi1 = 0.0;
  Diagnostics diag;
};

TmleVteResult tmle_vte(const Dataset& data, const NuisanceFits& nuisance,
                       const VectorXd& tau0, const TmleConfig& cfg);

// Ratio of the two targeted estimates with its delta-method EIC
//   D3 = (D_vima* - psi3 D_vte*) / psi1*.
struct TmleVimbResult {
  double psi3 = 0.0;
  VectorXd eic;
  Diagnostics diag;
};

TmleVimbResult tmle_vimb(const Dataset& data, const NuisanceFits& nuisance,
                         const TmleVimaResult& vima, const TmleVteResult& vte);

}  // namespace htevim
