#pragma once

#include "htevim/types.hpp"

namespace htevim {

// Point estimators for the three parameters. Plug-in variances use 1/n, the
// empirical-distribution convention.

// (1/n) sum (tau_i - taubar)^2
double vte_ss(const VectorXd& tau);

// One-step estimator: vte_ss plus the empirical residual-score correction
// (1/n) sum 2 (tau_i - taubar)(phi_i - tau_i). May leave [0, inf).
double vte_ee(const VectorXd& tau, const VectorXd& phi);

// (1/n) sum (gamma_s_i - tau_s_i^2)
double vima_ss(const VectorXd& tau_s, const VectorXd& gamma_s);

// (1/n) sum [(phi_i - tau_s_i)^2 - (phi_i - tau_i)^2]. May be negative.
double vima_ee(const VectorXd& tau, const VectorXd& tau_s, const VectorXd& phi);

// psi2 / psi1; throws std::domain_error("degenerate VTE") when |psi1| < 1e-12.
double vimb_point(double psi2, double psi1);

}  // namespace htevim
