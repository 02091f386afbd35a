#pragma once

#include "htevim/types.hpp"

namespace htevim {

// Sample standard deviation with the 1/(n-1) convention. Throws on n < 2.
double sample_sd(const VectorXd& v);

// Two-sided normal critical value; 0.95 is pinned to 1.959964, other levels
// go through the inverse normal CDF.
double normal_z(double level);

struct WaldCi {
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// se = sd(eic)/sqrt(n); (lo, hi) = psi -+ z * se.
WaldCi wald_ci(double psi, const VectorXd& eic, double level = 0.95);

// Estimating-equation EICs written through the pseudo-outcome, so their
// empirical mean vanishes exactly at the EE point estimates.
VectorXd ee_eic_vte(const VectorXd& tau, const VectorXd& phi, double psi1);
VectorXd ee_eic_vima(const VectorXd& tau, const VectorXd& tau_s,
                     const VectorXd& phi, double psi2);

// Delta-method EIC for the ratio psi3 = psi2/psi1:
//   D3 = (D_vima - psi3 * D_vte) / psi1.
VectorXd vimb_delta_eic(const VectorXd& eic_vima, const VectorXd& eic_vte,
                        double psi3, double psi1);

}  // namespace htevim
