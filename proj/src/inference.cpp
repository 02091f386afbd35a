#include "htevim/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "htevim/rng.hpp"

namespace htevim {

double sample_sd(const VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n < 2) throw std::invalid_argument("sample_sd: need at least 2 values");
  const double mean = v.mean();
  const double ss = (v.array() - mean).square().sum();
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double normal_z(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  if (level == 0.95) return 1.959964;
  return normal_quantile(0.5 + level / 2.0);
}

WaldCi wald_ci(double psi, const VectorXd& eic, double level) {
  if (!eic.allFinite())
    throw std::invalid_argument("wald_ci: non-finite influence values");
  WaldCi ci;
  ci.se = sample_sd(eic) / std::sqrt(static_cast<double>(eic.size()));
  const double z = normal_z(level);
  ci.lo = psi - z * ci.se;
  ci.hi = psi + z * ci.se;
  return ci;
}

VectorXd ee_eic_vte(const VectorXd& tau, const VectorXd& phi, double psi1) {
  const double taubar = tau.mean();
  return 2.0 * (tau.array() - taubar) * (phi.array() - tau.array()) +
         (tau.array() - taubar).square() - psi1;
}

VectorXd ee_eic_vima(const VectorXd& tau, const VectorXd& tau_s,
                     const VectorXd& phi, double psi2) {
  return (phi.array() - tau_s.array()).square() -
         (phi.array() - tau.array()).square() - psi2;
}

VectorXd vimb_delta_eic(const VectorXd& eic_vima, const VectorXd& eic_vte,
                        double psi3, double psi1) {
  if (std::abs(psi1) < 1e-12) throw std::domain_error("degenerate VTE");
  return (eic_vima - psi3 * eic_vte) / psi1;
}

}  // namespace htevim
