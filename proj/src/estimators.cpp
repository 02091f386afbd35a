#include "htevim/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace htevim {

namespace {

void check_nonempty(const VectorXd& v, const char* who) {
  if (v.size() == 0) throw std::invalid_argument(std::string(who) + ": empty input");
}

}  // namespace

double vte_ss(const VectorXd& tau) {
  check_nonempty(tau, "vte_ss");
  const double mean = tau.mean();
  return (tau.array() - mean).square().mean();
}

double vte_ee(const VectorXd& tau, const VectorXd& phi) {
  check_nonempty(tau, "vte_ee");
  if (phi.size() != tau.size())
    throw std::invalid_argument("vte_ee: tau/phi length mismatch");
  const double mean = tau.mean();
  const double correction =
      (2.0 * (tau.array() - mean) * (phi.array() - tau.array())).mean();
  return vte_ss(tau) + correction;
}

double vima_ss(const VectorXd& tau_s, const VectorXd& gamma_s) {
  check_nonempty(tau_s, "vima_ss");
  if (gamma_s.size() != tau_s.size())
    throw std::invalid_argument("vima_ss: tau_s/gamma_s length mismatch");
  return (gamma_s.array() - tau_s.array().square()).mean();
}

double vima_ee(const VectorXd& tau, const VectorXd& tau_s, const VectorXd& phi) {
  check_nonempty(tau, "vima_ee");
  if (tau_s.size() != tau.size() || phi.size() != tau.size())
    throw std::invalid_argument("vima_ee: length mismatch");
  return ((phi.array() - tau_s.array()).square() -
          (phi.array() - tau.array()).square())
      .mean();
}

double vimb_point(double psi2, double psi1) {
  if (std::abs(psi1) < 1e-12) throw std::domain_error("degenerate VTE");
  return psi2 / psi1;
}

}  // namespace htevim
