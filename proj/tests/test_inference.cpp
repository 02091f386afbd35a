#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "htevim/estimators.hpp"
#include "htevim/inference.hpp"
#include "htevim/rng.hpp"

using namespace htevim;

TEST_SUITE("inference") {

TEST_CASE("sample_sd uses the n-1 convention") {
  VectorXd v(2);
  v << -1.0, 1.0;
  CHECK(sample_sd(v) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sample_sd(VectorXd::Constant(5, 3.0)) == 0.0);
  CHECK_THROWS_AS(sample_sd(VectorXd::Constant(1, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("normal_z pins 0.95 and computes other levels") {
  CHECK(normal_z(0.95) == 1.959964);
  CHECK(normal_z(0.90) == doctest::Approx(1.6448536269514722).epsilon(1e-9));
  CHECK(normal_z(0.99) == doctest::Approx(2.5758293035489004).epsilon(1e-9));
  CHECK_THROWS_AS(normal_z(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_z(1.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_z(-0.5), std::invalid_argument);
}

TEST_CASE("wald_ci from a two-point influence function") {
  VectorXd eic(2);
  eic << -1.0, 1.0;
  const WaldCi ci = wald_ci(0.5, eic, 0.95);
  CHECK(ci.se == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ci.lo == doctest::Approx(0.5 - 1.959964).epsilon(1e-12));
  CHECK(ci.hi == doctest::Approx(0.5 + 1.959964).epsilon(1e-12));
  CHECK(ci.hi - ci.lo == doctest::Approx(2.0 * 1.959964).epsilon(1e-12));

  VectorXd bad(2);
  bad << 0.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(wald_ci(0.0, bad, 0.95), std::invalid_argument);
}

TEST_CASE("wider level gives a wider interval around the same center") {
  Rng rng(1001);
  VectorXd eic(100);
  for (double& e : eic) e = rng.normal(0, 2);
  const WaldCi narrow = wald_ci(1.0, eic, 0.90);
  const WaldCi wide = wald_ci(1.0, eic, 0.99);
  CHECK(narrow.se == wide.se);
  CHECK(wide.hi - wide.lo > narrow.hi - narrow.lo);
  CHECK(narrow.lo + narrow.hi == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ee influence functions are exactly centered at the ee estimates") {
  Rng rng(1002);
  const int n = 400;
  VectorXd tau(n), tau_s(n), phi(n);
  for (int i = 0; i < n; ++i) {
    tau[i] = rng.uniform(-1, 2);
    tau_s[i] = rng.uniform(-1, 2);
    phi[i] = tau[i] + rng.normal(0, 1.5);
  }
  const double psi1 = vte_ee(tau, phi);
  const double psi2 = vima_ee(tau, tau_s, phi);
  CHECK(std::abs(ee_eic_vte(tau, phi, psi1).mean()) < 1e-13);
  CHECK(std::abs(ee_eic_vima(tau, tau_s, phi, psi2).mean()) < 1e-13);
}

TEST_CASE("vimb delta eic and its degenerate denominator") {
  VectorXd a(3), b(3);
  a << 1.0, 2.0, 3.0;
  b << 0.5, 0.5, 0.5;
  const VectorXd d = vimb_delta_eic(a, b, 0.5, 2.0);
  CHECK(d[0] == doctest::Approx((1.0 - 0.25) / 2.0).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(vimb_delta_eic(a, b, 0.5, 0.0), "degenerate VTE",
                       std::domain_error);
}

}  // TEST_SUITE
