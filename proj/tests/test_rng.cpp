#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "htevim/rng.hpp"

using namespace htevim;

TEST_SUITE("rng") {

TEST_CASE("splitmix64 is the published sequence") {
  // Reference outputs for seed 1234567 from the splitmix64 reference code.
  Rng rng(1234567);
  CHECK(rng.next_u64() == 6457827717110365317ull);
  CHECK(rng.next_u64() == 3203168211198807973ull);
  CHECK(rng.next_u64() == 9817491932198370423ull);
}

TEST_CASE("name advertises the generator") { CHECK(kRngName == "splitmix64"); }

TEST_CASE("same seed, same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derive gives independent reproducible streams") {
  Rng base(7);
  Rng a = base.derive(3, 11);
  Rng b = base.derive(3, 11);
  Rng c = base.derive(3, 12);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  // Deriving does not consume from the base stream.
  Rng base2(7);
  base.derive(9);
  CHECK(base.next_u64() == base2.next_u64());
}

TEST_CASE("uniform stays inside the open interval") {
  Rng rng(99);
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform range mean") {
  Rng rng(5);
  double sum = 0.0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) sum += rng.uniform(-1.0, 1.0);
  CHECK(std::abs(sum / reps) < 0.02);  // SE ~ 0.0018
}

TEST_CASE("bernoulli frequency") {
  Rng rng(13);
  int ones = 0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) ones += rng.bernoulli(0.3) ? 1 : 0;
  CHECK(std::abs(ones / static_cast<double>(reps) - 0.3) < 0.01);
}

TEST_CASE("normal moments") {
  Rng rng(17);
  double sum = 0.0, sumsq = 0.0;
  const int reps = 200000;
  for (int i = 0; i < reps; ++i) {
    const double z = rng.normal(2.0, 3.0);
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / reps;
  const double var = sumsq / reps - mean * mean;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.02));
  CHECK(var == doctest::Approx(9.0).epsilon(0.02));
}

TEST_CASE("permutation is a permutation and is deterministic") {
  Rng rng(31);
  const auto p = rng.permutation(50);
  REQUIRE(p.size() == 50);
  std::set<int> seen(p.begin(), p.end());
  CHECK(seen.size() == 50);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 49);
  Rng rng2(31);
  CHECK(rng2.permutation(50) == p);
}

TEST_CASE("normal_quantile matches known points") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-8));
  CHECK(normal_quantile(0.95) == doctest::Approx(1.644853627).epsilon(1e-8));
  CHECK(normal_quantile(0.005) == doctest::Approx(-2.575829304).epsilon(1e-8));
  CHECK(normal_quantile(0.3) == -normal_quantile(0.7));
}

TEST_CASE("expit") {
  CHECK(expit(0.0) == doctest::Approx(0.5));
  CHECK(expit(-0.3) == doctest::Approx(0.425557).epsilon(1e-6));
  CHECK(expit(30.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(expit(-30.0) == doctest::Approx(0.0).epsilon(1e-10));
}

}  // TEST_SUITE
