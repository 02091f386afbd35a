#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace htevim {

// Counter-based 64-bit generator (splitmix64). Each draw advances the state
// by a fixed odd constant and mixes it, so streams derived from (seed, tag)
// are reproducible across platforms and independent of call interleaving
// elsewhere in the program.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z);

  // Derives an independent stream keyed by one or more tag words.
  Rng derive(std::uint64_t tag) const;
  Rng derive(std::uint64_t tag_a, std::uint64_t tag_b) const;

  std::uint64_t next_u64();

  // Uniform on (0, 1), both endpoints excluded.
  double uniform();

  // Uniform on (lo, hi).
  double uniform(double lo, double hi);

  double normal(double mean = 0.0, double sd = 1.0);

  bool bernoulli(double p);

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Random permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n);

 private:
  std::uint64_t state_;
};

// Standard normal quantile (inverse CDF), Wichura's AS 241 rational
// approximation; absolute error well below 1e-8 on (0, 1).
double normal_quantile(double p);

// Numerically stable logistic function 1 / (1 + exp(-x)).
double expit(double x);

// The single generator name accepted in config files.
inline const char* kRngName = "splitmix64";

}  // namespace htevim
