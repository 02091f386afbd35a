#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace htevim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Estimand { kVte, kVima, kVimb };
enum class Family { kSs, kEe, kTmle, kOracle };
enum class Metalearner { kS, kDr };

std::string to_string(Estimand e);
std::string to_string(Family f);
std::string to_string(Metalearner m);
Estimand estimand_from_string(const std::string& s);
Family family_from_string(const std::string& s);
Metalearner metalearner_from_string(const std::string& s);

// Observational unit: covariate matrix W (n x p), binary treatment A and
// continuous outcome Y, with covariate labels. Immutable by convention after
// construction; validation is a separate pass that reports violations as data.
struct Dataset {
  MatrixXd W;
  VectorXd A;
  VectorXd Y;
  std::vector<std::string> names;

  Eigen::Index n() const { return Y.size(); }
  Eigen::Index p() const { return W.cols(); }
};

// Violations found by validate(); empty means the dataset is usable.
using ValidationResult = std::vector<std::string>;

ValidationResult validate(const Dataset& data);

// Throws std::invalid_argument listing all violations. Estimation entry
// points call this so bad data fails fast with a full report.
void require_valid(const Dataset& data);

// Covariate subset whose importance is measured. Indices are 0-based
// internally; labels and CLI flags use covariate names.
struct SubsetSpec {
  std::vector<int> indices;

  bool empty() const { return indices.empty(); }
  std::string label(const std::vector<std::string>& names) const;
};

// {0..p-1} \ s, sorted. Throws std::out_of_range on indices outside [0, p).
std::vector<int> subset_complement(const SubsetSpec& spec, int p);

// Resolve covariate names against the dataset's column labels. Throws
// std::invalid_argument on unknown names; duplicates collapse.
SubsetSpec subset_from_names(const std::vector<std::string>& subset_names,
                             const std::vector<std::string>& all_names);

// Lower/upper clamp applied to propensity estimates.
struct PropensityBounds {
  double lo = 0.025;
  double hi = 0.975;
};

VectorXd truncate_propensity(const VectorXd& g1, const PropensityBounds& bounds);

// Per-observation nuisance fits: outcome regression evaluated at both arms
// and the (truncated) treatment probability, plus provenance.
struct NuisanceFits {
  VectorXd q0;
  VectorXd q1;
  VectorXd g1;
  std::optional<std::vector<int>> foldmap;
  std::string outcome_learner;
  std::string propensity_learner;

  // Q-bar(A_i, W_i) for each row.
  VectorXd q_at(const VectorXd& A) const;
  // g(A_i | W_i) for each row.
  VectorXd g_at(const VectorXd& A) const;
};

// CATE fits for one covariate subset: tau over the full covariate set, its
// projection tau_s onto the complement, and the projected second moment
// gamma_s.
struct CateFits {
  VectorXd tau;
  VectorXd tau_s;
  VectorXd gamma_s;
  SubsetSpec subset;
  Metalearner metalearner = Metalearner::kS;
};

struct Diagnostics {
  int iterations = 0;
  double score1_mean = 0.0;     // terminal empirical mean of the outcome score
  double score2_mean = 0.0;     // terminal empirical mean of the projection score
  double score1_threshold = 0.0;
  double score2_threshold = 0.0;
  double gamma_step_residual = 0.0;
  bool converged = true;
  std::string subset_label;
};

// One estimate with its EIC-based interval and run diagnostics.
struct EstimateReport {
  Estimand estimand = Estimand::kVte;
  Family family = Family::kSs;
  double psi = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  Eigen::Index n = 0;
  Diagnostics diagnostics;
};

}  // namespace htevim
