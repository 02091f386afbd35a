#include "htevim/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace htevim {

std::string to_string(Estimand e) {
  switch (e) {
    case Estimand::kVte: return "vte";
    case Estimand::kVima: return "vima";
    case Estimand::kVimb: return "vimb";
  }
  return "?";
}

std::string to_string(Family f) {
  switch (f) {
    case Family::kSs: return "ss";
    case Family::kEe: return "ee";
    case Family::kTmle: return "tmle";
    case Family::kOracle: return "oracle";
  }
  return "?";
}

std::string to_string(Metalearner m) {
  return m == Metalearner::kS ? "s" : "dr";
}

Estimand estimand_from_string(const std::string& s) {
  if (s == "vte") return Estimand::kVte;
  if (s == "vima") return Estimand::kVima;
  if (s == "vimb") return Estimand::kVimb;
  throw std::invalid_argument("unknown estimand: " + s);
}

Family family_from_string(const std::string& s) {
  if (s == "ss") return Family::kSs;
  if (s == "ee") return Family::kEe;
  if (s == "tmle") return Family::kTmle;
  if (s == "oracle") return Family::kOracle;
  throw std::invalid_argument("unknown family: " + s);
}

Metalearner metalearner_from_string(const std::string& s) {
  if (s == "s") return Metalearner::kS;
  if (s == "dr") return Metalearner::kDr;
  throw std::invalid_argument("unknown metalearner: " + s);
}

ValidationResult validate(const Dataset& data) {
  ValidationResult out;
  const Eigen::Index n = data.Y.size();
  if (n < 2) out.push_back("fewer than 2 observations");
  if (data.W.cols() < 1) out.push_back("no covariates");
  if (data.W.rows() != n || data.A.size() != n)
    out.push_back("row count mismatch between W, A, Y");
  if (!data.names.empty() &&
      static_cast<Eigen::Index>(data.names.size()) != data.W.cols())
    out.push_back("covariate name count mismatch");

  if (!data.W.allFinite()) out.push_back("non-finite covariate");
  if (!data.Y.allFinite()) out.push_back("non-finite outcome");
  if (!data.A.allFinite()) out.push_back("non-finite treatment");

  bool binary = true;
  Eigen::Index n0 = 0, n1 = 0;
  for (Eigen::Index i = 0; i < data.A.size(); ++i) {
    const double a = data.A[i];
    if (a == 0.0) {
      ++n0;
    } else if (a == 1.0) {
      ++n1;
    } else if (std::isfinite(a)) {
      binary = false;
    }
  }
  if (!binary) out.push_back("treatment not in {0, 1}");
  if (binary && data.A.size() > 0 && (n0 == 0 || n1 == 0))
    out.push_back("single treatment arm");
  return out;
}

void require_valid(const Dataset& data) {
  const ValidationResult violations = validate(data);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid dataset:";
  for (const auto& v : violations) msg << " [" << v << "]";
  throw std::invalid_argument(msg.str());
}

std::string SubsetSpec::label(const std::vector<std::string>& names) const {
  std::string out;
  for (size_t k = 0; k < indices.size(); ++k) {
    if (k > 0) out += "+";
    const int j = indices[k];
    if (j >= 0 && j < static_cast<int>(names.size()))
      out += names[j];
    else
      out += "w" + std::to_string(j + 1);
  }
  return out;
}

std::vector<int> subset_complement(const SubsetSpec& spec, int p) {
  std::vector<bool> in_s(p, false);
  for (int j : spec.indices) {
    if (j < 0 || j >= p)
      throw std::out_of_range("subset index " + std::to_string(j + 1) +
                              " outside covariate range 1.." + std::to_string(p));
    in_s[j] = true;
  }
  std::vector<int> out;
  for (int j = 0; j < p; ++j)
    if (!in_s[j]) out.push_back(j);
  return out;
}

SubsetSpec subset_from_names(const std::vector<std::string>& subset_names,
                             const std::vector<std::string>& all_names) {
  SubsetSpec spec;
  for (const auto& name : subset_names) {
    const auto it = std::find(all_names.begin(), all_names.end(), name);
    if (it == all_names.end())
      throw std::invalid_argument("unknown covariate: " + name);
    const int idx = static_cast<int>(it - all_names.begin());
    if (std::find(spec.indices.begin(), spec.indices.end(), idx) ==
        spec.indices.end())
      spec.indices.push_back(idx);
  }
  std::sort(spec.indices.begin(), spec.indices.end());
  return spec;
}

VectorXd truncate_propensity(const VectorXd& g1, const PropensityBounds& bounds) {
  if (!(bounds.lo >= 0.0 && bounds.lo < bounds.hi && bounds.hi <= 1.0))
    throw std::invalid_argument("propensity bounds must satisfy 0 <= lo < hi <= 1");
  return g1.cwiseMax(bounds.lo).cwiseMin(bounds.hi);
}

VectorXd NuisanceFits::q_at(const VectorXd& A) const {
  return A.array() * q1.array() + (1.0 - A.array()) * q0.array();
}

VectorXd NuisanceFits::g_at(const VectorXd& A) const {
  return A.array() * g1.array() + (1.0 - A.array()) * (1.0 - g1.array());
}

}  // namespace htevim
