#pragma once

#include <map>
#include <memory>

#include "htevim/nuisance.hpp"
#include "htevim/tmle.hpp"
#include "htevim/types.hpp"

namespace htevim {

struct EstimateRequest {
  Estimand estimand = Estimand::kVte;
  Family family = Family::kSs;
  SubsetSpec subset;  // required for vima/vimb
  Metalearner metalearner = Metalearner::kS;
  double level = 0.95;
};

// One dataset, shared fits. Nuisance models are computed once; CATE fits,
// pseudo-outcomes and targeting runs are cached per (metalearner, subset), so
// asking for every estimand x family combination costs one pass through the
// expensive learners.
class EstimationSession {
 public:
  EstimationSession(Dataset data, Options opt, const Rng& rng,
                    const VectorXd* known_g = nullptr);

  EstimateReport run(const EstimateRequest& req);

  const NuisanceFits& nuisance();
  const VectorXd& pseudo();
  const VectorXd& tau(Metalearner m);
  const CateFits& cate(const SubsetSpec& subset, Metalearner m);
  const TmleVteResult& targeted_vte(Metalearner m);
  const TmleVimaResult& targeted_vima(const SubsetSpec& subset, Metalearner m);

  const Dataset& data() const { return data_; }

 private:
  using CateKey = std::pair<int, std::vector<int>>;  // (metalearner, subset)

  Dataset data_;
  Options opt_;
  Rng rng_;
  std::optional<VectorXd> known_g_;
  TmleConfig tmle_cfg_;

  std::optional<NuisanceFits> nuisance_;
  std::optional<VectorXd> phi_;
  std::map<int, VectorXd> tau_;
  std::map<CateKey, CateFits> cate_;
  std::map<int, TmleVteResult> tmle_vte_;
  std::map<CateKey, TmleVimaResult> tmle_vima_;
};

// Convenience wrapper running a batch of requests over one session.
std::vector<EstimateReport> estimate_all(const Dataset& data,
                                         const std::vector<EstimateRequest>& reqs,
                                         const Options& opt, const Rng& rng,
                                         const VectorXd* known_g = nullptr);

}  // namespace htevim
