#include "htevim/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace htevim {

namespace {

Options with_folds(const Options& opt, int folds) {
  Options out = opt;
  out.set("crossfit.folds", std::to_string(folds));
  return out;
}

struct ResultRow {
  std::string covariate;
  Family family = Family::kEe;
  bool failed = false;
  EstimateReport report;
};

std::vector<std::string> to_cells(const ResultRow& r) {
  if (r.failed)
    return {r.covariate, to_string(r.family), "", "", "", "", "", "failed"};
  return {r.covariate,
          to_string(r.family),
          format_double(r.report.psi),
          format_double(r.report.se),
          format_double(r.report.ci_lo),
          format_double(r.report.ci_hi),
          std::to_string(r.report.diagnostics.iterations),
          r.report.diagnostics.converged ? "1" : "0"};
}

}  // namespace

Table rank_vims(const Dataset& data, const AnalyzeConfig& cfg) {
  require_valid(data);
  EstimationSession session(data, with_folds(cfg.learner_opt, cfg.folds),
                            Rng(cfg.seed));

  const int p = static_cast<int>(data.p());
  struct CovariateBlock {
    double sort_key = -std::numeric_limits<double>::infinity();
    std::vector<ResultRow> rows;
  };
  std::vector<CovariateBlock> blocks(p);

  const Family key_family =
      std::find(cfg.families.begin(), cfg.families.end(), Family::kTmle) !=
              cfg.families.end()
          ? Family::kTmle
          : cfg.families.front();

  for (int j = 0; j < p; ++j) {
    SubsetSpec subset{{j}};
    const std::string name = subset.label(data.names);
    for (Family f : cfg.families) {
      ResultRow row;
      row.covariate = name;
      row.family = f;
      try {
        EstimateRequest req;
        req.estimand = Estimand::kVima;
        req.family = f;
        req.subset = subset;
        req.metalearner = cfg.metalearner;
        req.level = cfg.level;
        row.report = session.run(req);
        if (f == key_family) blocks[j].sort_key = row.report.psi;
      } catch (const std::exception&) {
        row.failed = true;
      }
      blocks[j].rows.push_back(std::move(row));
    }
  }

  std::vector<int> order(p);
  for (int j = 0; j < p; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return blocks[a].sort_key > blocks[b].sort_key;
  });

  Table table;
  table.columns = {"covariate", "family", "psi", "se",
                   "ci_lo",     "ci_hi",  "iterations", "converged"};
  for (int j : order)
    for (const auto& row : blocks[j].rows) table.add_row(to_cells(row));
  return table;
}

Table analyze_subset(const Dataset& data, const SubsetSpec& subset,
                     const AnalyzeConfig& cfg) {
  require_valid(data);
  EstimationSession session(data, with_folds(cfg.learner_opt, cfg.folds),
                            Rng(cfg.seed));

  Table table;
  table.columns = {"estimand", "covariate", "family", "psi", "se",
                   "ci_lo",    "ci_hi",     "iterations", "converged"};
  const std::string name = subset.label(data.names);
  for (Estimand e : cfg.estimands) {
    for (Family f : cfg.families) {
      ResultRow row;
      row.covariate = name;
      row.family = f;
      try {
        EstimateRequest req;
        req.estimand = e;
        req.family = f;
        req.subset = subset;
        req.metalearner = cfg.metalearner;
        req.level = cfg.level;
        row.report = session.run(req);
      } catch (const std::exception&) {
        row.failed = true;
      }
      std::vector<std::string> cells = to_cells(row);
      cells.insert(cells.begin(), to_string(e));
      table.add_row(std::move(cells));
    }
  }
  return table;
}

Dataset actg_lookalike(int n, const Rng& rng) {
  Rng r = rng;
  Dataset data;
  data.names = {"age",     "wtkg", "karnof", "cd40",  "cd80",  "gender",
                "homo",    "race", "symptom", "drugs", "hemo",  "str2"};
  data.W.resize(n, 12);
  data.A.resize(n);
  data.Y.resize(n);

  const double karnof_levels[4] = {70.0, 80.0, 90.0, 100.0};
  const double karnof_cum[4] = {0.03, 0.10, 0.32, 1.0};
  for (int i = 0; i < n; ++i) {
    const double age = std::clamp(r.normal(35.0, 8.7), 18.0, 70.0);
    const double wtkg = std::clamp(r.normal(75.0, 13.0), 40.0, 130.0);
    const double ku = r.uniform();
    double karnof = 100.0;
    for (int k = 0; k < 4; ++k)
      if (ku <= karnof_cum[k]) {
        karnof = karnof_levels[k];
        break;
      }
    const double cd40 = std::clamp(r.normal(350.0, 120.0), 50.0, 800.0);
    const double cd80 = std::clamp(r.normal(980.0, 450.0), 150.0, 2500.0);
    const double gender = r.bernoulli(0.83) ? 1.0 : 0.0;
    const double homo = r.bernoulli(0.66) ? 1.0 : 0.0;
    const double race = r.bernoulli(0.29) ? 1.0 : 0.0;
    const double symptom = r.bernoulli(0.17) ? 1.0 : 0.0;
    const double drugs = r.bernoulli(0.13) ? 1.0 : 0.0;
    const double hemo = r.bernoulli(0.08) ? 1.0 : 0.0;
    const double str2 = r.bernoulli(0.59) ? 1.0 : 0.0;
    const double a = r.bernoulli(0.5) ? 1.0 : 0.0;

    // Treatment benefit grows with baseline CD4; everything else shifts the
    // outcome level only.
    const double cd40_std = (cd40 - 350.0) / 120.0;
    const double tau = 30.0 + 35.0 * cd40_std;
    const double level = 320.0 + 55.0 * cd40_std + 0.015 * (cd80 - 980.0) -
                         25.0 * symptom + 18.0 * str2 - 0.4 * (age - 35.0);
    const double y = level + a * tau + r.normal(0.0, 90.0);

    const double row[12] = {age,  wtkg, karnof,  cd40,  cd80, gender,
                            homo, race, symptom, drugs, hemo, str2};
    for (int c = 0; c < 12; ++c) data.W(i, c) = row[c];
    data.A[i] = a;
    data.Y[i] = y;
  }
  return data;
}

}  // namespace htevim
