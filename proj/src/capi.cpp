#include "htevim.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "htevim/analyze.hpp"
#include "htevim/csv.hpp"
#include "htevim/estimate.hpp"
#include "htevim/sim.hpp"

namespace {

thread_local std::string g_last_error;

htevim_status fail(htevim_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Exceptions crossing the ABI boundary become status codes.
template <typename Fn>
htevim_status guarded(htevim_status failure_status, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& ex) {
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, ex.what());
  } catch (const std::exception& ex) {
    return fail(failure_status, ex.what());
  } catch (...) {
    return fail(failure_status, "unknown error");
  }
}

std::vector<htevim::Estimand> parse_estimands(const htevim::Options& opt,
                                              const std::string& fallback) {
  std::vector<htevim::Estimand> out;
  for (const auto& s : opt.get_list("estimands", {fallback}))
    out.push_back(htevim::estimand_from_string(s));
  if (out.empty()) throw std::invalid_argument("estimands list is empty");
  return out;
}

std::vector<htevim::Family> parse_families(const htevim::Options& opt) {
  std::vector<htevim::Family> out;
  for (const auto& s : opt.get_list("families", {"ss", "ee", "tmle"}))
    out.push_back(htevim::family_from_string(s));
  if (out.empty()) throw std::invalid_argument("families list is empty");
  return out;
}

}  // namespace

struct htevim_dataset {
  htevim::Dataset data;
};

struct htevim_options {
  htevim::Options opt;
};

struct htevim_result {
  htevim::Table table;
  int failed = 0;
};

extern "C" {

const char* htevim_version(void) { return "0.1.0"; }

const char* htevim_last_error(void) { return g_last_error.c_str(); }

htevim_status htevim_dataset_create(const double* covariates, size_t n,
                                    size_t p, const double* treatment,
                                    const double* outcome,
                                    const char* const* names,
                                    htevim_dataset** out) {
  if (!covariates || !treatment || !outcome || !out || n == 0 || p == 0)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT,
                "dataset_create: null buffer or empty dimensions");
  return guarded(HTEVIM_ERR_DATA, [&]() {
    auto handle = std::make_unique<htevim_dataset>();
    htevim::Dataset& d = handle->data;
    d.W.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < p; ++j)
        d.W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            covariates[i * p + j];
    d.A = Eigen::Map<const Eigen::VectorXd>(treatment,
                                            static_cast<Eigen::Index>(n));
    d.Y = Eigen::Map<const Eigen::VectorXd>(outcome,
                                            static_cast<Eigen::Index>(n));
    for (size_t j = 0; j < p; ++j)
      d.names.push_back(names && names[j] ? names[j]
                                          : "w" + std::to_string(j + 1));
    try {
      htevim::require_valid(d);
    } catch (const std::exception& ex) {
      return fail(HTEVIM_ERR_DATA, ex.what());
    }
    *out = handle.release();
    return HTEVIM_OK;
  });
}

htevim_status htevim_dataset_read_csv(const char* path,
                                      const char* treatment_col,
                                      const char* outcome_col,
                                      const char* const* covariate_cols,
                                      size_t covariate_count,
                                      htevim_dataset** out, int* rows_dropped) {
  if (!path || !out)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "read_csv: null argument");
  return guarded(HTEVIM_ERR_DATA, [&]() -> htevim_status {
    htevim::CsvReadOptions opts;
    if (treatment_col) opts.treatment_col = treatment_col;
    if (outcome_col) opts.outcome_col = outcome_col;
    for (size_t k = 0; k < covariate_count; ++k) {
      if (!covariate_cols || !covariate_cols[k])
        return fail(HTEVIM_ERR_INVALID_ARGUMENT, "read_csv: null column name");
      opts.covariate_cols.emplace_back(covariate_cols[k]);
    }
    htevim::CsvReadResult result = htevim::read_dataset_csv(path, opts);
    try {
      htevim::require_valid(result.dataset);
    } catch (const std::exception& ex) {
      return fail(HTEVIM_ERR_DATA, ex.what());
    }
    auto handle = std::make_unique<htevim_dataset>();
    handle->data = std::move(result.dataset);
    if (rows_dropped) *rows_dropped = result.rows_dropped_missing;
    *out = handle.release();
    return HTEVIM_OK;
  });
}

htevim_status htevim_dataset_n(const htevim_dataset* data, size_t* out) {
  if (!data || !out)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "dataset_n: null argument");
  *out = static_cast<size_t>(data->data.n());
  return HTEVIM_OK;
}

htevim_status htevim_dataset_p(const htevim_dataset* data, size_t* out) {
  if (!data || !out)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "dataset_p: null argument");
  *out = static_cast<size_t>(data->data.p());
  return HTEVIM_OK;
}

void htevim_dataset_free(htevim_dataset* data) { delete data; }

htevim_status htevim_options_create(htevim_options** out) {
  if (!out) return fail(HTEVIM_ERR_INVALID_ARGUMENT, "options_create: null out");
  *out = new htevim_options();
  return HTEVIM_OK;
}

htevim_status htevim_options_set(htevim_options* opt, const char* key,
                                 const char* value) {
  if (!opt || !key || !value)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "options_set: null argument");
  return guarded(HTEVIM_ERR_INVALID_ARGUMENT, [&]() {
    opt->opt.set(key, value);
    return HTEVIM_OK;
  });
}

htevim_status htevim_options_load_file(htevim_options* opt, const char* path) {
  if (!opt || !path)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "options_load_file: null argument");
  return guarded(HTEVIM_ERR_IO, [&]() {
    opt->opt.load_file(path);
    return HTEVIM_OK;
  });
}

void htevim_options_free(htevim_options* opt) { delete opt; }

htevim_status htevim_estimate(const htevim_dataset* data,
                              const htevim_options* opt, htevim_result** out) {
  if (!data || !opt || !out)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "estimate: null argument");
  return guarded(HTEVIM_ERR_RUNTIME, [&]() {
    const htevim::Options& o = opt->opt;
    htevim::AnalyzeConfig cfg;
    cfg.learner_opt = o;
    cfg.families = parse_families(o);
    cfg.estimands = parse_estimands(o, "vte");
    cfg.metalearner =
        htevim::metalearner_from_string(o.get_string("metalearner", "s"));
    // Data analysis cross-fits by default; simulation leaves it off.
    cfg.folds = o.get_int("crossfit.folds", 10);
    cfg.seed = o.get_u64("seed", 1);
    cfg.level = o.get_double("level", 0.95);

    htevim::SubsetSpec subset;
    if (o.has("subset"))
      subset = htevim::subset_from_names(o.get_list("subset", {}),
                                         data->data.names);

    auto result = std::make_unique<htevim_result>();
    result->table = htevim::analyze_subset(data->data, subset, cfg);
    for (const auto& row : result->table.rows)
      if (!row.empty() && row.back() == "failed") ++result->failed;
    *out = result.release();
    return HTEVIM_OK;
  });
}

htevim_status htevim_rank(const htevim_dataset* data, const htevim_options* opt,
                          htevim_result** out) {
  if (!data || !opt || !out)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "rank: null argument");
  return guarded(HTEVIM_ERR_RUNTIME, [&]() {
    const htevim::Options& o = opt->opt;
    htevim::AnalyzeConfig cfg;
    cfg.learner_opt = o;
    cfg.families = parse_families(o);
    cfg.metalearner =
        htevim::metalearner_from_string(o.get_string("metalearner", "s"));
    cfg.folds = o.get_int("crossfit.folds", 10);
    cfg.seed = o.get_u64("seed", 1);
    cfg.level = o.get_double("level", 0.95);

    auto result = std::make_unique<htevim_result>();
    result->table = htevim::rank_vims(data->data, cfg);
    for (const auto& row : result->table.rows)
      if (!row.empty() && row.back() == "failed") ++result->failed;
    *out = result.release();
    return HTEVIM_OK;
  });
}

htevim_status htevim_simulate(const htevim_options* opt, htevim_result** out) {
  if (!opt || !out)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "simulate: null argument");
  return guarded(HTEVIM_ERR_RUNTIME, [&]() {
    const htevim::Options& o = opt->opt;
    htevim::SimConfig cfg;
    cfg.learner_opt = o;
    if (o.has("n_grid")) {
      cfg.n_grid.clear();
      for (const auto& s : o.get_list("n_grid", {}))
        cfg.n_grid.push_back(std::stoi(s));
    } else if (o.get_bool("full_paper_grid", false)) {
      cfg.n_grid = htevim::kPaperNGrid;
    }
    cfg.reps = o.get_int("reps",
                         o.get_bool("full_paper_grid", false) ? 500 : cfg.reps);
    if (o.has("estimands")) cfg.estimands = parse_estimands(o, "vte");
    cfg.families = parse_families(o);
    cfg.metalearner =
        htevim::metalearner_from_string(o.get_string("metalearner", "s"));
    cfg.dgp = o.get_string("dgp", "benchmark");
    cfg.seed = o.get_u64("seed", 1);
    cfg.workers = o.get_int("workers", 0);
    cfg.level = o.get_double("level", 0.95);
    if (o.has("subset")) {
      const htevim::Dataset probe = htevim::generate(cfg.dgp, 50, htevim::Rng(0));
      cfg.subset = htevim::subset_from_names(o.get_list("subset", {}),
                                             probe.names);
    }

    htevim::SimOutput sim_out = htevim::run_replicates(cfg);
    const std::string out_dir = o.get_string("out", "");
    if (!out_dir.empty()) htevim::write_sim_output(sim_out, out_dir);

    auto result = std::make_unique<htevim_result>();
    result->table = std::move(sim_out.metrics);
    result->failed = sim_out.total_failed;
    *out = result.release();
    return HTEVIM_OK;
  });
}

size_t htevim_result_rows(const htevim_result* result) {
  return result ? result->table.rows.size() : 0;
}

size_t htevim_result_cols(const htevim_result* result) {
  return result ? result->table.columns.size() : 0;
}

const char* htevim_result_column_name(const htevim_result* result, size_t col) {
  if (!result || col >= result->table.columns.size()) return nullptr;
  return result->table.columns[col].c_str();
}

const char* htevim_result_cell(const htevim_result* result, size_t row,
                               size_t col) {
  if (!result || row >= result->table.rows.size() ||
      col >= result->table.rows[row].size())
    return nullptr;
  return result->table.rows[row][col].c_str();
}

int htevim_result_failed_count(const htevim_result* result) {
  return result ? result->failed : 0;
}

htevim_status htevim_result_write_csv(const htevim_result* result,
                                      const char* path) {
  if (!result || !path)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "write_csv: null argument");
  return guarded(HTEVIM_ERR_IO, [&]() {
    result->table.write_csv(path);
    return HTEVIM_OK;
  });
}

htevim_status htevim_result_write_markdown(const htevim_result* result,
                                           const char* path) {
  if (!result || !path)
    return fail(HTEVIM_ERR_INVALID_ARGUMENT, "write_markdown: null argument");
  return guarded(HTEVIM_ERR_IO, [&]() {
    result->table.write_markdown(path);
    return HTEVIM_OK;
  });
}

void htevim_result_free(htevim_result* result) { delete result; }

}  // extern "C"
