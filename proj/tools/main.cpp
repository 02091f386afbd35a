// Command-line front end. Talks to the library exclusively through the C API
// so it doubles as a smoke test of the shared-library surface.

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "htevim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

struct OptionsDeleter {
  void operator()(htevim_options* p) const { htevim_options_free(p); }
};
struct DatasetDeleter {
  void operator()(htevim_dataset* p) const { htevim_dataset_free(p); }
};
struct ResultDeleter {
  void operator()(htevim_result* p) const { htevim_result_free(p); }
};

using OptionsPtr = std::unique_ptr<htevim_options, OptionsDeleter>;
using DatasetPtr = std::unique_ptr<htevim_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<htevim_result, ResultDeleter>;

int status_to_exit(htevim_status status) {
  switch (status) {
    case HTEVIM_OK:
      return kExitOk;
    case HTEVIM_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    default:
      return kExitData;
  }
}

int report_failure(const char* what, htevim_status status) {
  std::fprintf(stderr, "error: %s: %s\n", what, htevim_last_error());
  return status_to_exit(status);
}

// Markdown-style table on stdout; files carry the canonical output.
void print_table(const htevim_result* result) {
  const size_t rows = htevim_result_rows(result);
  const size_t cols = htevim_result_cols(result);
  if (cols == 0) return;
  std::vector<size_t> width(cols, 0);
  for (size_t c = 0; c < cols; ++c) {
    const char* name = htevim_result_column_name(result, c);
    width[c] = name ? std::strlen(name) : 0;
    for (size_t r = 0; r < rows; ++r) {
      const char* cell = htevim_result_cell(result, r, c);
      if (cell) width[c] = std::max(width[c], std::strlen(cell));
    }
  }
  auto print_row = [&](auto cell_at) {
    std::fputc('|', stdout);
    for (size_t c = 0; c < cols; ++c)
      std::fprintf(stdout, " %-*s |", static_cast<int>(width[c]), cell_at(c));
    std::fputc('\n', stdout);
  };
  print_row([&](size_t c) {
    const char* name = htevim_result_column_name(result, c);
    return name ? name : "";
  });
  std::fputc('|', stdout);
  for (size_t c = 0; c < cols; ++c) {
    for (size_t k = 0; k < width[c] + 2; ++k) std::fputc('-', stdout);
    std::fputc('|', stdout);
  }
  std::fputc('\n', stdout);
  for (size_t r = 0; r < rows; ++r)
    print_row([&](size_t c) {
      const char* cell = htevim_result_cell(result, r, c);
      return cell ? cell : "";
    });
}

// A flag only reaches the options map when the user typed it, so config-file
// values survive unless explicitly overridden.
struct Passthrough {
  CLI::App* cmd;
  htevim_options* opt;
  std::vector<std::pair<CLI::Option*, std::string>> bound;
  std::vector<std::unique_ptr<std::string>> storage;

  void add(const std::string& flag, const std::string& key,
           const std::string& help) {
    storage.push_back(std::make_unique<std::string>());
    CLI::Option* o = cmd->add_option(flag, *storage.back(), help);
    bound.emplace_back(o, key);
  }

  int apply() const {
    for (size_t i = 0; i < bound.size(); ++i) {
      if (bound[i].first->count() == 0) continue;
      const htevim_status st =
          htevim_options_set(opt, bound[i].second.c_str(),
                             storage[i]->c_str());
      if (st != HTEVIM_OK) return report_failure("bad option value", st);
    }
    return kExitOk;
  }
};

int load_config(htevim_options* opt, const std::string& path) {
  if (path.empty()) return kExitOk;
  const htevim_status st = htevim_options_load_file(opt, path.c_str());
  if (st != HTEVIM_OK) return report_failure("config file", st);
  return kExitOk;
}

int write_pair(const htevim_result* result, const std::string& dir,
               const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);  // failures surface below
  htevim_status st =
      htevim_result_write_csv(result, (dir + "/" + stem + ".csv").c_str());
  if (st != HTEVIM_OK) return report_failure("write csv", st);
  st = htevim_result_write_markdown(result, (dir + "/" + stem + ".md").c_str());
  if (st != HTEVIM_OK) return report_failure("write markdown", st);
  return kExitOk;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  bool full_paper_grid = false;
  int fail_threshold = 0;
  Passthrough pass;
};

struct AnalyzeArgs {
  std::string data;
  std::string config;
  std::string out;
  std::string treatment = "a";
  std::string outcome = "y";
  std::vector<std::string> covariates;
  Passthrough pass;
};

int run_simulate(const SimulateArgs& args) {
  htevim_options* opt = args.pass.opt;
  int rc = load_config(opt, args.config);
  if (rc != kExitOk) return rc;
  rc = args.pass.apply();
  if (rc != kExitOk) return rc;
  htevim_options_set(opt, "out", args.out.c_str());
  if (args.full_paper_grid)
    htevim_options_set(opt, "full_paper_grid", "true");

  htevim_result* raw = nullptr;
  const htevim_status st = htevim_simulate(opt, &raw);
  if (st != HTEVIM_OK) return report_failure("simulate", st);
  ResultPtr result(raw);

  print_table(result.get());
  const int failed = htevim_result_failed_count(result.get());
  std::fprintf(stdout, "\nwrote metrics.csv, replicates.csv, metadata.txt to %s",
               args.out.c_str());
  if (failed > 0)
    std::fprintf(stdout, " (%d replicate cell%s failed)", failed,
                 failed == 1 ? "" : "s");
  std::fputc('\n', stdout);
  return failed > args.fail_threshold ? kExitPartial : kExitOk;
}

int run_analysis(const AnalyzeArgs& args, bool rank) {
  htevim_options* opt = args.pass.opt;
  int rc = load_config(opt, args.config);
  if (rc != kExitOk) return rc;
  rc = args.pass.apply();
  if (rc != kExitOk) return rc;

  std::vector<const char*> cov_ptrs;
  for (const auto& name : args.covariates) cov_ptrs.push_back(name.c_str());

  htevim_dataset* raw_data = nullptr;
  int dropped = 0;
  htevim_status st = htevim_dataset_read_csv(
      args.data.c_str(), args.treatment.c_str(), args.outcome.c_str(),
      cov_ptrs.empty() ? nullptr : cov_ptrs.data(), cov_ptrs.size(), &raw_data,
      &dropped);
  if (st != HTEVIM_OK) {
    std::fprintf(stderr, "error: %s: %s\n", args.data.c_str(),
                 htevim_last_error());
    return kExitData;
  }
  DatasetPtr data(raw_data);
  if (dropped > 0)
    std::fprintf(stderr, "note: dropped %d row%s with missing values\n",
                 dropped, dropped == 1 ? "" : "s");

  htevim_result* raw_result = nullptr;
  st = rank ? htevim_rank(data.get(), opt, &raw_result)
            : htevim_estimate(data.get(), opt, &raw_result);
  if (st != HTEVIM_OK)
    return report_failure(rank ? "rank" : "analyze", st);
  ResultPtr result(raw_result);

  print_table(result.get());
  if (!args.out.empty()) {
    rc = write_pair(result.get(), args.out, rank ? "ranking" : "estimates");
    if (rc != kExitOk) return rc;
    std::fprintf(stdout, "\nwrote %s.csv and %s.md to %s\n",
                 rank ? "ranking" : "estimates", rank ? "ranking" : "estimates",
                 args.out.c_str());
  }
  return htevim_result_failed_count(result.get()) > 0 ? kExitPartial : kExitOk;
}

void add_analysis_flags(CLI::App* cmd, AnalyzeArgs& args, bool rank) {
  cmd->add_option("--data", args.data, "input CSV path")->required();
  cmd->add_option("--treatment", args.treatment,
                  "treatment column name (default a)");
  cmd->add_option("--outcome", args.outcome, "outcome column name (default y)");
  cmd->add_option("--covariates", args.covariates,
                  "covariate column names (default: all other columns)")
      ->delimiter(',');
  cmd->add_option("--config", args.config, "key = value config file");
  cmd->add_option("--out", args.out, "output directory");
  args.pass.cmd = cmd;
  if (!rank)
    args.pass.add("--subset", "subset", "covariate subset, comma-separated");
  args.pass.add("--folds", "crossfit.folds", "cross-fitting folds");
  args.pass.add("--families", "families", "estimator families (ss,ee,tmle)");
  args.pass.add("--estimands", "estimands", "estimands (vte,vima,vimb)");
  args.pass.add("--metalearner", "metalearner", "CATE metalearner (s|dr)");
  args.pass.add("--seed", "seed", "RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treatment-effect variance and variable importance"};
  app.set_version_flag("--version", htevim_version());
  app.require_subcommand(1);

  OptionsPtr sim_opt, analyze_opt, rank_opt;
  {
    htevim_options* p = nullptr;
    htevim_options_create(&p);
    sim_opt.reset(p);
    htevim_options_create(&p);
    analyze_opt.reset(p);
    htevim_options_create(&p);
    rank_opt.reset(p);
  }

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "benchmark the estimators on synthetic data");
  sim->add_option("--config", sim_args.config, "key = value config file");
  sim->add_option("--out", sim_args.out, "output directory")->required();
  sim->add_flag("--full-paper-grid", sim_args.full_paper_grid,
                "sample sizes up to 20000, 500 replicates");
  sim->add_option("--fail-threshold", sim_args.fail_threshold,
                  "failed replicate cells tolerated before exit 2");
  sim_args.pass.cmd = sim;
  sim_args.pass.opt = sim_opt.get();
  sim_args.pass.add("--n-grid", "n_grid", "sample sizes, comma-separated");
  sim_args.pass.add("--reps", "reps", "replicates per sample size");
  sim_args.pass.add("--estimands", "estimands", "estimands (vte,vima,vimb)");
  sim_args.pass.add("--families", "families", "estimator families (ss,ee,tmle)");
  sim_args.pass.add("--metalearner", "metalearner", "CATE metalearner (s|dr)");
  sim_args.pass.add("--subset", "subset", "importance subset (default w1)");
  sim_args.pass.add("--dgp", "dgp", "data-generating process (benchmark|null)");
  sim_args.pass.add("--seed", "seed", "RNG seed");
  sim_args.pass.add("--workers", "workers", "max parallel replicates");

  AnalyzeArgs analyze_args, rank_args;
  analyze_args.pass.opt = analyze_opt.get();
  rank_args.pass.opt = rank_opt.get();
  CLI::App* analyze = app.add_subcommand(
      "analyze", "estimate VTE/VIM for one covariate subset from a CSV");
  add_analysis_flags(analyze, analyze_args, false);
  CLI::App* rank = app.add_subcommand(
      "rank", "rank covariates by importance for treatment-effect variance");
  add_analysis_flags(rank, rank_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (sim->parsed()) return run_simulate(sim_args);
  if (analyze->parsed()) return run_analysis(analyze_args, false);
  return run_analysis(rank_args, true);
}
