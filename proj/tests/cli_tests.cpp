// End-to-end checks of the installed command-line interface: spawns the real
// binary (path in argv[1]) and inspects exit codes, streams and output files.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int g_failures = 0;
std::string g_cli;

#define EXPECT(cond)                                                       \
  do {                                                                     \
    if (!(cond)) {                                                         \
      ++g_failures;                                                        \
      std::fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond); \
    }                                                                      \
  } while (0)

int run(const std::string& args) {
  const std::string cmd =
      "'" + g_cli + "' " + args + " >cli_stdout.txt 2>cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string out() { return slurp("cli_stdout.txt"); }
std::string err() { return slurp("cli_stderr.txt"); }

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  f << content;
}

void write_toy_csv(const std::string& path) {
  std::ostringstream ss;
  ss << "w1,w2,a,y\n";
  for (int i = 0; i < 80; ++i) {
    const double w1 = (i % 20 - 10) / 10.0;
    const double w2 = (i % 7 - 3) / 3.0;
    const int a = i % 2;
    const double y = 1.0 + w1 + a * (1.0 + w2) + 0.1 * (i % 5 - 2);
    ss << w1 << "," << w2 << "," << a << "," << y << "\n";
  }
  write_file(path, ss.str());
}

void usage_errors() {
  EXPECT(run("") == 64);
  EXPECT(run("frobnicate") == 64);
  EXPECT(run("simulate") == 64);  // --out is required
  EXPECT(run("analyze") == 64);   // --data is required
  EXPECT(run("--version") == 0);
  EXPECT(contains(out(), "0.1.0"));
  EXPECT(run("--help") == 0);
  EXPECT(contains(out(), "simulate"));
  EXPECT(contains(out(), "rank"));
}

void simulate_smoke() {
  EXPECT(run("simulate --out sim_out --config cheap.conf --n-grid 60 --reps 2 "
             "--families ee --estimands vte,vima --workers 1") == 0);
  EXPECT(contains(out(), "| n "));
  EXPECT(contains(out(), "wrote metrics.csv"));
  const std::string metrics = slurp("sim_out/metrics.csv");
  EXPECT(contains(metrics,
                  "n,estimand,family,metalearner,mse,abs_bias,coverage,"
                  "oracle_coverage,ci_width,n_failed"));
  EXPECT(contains(metrics, "60,vte,ee"));
  EXPECT(fs::exists("sim_out/replicates.csv"));
  EXPECT(contains(slurp("sim_out/metadata.txt"), "rng = splitmix64"));
}

void simulate_failures() {
  // A constant outcome fit degenerates the vimb ratio in every replicate.
  EXPECT(run("simulate --out sim_fail --config mean.conf --n-grid 60 --reps 2 "
             "--families ss --estimands vimb --workers 1") == 2);
  EXPECT(contains(out(), "2 replicate cells failed"));
  EXPECT(run("simulate --out sim_fail --config mean.conf --n-grid 60 --reps 2 "
             "--families ss --estimands vimb --workers 1 "
             "--fail-threshold 10") == 0);
}

void simulate_bad_inputs() {
  EXPECT(run("simulate --out sim_bad --config cheap.conf --n-grid 60 --reps 2 "
             "--dgp nonsense") == 64);
  EXPECT(contains(err(), "unknown dgp"));
  EXPECT(run("simulate --out sim_bad --config no_such.conf") == 65);
  EXPECT(contains(err(), "config file"));
}

void analyze_smoke() {
  EXPECT(run("analyze --data toy.csv --config cheap.conf --subset w1 "
             "--estimands vte,vima --families ss,ee --folds 0") == 0);
  EXPECT(contains(out(), "| estimand"));
  EXPECT(contains(out(), "vima"));

  EXPECT(run("analyze --data toy.csv --config cheap.conf --subset w1 "
             "--estimands vima --families ee --folds 0 --out an_out") == 0);
  EXPECT(contains(slurp("an_out/estimates.csv"), "estimand,covariate,family"));
  EXPECT(fs::exists("an_out/estimates.md"));
}

void analyze_data_errors() {
  EXPECT(run("analyze --data no_such.csv --folds 0") == 65);
  EXPECT(contains(err(), "no_such.csv"));

  write_file("bad.csv", "w1,a,y\n0.1,0,1\nnot-a-number,1,2\n0.3,0,1\n");
  EXPECT(run("analyze --data bad.csv --folds 0") == 65);
  EXPECT(contains(err(), "line 3"));

  // Missing cells are dropped with a note, not fatal; the remaining two rows
  // then fail validation (single treatment arm).
  write_file("sparse.csv", "w1,a,y\n0.1,0,1\n0.2,,2\n0.3,0,1\n");
  EXPECT(run("analyze --data sparse.csv --folds 0") == 65);
  EXPECT(contains(err(), "treatment"));
}

void analyze_unknown_subset() {
  EXPECT(run("analyze --data toy.csv --config cheap.conf --subset w9 "
             "--estimands vima --families ss --folds 0") == 64);
  EXPECT(contains(err(), "w9"));
}

void rank_smoke() {
  EXPECT(run("rank --data toy.csv --config cheap.conf --families ee "
             "--folds 0 --out rank_out") == 0);
  EXPECT(contains(out(), "| covariate"));
  const std::string csv = slurp("rank_out/ranking.csv");
  EXPECT(contains(csv, "covariate,family,psi"));
  EXPECT(contains(csv, "w1,ee"));
  EXPECT(contains(csv, "w2,ee"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_tests <path-to-cli>\n");
    return 2;
  }
  g_cli = argv[1];

  fs::create_directories("cli_scratch");
  fs::current_path("cli_scratch");
  write_toy_csv("toy.csv");
  write_file("cheap.conf",
             "outcome.learner = ols_poly\nprojection.learner = ols_poly\n");
  write_file("mean.conf",
             "outcome.learner = mean\nprojection.learner = ols\n");

  usage_errors();
  simulate_smoke();
  simulate_failures();
  simulate_bad_inputs();
  analyze_smoke();
  analyze_data_errors();
  analyze_unknown_subset();
  rank_smoke();

  if (g_failures == 0) {
    std::printf("cli_tests: all checks passed\n");
    return 0;
  }
  std::fprintf(stderr, "cli_tests: %d check(s) failed\n", g_failures);
  return 1;
}
