#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "htevim.h"

namespace {

struct DatasetGuard {
  htevim_dataset* p = nullptr;
  ~DatasetGuard() { htevim_dataset_free(p); }
};
struct OptionsGuard {
  htevim_options* p = nullptr;
  ~OptionsGuard() { htevim_options_free(p); }
};
struct ResultGuard {
  htevim_result* p = nullptr;
  ~ResultGuard() { htevim_result_free(p); }
};

// Tiny balanced dataset with a real treatment effect, big enough to pass
// validation and linear fits.
struct ToyData {
  std::vector<double> w, a, y;
  size_t n = 0;
};

ToyData toy_data() {
  ToyData t;
  t.n = 80;
  for (size_t i = 0; i < t.n; ++i) {
    const double w1 = (static_cast<double>(i % 20) - 10.0) / 10.0;
    const double w2 = (static_cast<double>(i % 7) - 3.0) / 3.0;
    const double a = i % 2 ? 1.0 : 0.0;
    t.w.push_back(w1);
    t.w.push_back(w2);
    t.a.push_back(a);
    t.y.push_back(1.0 + w1 + a * (1.0 + w2) + 0.1 * ((i % 5) - 2));
  }
  return t;
}

htevim_status make_toy(const ToyData& t, htevim_dataset** out) {
  return htevim_dataset_create(t.w.data(), t.n, 2, t.a.data(), t.y.data(),
                               nullptr, out);
}

void set_cheap_learners(htevim_options* opt) {
  htevim_options_set(opt, "outcome.learner", "ols");
  htevim_options_set(opt, "projection.learner", "ols");
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version and error text") {
  CHECK(std::strcmp(htevim_version(), "0.1.0") == 0);
  CHECK(htevim_last_error() != nullptr);
}

TEST_CASE("null arguments are invalid, not fatal") {
  CHECK(htevim_dataset_create(nullptr, 10, 2, nullptr, nullptr, nullptr,
                              nullptr) == HTEVIM_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(htevim_last_error()) > 0);
  CHECK(htevim_dataset_n(nullptr, nullptr) == HTEVIM_ERR_INVALID_ARGUMENT);
  CHECK(htevim_options_set(nullptr, "k", "v") == HTEVIM_ERR_INVALID_ARGUMENT);
  CHECK(htevim_estimate(nullptr, nullptr, nullptr) ==
        HTEVIM_ERR_INVALID_ARGUMENT);
  htevim_dataset_free(nullptr);  // free of null is a no-op
  htevim_options_free(nullptr);
  htevim_result_free(nullptr);
}

TEST_CASE("dataset create, dimensions and default names") {
  const ToyData t = toy_data();
  DatasetGuard d;
  REQUIRE(make_toy(t, &d.p) == HTEVIM_OK);
  size_t n = 0, p = 0;
  CHECK(htevim_dataset_n(d.p, &n) == HTEVIM_OK);
  CHECK(htevim_dataset_p(d.p, &p) == HTEVIM_OK);
  CHECK(n == t.n);
  CHECK(p == 2);
}

TEST_CASE("invalid dataset content is a data error") {
  std::vector<double> w = {0.0, 1.0, 2.0};
  std::vector<double> a = {0.0, 1.0, 2.0};  // non-binary treatment
  std::vector<double> y = {1.0, 2.0, 3.0};
  htevim_dataset* out = nullptr;
  CHECK(htevim_dataset_create(w.data(), 3, 1, a.data(), y.data(), nullptr,
                              &out) == HTEVIM_ERR_DATA);
  CHECK(out == nullptr);
  CHECK(std::string(htevim_last_error()).find("treatment") !=
        std::string::npos);
}

TEST_CASE("csv round trip through the c api") {
  const char* path = "capi_toy.csv";
  {
    std::ofstream f(path);
    f << "w1,w2,a,y\n";
    const ToyData t = toy_data();
    for (size_t i = 0; i < t.n; ++i)
      f << t.w[2 * i] << "," << t.w[2 * i + 1] << "," << t.a[i] << ","
        << t.y[i] << "\n";
    f << "0.5,,1,2\n";  // missing cell: dropped, not fatal
  }
  DatasetGuard d;
  int dropped = -1;
  REQUIRE(htevim_dataset_read_csv(path, "a", "y", nullptr, 0, &d.p,
                                  &dropped) == HTEVIM_OK);
  CHECK(dropped == 1);
  size_t n = 0;
  htevim_dataset_n(d.p, &n);
  CHECK(n == toy_data().n);

  htevim_dataset* missing = nullptr;
  CHECK(htevim_dataset_read_csv("no_such_file.csv", "a", "y", nullptr, 0,
                                &missing, nullptr) == HTEVIM_ERR_DATA);
  std::remove(path);
}

TEST_CASE("options reject unparseable values at use time") {
  OptionsGuard o;
  REQUIRE(htevim_options_create(&o.p) == HTEVIM_OK);
  CHECK(htevim_options_set(o.p, "seed", "42") == HTEVIM_OK);
  CHECK(htevim_options_set(o.p, nullptr, "x") == HTEVIM_ERR_INVALID_ARGUMENT);
  CHECK(htevim_options_load_file(o.p, "no_such_file.conf") == HTEVIM_ERR_IO);
}

TEST_CASE("estimate smoke test over the toy dataset") {
  const ToyData t = toy_data();
  DatasetGuard d;
  REQUIRE(make_toy(t, &d.p) == HTEVIM_OK);
  OptionsGuard o;
  REQUIRE(htevim_options_create(&o.p) == HTEVIM_OK);
  set_cheap_learners(o.p);
  htevim_options_set(o.p, "estimands", "vte,vima");
  htevim_options_set(o.p, "families", "ss,ee");
  htevim_options_set(o.p, "subset", "w1");

  ResultGuard r;
  REQUIRE(htevim_estimate(d.p, o.p, &r.p) == HTEVIM_OK);
  REQUIRE(r.p != nullptr);
  CHECK(htevim_result_rows(r.p) == 4);
  CHECK(htevim_result_cols(r.p) == 9);
  CHECK(std::string(htevim_result_column_name(r.p, 0)) == "estimand");
  CHECK(std::string(htevim_result_cell(r.p, 0, 0)) == "vte");
  CHECK(htevim_result_failed_count(r.p) == 0);
  // Out-of-range access returns null rather than crashing.
  CHECK(htevim_result_cell(r.p, 99, 0) == nullptr);
  CHECK(htevim_result_column_name(r.p, 99) == nullptr);

  const char* out_csv = "capi_estimates.csv";
  CHECK(htevim_result_write_csv(r.p, out_csv) == HTEVIM_OK);
  std::ifstream f(out_csv);
  std::string header;
  std::getline(f, header);
  CHECK(header.rfind("estimand,", 0) == 0);
  f.close();
  std::remove(out_csv);
}

TEST_CASE("estimate requires a subset for vima") {
  const ToyData t = toy_data();
  DatasetGuard d;
  REQUIRE(make_toy(t, &d.p) == HTEVIM_OK);
  OptionsGuard o;
  REQUIRE(htevim_options_create(&o.p) == HTEVIM_OK);
  set_cheap_learners(o.p);
  htevim_options_set(o.p, "estimands", "vima");
  htevim_options_set(o.p, "families", "ss");
  htevim_options_set(o.p, "subset", "w9");  // unknown name
  ResultGuard r;
  CHECK(htevim_estimate(d.p, o.p, &r.p) == HTEVIM_ERR_INVALID_ARGUMENT);
  CHECK(r.p == nullptr);
}

TEST_CASE("rank produces one block per covariate") {
  const ToyData t = toy_data();
  DatasetGuard d;
  REQUIRE(make_toy(t, &d.p) == HTEVIM_OK);
  OptionsGuard o;
  REQUIRE(htevim_options_create(&o.p) == HTEVIM_OK);
  set_cheap_learners(o.p);
  htevim_options_set(o.p, "families", "ee");
  htevim_options_set(o.p, "crossfit.folds", "0");
  ResultGuard r;
  REQUIRE(htevim_rank(d.p, o.p, &r.p) == HTEVIM_OK);
  CHECK(htevim_result_rows(r.p) == 2);
  CHECK(std::string(htevim_result_column_name(r.p, 0)) == "covariate");
}

TEST_CASE("simulate through the c api") {
  OptionsGuard o;
  REQUIRE(htevim_options_create(&o.p) == HTEVIM_OK);
  set_cheap_learners(o.p);
  htevim_options_set(o.p, "n_grid", "60");
  htevim_options_set(o.p, "reps", "2");
  htevim_options_set(o.p, "estimands", "vte");
  htevim_options_set(o.p, "families", "ee");
  ResultGuard r;
  REQUIRE(htevim_simulate(o.p, &r.p) == HTEVIM_OK);
  CHECK(htevim_result_rows(r.p) == 1);
  CHECK(std::string(htevim_result_column_name(r.p, 0)) == "n");
  CHECK(std::string(htevim_result_cell(r.p, 0, 0)) == "60");

  htevim_options_set(o.p, "dgp", "bogus");
  htevim_result* r2 = nullptr;
  CHECK(htevim_simulate(o.p, &r2) == HTEVIM_ERR_INVALID_ARGUMENT);
}

}  // TEST_SUITE
