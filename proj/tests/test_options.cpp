#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "htevim/options.hpp"

using namespace htevim;

TEST_SUITE("options") {

TEST_CASE("set and typed getters with fallbacks") {
  Options opt;
  opt.set("alpha", "2.5");
  opt.set("count", "7");
  opt.set("flag", "true");
  opt.set("name", "hal");
  CHECK(opt.has("alpha"));
  CHECK_FALSE(opt.has("beta"));
  CHECK(opt.get_double("alpha", 0.0) == 2.5);
  CHECK(opt.get_double("beta", -1.5) == -1.5);
  CHECK(opt.get_int("count", 0) == 7);
  CHECK(opt.get_bool("flag", false));
  CHECK_FALSE(opt.get_bool("missing", false));
  CHECK(opt.get_string("name", "x") == "hal");
  CHECK(opt.get_u64("count", 0) == 7u);
}

TEST_CASE("last set wins") {
  Options opt;
  opt.set("k", "1");
  opt.set("k", "2");
  CHECK(opt.get_int("k", 0) == 2);
}

TEST_CASE("get_list splits on commas") {
  Options opt;
  opt.set("families", "ss, ee ,tmle");
  const auto v = opt.get_list("families", {});
  REQUIRE(v.size() == 3);
  CHECK(v[0] == "ss");
  CHECK(v[1] == "ee");
  CHECK(v[2] == "tmle");
  const auto fallback = opt.get_list("absent", {"a", "b"});
  CHECK(fallback == std::vector<std::string>{"a", "b"});
}

TEST_CASE("malformed numerics throw") {
  Options opt;
  opt.set("alpha", "zebra");
  CHECK_THROWS(opt.get_double("alpha", 0.0));
  CHECK_THROWS(opt.get_int("alpha", 0));
}

TEST_CASE("load_file parses key = value with comments") {
  const auto path = std::filesystem::temp_directory_path() / "htevim_opt.conf";
  {
    std::ofstream out(path);
    out << "# a comment\n"
        << "hal.max_knots = 40\n"
        << "\n"
        << "outcome.learner=sl   \n"
        << "level = 0.9  # trailing comment\n";
  }
  Options opt;
  opt.load_file(path.string());
  CHECK(opt.get_int("hal.max_knots", 0) == 40);
  CHECK(opt.get_string("outcome.learner", "") == "sl");
  CHECK(opt.get_double("level", 0.0) == 0.9);
  std::filesystem::remove(path);
}

TEST_CASE("load_file keeps earlier values for other keys") {
  const auto path = std::filesystem::temp_directory_path() / "htevim_opt2.conf";
  {
    std::ofstream out(path);
    out << "a = 1\n";
  }
  Options opt;
  opt.set("b", "2");
  opt.load_file(path.string());
  CHECK(opt.get_int("a", 0) == 1);
  CHECK(opt.get_int("b", 0) == 2);
  std::filesystem::remove(path);
}

TEST_CASE("missing config file throws") {
  Options opt;
  CHECK_THROWS(opt.load_file("/nonexistent/htevim.conf"));
}

}  // TEST_SUITE
