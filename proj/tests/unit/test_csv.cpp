#include <doctest.h>

#include <sstream>

#include "hetcache/csv.hpp"

using namespace hetcache;

TEST_CASE("number formatting round trips") {
  CHECK(csv::format(0.1) == "0.1");
  CHECK(std::stod(csv::format(1e6)) == 1e6);
  CHECK(csv::format(-2.5) == "-2.5");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(csv::format(third)) == third);
}

TEST_CASE("writer quotes only when needed") {
  std::ostringstream out;
  csv::Writer w(out, {"a", "b", "c"});
  w.row({1.5, std::int64_t{-3}, std::string("x,y")});
  w.row({std::uint64_t{7}, 0.0, std::string("say \"hi\"")});
  CHECK(out.str() == "a,b,c\n1.5,-3,\"x,y\"\n7,0,\"say \"\"hi\"\"\"\n");
}

TEST_CASE("row width is checked") {
  std::ostringstream out;
  csv::Writer w(out, std::vector<std::string>{"a", "b"});
  CHECK_THROWS(w.row({1.0}));
}

TEST_CASE("split_line undoes quoting") {
  const auto f = csv::split_line("1,\"x,y\",\"say \"\"hi\"\"\",");
  REQUIRE(f.size() == 4);
  CHECK(f[1] == "x,y");
  CHECK(f[2] == "say \"hi\"");
  CHECK(f[3].empty());
}
