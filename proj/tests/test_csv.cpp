#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "slicekit/csv.hpp"
#include "slicekit/special.hpp"

using namespace slicekit;
using Catch::Matchers::ContainsSubstring;

namespace {

// Unique temp path per test file; removed by the cases that create it.
std::string tmp_path(const std::string& name) {
  return std::string("/tmp/slicekit_csv_") + name;
}

}  // namespace

TEST_CASE("csv_num formats specials and round-trips doubles", "[csv]") {
  CHECK(csv_num(kNaN) == "nan");
  CHECK(csv_num(kInf) == "inf");
  CHECK(csv_num(-kInf) == "-inf");
  CHECK(csv_num(0.0) == "0");
  CHECK(csv_num(2.0) == "2");
  CHECK(csv_num(0.1) == "0.1");
  for (double v : {1.0 / 3.0, 3.0e-17, -123456.789, 2.2250738585072014e-308}) {
    const std::string s = csv_num(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv_quote escapes only when needed", "[csv]") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("") == "");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("csv_row joins cells and terminates the line", "[csv]") {
  CHECK(csv_row({"a", "b,c", "d"}) == "a,\"b,c\",d\n");
  CHECK(csv_row({}) == "\n");
  CHECK(csv_row({"only"}) == "only\n");
}

TEST_CASE("write_text_file and read_column round trip", "[csv]") {
  const std::string path = tmp_path("roundtrip.txt");
  write_text_file(path, "1.5\n\n  2.25 \n-3e2\r\n");
  const std::vector<double> vals = read_column(path);
  REQUIRE(vals.size() == 3);
  CHECK(vals[0] == 1.5);
  CHECK(vals[1] == 2.25);
  CHECK(vals[2] == -300.0);
  std::remove(path.c_str());
}

TEST_CASE("read_column reports bad tokens with line numbers", "[csv]") {
  const std::string path = tmp_path("bad.txt");
  write_text_file(path, "1.0\n2.0\noops\n");
  CHECK_THROWS_WITH(read_column(path), ContainsSubstring(":3: not a number: 'oops'"));
  std::remove(path.c_str());
}

TEST_CASE("read_column rejects empty and missing files", "[csv]") {
  const std::string path = tmp_path("empty.txt");
  write_text_file(path, "\n  \n");
  CHECK_THROWS_WITH(read_column(path), ContainsSubstring("no data"));
  std::remove(path.c_str());
  CHECK_THROWS_WITH(read_column("/tmp/slicekit_csv_does_not_exist.txt"),
                    ContainsSubstring("cannot open"));
}

TEST_CASE("write_text_file fails loudly on unwritable paths", "[csv]") {
  CHECK_THROWS_WITH(write_text_file("/nonexistent_dir_xyz/file.txt", "x"),
                    ContainsSubstring("cannot open"));
}
