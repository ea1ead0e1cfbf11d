#include "doctest.h"

#include "battlemix/error.hpp"
#include "battlemix/text.hpp"
#include "support.hpp"

using namespace battlemix;

TEST_SUITE("text") {
  TEST_CASE("split keeps empty fields") {
    const auto f = text::split("a;;b;", ';');
    REQUIRE(f.size() == 4);
    CHECK(f[0] == "a");
    CHECK(f[1].empty());
    CHECK(f[3].empty());
  }

  TEST_CASE("integer and double parsing reject trailing garbage") {
    CHECK(text::to_int("-42") == -42);
    CHECK_FALSE(text::to_int("42x").has_value());
    CHECK_FALSE(text::to_int("").has_value());
    CHECK(text::to_double("0.25") == doctest::Approx(0.25));
    CHECK_FALSE(text::to_double("1.0.0").has_value());
  }

  TEST_CASE("shortest double formatting round-trips") {
    for (const double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0625}) {
      CHECK(text::to_double(text::format_double(v)) == v);
    }
    CHECK(text::format_fixed(63.249, 1) == "63.2");
  }

  TEST_CASE("records skip comments and report 1-based line numbers") {
    std::vector<std::size_t> lines;
    std::vector<std::string> bodies;
    text::for_each_record("# c\na\n\nb\n", [&](std::size_t n, std::string_view body) {
      lines.push_back(n);
      bodies.emplace_back(body);
    });
    CHECK(lines == std::vector<std::size_t>{2, 4});
    CHECK(bodies == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("missing file names the path") {
    try {
      text::read_file("/nonexistent/dir/file.csv");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
      CHECK(std::string(e.what()).find("/nonexistent/dir/file.csv") != std::string::npos);
    }
  }

  TEST_CASE("write_file creates parent directories") {
    testing::TempDir dir;
    text::write_file(dir / "a/b/c.txt", "hello");
    CHECK(text::read_file(dir / "a/b/c.txt") == "hello");
  }

  TEST_CASE("fnv1a matches published test vectors") {
    CHECK(text::fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(text::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(text::hex64(0xabcULL) == "0000000000000abc");
  }
}
