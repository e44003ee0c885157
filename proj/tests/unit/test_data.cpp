#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "../support/fixtures.hpp"

using namespace brbvs;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

Dataset parse(const std::string& text, const ColumnSchema& schema = {}) {
  std::istringstream in(text);
  return parse_dataset(in, schema);
}

}  // namespace

TEST_CASE("interval and right-censored rows", "[data]") {
  const auto d = parse(
      "t11,t12,t21,t22,cens1,cens2,cens,SevScale1E\n"
      "0.0001,2.0,2.0,3.0,I,I,II,3\n"
      "10.0,NA,10.0,NA,R,R,RR,1\n");
  REQUIRE(d.n() == 2);
  CHECK(d.cens1[0] == Censor::Interval);
  CHECK(d.t1_lower[0] == 0.0001);
  CHECK(*d.t1_upper[0] == 2.0);
  CHECK(d.cens1[1] == Censor::Right);
  CHECK(d.t1_lower[1] == 10.0);
  CHECK_FALSE(d.t1_upper[1].has_value());
  CHECK(d.names == std::vector<std::string>{"SevScale1E"});
  CHECK(d.combined_code(0) == "II");
}

TEST_CASE("unknown censor code names row and column", "[data]") {
  try {
    parse("t11,t12,t21,t22,cens1,cens2\n1,NA,1,NA,Q,U\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("unknown censor code"));
    CHECK_THAT(e.what(), ContainsSubstring("cens1"));
  }
}

TEST_CASE("malformed rows are rejected", "[data]") {
  const std::string head = "t11,t12,t21,t22,cens1,cens2,x\n";
  CHECK_THROWS_AS(parse(head + "1,NA,1,NA,I,U,0\n"), ParseError);     // interval without upper
  CHECK_THROWS_AS(parse(head + "1,NA,1,NA,U,U,abc\n"), ParseError);   // non-numeric covariate
  CHECK_THROWS_AS(parse(head + "2,1,1,NA,I,U,0\n"), ParseError);      // upper below lower
  CHECK_THROWS_AS(parse(head + "0,NA,1,NA,U,U,0\n"), ParseError);     // event at zero
  CHECK_THROWS_AS(parse(head + "1,NA,1,NA,U,U\n"), ParseError);       // short row
  CHECK_THROWS_AS(parse("a,b\n1,2\n"), ParseError);                   // missing columns
}

TEST_CASE("custom column names", "[data]") {
  ColumnSchema s;
  s.t11 = "L1";
  s.t12 = "U1";
  s.t21 = "L2";
  s.t22 = "U2";
  s.cens1 = "c1";
  s.cens2 = "c2";
  s.ignore = {"id"};
  const auto d = parse("id,L1,U1,L2,U2,c1,c2,z\n7,1.5,NA,0.5,1.0,U,I,2\n", s);
  CHECK(d.names == std::vector<std::string>{"z"});
  CHECK(d.cens2[0] == Censor::Interval);
  CHECK(*d.t2_upper[0] == 1.0);
}

TEST_CASE("CSV round trip", "[data]") {
  const auto d = fixtures::mixed_dataset(40, 5);
  std::ostringstream out;
  write_csv(out, d);
  const auto back = parse(out.str());
  CHECK(back == d);
}

TEST_CASE("standardization", "[data]") {
  Dataset d;
  d.names = {"a", "b"};
  d.X.resize(3, 2);
  d.X << 1, 5, 2, 5, 3, 5;
  for (int i = 0; i < 3; ++i) {
    d.t1_lower.push_back(1);
    d.t2_lower.push_back(1);
    d.t1_upper.push_back(std::nullopt);
    d.t2_upper.push_back(std::nullopt);
    d.cens1.push_back(Censor::Uncensored);
    d.cens2.push_back(Censor::Uncensored);
  }
  const std::vector<std::string> a{"a"};
  const auto s = standardize(d, a);
  CHECK(s.X(0, 0) == Approx(-1.0));
  CHECK(s.X(1, 0) == Approx(0.0).margin(1e-15));
  CHECK(s.X(2, 0) == Approx(1.0));
  const auto again = standardize(s, a);
  CHECK((again.X - s.X).cwiseAbs().maxCoeff() < 1e-12);
  const std::vector<std::string> b{"b"};
  CHECK_THROWS_AS(standardize(d, b), DomainError);
}

TEST_CASE("disjoint subsamples", "[data]") {
  Rng rng(3);
  const auto s = draw_subsamples(629, 314, rng);
  REQUIRE(s.size() == 2);
  std::set<std::size_t> all;
  for (const auto& part : s) {
    CHECK(part.size() == 314);
    all.insert(part.begin(), part.end());
  }
  CHECK(all.size() == 628);

  Rng r2(9);
  const auto full = draw_subsamples(4, 4, r2);
  REQUIRE(full.size() == 1);
  auto sorted = full[0];
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3});

  Rng a(42), b(42);
  CHECK(draw_subsamples(100, 30, a) == draw_subsamples(100, 30, b));
  Rng c(1);
  CHECK_THROWS_AS(draw_subsamples(10, 11, c), DomainError);
}

TEST_CASE("row selection keeps duplicates", "[data]") {
  const auto d = fixtures::mixed_dataset(12, 1);
  const std::vector<std::size_t> idx{3, 3, 0};
  const auto r = d.rows(idx);
  CHECK(r.n() == 3);
  CHECK(r.t1_lower[0] == d.t1_lower[3]);
  CHECK(r.t1_lower[1] == d.t1_lower[3]);
  CHECK(r.X.row(2) == d.X.row(0));
}
