#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "../support/fixtures.hpp"

using namespace brbvs;
using margin::Link;
using Catch::Approx;

namespace {

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

}  // namespace

TEST_CASE("baseline survival", "[simulator]") {
  CHECK(sim::baseline_survival(0.0) == 1.0);
  CHECK(sim::baseline_survival(1.0) == Approx(0.693772).epsilon(1e-6));
  CHECK(sim::baseline_survival(1.0) ==
        Approx(0.9 * std::exp(-0.4) + 0.1 * std::exp(-0.1)).epsilon(1e-15));
  double prev = 1.0;
  for (double t = 0.05; t <= 20.0; t += 0.05) {
    const double s = sim::baseline_survival(t);
    CHECK(s < prev);
    prev = s;
  }
  CHECK(sim::log_baseline_survival(30.0) == Approx(std::log(sim::baseline_survival(30.0))).epsilon(1e-12));
}

TEST_CASE("covariate correlation structure", "[simulator]") {
  Rng rng(12);
  const auto X = sim::gen_covariates(50000, 6, rng);
  CHECK(std::abs(correlation(X.col(0), X.col(1)) - 0.5) < 0.01);
  CHECK(std::abs(correlation(X.col(1), X.col(2)) - 0.5) < 0.01);
  CHECK(std::abs(correlation(X.col(3), X.col(4))) < 0.02);
  CHECK(std::abs(correlation(X.col(0), X.col(5))) < 0.02);
  for (Eigen::Index j = 0; j < 6; ++j) {
    const Eigen::VectorXd c = X.col(j).array() - X.col(j).mean();
    CHECK(std::abs(c.squaredNorm() / 49999.0 - 1.0) < 0.02);
  }
  Rng r2(1);
  CHECK_THROWS_AS(sim::gen_covariates(10, 2, r2), DomainError);
}

TEST_CASE("time inversion", "[simulator]") {
  CHECK(sim::invert_time(Link::PH, 1.0, 0.3) == 0.0);
  CHECK(sim::invert_time(Link::PH, 0.693772, 0.0) == Approx(1.0).epsilon(1e-5));
  CHECK(sim::invert_time(Link::PO, 0.693772, 0.0) == Approx(1.0).epsilon(1e-5));
  // PH with offset -1.5 by forward substitution
  const double t = sim::invert_time(Link::PH, 0.4, -1.5);
  CHECK(std::exp(-std::exp(std::log(-std::log(sim::baseline_survival(t))) - 1.5)) ==
        Approx(0.4).epsilon(1e-9));
  CHECK_THROWS_AS(sim::invert_time(Link::PO, 0.0, 0.0), DomainError);

  Rng rng(4);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double u = uniform(rng, 1e-6, 1.0);
    const double off = uniform(rng, -4.0, 4.0);
    const Link l = margin::kAllLinks[static_cast<std::size_t>(k % 3)];
    const double tt = sim::invert_time(l, u, off);
    worst = std::max(worst, std::abs(sim::transformed_survival(l, tt, off) - u));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("censoring rule", "[simulator]") {
  const auto a = sim::apply_censoring(3.0, 2.5);
  CHECK(a.time == 2.5);
  CHECK(a.code == Censor::Right);
  const auto b = sim::apply_censoring(1.0, 2.5);
  CHECK(b.time == 1.0);
  CHECK(b.code == Censor::Uncensored);
}

TEST_CASE("Clayton conditional draws", "[simulator]") {
  const double theta = std::exp(1.2);
  CHECK(theta == Approx(3.32012).epsilon(1e-6));
  CHECK(sim::clayton_conditional(0.3, 1.0, theta) == 1.0);
  // closed form of the inverse h-function
  for (double u : {0.2, 0.7})
    for (double w : {0.1, 0.5, 0.9}) {
      const double closed =
          std::pow((std::pow(w, -theta / (1 + theta)) - 1) * std::pow(u, -theta) + 1, -1 / theta);
      CHECK(sim::clayton_conditional(u, w, theta) == Approx(closed).epsilon(1e-9));
    }
  Rng rng(77);
  std::vector<double> a, b;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform(rng, 1e-12, 1.0), w = uniform(rng, 1e-12, 1.0);
    a.push_back(u);
    b.push_back(sim::clayton_conditional(u, w, theta));
  }
  CHECK(std::abs(stats::kendall_tau(a, b) - theta / (theta + 2)) < 0.01);
}

TEST_CASE("generation is reproducible and carries truths", "[simulator]") {
  auto c = fixtures::small_scenario(300, 5, 42);
  const auto a = sim::generate(c);
  const auto b = sim::generate(c);
  CHECK(a.data == b.data);
  CHECK(a.t1_true == b.t1_true);
  CHECK(a.s1 == std::vector<std::string>{"x1", "x2"});
  CHECK(a.s2 == std::vector<std::string>{"x1", "x2", "x3"});
  c.seed = 43;
  CHECK_FALSE(sim::generate(c).data == a.data);
  for (std::size_t i = 0; i < a.data.n(); ++i) {
    CHECK((a.data.cens1[i] == Censor::Uncensored || a.data.cens1[i] == Censor::Right));
    if (a.data.cens1[i] == Censor::Uncensored) CHECK(a.data.t1_lower[i] == a.t1_true[i]);
    else CHECK(a.data.t1_lower[i] < a.t1_true[i]);
  }
}

TEST_CASE("generated times reproduce the uniform draws", "[simulator]") {
  auto c = fixtures::small_scenario(500, 3, 8);
  const auto s = sim::generate(c);
  // forward substitution: S1(t1 | x) must be uniform, checked through its mean and range
  double mean = 0.0;
  for (std::size_t i = 0; i < s.data.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double off = -1.5 * s.data.X(r, 0) + 1.7 * s.data.X(r, 1);
    const double u = sim::transformed_survival(Link::PH, s.t1_true[i], off);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  CHECK(mean / 500.0 == Approx(0.5).margin(0.04));
  CHECK(stats::kendall_tau(s.t1_true, s.t2_true) > 0.0);
}

TEST_CASE("Scenario B dependence varies by unit", "[simulator]") {
  auto c = fixtures::small_scenario(5000, 3, 3);
  c.scenario = 'B';
  const auto s = sim::generate(c);
  std::vector<double> tau;
  for (double th : s.theta) tau.push_back(th / (th + 2));
  std::sort(tau.begin(), tau.end());
  CHECK(tau[tau.size() / 20] < 0.15);
  CHECK(tau[tau.size() - tau.size() / 20] > 0.85);
  CHECK(tau.front() > 0.0);
  c.scenario = 'C';
  CHECK_THROWS_AS(sim::generate(c), DomainError);
}

TEST_CASE("selection accuracy summaries", "[simulator]") {
  const std::vector<std::string> s{"x1", "x2"};
  const auto one = sim::evaluate_margin({{"x1", "x2", "x5"}}, s);
  CHECK(one.fp == 1.0);
  CHECK(one.fn == 0.0);
  CHECK(one.overlap == 2.0);
  CHECK(one.contains == 1.0);
  CHECK(one.exact == 0.0);

  std::vector<sim::SelectionOutcome> perfect(4, {{"x1", "x2"}, {"x1", "x2", "x3"}});
  const auto r = sim::evaluate(perfect, s, {"x1", "x2", "x3"});
  CHECK(r.margin1.fp == 0.0);
  CHECK(r.margin2.fn == 0.0);
  CHECK(r.margin1.size == 2.0);
  CHECK(r.margin2.size == 3.0);

  const auto mixed = sim::evaluate_margin({{"x1", "x2"}, {"x1", "x2"}, {"x1", "x2", "x7"}}, s);
  CHECK(mixed.fp == Approx(1.0 / 3.0));
  CHECK(mixed.exact == Approx(2.0 / 3.0));
  const auto missing = sim::evaluate_margin({{"x1"}}, s);
  CHECK(missing.fn == 1.0);
  CHECK(missing.contains == 0.0);
}
