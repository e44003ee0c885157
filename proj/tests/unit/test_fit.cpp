#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "../support/fixtures.hpp"

using namespace brbvs;
using copula::Family;
using margin::Link;
using Catch::Approx;

namespace {

ModelSpec informative_spec() {
  ModelSpec s;
  s.copula = Family::Clayton;
  s.link1 = Link::PH;
  s.link2 = Link::PO;
  s.eta1 = {"x1", "x2"};
  s.eta2 = {"x1", "x3"};
  return s;
}

}  // namespace

TEST_CASE("information criteria by hand", "[fit]") {
  CHECK(aic_value(-100.0, 5.0) == Approx(210.0));
  CHECK(bic_value(-100.0, 5.0, std::exp(2.0)) == Approx(210.0));
  FitCore f;
  f.loglik = -50.0;
  f.edf = 3.5;
  f.n = 100;
  CHECK(f.aic() == Approx(107.0));
  CHECK(f.bic() == Approx(100.0 + std::log(100.0) * 3.5));
}

TEST_CASE("standard errors from the inverse information", "[fit]") {
  FitCore f;
  f.delta = Eigen::VectorXd::Zero(2);
  f.info.resize(2, 2);
  f.info << 4.0, 1.0, 1.0, 2.0;
  // inverse = [2 -1; -1 4] / 7
  const Eigen::VectorXd se = f.standard_errors();
  CHECK(se[0] == Approx(std::sqrt(2.0 / 7.0)));
  CHECK(se[1] == Approx(std::sqrt(4.0 / 7.0)));
}

TEST_CASE("coefficient rows", "[fit]") {
  const auto r = coef_row("x1", 0.5, 0.25);
  CHECK(r.z == Approx(2.0));
  CHECK(r.p == Approx(std::erfc(std::numbers::sqrt2)).epsilon(1e-12));
  CHECK(r.p == Approx(0.04550026389635842).epsilon(1e-10));
}

TEST_CASE("effective degrees of freedom", "[fit]") {
  const Eigen::MatrixXd info = Eigen::Vector3d(2.0, 4.0, 5.0).asDiagonal();
  const Eigen::MatrixXd P = Eigen::Vector3d(0.0, 1.0, 0.0).asDiagonal();
  // 3 - 1/4
  CHECK(fit_detail::effective_df(info, P) == Approx(2.75));
  CHECK(fit_detail::effective_df(info, Eigen::MatrixXd::Zero(3, 3)) == Approx(3.0));
}

TEST_CASE("Scenario A fit recovers the generating effects", "[fit]") {
  auto cfg = fixtures::small_scenario(1000, 5, 7);
  const auto s = sim::generate(cfg);
  const auto fm = fit_model(informative_spec(), s.data);
  REQUIRE(fm.converged());
  const auto b1 = fm.beta(1), b2 = fm.beta(2);
  const Eigen::VectorXd se = fm.standard_errors();
  auto se_of = [&](int which, std::size_t j) {
    const Block& b = which == 1 ? fm.layout.beta1 : fm.layout.beta2;
    return se[static_cast<Eigen::Index>(b.offset + j)];
  };
  CHECK(std::abs(b1[0] + 1.5) < 4 * se_of(1, 0));
  CHECK(std::abs(b1[1] - 1.7) < 4 * se_of(1, 1));
  CHECK(std::abs(b2[0] + 1.5) < 4 * se_of(2, 0));
  CHECK(std::abs(b2[1] + 1.3) < 4 * se_of(2, 1));
  CHECK(fm.theta > 2.0);
  CHECK(fm.theta < 5.5);
  CHECK(fm.theta_lo < fm.theta);
  CHECK(fm.theta_hi > fm.theta);
  CHECK(fm.kendall_tau == Approx(fm.theta / (fm.theta + 2)).epsilon(1e-10));
  CHECK(fm.edf > 0.0);
  CHECK(fm.edf <= static_cast<double>(fm.delta.size()) + 1e-9);
}

TEST_CASE("duplicated data keeps the estimate and doubles the log-likelihood", "[fit]") {
  // ridge off so the penalty does not weigh differently against 2n units
  auto cfg = fixtures::small_scenario(400, 3, 11);
  const auto s = sim::generate(cfg);
  std::vector<std::size_t> idx;
  for (int r = 0; r < 2; ++r)
    for (std::size_t i = 0; i < s.data.n(); ++i) idx.push_back(i);
  const auto dd = s.data.rows(idx);
  auto spec = informative_spec();
  spec.ridge = 0.0;
  // same knots on both copies
  const JointModel ma(spec, s.data);
  const JointModel mb(spec, dd, std::make_pair(ma.baseline1(), ma.baseline2()));
  OptimOptions opt;
  opt.gradient_tol = 1e-9;
  const Eigen::VectorXd start = default_start(ma, s.data, true, opt);
  const auto a = fit_detail::run(ma.likelihood(), start, opt, ma.parameter_names());
  const auto b = fit_detail::run(mb.likelihood(), start, opt, mb.parameter_names());
  REQUIRE(a.converged());
  REQUIRE(b.converged());
  CHECK((a.delta - b.delta).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(b.loglik == Approx(2 * a.loglik).epsilon(1e-8));
}

TEST_CASE("Clayton dependence on uncensored pairs matches the sample tau", "[fit]") {
  auto cfg = fixtures::small_scenario(1500, 3, 5);
  auto s = sim::generate(cfg);
  // strip censoring: exact times from the generator
  auto& d = s.data;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < d.n(); ++i)
    if (d.cens1[i] == Censor::Uncensored && d.cens2[i] == Censor::Uncensored) keep.push_back(i);
  const auto u = d.rows(keep);
  ModelSpec spec;
  spec.copula = Family::Clayton;
  spec.link1 = Link::PH;
  spec.link2 = Link::PO;
  const auto fm = fit_model(spec, u);
  REQUIRE(fm.converged());
  const double sample = stats::kendall_tau(u.t1_lower, u.t2_lower);
  CHECK(std::abs(fm.kendall_tau - sample) < 0.05);
}

TEST_CASE("summary collects the equations", "[fit]") {
  auto cfg = fixtures::small_scenario(400, 3, 2);
  const auto s = sim::generate(cfg);
  const auto fm = fit_model(informative_spec(), s.data);
  const auto sum = summarize(fm);
  CHECK(sum.copula == copula::name(Family::Clayton));
  REQUIRE(sum.eta1.size() == 2);
  CHECK(sum.eta1[0].name == "x1");
  REQUIRE(sum.eta3.size() == 1);
  CHECK(sum.eta3[0].name == "(Intercept)");
  CHECK(sum.aic == Approx(fm.aic()));
  CHECK(sum.n == 400);
}

TEST_CASE("margin-only fit", "[fit]") {
  auto cfg = fixtures::small_scenario(600, 3, 4);
  const auto s = sim::generate(cfg);
  const std::vector<std::string> cov{"x1", "x2"};
  const auto mf = fit_margin(s.data, 1, Link::PH, cov, 8, 1e-4, {});
  REQUIRE(mf.converged());
  const auto b = mf.delta.segment(static_cast<Eigen::Index>(mf.beta_block.offset), 2);
  CHECK(b[0] < -0.8);
  CHECK(b[1] > 0.9);
  CHECK(mf.names.back() == "x2");
}

TEST_CASE("wrong start length is rejected", "[fit]") {
  auto cfg = fixtures::small_scenario(200, 3, 4);
  const auto s = sim::generate(cfg);
  FitOptions fo;
  fo.start = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(fit_model(informative_spec(), s.data, fo), DomainError);
}
