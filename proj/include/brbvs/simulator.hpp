// Data-generating process for bivariate right-censored survival times: a
// two-component baseline survival, linear covariate effects on the link scale,
// Clayton dependence between the margins and uniform censoring windows.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <Eigen/Dense>

#include "brbvs/copula.hpp"
#include "brbvs/data.hpp"
#include "brbvs/errors.hpp"
#include "brbvs/margin.hpp"
#include "brbvs/rng.hpp"

namespace brbvs::sim {

inline double baseline_survival(double t) {
  return 0.9 * std::exp(-0.4 * std::pow(t, 2.5)) + 0.1 * std::exp(-0.1 * t);
}

/// 1 - S0(t) without cancellation near t = 0.
inline double baseline_failure(double t) {
  return -(0.9 * std::expm1(-0.4 * std::pow(t, 2.5)) + 0.1 * std::expm1(-0.1 * t));
}

inline double log_baseline_survival(double t) {
  const double F = baseline_failure(t);
  if (F < 0.5) return std::log1p(-F);
  const double a = std::log(0.9) - 0.4 * std::pow(t, 2.5);
  const double b = std::log(0.1) - 0.1 * t;
  return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

/// g(S0(t)) for each link, without cancellation at either end.
inline double baseline_eta(margin::Link l, double t) {
  const double F = baseline_failure(t);
  const double log_s0 = log_baseline_survival(t);
  switch (l) {
    case margin::Link::PH: return std::log(-log_s0);
    case margin::Link::PO: return std::log(F) - log_s0;
    case margin::Link::Probit: return F < 0.5 ? math::norm_quantile(F) : -math::norm_quantile(std::exp(log_s0));
  }
  return 0.0;
}

/// S(t | z) = G(g(S0(t)) + offset).
inline double transformed_survival(margin::Link l, double t, double offset) {
  if (t <= 0.0) return 1.0;
  return margin::link_inverse(l, baseline_eta(l, t) + offset);
}

/// Time t with S(t | z) = u, solved on the link scale in log t. The upper
/// bracket starts at 8 and is widened up to 1e6.
inline double invert_time(margin::Link l, double u, double offset) {
  if (!(u > 0.0 && u <= 1.0)) throw DomainError("invert_time needs u in (0, 1]");
  if (u == 1.0) return 0.0;
  const double target = margin::link_eval(l, u) - offset;
  auto f = [&](double x) { return baseline_eta(l, std::exp(x)) - target; };
  double hi = std::log(8.0), lo = std::log(1e-3);
  while (f(hi) < 0.0) {
    hi += std::log(2.0);
    if (hi > std::log(1e6)) throw NumericError("invert_time: no bracket below t = 1e6 for u = " + std::to_string(u));
  }
  while (f(lo) > 0.0) {
    lo -= 2.0;
    if (lo < -700.0) return 0.0;
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi),
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
  const double t = std::exp(0.5 * (a + b));
  const double resid = transformed_survival(l, t, offset) - u;
  if (!(std::abs(resid) < 1e-10))
    throw NumericError("invert_time: residual " + std::to_string(resid) + " at u = " + std::to_string(u));
  return t;
}

/// Clayton conditional draw u' given u and a uniform w.
inline double clayton_conditional(double u, double w, double theta) {
  return copula::conditional_sample(copula::Family::Clayton, u, w, theta);
}

struct Censored {
  double time = 0.0;
  Censor code = Censor::Uncensored;
};

/// Right-censored at c2 when the event falls after it.
inline Censored apply_censoring(double t, double c2) {
  return t > c2 ? Censored{c2, Censor::Right} : Censored{t, Censor::Uncensored};
}

inline Censored apply_censoring(double t, Rng& rng) {
  const double c1 = uniform(rng, 0.0, 2.0);
  const double c2 = c1 + uniform(rng, 0.0, 6.0);
  return apply_censoring(t, c2);
}

/// x1..x3 ~ N3(0, Sigma) with unit variances and correlation 0.5; the rest N(0, 1).
inline Eigen::MatrixXd gen_covariates(std::size_t n, std::size_t p, Rng& rng) {
  if (p < 3) throw DomainError("at least three covariates are required");
  Eigen::Matrix3d sigma = Eigen::Matrix3d::Constant(0.5);
  sigma.diagonal().setOnes();
  const Eigen::Matrix3d L = sigma.llt().matrixL();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Vector3d z;
    for (int j = 0; j < 3; ++j) z[j] = standard_normal(rng);
    X.row(i).head<3>() = (L * z).transpose();
    for (Eigen::Index j = 3; j < X.cols(); ++j) X(i, j) = standard_normal(rng);
  }
  return X;
}

struct SimConfig {
  std::size_t n = 600;
  std::size_t p = 20;
  char scenario = 'A';
  std::vector<double> beta1 = {-1.5, 1.7};       // on x1, x2, ...
  std::vector<double> beta2 = {-1.5, 0.0, -1.3};  // on x1, x2, x3, ...
  double beta30 = 1.2;                           // scenario A
  std::array<double, 3> beta3 = {-1.5, 1.7, -1.5};  // scenario B, on x1..x3
  margin::Link link1 = margin::Link::PH;
  margin::Link link2 = margin::Link::PO;
  std::uint64_t seed = 1;

  void validate() const {
    if (p < 3) throw DomainError("simulation needs p >= 3");
    if (n < 1) throw DomainError("simulation needs n >= 1");
    if (scenario != 'A' && scenario != 'B') throw DomainError("scenario must be A or B");
    if (beta1.size() > p || beta2.size() > p)
      throw DomainError("more coefficients than covariates");
  }
};

struct SimResult {
  Dataset data;
  std::vector<double> t1_true, t2_true;
  std::vector<double> theta;  // per unit
  std::vector<std::string> s1, s2;
  double cens_rate1 = 0.0, cens_rate2 = 0.0;
};

inline std::vector<std::string> covariate_names(std::size_t p) {
  std::vector<std::string> n;
  for (std::size_t j = 1; j <= p; ++j) n.push_back("x" + std::to_string(j));
  return n;
}

/// Relevant covariates: margin 1 through its coefficients, margin 2 through
/// its own and, via the dependence on T1, those of margin 1.
inline std::pair<std::vector<std::string>, std::vector<std::string>> truth_sets(const SimConfig& c) {
  std::set<std::size_t> a, b;
  for (std::size_t j = 0; j < c.beta1.size(); ++j)
    if (c.beta1[j] != 0.0) a.insert(j), b.insert(j);
  for (std::size_t j = 0; j < c.beta2.size(); ++j)
    if (c.beta2[j] != 0.0) b.insert(j);
  const auto names = covariate_names(c.p);
  std::vector<std::string> s1, s2;
  for (auto j : a) s1.push_back(names[j]);
  for (auto j : b) s2.push_back(names[j]);
  return {s1, s2};
}

inline SimResult generate(const SimConfig& cfg) {
  cfg.validate();
  Rng rx(derive_seed(cfg.seed, 0)), ru(derive_seed(cfg.seed, 1)), rw(derive_seed(cfg.seed, 2)),
      rc1(derive_seed(cfg.seed, 3)), rc2(derive_seed(cfg.seed, 4));
  SimResult r;
  Dataset& d = r.data;
  d.names = covariate_names(cfg.p);
  d.X = gen_covariates(cfg.n, cfg.p, rx);
  std::tie(r.s1, r.s2) = truth_sets(cfg);
  std::size_t right1 = 0, right2 = 0;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto row = d.X.row(static_cast<Eigen::Index>(i));
    double off1 = 0.0, off2 = 0.0;
    for (std::size_t j = 0; j < cfg.beta1.size(); ++j) off1 += cfg.beta1[j] * row[static_cast<Eigen::Index>(j)];
    for (std::size_t j = 0; j < cfg.beta2.size(); ++j) off2 += cfg.beta2[j] * row[static_cast<Eigen::Index>(j)];
    const double eta3 = cfg.scenario == 'A'
                            ? cfg.beta30
                            : cfg.beta3[0] * row[0] + cfg.beta3[1] * row[1] + cfg.beta3[2] * row[2];
    const double theta = std::exp(eta3);

    // Uniform draws on the open interval; 0 would map to t = infinity.
    double u = uniform(ru);
    while (u <= 0.0) u = uniform(ru);
    double w = uniform(rw);
    while (w <= 0.0) w = uniform(rw);
    const double u2 = std::max(clayton_conditional(u, w, theta), std::numeric_limits<double>::min());

    const double t1 = invert_time(cfg.link1, u, off1);
    const double t2 = invert_time(cfg.link2, u2, off2);
    const auto c1 = apply_censoring(t1, rc1);
    const auto c2 = apply_censoring(t2, rc2);
    r.t1_true.push_back(t1);
    r.t2_true.push_back(t2);
    r.theta.push_back(theta);
    d.t1_lower.push_back(c1.time);
    d.t1_upper.push_back(std::nullopt);
    d.cens1.push_back(c1.code);
    d.t2_lower.push_back(c2.time);
    d.t2_upper.push_back(std::nullopt);
    d.cens2.push_back(c2.code);
    right1 += c1.code == Censor::Right;
    right2 += c2.code == Censor::Right;
  }
  r.cens_rate1 = static_cast<double>(right1) / static_cast<double>(cfg.n);
  r.cens_rate2 = static_cast<double>(right2) / static_cast<double>(cfg.n);
  d.validate();
  return r;
}

/// Per-margin selection accuracy averaged over replicates.
struct MarginEval {
  double fp = 0.0;          // mean count wrongly selected
  double fn = 0.0;          // mean count wrongly discarded
  double size = 0.0;        // mean |s_hat|
  double overlap = 0.0;     // mean |s_hat & s|
  double contains = 0.0;    // fraction with s contained in s_hat
  double exact = 0.0;       // fraction with s_hat == s
};

struct EvalReport {
  std::size_t replicates = 0;
  MarginEval margin1, margin2;
};

struct SelectionOutcome {
  std::vector<std::string> s1, s2;
};

inline MarginEval evaluate_margin(const std::vector<std::vector<std::string>>& selected,
                                  const std::vector<std::string>& truth) {
  MarginEval e;
  if (selected.empty()) return e;
  const std::set<std::string> s(truth.begin(), truth.end());
  for (const auto& sel : selected) {
    const std::set<std::string> hat(sel.begin(), sel.end());
    std::size_t inter = 0;
    for (const auto& v : hat) inter += s.count(v);
    e.fp += static_cast<double>(hat.size() - inter);
    e.fn += static_cast<double>(s.size() - inter);
    e.size += static_cast<double>(hat.size());
    e.overlap += static_cast<double>(inter);
    e.contains += inter == s.size() ? 1.0 : 0.0;
    e.exact += (inter == s.size() && hat.size() == s.size()) ? 1.0 : 0.0;
  }
  const double k = static_cast<double>(selected.size());
  e.fp /= k;
  e.fn /= k;
  e.size /= k;
  e.overlap /= k;
  e.contains /= k;
  e.exact /= k;
  return e;
}

inline EvalReport evaluate(const std::vector<SelectionOutcome>& runs,
                           const std::vector<std::string>& s1,
                           const std::vector<std::string>& s2) {
  EvalReport r;
  r.replicates = runs.size();
  std::vector<std::vector<std::string>> a, b;
  for (const auto& o : runs) {
    a.push_back(o.s1);
    b.push_back(o.s2);
  }
  r.margin1 = evaluate_margin(a, s1);
  r.margin2 = evaluate_margin(b, s2);
  return r;
}

}  // namespace brbvs::sim
