// Maximum penalized likelihood fits of the joint model and of single margins,
// information criteria and coefficient summaries.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "brbvs/likelihood.hpp"
#include "brbvs/optimizer.hpp"
#include "brbvs/stats.hpp"

namespace brbvs {

struct FitOptions {
  OptimOptions optim;
  bool univariate_start = true;  // start margins from copula-free fits
  std::optional<Eigen::VectorXd> start;
};

inline double aic_value(double loglik, double edf) { return -2.0 * loglik + 2.0 * edf; }
inline double bic_value(double loglik, double edf, double n) {
  return -2.0 * loglik + std::log(n) * edf;
}

/// Quantities shared by joint and single-margin fits.
struct FitCore {
  Eigen::VectorXd delta;
  std::vector<std::string> names;
  double loglik = 0.0;      // unpenalized
  Eigen::MatrixXd info;     // negative Hessian of the penalized objective
  double edf = 0.0;
  std::size_t n = 0;
  OptimReport report;
  std::vector<std::string> warnings;

  double aic() const { return aic_value(loglik, edf); }
  double bic() const { return bic_value(loglik, edf, static_cast<double>(n)); }
  bool converged() const { return report.converged; }

  /// sqrt(diag(info^-1)); NaN where the information is singular.
  Eigen::VectorXd standard_errors() const {
    const auto p = delta.size();
    Eigen::VectorXd se = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    if (p == 0) return se;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success) return se;
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    for (Eigen::Index j = 0; j < p; ++j) se[j] = cov(j, j) > 0.0 ? std::sqrt(cov(j, j)) : se[j];
    return se;
  }
};

inline double aic(const FitCore& f) { return f.aic(); }
inline double bic(const FitCore& f) { return f.bic(); }

namespace fit_detail {

/// edf = p - tr(info^-1 P): total parameters less the ridge shrinkage.
inline double effective_df(const Eigen::MatrixXd& info, const Eigen::MatrixXd& penalty) {
  const auto p = static_cast<double>(info.rows());
  if (info.rows() == 0) return 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  if (ldlt.info() != Eigen::Success) return p;
  const double shrink = ldlt.solve(penalty).trace();
  if (!std::isfinite(shrink)) return p;
  return p - shrink;
}

template <class Lik>
Objective penalized_objective(const Lik& lik) {
  Objective obj;
  obj.value_gradient = [&lik](const Eigen::VectorXd& x, double& v, Eigen::VectorXd& g) {
    if (!lik.value_gradient_nothrow(x, v, g)) return false;
    v -= lik.penalty(x);
    g -= lik.penalty_gradient(x);
    return std::isfinite(v);
  };
  obj.hessian = [&lik](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return lik.hessian(x) - lik.penalty_matrix();
  };
  return obj;
}

template <class Lik>
FitCore run(const Lik& lik, const Eigen::VectorXd& start, const OptimOptions& opt,
            std::vector<std::string> names) {
  FitCore core;
  auto res = maximize(penalized_objective(lik), start, opt);
  core.delta = res.x;
  core.names = std::move(names);
  core.loglik = lik.value_nothrow(res.x);
  core.info = -res.hessian;
  core.edf = effective_df(core.info, lik.penalty_matrix());
  core.n = lik.units();
  core.report = res.report;
  if (!core.report.converged)
    core.warnings.push_back("optimizer did not converge (" + core.report.stop_reason +
                            ", max|gradient| = " + std::to_string(core.report.max_abs_gradient) + ")");
  if (core.n < 10 * static_cast<std::size_t>(core.delta.size()))
    core.warnings.push_back("fewer than 10 units per parameter (" + std::to_string(core.n) +
                            " units, " + std::to_string(core.delta.size()) + " parameters)");
  return core;
}

/// Baseline raw parameters of a straight line in log-time: median at S = 1/2
/// and slope 1/sd, read off at the Greville abscissae.
inline std::vector<double> linear_baseline_start(const margin::MonotoneBaseline& base,
                                                 margin::Link link, std::span<const double> times) {
  std::vector<double> logs;
  for (double t : times)
    if (t > 0.0) logs.push_back(std::log(t));
  std::sort(logs.begin(), logs.end());
  const double med = stats::sorted_quantile(logs, 0.5);
  double sd = stats::sample_sd(logs);
  if (!(sd > 1e-8)) sd = 1.0;
  const double mid = margin::link_eval(link, 0.5);
  std::vector<double> gamma;
  for (double g : base.greville()) gamma.push_back(mid + (g - med) / sd);
  return margin::MonotoneBaseline::raw_from_coefficients(gamma);
}

}  // namespace fit_detail

/// A copula-free fit of one margin.
struct MarginFit : FitCore {
  margin::Link link = margin::Link::PH;
  int which = 1;
  std::vector<std::string> covariates;
  margin::MonotoneBaseline baseline;
  Block baseline_block, beta_block;

  margin::MarginModel model() const {
    margin::MarginModel m;
    m.link = link;
    m.baseline = baseline;
    m.baseline_raw.assign(delta.data() + baseline_block.offset,
                          delta.data() + baseline_block.end());
    m.covariates = covariates;
    m.beta.assign(delta.data() + beta_block.offset, delta.data() + beta_block.end());
    return m;
  }
};

inline MarginFit fit_margin(const Dataset& d, int which, margin::Link link,
                            const std::vector<std::string>& covariates, int interior_knots = 8,
                            double ridge = 1e-4, const OptimOptions& opt = {},
                            std::optional<margin::MonotoneBaseline> base = {}) {
  MarginOnlyModel model(link, covariates, d, which, interior_knots, ridge, base);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dim()));
  const auto raw = fit_detail::linear_baseline_start(model.baseline(), link,
                                                     lik::margin_times(d, which));
  for (std::size_t k = 0; k < raw.size(); ++k) start[static_cast<Eigen::Index>(k)] = raw[k];
  std::vector<std::string> names;
  for (int k = 0; k < model.baseline().size(); ++k)
    names.push_back("baseline[" + std::to_string(k) + "]");
  for (const auto& c : covariates) names.push_back(c);
  MarginFit f;
  static_cast<FitCore&>(f) = fit_detail::run(model.likelihood(), start, opt, std::move(names));
  f.link = link;
  f.which = which;
  f.covariates = covariates;
  f.baseline = model.baseline();
  f.baseline_block = model.baseline_block();
  f.beta_block = model.beta_block();
  return f;
}

struct FittedModel : FitCore {
  ModelSpec spec;
  ParamLayout layout;
  margin::MonotoneBaseline baseline1, baseline2;
  double theta = 0.0;  // at the third predictor's intercept
  double theta_lo = 0.0, theta_hi = 0.0;
  double kendall_tau = 0.0;

  std::vector<double> beta(int which) const {
    const Block& b = which == 1 ? layout.beta1 : which == 2 ? layout.beta2 : layout.beta3;
    return {delta.data() + b.offset, delta.data() + b.end()};
  }
  margin::MarginModel margin_model(int which) const {
    margin::MarginModel m;
    const Block& base = which == 1 ? layout.base1 : layout.base2;
    m.link = which == 1 ? spec.link1 : spec.link2;
    m.baseline = which == 1 ? baseline1 : baseline2;
    m.baseline_raw.assign(delta.data() + base.offset, delta.data() + base.end());
    m.covariates = which == 1 ? spec.eta1 : spec.eta2;
    m.beta = beta(which);
    return m;
  }
};

/// Starting point: baselines and margin effects from copula-free fits, the
/// dependence intercept from the Kendall tau of the observed time pairs.
inline Eigen::VectorXd default_start(const JointModel& model, const Dataset& d,
                                     bool univariate_start, const OptimOptions& opt) {
  const auto& spec = model.spec();
  const auto& L = model.layout();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dim()));
  auto place = [&](int which, const Block& base, const Block& beta) {
    const auto& b = which == 1 ? model.baseline1() : model.baseline2();
    const auto link = which == 1 ? spec.link1 : spec.link2;
    const auto raw = fit_detail::linear_baseline_start(b, link, lik::margin_times(d, which));
    for (std::size_t k = 0; k < raw.size(); ++k) x[static_cast<Eigen::Index>(base.offset + k)] = raw[k];
    if (!univariate_start) return;
    try {
      const auto mf = fit_margin(d, which, link, which == 1 ? spec.eta1 : spec.eta2,
                                 spec.interior_knots, spec.ridge, opt, b);
      if (!mf.delta.allFinite()) return;
      x.segment(static_cast<Eigen::Index>(base.offset), static_cast<Eigen::Index>(base.size)) =
          mf.delta.segment(static_cast<Eigen::Index>(mf.baseline_block.offset),
                           static_cast<Eigen::Index>(mf.baseline_block.size));
      x.segment(static_cast<Eigen::Index>(beta.offset), static_cast<Eigen::Index>(beta.size)) =
          mf.delta.segment(static_cast<Eigen::Index>(mf.beta_block.offset),
                           static_cast<Eigen::Index>(mf.beta_block.size));
    } catch (const NumericError&) {
      // keep the linear baseline
    }
  };
  place(1, L.base1, L.beta1);
  place(2, L.base2, L.beta2);

  const double tau_obs = stats::kendall_tau(d.t1_lower, d.t2_lower);
  auto [lo, hi] = copula::tau_bounds(spec.copula);
  const double margin_width = 0.05 * (hi - lo);
  double tau = std::isfinite(tau_obs) ? tau_obs : 0.0;
  tau = std::clamp(tau, lo + margin_width, hi - margin_width);
  x[static_cast<Eigen::Index>(L.beta3.offset)] = copula::eta_from_tau(spec.copula, tau);
  return x;
}

inline FittedModel fit_model(const ModelSpec& spec, const Dataset& d, const FitOptions& opt = {}) {
  const JointModel model(spec, d);
  const Eigen::VectorXd start =
      opt.start ? *opt.start : default_start(model, d, opt.univariate_start, opt.optim);
  if (static_cast<std::size_t>(start.size()) != model.dim())
    throw DomainError("starting vector has the wrong length");
  FittedModel fm;
  static_cast<FitCore&>(fm) =
      fit_detail::run(model.likelihood(), start, opt.optim, model.parameter_names());
  fm.spec = spec;
  fm.layout = model.layout();
  fm.baseline1 = model.baseline1();
  fm.baseline2 = model.baseline2();

  const auto i3 = static_cast<Eigen::Index>(fm.layout.beta3.offset);
  const double eta3 = fm.delta[i3];
  fm.theta = copula::theta_from_eta(spec.copula, eta3);
  const double se = fm.standard_errors()[i3];
  if (std::isfinite(se)) {
    const double a = copula::theta_from_eta(spec.copula, eta3 - 1.959963984540054 * se);
    const double b = copula::theta_from_eta(spec.copula, eta3 + 1.959963984540054 * se);
    fm.theta_lo = std::min(a, b);
    fm.theta_hi = std::max(a, b);
  } else {
    fm.theta_lo = fm.theta_hi = std::numeric_limits<double>::quiet_NaN();
  }
  try {
    fm.kendall_tau = copula::kendall_tau(spec.copula, fm.theta);
  } catch (const DomainError&) {
    fm.kendall_tau = std::numeric_limits<double>::quiet_NaN();
  }
  return fm;
}

struct CoefRow {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p = 0.0;
};

struct FitSummary {
  std::string copula;
  std::string margin1, margin2;
  std::string theta_link;
  std::vector<CoefRow> eta1, eta2, eta3;
  double theta = 0.0, theta_lo = 0.0, theta_hi = 0.0, kendall_tau = 0.0;
  std::size_t n = 0;
  double edf = 0.0, loglik = 0.0, aic = 0.0, bic = 0.0;
  OptimReport report;
  std::vector<std::string> warnings;
};

inline CoefRow coef_row(std::string name, double est, double se) {
  CoefRow r{std::move(name), est, se, est / se, 0.0};
  r.p = std::isfinite(r.z) ? std::erfc(std::abs(r.z) / std::numbers::sqrt2) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

inline FitSummary summarize(const FittedModel& fm) {
  FitSummary s;
  s.copula = copula::name(fm.spec.copula);
  s.margin1 = margin::description(fm.spec.link1);
  s.margin2 = margin::description(fm.spec.link2);
  s.theta_link = copula::theta_link_name(fm.spec.copula);
  const Eigen::VectorXd se = fm.standard_errors();
  auto rows = [&](const Block& b, const std::vector<std::string>& labels, bool intercept) {
    std::vector<CoefRow> out;
    for (std::size_t j = 0; j < b.size; ++j) {
      const auto k = static_cast<Eigen::Index>(b.offset + j);
      std::string label = intercept ? (j == 0 ? "(Intercept)" : labels[j - 1]) : labels[j];
      out.push_back(coef_row(std::move(label), fm.delta[k], se[k]));
    }
    return out;
  };
  s.eta1 = rows(fm.layout.beta1, fm.spec.eta1, false);
  s.eta2 = rows(fm.layout.beta2, fm.spec.eta2, false);
  s.eta3 = rows(fm.layout.beta3, fm.spec.eta3, true);
  s.theta = fm.theta;
  s.theta_lo = fm.theta_lo;
  s.theta_hi = fm.theta_hi;
  s.kendall_tau = fm.kendall_tau;
  s.n = fm.n;
  s.edf = fm.edf;
  s.loglik = fm.loglik;
  s.aic = fm.aic();
  s.bic = fm.bic();
  s.report = fm.report;
  s.warnings = fm.warnings;
  return s;
}

}  // namespace brbvs
