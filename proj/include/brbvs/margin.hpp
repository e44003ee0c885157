// Marginal survival models g{S(t | x)} = baseline(t) + x'beta.
//
// The baseline is a quadratic B-spline in log-time whose coefficients are
// forced to be nondecreasing: the first raw coefficient is the level and every
// further coefficient adds exp(raw_k) to the previous one. Outside the knot
// range the predictor continues linearly in log-time.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/Splines>

#include "brbvs/dual.hpp"
#include "brbvs/errors.hpp"
#include "brbvs/special.hpp"

namespace brbvs::margin {

enum class Link { PH, PO, Probit };

inline constexpr std::array<Link, 3> kAllLinks = {Link::PH, Link::PO, Link::Probit};

inline std::string_view code(Link l) {
  switch (l) {
    case Link::PH: return "PH";
    case Link::PO: return "PO";
    case Link::Probit: return "probit";
  }
  return "?";
}

inline Link link_from_code(std::string_view s) {
  if (s == "PH") return Link::PH;
  if (s == "PO") return Link::PO;
  if (s == "probit" || s == "Probit" || s == "PROBIT") return Link::Probit;
  throw DomainError("unknown link '" + std::string(s) + "' (expected PH, PO or probit)");
}

/// Label used in fit summaries. Links map survival to the predictor, so PO is
/// the negated logit and probit the negated normal quantile.
inline std::string_view description(Link l) {
  switch (l) {
    case Link::PH: return "survival with -cloglog link";
    case Link::PO: return "survival with -logit link";
    case Link::Probit: return "survival with -probit link";
  }
  return "?";
}

/// g(S)
inline double link_eval(Link l, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw DomainError("link argument must lie in (0,1), got " + std::to_string(s));
  switch (l) {
    case Link::PH: return std::log(-std::log(s));
    case Link::PO: return -std::log(s / (1.0 - s));
    case Link::Probit: return -math::norm_quantile(s);
  }
  return 0.0;
}

/// G(eta) = g^{-1}(eta)
template <class T>
T link_inverse(Link l, const T& eta) {
  using std::exp;
  switch (l) {
    case Link::PH: return exp(-exp(eta));
    case Link::PO: return exp(-math::softplus(eta));
    case Link::Probit: return math::norm_cdf(-eta);
  }
  return eta;
}

/// G'(eta); negative for every link.
template <class T>
T link_inverse_deriv(Link l, const T& eta) {
  using std::exp;
  switch (l) {
    case Link::PH: return -exp(eta - exp(eta));
    case Link::PO: return -exp(-math::softplus(eta) - math::softplus(-eta));
    case Link::Probit: return -math::norm_pdf(eta);
  }
  return eta;
}

/// log(-G'(eta)), evaluated without underflow in the tails.
template <class T>
T log_neg_link_inverse_deriv(Link l, const T& eta) {
  using std::exp;
  switch (l) {
    case Link::PH: return eta - exp(eta);
    case Link::PO: return -(math::softplus(eta) + math::softplus(-eta));
    case Link::Probit: return math::log_norm_pdf(eta);
  }
  return eta;
}

/// Nonzero part of a spline basis row: `count` consecutive functions from `first`.
struct BasisRow {
  int first = 0;
  std::array<double, 3> w{};

  double dot(std::span<const double> coef) const {
    return w[0] * coef[first] + w[1] * coef[first + 1] + w[2] * coef[first + 2];
  }
};

class MonotoneBaseline {
 public:
  static constexpr int kDegree = 2;
  using KnotVector = Eigen::Array<double, 1, Eigen::Dynamic>;

  MonotoneBaseline() = default;

  /// Knots on log-time: boundary at the extremes, interior at quantiles of the
  /// distinct values. Fewer distinct values reduce the interior count.
  static MonotoneBaseline from_times(std::span<const double> times, int interior_knots) {
    std::vector<double> logs;
    logs.reserve(times.size());
    for (double t : times)
      if (t > 0.0 && std::isfinite(t)) logs.push_back(std::log(t));
    std::sort(logs.begin(), logs.end());
    logs.erase(std::unique(logs.begin(), logs.end()), logs.end());
    if (logs.size() < 2)
      throw DomainError("baseline needs at least two distinct positive observed times");
    const int k = std::clamp(interior_knots, 0, static_cast<int>(logs.size()) - 2);
    std::vector<double> interior;
    for (int j = 1; j <= k; ++j) {
      const double pos = static_cast<double>(j) / (k + 1) * static_cast<double>(logs.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, logs.size() - 1);
      interior.push_back(logs[lo] + (pos - static_cast<double>(lo)) * (logs[hi] - logs[lo]));
    }
    return MonotoneBaseline(logs.front(), logs.back(), interior);
  }

  MonotoneBaseline(double lo, double hi, std::span<const double> interior) : lo_(lo), hi_(hi) {
    if (!(hi > lo)) throw DomainError("baseline knot range must be nondegenerate");
    std::vector<double> inner(interior.begin(), interior.end());
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
    std::erase_if(inner, [&](double x) { return !(x > lo && x < hi); });
    knots_.resize(static_cast<Eigen::Index>(inner.size()) + 2 * (kDegree + 1));
    Eigen::Index pos = 0;
    for (int i = 0; i <= kDegree; ++i) knots_[pos++] = lo;
    for (double x : inner) knots_[pos++] = x;
    for (int i = 0; i <= kDegree; ++i) knots_[pos++] = hi;
  }

  int size() const { return static_cast<int>(knots_.size()) - kDegree - 1; }
  double log_lo() const { return lo_; }
  double log_hi() const { return hi_; }
  const KnotVector& knots() const { return knots_; }
  std::vector<double> interior_knots() const {
    return {knots_.data() + kDegree + 1, knots_.data() + knots_.size() - kDegree - 1};
  }

  /// Basis row of eta at log-time x, and of d eta / d x.
  std::pair<BasisRow, BasisRow> rows_at_log(double x) const {
    using SplineT = Eigen::Spline<double, 1, kDegree>;
    const double xc = std::clamp(x, lo_, hi_);
    const auto ders = SplineT::BasisFunctionDerivatives(xc, 1, kDegree, knots_);
    const int span = static_cast<int>(SplineT::Span(xc, kDegree, knots_));
    BasisRow value, slope;
    value.first = slope.first = span - kDegree;
    for (int j = 0; j <= kDegree; ++j) {
      value.w[j] = ders(0, j);
      slope.w[j] = ders(1, j);
    }
    if (x != xc) {
      for (int j = 0; j <= kDegree; ++j) value.w[j] += (x - xc) * slope.w[j];
    }
    return {value, slope};
  }

  /// Rows for eta(t) and d eta / dt at time t > 0.
  std::pair<BasisRow, BasisRow> rows_at(double t) const {
    auto [value, slope] = rows_at_log(std::log(t));
    for (double& w : slope.w) w /= t;
    return {value, slope};
  }

  /// Nondecreasing spline coefficients from raw parameters.
  static std::vector<double> coefficients(std::span<const double> raw) {
    std::vector<double> gamma(raw.size());
    if (raw.empty()) return gamma;
    gamma[0] = raw[0];
    for (std::size_t k = 1; k < raw.size(); ++k) gamma[k] = gamma[k - 1] + std::exp(raw[k]);
    return gamma;
  }

  /// Raw parameters reproducing strictly increasing coefficients.
  static std::vector<double> raw_from_coefficients(std::span<const double> gamma) {
    std::vector<double> raw(gamma.size());
    if (gamma.empty()) return raw;
    raw[0] = gamma[0];
    for (std::size_t k = 1; k < gamma.size(); ++k) {
      const double inc = gamma[k] - gamma[k - 1];
      raw[k] = std::log(std::max(inc, 1e-8));
    }
    return raw;
  }

  /// Greville abscissae: coefficients equal to a linear function evaluated
  /// here reproduce that linear function exactly.
  std::vector<double> greville() const {
    std::vector<double> g(static_cast<std::size_t>(size()));
    for (int k = 0; k < size(); ++k) g[k] = 0.5 * (knots_[k + 1] + knots_[k + 2]);
    return g;
  }

  double eta(double t, std::span<const double> raw) const {
    const auto gamma = coefficients(raw);
    return rows_at(t).first.dot(gamma);
  }
  double deta_dt(double t, std::span<const double> raw) const {
    const auto gamma = coefficients(raw);
    return rows_at(t).second.dot(gamma);
  }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  KnotVector knots_;
};

/// A fitted or hand-built margin: link, baseline and linear covariate effects.
struct MarginModel {
  Link link = Link::PH;
  MonotoneBaseline baseline;
  std::vector<double> baseline_raw;
  std::vector<std::string> covariates;
  std::vector<double> beta;

  double eta(double t, std::span<const double> x) const {
    double e = baseline.eta(t, baseline_raw);
    for (std::size_t j = 0; j < beta.size(); ++j) e += beta[j] * x[j];
    return e;
  }

  double survival(double t, std::span<const double> x) const {
    if (t <= 0.0) return 1.0;
    return link_inverse(link, eta(t, x));
  }

  /// f(t) = -dS/dt = -G'(eta) * d eta / dt
  double density(double t, std::span<const double> x) const {
    if (t <= 0.0) return 0.0;
    return -link_inverse_deriv(link, eta(t, x)) * baseline.deta_dt(t, baseline_raw);
  }
};

}  // namespace brbvs::margin
