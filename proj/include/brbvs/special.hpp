// Special functions used across the library: normal distribution helpers
// (scalar and dual), the bivariate normal CDF, and the Debye function.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "brbvs/dual.hpp"

namespace brbvs::math {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
inline double log_norm_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

/// Standard normal quantile; p must lie in (0, 1).
inline double norm_quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

template <int N>
ad::Dual<N> norm_cdf(const ad::Dual<N>& x) {
  return ad::chain(x, norm_cdf(x.v), norm_pdf(x.v));
}
template <int N>
ad::Dual<N> norm_pdf(const ad::Dual<N>& x) {
  const double f = norm_pdf(x.v);
  return ad::chain(x, f, -x.v * f);
}
template <int N>
ad::Dual<N> log_norm_pdf(const ad::Dual<N>& x) {
  return ad::chain(x, log_norm_pdf(x.v), -x.v);
}
template <int N>
ad::Dual<N> norm_quantile(const ad::Dual<N>& p) {
  const double q = norm_quantile(p.v);
  return ad::chain(p, q, 1.0 / norm_pdf(q));
}

/// log(1 + e^x) without overflow.
template <class T>
T softplus(const T& x) {
  using std::exp;
  using std::log1p;
  return x > 0.0 ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <class T>
T clamp(const T& x, double lo, double hi) {
  if (x < lo) return T(lo);
  if (x > hi) return T(hi);
  return x;
}

/// P(X > h, Y > k) for a standard bivariate normal with correlation r.
///
/// Drezner-Wesolowsky reduction with Genz's refinements for |r| close to one;
/// Gauss-Legendre rules of 6, 12 or 20 points depending on |r|. Absolute error
/// is around 1e-15 over the whole parameter range.
inline double bvn_upper(double h, double k, double r) {
  using boost::math::quadrature::gauss;
  double bvn = 0.0;

  auto accumulate = [&](const auto& xs, const auto& ws, auto&& term) {
    // boost stores the nonnegative half of the symmetric rule; the zero node
    // (odd rules only) must be counted once.
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == 0.0) {
        bvn += 0.5 * ws[i] * (term(0.0) + term(0.0));
      } else {
        bvn += ws[i] * (term(-xs[i]) + term(xs[i]));
      }
    }
  };

  const double absr = std::abs(r);
  double hk = h * k;
  if (absr < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    auto term = [&](double x) {
      const double sn = std::sin(0.5 * asr * (1.0 + x));
      return std::exp((sn * hk - hs) / (1.0 - sn * sn));
    };
    // The integrand in the half-range form uses (1 - x) and (1 + x); over a
    // symmetric rule summing term(x) for x and -x covers both.
    if (absr < 0.3) {
      accumulate(gauss<double, 6>::abscissa(), gauss<double, 6>::weights(), term);
    } else if (absr < 0.75) {
      accumulate(gauss<double, 12>::abscissa(), gauss<double, 12>::weights(), term);
    } else {
      accumulate(gauss<double, 20>::abscissa(), gauss<double, 20>::weights(), term);
    }
    bvn = bvn * asr / (4.0 * std::numbers::pi) + norm_cdf(-h) * norm_cdf(-k);
    return bvn;
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (absr < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(2.0 * std::numbers::pi) * norm_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    auto term = [&](double x) {
      const double xs = (a * (x + 1.0)) * (a * (x + 1.0));
      const double rs = std::sqrt(1.0 - xs);
      return a * (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                  std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
    };
    const auto& xs = gauss<double, 20>::abscissa();
    const auto& ws = gauss<double, 20>::weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sum += ws[i] * (term(-xs[i]) + term(xs[i]));
    bvn = -(bvn + sum) / (2.0 * std::numbers::pi);
  }
  if (r > 0.0) {
    bvn += norm_cdf(-std::max(h, k));
  } else {
    bvn = -bvn;
    if (k > h) {
      if (h < 0.0) {
        bvn += norm_cdf(k) - norm_cdf(h);
      } else {
        bvn += norm_cdf(-h) - norm_cdf(-k);
      }
    }
  }
  return bvn;
}

/// Bivariate standard normal CDF P(X <= x, Y <= y) with correlation rho.
inline double bvn_cdf(double x, double y, double rho) {
  if (rho >= 1.0) return norm_cdf(std::min(x, y));
  if (rho <= -1.0) return std::max(0.0, norm_cdf(x) - norm_cdf(-y));
  return std::clamp(bvn_upper(-x, -y, rho), 0.0, 1.0);
}

/// Bivariate standard normal density.
inline double bvn_pdf(double x, double y, double rho) {
  const double om = 1.0 - rho * rho;
  return std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * om)) /
         (2.0 * std::numbers::pi * std::sqrt(om));
}

/// First-order Debye function D1(x) = x^-1 * integral_0^x t / (e^t - 1) dt.
inline double debye1(double x) {
  if (x == 0.0) return 1.0;
  if (std::abs(x) < 1e-4) return 1.0 - x / 4.0 + x * x / 36.0;
  auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  const double ax = std::abs(x);
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, ax, 12, 1e-14);
  const double d = integral / ax;
  // D1(-x) = D1(x) + x/2
  return x > 0.0 ? d : d + ax / 2.0;
}

}  // namespace brbvs::math
