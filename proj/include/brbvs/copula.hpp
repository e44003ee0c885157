// One-parameter bivariate copula families: CDF, h-functions, density,
// dependence-parameter links, Kendall's tau and conditional sampling.
//
// All evaluation kernels are templates over the scalar type so that the
// likelihood can differentiate through them with dual numbers. The checked
// `cdf`/`h1`/`h2`/`density` entry points validate their arguments; the
// `eval_*` kernels do not.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "brbvs/dual.hpp"
#include "brbvs/errors.hpp"
#include "brbvs/special.hpp"

namespace brbvs::copula {

enum class Family { AMH, Clayton, FGM, Frank, Galambos, Gaussian, Gumbel, Joe, Plackett };

inline constexpr std::array<Family, 9> kAllFamilies = {
    Family::AMH,      Family::Clayton, Family::FGM, Family::Frank,   Family::Galambos,
    Family::Gaussian, Family::Gumbel,  Family::Joe, Family::Plackett};

inline std::string_view code(Family f) {
  switch (f) {
    case Family::AMH: return "AMH";
    case Family::Clayton: return "C0";
    case Family::FGM: return "FGM";
    case Family::Frank: return "F";
    case Family::Galambos: return "GAL";
    case Family::Gaussian: return "N";
    case Family::Gumbel: return "G0";
    case Family::Joe: return "J0";
    case Family::Plackett: return "PL";
  }
  return "?";
}

inline std::string_view name(Family f) {
  switch (f) {
    case Family::AMH: return "Ali-Mikhail-Haq";
    case Family::Clayton: return "Clayton";
    case Family::FGM: return "Farlie-Gumbel-Morgenstern";
    case Family::Frank: return "Frank";
    case Family::Galambos: return "Galambos";
    case Family::Gaussian: return "Gaussian";
    case Family::Gumbel: return "Gumbel";
    case Family::Joe: return "Joe";
    case Family::Plackett: return "Plackett";
  }
  return "?";
}

inline Family family_from_code(std::string_view s) {
  for (Family f : kAllFamilies)
    if (s == code(f)) return f;
  if (s == "GAL0") return Family::Galambos;
  throw DomainError("unknown copula code '" + std::string(s) +
                    "' (expected AMH, C0, FGM, F, GAL, N, G0, J0 or PL)");
}

/// Link used for the dependence parameter, reported in fit summaries.
inline std::string_view theta_link_name(Family f) {
  switch (f) {
    case Family::AMH:
    case Family::FGM:
    case Family::Gaussian: return "atanh";
    case Family::Clayton:
    case Family::Galambos:
    case Family::Plackett: return "log";
    case Family::Gumbel:
    case Family::Joe: return "log(theta - 1)";
    case Family::Frank: return "identity";
  }
  return "?";
}

struct ThetaRange {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;
  bool excludes_zero = false;

  bool contains(double theta) const {
    if (!std::isfinite(theta) && !(theta == hi && hi_closed)) return false;
    if (excludes_zero && theta == 0.0) return false;
    const bool above = lo_closed ? theta >= lo : theta > lo;
    const bool below = hi_closed ? theta <= hi : theta < hi;
    return above && below;
  }
};

inline ThetaRange theta_range(Family f) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (f) {
    case Family::AMH:
    case Family::FGM:
    case Family::Gaussian: return {-1.0, 1.0, true, true};
    case Family::Clayton:
    case Family::Galambos:
    case Family::Plackett: return {0.0, inf, false, false};
    case Family::Frank: return {-inf, inf, false, false, true};
    case Family::Gumbel: return {1.0, inf, true, false};
    case Family::Joe: return {1.0, inf, false, false};
  }
  return {0.0, 0.0, false, false};
}

/// Dependence parameter from the additive predictor of the third equation.
template <class T>
T theta_from_eta(Family f, const T& eta) {
  using std::exp;
  using std::tanh;
  switch (f) {
    case Family::AMH:
    case Family::FGM:
    case Family::Gaussian: return tanh(eta);
    case Family::Clayton:
    case Family::Galambos:
    case Family::Plackett: return exp(eta);
    case Family::Gumbel:
    case Family::Joe: return 1.0 + exp(eta);
    case Family::Frank: return eta;
  }
  return eta;
}

inline double eta_from_theta(Family f, double theta) {
  if (!theta_range(f).contains(theta) && !(f == Family::Frank && theta == 0.0))
    throw DomainError("theta " + std::to_string(theta) + " outside the range of " +
                      std::string(name(f)));
  switch (f) {
    case Family::AMH:
    case Family::FGM:
    case Family::Gaussian: return std::atanh(theta);
    case Family::Clayton:
    case Family::Galambos:
    case Family::Plackett: return std::log(theta);
    case Family::Gumbel:
    case Family::Joe: return std::log(theta - 1.0);
    case Family::Frank: return theta;
  }
  return theta;
}

namespace detail {

inline constexpr double kUnitLo = 1e-12;
inline constexpr double kUnitHi = 1.0 - 1e-12;
inline constexpr double kGuard = 1e-6;
inline constexpr double kRhoMax = 1.0 - 1e-9;

template <class T>
T clamp_unit(const T& u) {
  return math::clamp(u, kUnitLo, kUnitHi);
}

// log(e^a + e^b)
template <class T>
T log_sum_exp(const T& a, const T& b) {
  using std::exp;
  using std::log1p;
  return a > b ? a + log1p(exp(b - a)) : b + log1p(exp(a - b));
}

// log(e^a + e^b - 1) for a, b >= 0
template <class T>
T log_clayton_sum(const T& a, const T& b) {
  using std::expm1;
  using std::log1p;
  using std::exp;
  using std::log;
  if (a < 30.0 && b < 30.0) return log1p(expm1(a) + expm1(b));
  const T m = a > b ? a : b;
  return m + log(exp(a - m) + exp(b - m) - exp(-m));
}

// log A for Joe, A = 1 - (1 - a)(1 - b) with a = (1 - u)^theta; the product
// form is accurate near the origin and the sum form near (1, 1).
template <class T>
T joe_log_a(const T& theta, const T& lu, const T& lv) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::log1p;
  const T oma = -expm1(theta * lu), omb = -expm1(theta * lv);
  const T prod = oma * omb;
  if (prod < 0.5) return log1p(-prod);
  const T a = exp(theta * lu), b = exp(theta * lv);
  return log(a + b - a * b);
}

// Inside the guard bands Frank and Plackett are replaced by their first-order
// expansion in theta, which is FGM with parameter theta/2 and theta-1.
inline bool frank_independent(double theta) { return std::abs(theta) < kGuard; }
inline bool plackett_independent(double theta) { return std::abs(theta - 1.0) < kGuard; }

template <class T>
T gaussian_rho(const T& theta) {
  return math::clamp(theta, -kRhoMax, kRhoMax);
}

template <class T>
T cdf_interior(Family f, const T& u, const T& v, const T& theta) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::log1p;
  using std::pow;
  using std::sqrt;
  const double th = ad::value_of(theta);
  switch (f) {
    case Family::AMH: return u * v / (1.0 - theta * (1.0 - u) * (1.0 - v));
    case Family::Clayton: {
      const T lu = log(u), lv = log(v);
      const T logA = log_clayton_sum(-theta * lu, -theta * lv);
      return exp(-logA / theta);
    }
    case Family::FGM: return u * v * (1.0 + theta * (1.0 - u) * (1.0 - v));
    case Family::Frank: {
      if (frank_independent(th)) return cdf_interior(Family::FGM, u, v, T(0.5 * theta));
      const T a = expm1(-theta * u), b = expm1(-theta * v), d = expm1(-theta);
      return -log1p(a * b / d) / theta;
    }
    case Family::Galambos: {
      const T lx = log(-log(u)), ly = log(-log(v));
      const T logA = log_sum_exp(-theta * lx, -theta * ly);
      return u * v * exp(exp(-logA / theta));
    }
    case Family::Gaussian: {
      const T rho = gaussian_rho(theta);
      const T x = math::norm_quantile(u), y = math::norm_quantile(v);
      if constexpr (ad::is_dual_v<T>) {
        const double xv = x.v, yv = y.v, rv = rho.v;
        const double s = std::sqrt(1.0 - rv * rv);
        const double c = math::bvn_cdf(xv, yv, rv);
        const double du = math::norm_cdf((yv - rv * xv) / s);
        const double dv = math::norm_cdf((xv - rv * yv) / s);
        return ad::chain3(u, v, rho, c, du, dv, math::bvn_pdf(xv, yv, rv));
      } else {
        return math::bvn_cdf(x, y, rho);
      }
    }
    case Family::Gumbel: {
      const T lx = log(-log(u)), ly = log(-log(v));
      const T logA = log_sum_exp(theta * lx, theta * ly);
      return exp(-exp(logA / theta));
    }
    case Family::Joe: {
      const T lu = log1p(-u), lv = log1p(-v);
      return -expm1(joe_log_a(theta, lu, lv) / theta);
    }
    case Family::Plackett: {
      if (plackett_independent(th)) return cdf_interior(Family::FGM, u, v, T(theta - 1.0));
      const T q = 1.0 + (theta - 1.0) * (u + v);
      const T r = q * q - 4.0 * theta * (theta - 1.0) * u * v;
      return 2.0 * theta * u * v / (q + sqrt(r));
    }
  }
  return u * v;
}

template <class T>
T h1_interior(Family f, const T& u, const T& v, const T& theta) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::log1p;
  using std::pow;
  using std::sqrt;
  const double th = ad::value_of(theta);
  switch (f) {
    case Family::AMH: {
      const T d = 1.0 - theta * (1.0 - u) * (1.0 - v);
      return v * (1.0 - theta * (1.0 - v)) / (d * d);
    }
    case Family::Clayton: {
      const T lu = log(u), lv = log(v);
      const T logA = log_clayton_sum(-theta * lu, -theta * lv);
      return exp((-theta - 1.0) * lu - (1.0 / theta + 1.0) * logA);
    }
    case Family::FGM: return v * (1.0 + theta * (1.0 - v) * (1.0 - 2.0 * u));
    case Family::Frank: {
      if (frank_independent(th)) return h1_interior(Family::FGM, u, v, T(0.5 * theta));
      const T a = expm1(-theta * u), b = expm1(-theta * v), d = expm1(-theta);
      return (a + 1.0) * b / (d + a * b);
    }
    case Family::Galambos: {
      const T lx = log(-log(u)), ly = log(-log(v));
      const T logA = log_sum_exp(-theta * lx, -theta * ly);
      const T c = u * v * exp(exp(-logA / theta));
      const T bx = exp((-1.0 / theta - 1.0) * logA + (-theta - 1.0) * lx);
      return c / u * (1.0 - bx);
    }
    case Family::Gaussian: {
      const T rho = gaussian_rho(theta);
      const T x = math::norm_quantile(u), y = math::norm_quantile(v);
      return math::norm_cdf((y - rho * x) / sqrt(1.0 - rho * rho));
    }
    case Family::Gumbel: {
      const T lx = log(-log(u)), ly = log(-log(v));
      const T logA = log_sum_exp(theta * lx, theta * ly);
      const T c = exp(-exp(logA / theta));
      return c * exp((1.0 / theta - 1.0) * logA + (theta - 1.0) * lx) / u;
    }
    case Family::Joe: {
      const T lu = log1p(-u), lv = log1p(-v);
      const T logA = joe_log_a(theta, lu, lv);
      return exp((1.0 / theta - 1.0) * logA + (theta - 1.0) * lu) * -expm1(theta * lv);
    }
    case Family::Plackett: {
      if (plackett_independent(th)) return h1_interior(Family::FGM, u, v, T(theta - 1.0));
      const T q = 1.0 + (theta - 1.0) * (u + v);
      const T r = q * q - 4.0 * theta * (theta - 1.0) * u * v;
      return 0.5 * (1.0 - (q - 2.0 * theta * v) / sqrt(r));
    }
  }
  return v;
}

template <class T>
T density_interior(Family f, const T& u, const T& v, const T& theta) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::log1p;
  using std::pow;
  using std::sqrt;
  const double th = ad::value_of(theta);
  switch (f) {
    case Family::AMH: {
      const T d = 1.0 - theta * (1.0 - u) * (1.0 - v);
      return (1.0 + theta * ((1.0 + u) * (1.0 + v) - 3.0) +
              theta * theta * (1.0 - u) * (1.0 - v)) /
             (d * d * d);
    }
    case Family::Clayton: {
      const T lu = log(u), lv = log(v);
      const T logA = log_clayton_sum(-theta * lu, -theta * lv);
      return (1.0 + theta) * exp((-theta - 1.0) * (lu + lv) - (1.0 / theta + 2.0) * logA);
    }
    case Family::FGM: return 1.0 + theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
    case Family::Frank: {
      if (frank_independent(th)) return density_interior(Family::FGM, u, v, T(0.5 * theta));
      const T a = expm1(-theta * u), b = expm1(-theta * v), d = expm1(-theta);
      const T den = d + a * b;
      return -theta * d * (a + 1.0) * (b + 1.0) / (den * den);
    }
    case Family::Galambos: {
      const T lx = log(-log(u)), ly = log(-log(v));
      const T logA = log_sum_exp(-theta * lx, -theta * ly);
      const T c = u * v * exp(exp(-logA / theta));
      const T bx = exp((-1.0 / theta - 1.0) * logA + (-theta - 1.0) * lx);
      const T by = exp((-1.0 / theta - 1.0) * logA + (-theta - 1.0) * ly);
      const T cross = (1.0 + theta) * exp((-theta - 1.0) * (lx + ly) + (-1.0 / theta - 2.0) * logA);
      return c / (u * v) * ((1.0 - bx) * (1.0 - by) + cross);
    }
    case Family::Gaussian: {
      const T rho = gaussian_rho(theta);
      const T x = math::norm_quantile(u), y = math::norm_quantile(v);
      const T om = 1.0 - rho * rho;
      return exp(-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * om)) / sqrt(om);
    }
    case Family::Gumbel: {
      const T lx = log(-log(u)), ly = log(-log(v));
      const T logA = log_sum_exp(theta * lx, theta * ly);
      const T c = exp(-exp(logA / theta));
      return c / (u * v) * exp((theta - 1.0) * (lx + ly) + (2.0 / theta - 2.0) * logA) *
             (1.0 + (theta - 1.0) * exp(-logA / theta));
    }
    case Family::Joe: {
      const T lu = log1p(-u), lv = log1p(-v);
      const T logA = joe_log_a(theta, lu, lv);
      return exp((1.0 / theta - 2.0) * logA + (theta - 1.0) * (lu + lv)) * (theta - 1.0 + exp(logA));
    }
    case Family::Plackett: {
      if (plackett_independent(th)) return density_interior(Family::FGM, u, v, T(theta - 1.0));
      const T q = 1.0 + (theta - 1.0) * (u + v);
      const T r = q * q - 4.0 * theta * (theta - 1.0) * u * v;
      return theta * (1.0 + (theta - 1.0) * (u + v - 2.0 * u * v)) / (r * sqrt(r));
    }
  }
  return T(1.0);
}

inline void check_args(Family f, double u1, double u2, double theta) {
  if (!theta_range(f).contains(theta) && !(f == Family::Frank && theta == 0.0)) {
    std::ostringstream msg;
    msg << "theta " << theta << " outside the parameter range of the " << name(f) << " copula";
    throw DomainError(msg.str());
  }
  if (!(u1 >= 0.0 && u1 <= 1.0 && u2 >= 0.0 && u2 <= 1.0)) {
    std::ostringstream msg;
    msg << "copula arguments must lie in [0,1], got (" << u1 << ", " << u2 << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace detail

/// C(u1, u2; theta) without argument checks. Exact on the boundary of the unit square.
template <class T>
T eval_cdf(Family f, const T& u1, const T& u2, const T& theta) {
  if (u1 <= 0.0 || u2 <= 0.0) return T(0.0);
  if (u1 >= 1.0) return u2;
  if (u2 >= 1.0) return u1;
  return detail::cdf_interior(f, detail::clamp_unit(u1), detail::clamp_unit(u2), theta);
}

/// dC/du1 without argument checks.
template <class T>
T eval_h1(Family f, const T& u1, const T& u2, const T& theta) {
  if (u2 >= 1.0) return T(1.0);
  if (u2 <= 0.0) return T(0.0);
  return detail::h1_interior(f, detail::clamp_unit(u1), detail::clamp_unit(u2), theta);
}

/// dC/du2 without argument checks. Every supported family is exchangeable.
template <class T>
T eval_h2(Family f, const T& u1, const T& u2, const T& theta) {
  return eval_h1(f, u2, u1, theta);
}

/// d^2 C / du1 du2 without argument checks.
template <class T>
T eval_density(Family f, const T& u1, const T& u2, const T& theta) {
  return detail::density_interior(f, detail::clamp_unit(u1), detail::clamp_unit(u2), theta);
}

inline double cdf(Family f, double u1, double u2, double theta) {
  detail::check_args(f, u1, u2, theta);
  return eval_cdf(f, u1, u2, theta);
}
inline double h1(Family f, double u1, double u2, double theta) {
  detail::check_args(f, u1, u2, theta);
  return eval_h1(f, u1, u2, theta);
}
inline double h2(Family f, double u1, double u2, double theta) {
  detail::check_args(f, u1, u2, theta);
  return eval_h2(f, u1, u2, theta);
}
inline double density(Family f, double u1, double u2, double theta) {
  detail::check_args(f, u1, u2, theta);
  return eval_density(f, u1, u2, theta);
}

/// Kendall's tau implied by theta; closed forms where they exist, otherwise
/// tau = 1 - 4 * integral of h1 * h2 over the unit square.
inline double kendall_tau(Family f, double theta) {
  if (!theta_range(f).contains(theta) && !(f == Family::Frank && theta == 0.0))
    throw DomainError("theta outside the parameter range of the " + std::string(name(f)) +
                      " copula");
  switch (f) {
    case Family::AMH: {
      if (std::abs(theta) < 1e-6) return 2.0 * theta / 9.0;
      if (theta == 1.0) return 1.0 / 3.0;
      const double om = 1.0 - theta;
      return 1.0 - 2.0 * (theta + om * om * std::log(om)) / (3.0 * theta * theta);
    }
    case Family::Clayton: return theta / (theta + 2.0);
    case Family::FGM: return 2.0 * theta / 9.0;
    case Family::Frank:
      if (detail::frank_independent(theta)) return 0.0;
      return 1.0 - 4.0 / theta * (1.0 - math::debye1(theta));
    case Family::Gaussian: return 2.0 / std::numbers::pi * std::asin(theta);
    case Family::Gumbel: return 1.0 - 1.0 / theta;
    case Family::Joe: {
      // 1 - 4 * sum_k 1 / (k (theta k + 2)(theta (k - 1) + 2)), tail by integral bound
      double s = 0.0;
      constexpr int terms = 20000;
      for (int k = 1; k <= terms; ++k) {
        const double kk = k;
        s += 1.0 / (kk * (theta * kk + 2.0) * (theta * (kk - 1.0) + 2.0));
      }
      s += 1.0 / (2.0 * theta * theta * terms * terms);
      return 1.0 - 4.0 * s;
    }
    case Family::Galambos: {
      // extreme-value copula: tau = integral of t(1-t) A''(t) / A(t) with the
      // Pickands function A(t) = 1 - (t^-theta + (1-t)^-theta)^(-1/theta)
      auto g = [theta](double t) {
        const double lp = -theta * std::log(t), lq = -theta * std::log1p(-t);
        const double m = std::max(lp, lq);
        const double s = std::exp(lp - m) + std::exp(lq - m);  // scaled by e^-m
        const double ds = theta * (-std::exp(lp - m) / t + std::exp(lq - m) / (1.0 - t));
        const double d2s =
            theta * (theta + 1.0) * (std::exp(lp - m) / (t * t) + std::exp(lq - m) / ((1.0 - t) * (1.0 - t)));
        const double B = std::exp(-(std::log(s) + m) / theta);
        const double B2 = B / theta / s * ((1.0 / theta + 1.0) * ds * ds / s - d2s);
        return t * (1.0 - t) * -B2 / (1.0 - B);
      };
      using boost::math::quadrature::gauss_kronrod;
      return gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, 1e-12);
    }
    case Family::Plackett: {
      if (detail::plackett_independent(theta)) return 0.0;
      using boost::math::quadrature::gauss_kronrod;
      auto inner = [&](double u) {
        auto g = [&](double v) {
          return eval_h1(f, u, v, theta) * eval_h2(f, u, v, theta);
        };
        return gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 8, 1e-10);
      };
      const double integral = gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 8, 1e-10);
      return 1.0 - 4.0 * integral;
    }
  }
  return 0.0;
}

/// Attainable Kendall's tau interval of a family (closure).
inline std::pair<double, double> tau_bounds(Family f) {
  switch (f) {
    case Family::AMH: return {(5.0 - 8.0 * std::log(2.0)) / 3.0, 1.0 / 3.0};
    case Family::FGM: return {-2.0 / 9.0, 2.0 / 9.0};
    case Family::Gaussian:
    case Family::Frank:
    case Family::Plackett: return {-1.0, 1.0};
    case Family::Clayton:
    case Family::Galambos:
    case Family::Gumbel:
    case Family::Joe: return {0.0, 1.0};
  }
  return {0.0, 1.0};
}

/// Predictor value whose theta has the requested Kendall's tau (tau inside tau_bounds).
inline double eta_from_tau(Family f, double tau) {
  auto [lo, hi] = tau_bounds(f);
  if (!(tau > lo && tau < hi))
    throw DomainError("Kendall's tau " + std::to_string(tau) + " not attainable by the " +
                      std::string(name(f)) + " copula");
  auto g = [&](double eta) { return kendall_tau(f, theta_from_eta(f, eta)) - tau; };
  double a = -1.0, b = 1.0;
  while (g(a) > 0.0 && a > -30.0) a *= 2.0;
  while (g(b) < 0.0 && b < 30.0) b *= 2.0;
  std::uintmax_t iters = 100;
  auto [x0, x1] =
      boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(40), iters);
  return 0.5 * (x0 + x1);
}

/// Draw u2 from the conditional law C(u2 | u1) given a uniform w.
inline double conditional_sample(Family f, double u1, double w, double theta) {
  detail::check_args(f, u1, w, theta);
  if (w >= 1.0) return 1.0;
  if (w <= 0.0) return 0.0;
  if (f == Family::Clayton) {
    const double e = std::expm1(-theta / (1.0 + theta) * std::log(w));
    return std::exp(-std::log1p(e * std::pow(u1, -theta)) / theta);
  }
  double lo = 0.0, hi = 1.0;
  double resid = 1.0;
  double mid = 0.5;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double h = eval_h1(f, u1, mid, theta);
    if (!std::isfinite(h))
      throw NumericError("conditional_sample: non-finite h-function at u2=" + std::to_string(mid));
    resid = h - w;
    if (std::abs(resid) < 1e-13 || hi - lo < 1e-16) break;
    (resid < 0.0 ? lo : hi) = mid;
  }
  if (std::abs(resid) > 1e-10) {
    std::ostringstream msg;
    msg << "conditional_sample: inversion did not converge for " << name(f) << " (u1=" << u1
        << ", w=" << w << ", theta=" << theta << ", residual=" << resid << ")";
    throw NumericError(msg.str());
  }
  return mid;
}

}  // namespace brbvs::copula
