// Numerical property checks of the copula families, shared by the unit and
// acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "brbvs/copula.hpp"
#include "brbvs/rng.hpp"
#include "brbvs/special.hpp"

namespace fixtures {

using namespace brbvs;

/// `count` parameter values with Kendall tau evenly spread over the family's
/// attainable range, capped at |tau| <= 0.8.
inline std::vector<double> theta_grid(copula::Family f, int count) {
  auto [lo, hi] = copula::tau_bounds(f);
  lo = std::max(lo, -0.8);
  hi = std::min(hi, 0.8);
  const double pad = 0.02 * (hi - lo);
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    const double tau = lo + pad + (hi - lo - 2 * pad) * k / (count - 1);
    out.push_back(copula::theta_from_eta(f, copula::eta_from_tau(f, tau)));
  }
  return out;
}

/// Integral of the density over the unit square, computed in normal scores
/// u = Phi(x), v = Phi(y) where the integrand is smooth and the corners go to
/// infinity. Composite 8-point Gauss-Legendre on [-9, 9] squared.
inline double density_integral(copula::Family f, double theta, int panels = 72) {
  static constexpr double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                  -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                  0.7966664774136267,  0.9602898564975363};
  static constexpr double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};
  const double a = -9.0, b = 9.0, h = (b - a) / panels;
  std::vector<double> u, wt;
  for (int p = 0; p < panels; ++p)
    for (int k = 0; k < 8; ++k) {
      const double z = a + (p + 0.5) * h + 0.5 * h * x[k];
      u.push_back(math::norm_cdf(z));
      wt.push_back(0.5 * h * w[k] * math::norm_pdf(z));
    }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j)
      s += wt[i] * wt[j] * copula::density(f, u[i], u[j], theta);
  return s;
}

/// Largest |h - central difference of the cdf| over an interior grid, for
/// both h-functions.
inline double h_fd_error(copula::Family f, double theta) {
  const double h = 1e-5;
  double worst = 0.0;
  for (double u = 0.05; u < 0.96; u += 0.075)
    for (double v = 0.05; v < 0.96; v += 0.075) {
      const double d1 = (copula::cdf(f, u + h, v, theta) - copula::cdf(f, u - h, v, theta)) / (2 * h);
      const double d2 = (copula::cdf(f, u, v + h, theta) - copula::cdf(f, u, v - h, theta)) / (2 * h);
      worst = std::max(worst, std::abs(copula::h1(f, u, v, theta) - d1));
      worst = std::max(worst, std::abs(copula::h2(f, u, v, theta) - d2));
    }
  return worst;
}

/// Smallest C-volume over `count` random rectangles in the unit square.
inline double min_rectangle_volume(copula::Family f, double theta, int count, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 1.0;
  for (int k = 0; k < count; ++k) {
    double u1 = uniform(rng), u2 = uniform(rng), v1 = uniform(rng), v2 = uniform(rng);
    if (u1 > u2) std::swap(u1, u2);
    if (v1 > v2) std::swap(v1, v2);
    const double vol = copula::cdf(f, u2, v2, theta) - copula::cdf(f, u1, v2, theta) -
                       copula::cdf(f, u2, v1, theta) + copula::cdf(f, u1, v1, theta);
    worst = std::min(worst, vol);
  }
  return worst;
}

}  // namespace fixtures
