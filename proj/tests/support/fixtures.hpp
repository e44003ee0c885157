// Shared fixtures for the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "brbvs/brbvs.hpp"

namespace fixtures {

using namespace brbvs;

/// Small mixed-censoring dataset with two covariates; every censoring code
/// appears on both margins, including intervals and right censoring from 0.
inline Dataset mixed_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.names = {"x1", "x2"};
  d.X.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    d.X(static_cast<Eigen::Index>(i), 0) = standard_normal(rng);
    d.X(static_cast<Eigen::Index>(i), 1) = uniform(rng, -1.0, 1.0);
  }
  auto fill = [&](std::vector<double>& lo, std::vector<std::optional<double>>& hi,
                  std::vector<Censor>& cens) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = std::exp(0.6 * standard_normal(rng));
      const int kind = static_cast<int>(i % 3);
      if (kind == 0) {
        lo.push_back(t);
        hi.push_back(std::nullopt);
        cens.push_back(Censor::Uncensored);
      } else if (kind == 1) {
        lo.push_back(i % 7 == 1 ? 0.0 : t);
        hi.push_back(std::nullopt);
        cens.push_back(Censor::Right);
      } else {
        const double l = i % 5 == 2 ? 0.0 : t;
        lo.push_back(l);
        hi.push_back(t * (1.3 + uniform(rng)));
        cens.push_back(Censor::Interval);
      }
    }
  };
  fill(d.t1_lower, d.t1_upper, d.cens1);
  fill(d.t2_lower, d.t2_upper, d.cens2);
  // shuffle margin 2 so that all nine case combinations occur
  std::vector<std::size_t> perm = permutation(n, rng);
  auto t2l = d.t2_lower;
  auto t2u = d.t2_upper;
  auto c2 = d.cens2;
  for (std::size_t i = 0; i < n; ++i) {
    d.t2_lower[i] = t2l[perm[i]];
    d.t2_upper[i] = t2u[perm[i]];
    d.cens2[i] = c2[perm[i]];
  }
  d.validate();
  return d;
}

/// Moderate parameter vector: linear baselines over the log-time range and
/// small effects; the dependence intercept gives Kendall tau `tau`.
inline Eigen::VectorXd moderate_parameters(const JointModel& m, double tau, Rng& rng) {
  const auto& L = m.layout();
  Eigen::VectorXd x(static_cast<Eigen::Index>(m.dim()));
  auto baseline = [&](const Block& b) {
    const double step = 3.0 / static_cast<double>(b.size - 1);
    x[static_cast<Eigen::Index>(b.offset)] = -1.5 + uniform(rng, -0.2, 0.2);
    for (std::size_t k = 1; k < b.size; ++k)
      x[static_cast<Eigen::Index>(b.offset + k)] = std::log(step) + uniform(rng, -0.3, 0.3);
  };
  baseline(L.base1);
  baseline(L.base2);
  for (const Block& b : {L.beta1, L.beta2})
    for (std::size_t k = 0; k < b.size; ++k) x[static_cast<Eigen::Index>(b.offset + k)] = uniform(rng, -0.5, 0.5);
  const auto f = m.spec().copula;
  const auto [lo, hi] = copula::tau_bounds(f);
  const double t = std::clamp(tau, lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo));
  x[static_cast<Eigen::Index>(L.beta3.offset)] = copula::eta_from_tau(f, t);
  for (std::size_t k = 1; k < L.beta3.size; ++k)
    x[static_cast<Eigen::Index>(L.beta3.offset + k)] = uniform(rng, -0.1, 0.1);
  return x;
}

/// Central-difference gradient of a scalar function.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double rel = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel * (1.0 + std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// max|a - b| / max(1, max|b|)
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` panels of 8 nodes.
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  static constexpr double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                  -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                  0.7966664774136267,  0.9602898564975363};
  static constexpr double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int k = 0; k < 8; ++k) s += w[k] * f(c + 0.5 * h * x[k]);
  }
  return 0.5 * h * s;
}

/// Scenario A style data with p covariates where only the given ones matter.
inline sim::SimConfig small_scenario(std::size_t n, std::size_t p, std::uint64_t seed) {
  sim::SimConfig c;
  c.n = n;
  c.p = p;
  c.seed = seed;
  return c;
}

}  // namespace fixtures
