#include <catch_amalgamated.hpp>

#include <cmath>

#include "../support/copula_checks.hpp"
#include "../support/fixtures.hpp"

using namespace brbvs;
using copula::Family;
using Catch::Approx;

namespace {

// Clayton written out by hand
double clayton_cdf(double u, double v, double t) {
  return std::pow(std::pow(u, -t) + std::pow(v, -t) - 1.0, -1.0 / t);
}

}  // namespace

TEST_CASE("Clayton cdf at the centre", "[copula]") {
  CHECK(copula::cdf(Family::Clayton, 0.5, 0.5, 1.0) == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(copula::cdf(Family::Clayton, 0.37, 1.0, 2.0) == Approx(0.37).epsilon(1e-15));
  for (double u : {0.1, 0.4, 0.8})
    for (double v : {0.2, 0.6, 0.95})
      CHECK(copula::cdf(Family::Clayton, u, v, 2.7) == Approx(clayton_cdf(u, v, 2.7)).epsilon(1e-12));
}

TEST_CASE("FGM at zero is the product copula", "[copula]") {
  for (double u : {0.1, 0.5, 0.9})
    for (double v : {0.3, 0.7}) {
      CHECK(copula::cdf(Family::FGM, u, v, 0.0) == Approx(u * v));
      CHECK(copula::h1(Family::FGM, u, v, 0.0) == Approx(v));
      CHECK(copula::density(Family::FGM, u, v, 0.0) == Approx(1.0));
    }
}

TEST_CASE("Clayton h-function by hand and by differencing", "[copula]") {
  CHECK(copula::h1(Family::Clayton, 0.5, 0.5, 1.0) == Approx(4.0 / 9.0).epsilon(1e-13));
  const double h = 1e-6;
  const double fd = (clayton_cdf(0.5 + h, 0.5, 1.0) - clayton_cdf(0.5 - h, 0.5, 1.0)) / (2 * h);
  CHECK(copula::h1(Family::Clayton, 0.5, 0.5, 1.0) == Approx(fd).epsilon(1e-8));
}

TEST_CASE("h-function on the upper boundary is one", "[copula]") {
  for (auto f : copula::kAllFamilies) {
    const double theta = fixtures::theta_grid(f, 5)[3];
    CHECK(copula::h1(f, 0.3, 1.0, theta) == 1.0);
    CHECK(copula::h2(f, 1.0, 0.3, theta) == 1.0);
  }
}

TEST_CASE("densities at independence", "[copula]") {
  for (double u : {0.05, 0.5, 0.93})
    for (double v : {0.2, 0.8}) {
      CHECK(copula::density(Family::Gumbel, u, v, 1.0) == Approx(1.0).epsilon(1e-12));
      CHECK(copula::density(Family::Gaussian, u, v, 0.0) == Approx(1.0).epsilon(1e-12));
      CHECK(copula::density(Family::Plackett, u, v, 1.0) == Approx(1.0).epsilon(1e-12));
      CHECK(copula::density(Family::Frank, u, v, 0.0) == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Clayton density by two-dimensional differencing", "[copula]") {
  const double h = 1e-4;
  const double u = 0.5, v = 0.5, t = 2.0;
  const double fd = (clayton_cdf(u + h, v + h, t) - clayton_cdf(u + h, v - h, t) -
                     clayton_cdf(u - h, v + h, t) + clayton_cdf(u - h, v - h, t)) /
                    (4 * h * h);
  CHECK(copula::density(Family::Clayton, u, v, t) == Approx(fd).epsilon(1e-6));
}

TEST_CASE("dependence parameter links", "[copula]") {
  CHECK(copula::theta_from_eta(Family::Clayton, 1.2) == Approx(3.32011692).epsilon(1e-8));
  CHECK(copula::theta_from_eta(Family::Gaussian, 0.0) == 0.0);
  CHECK(copula::theta_from_eta(Family::Plackett, 0.0) == 1.0);
  CHECK(copula::theta_from_eta(Family::Gumbel, 0.0) == 2.0);
  for (auto f : copula::kAllFamilies)
    for (double eta : {-1.3, 0.2, 2.0}) {
      const double th = copula::theta_from_eta(f, eta);
      CHECK(copula::theta_range(f).contains(th));
      CHECK(copula::eta_from_theta(f, th) == Approx(eta).epsilon(1e-10));
    }
}

TEST_CASE("unknown codes and out-of-range arguments are rejected", "[copula]") {
  CHECK_THROWS_AS(copula::family_from_code("XX"), DomainError);
  CHECK_THROWS_AS(copula::cdf(Family::Clayton, 0.5, 0.5, -1.0), DomainError);
  CHECK_THROWS_AS(copula::cdf(Family::Gaussian, 1.5, 0.5, 0.1), DomainError);
  for (auto f : copula::kAllFamilies) CHECK(copula::family_from_code(copula::code(f)) == f);
}

TEST_CASE("conditional sampling inverts the h-function", "[copula]") {
  CHECK(copula::conditional_sample(Family::Clayton, 0.4, 1.0, 2.0) == 1.0);
  CHECK(copula::conditional_sample(Family::Clayton, 0.4, 0.37, 1e-9) == Approx(0.37).epsilon(1e-6));
  // bisection oracle written here
  auto oracle = [](Family f, double u, double w, double th) {
    double lo = 0, hi = 1;
    for (int k = 0; k < 200; ++k) {
      const double m = 0.5 * (lo + hi);
      (copula::h1(f, u, m, th) < w ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
  };
  const double v = copula::conditional_sample(Family::Frank, 0.3, 0.7, 5.0);
  CHECK(std::abs(copula::h1(Family::Frank, 0.3, v, 5.0) - 0.7) < 1e-10);
  CHECK(v == Approx(oracle(Family::Frank, 0.3, 0.7, 5.0)).margin(1e-9));
  const double c = copula::conditional_sample(Family::Clayton, 0.6, 0.25, 3.3);
  CHECK(copula::h1(Family::Clayton, 0.6, c, 3.3) == Approx(0.25).epsilon(1e-10));
}

TEST_CASE("Kendall tau of each family against numerical integration", "[copula]") {
  // tau = 1 - 4 * integral of h1 h2, evaluated in normal scores
  auto oracle = [](Family f, double th) {
    static constexpr double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                    0.7966664774136267,  0.9602898564975363};
    static constexpr double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                    0.2223810344533745, 0.1012285362903763};
    std::vector<double> u, wt;
    const int P = 60;
    const double h = 18.0 / P;
    for (int p = 0; p < P; ++p)
      for (int k = 0; k < 8; ++k) {
        const double z = -9 + (p + 0.5) * h + 0.5 * h * x[k];
        u.push_back(math::norm_cdf(z));
        wt.push_back(0.5 * h * w[k] * math::norm_pdf(z));
      }
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        s += wt[i] * wt[j] * copula::h1(f, u[i], u[j], th) * copula::h2(f, u[i], u[j], th);
    return 1 - 4 * s;
  };
  for (auto f : copula::kAllFamilies)
    for (double th : fixtures::theta_grid(f, 4)) {
      INFO(copula::name(f) << " theta=" << th);
      CHECK(copula::kendall_tau(f, th) == Approx(oracle(f, th)).margin(2e-6));
    }
}

TEST_CASE("eta_from_tau inverts Kendall tau", "[copula]") {
  for (auto f : copula::kAllFamilies) {
    auto [lo, hi] = copula::tau_bounds(f);
    for (double q : {0.2, 0.5, 0.8}) {
      const double tau = lo + q * (hi - lo);
      const double th = copula::theta_from_eta(f, copula::eta_from_tau(f, tau));
      CHECK(copula::kendall_tau(f, th) == Approx(tau).margin(1e-8));
    }
  }
}

TEST_CASE("density integrates to one, h matches differences, volumes are nonnegative",
          "[copula]") {
  for (auto f : copula::kAllFamilies)
    for (double th : fixtures::theta_grid(f, 5)) {
      INFO(copula::name(f) << " theta=" << th);
      CHECK(std::abs(fixtures::density_integral(f, th) - 1.0) < 1e-4);
      CHECK(fixtures::h_fd_error(f, th) < 1e-6);
      CHECK(fixtures::min_rectangle_volume(f, th, 2000, 3) >= -1e-12);
    }
}

TEST_CASE("Joe is finite near the upper corner", "[copula]") {
  const double u = 1 - 1e-12;
  CHECK(std::isfinite(copula::density(Family::Joe, u, u, 2.2)));
  CHECK(std::isfinite(copula::h1(Family::Joe, u, u, 2.2)));
  CHECK(copula::cdf(Family::Joe, u, u, 2.2) == Approx(1.0));
}

TEST_CASE("Frank and Plackett are continuous across the independence guard band",
          "[copula]") {
  for (double u : {0.2, 0.7})
    for (double v : {0.3, 0.9}) {
      const double inside = copula::cdf(Family::Frank, u, v, 5e-7);
      const double outside = copula::cdf(Family::Frank, u, v, 2e-6);
      // the gap is first order in theta, no jump at the band edge
      CHECK(std::abs(inside - outside) < 1e-7);
      CHECK(std::abs(copula::density(Family::Plackett, u, v, 1 + 5e-7) -
                     copula::density(Family::Plackett, u, v, 1 + 2e-6)) < 5e-6);
    }
}
