// Small descriptive statistics helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace brbvs::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample standard deviation with the n - 1 divisor.
inline double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("standard deviation needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline double correlation(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Linear-interpolation quantile (type 7) of an ascending sorted sample.
inline double sorted_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Kendall's tau-b in O(n log n) (Knight's merge-sort algorithm).
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("kendall_tau: length mismatch");
  if (n < 2) throw std::invalid_argument("kendall_tau: need at least two pairs");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  auto pairs = [](std::uint64_t m) { return m * (m - 1) / 2; };

  // ties in x, and joint ties in (x, y)
  std::uint64_t tx = 0, txy = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && x[idx[j]] == x[idx[i]]) ++j;
    tx += pairs(j - i);
    for (std::size_t a = i; a < j;) {
      std::size_t b = a + 1;
      while (b < j && y[idx[b]] == y[idx[a]]) ++b;
      txy += pairs(b - a);
      a = b;
    }
    i = j;
  }

  // count inversions of y in x-order by merge sort (strict inversions = discordant pairs)
  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
      std::size_t a = lo, b = mid, k = lo;
      while (a < mid && b < hi) {
        if (ys[b] < ys[a]) {
          buf[k++] = ys[b++];
          swaps += mid - a;
        } else {
          buf[k++] = ys[a++];
        }
      }
      while (a < mid) buf[k++] = ys[a++];
      while (b < hi) buf[k++] = ys[b++];
    }
    ys.swap(buf);
  }

  std::uint64_t ty = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && ys[j] == ys[i]) ++j;
    ty += pairs(j - i);
    i = j;
  }

  const double n0 = static_cast<double>(pairs(n));
  const double concordant_minus_discordant =
      n0 - static_cast<double>(tx) - static_cast<double>(ty) + static_cast<double>(txy) -
      2.0 * static_cast<double>(swaps);
  const double denom =
      std::sqrt((n0 - static_cast<double>(tx)) * (n0 - static_cast<double>(ty)));
  return denom > 0.0 ? concordant_minus_discordant / denom : 0.0;
}

}  // namespace brbvs::stats
