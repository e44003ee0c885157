// Covariate importance scores and per-margin rankings.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "brbvs/errors.hpp"
#include "brbvs/fit.hpp"

namespace brbvs {

enum class Metric { FIM, Abs };

inline std::string_view code(Metric m) { return m == Metric::FIM ? "FIM" : "Abs"; }

inline Metric metric_from_code(std::string_view s) {
  if (s == "FIM") return Metric::FIM;
  if (s == "Abs" || s == "ABS" || s == "abs") return Metric::Abs;
  throw DomainError("unknown metric '" + std::string(s) + "' (expected FIM or Abs)");
}

/// beta_j^2 times the diagonal observed information of beta_j.
inline std::vector<double> fim_measure(std::span<const double> beta,
                                       std::span<const double> info_diag) {
  if (beta.size() != info_diag.size())
    throw DomainError("information diagonal does not match the coefficients");
  std::vector<double> s(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) s[j] = beta[j] * beta[j] * info_diag[j];
  return s;
}

inline std::vector<double> abs_measure(std::span<const double> beta) {
  std::vector<double> s(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) s[j] = std::abs(beta[j]);
  return s;
}

inline std::vector<double> fim_measure(const FittedModel& fm, int which) {
  if (fm.info.size() == 0) throw DomainError("fit carries no information matrix");
  const Block& b = which == 1 ? fm.layout.beta1 : fm.layout.beta2;
  std::vector<double> diag;
  for (std::size_t j = 0; j < b.size; ++j) {
    const auto k = static_cast<Eigen::Index>(b.offset + j);
    diag.push_back(fm.info(k, k));
  }
  return fim_measure(fm.beta(which), diag);
}

inline std::vector<double> abs_measure(const FittedModel& fm, int which) {
  return abs_measure(fm.beta(which));
}

inline std::vector<double> measure(Metric m, const FittedModel& fm, int which) {
  return m == Metric::FIM ? fim_measure(fm, which) : abs_measure(fm, which);
}

struct MarginRanking {
  int margin = 1;
  std::vector<std::size_t> order;  // covariate indices, most important first
  std::vector<double> scores;      // aligned with order
};

/// Descending by score; equal scores keep ascending column order. NaN ranks last.
inline MarginRanking rank_margin(std::span<const double> scores, int margin = 1) {
  MarginRanking r;
  r.margin = margin;
  r.order.resize(scores.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  auto key = [&](std::size_t j) {
    return std::isnan(scores[j]) ? -std::numeric_limits<double>::infinity() : scores[j];
  };
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  for (auto j : r.order) r.scores.push_back(scores[j]);
  return r;
}

}  // namespace brbvs
