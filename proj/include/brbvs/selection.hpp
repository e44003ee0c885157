// Bivariate ranking-based variable selection: rank covariates on disjoint
// subsamples, estimate how often each top-k set appears, and pick the size
// where the probability of the best set drops fastest.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "brbvs/data.hpp"
#include "brbvs/fit.hpp"
#include "brbvs/parallel.hpp"
#include "brbvs/ranking.hpp"
#include "brbvs/rng.hpp"

namespace brbvs {

struct BrbvsConfig {
  std::size_t kmax = 5;
  copula::Family copula = copula::Family::Clayton;
  margin::Link link1 = margin::Link::PH;
  margin::Link link2 = margin::Link::PH;
  std::size_t m = 0;  // 0: floor(n / 2)
  double tau = 0.5;
  std::size_t B = 50;
  Metric metric = Metric::FIM;
  std::uint64_t seed = 1;
  int interior_knots = 8;
  double ridge = 1e-4;
  OptimOptions optim;

  std::size_t subsample_size(std::size_t n) const { return m ? m : n / 2; }

  void validate(std::size_t n, std::size_t p) const {
    if (kmax < 1 || kmax > p)
      throw DomainError("kmax must lie in [1, p=" + std::to_string(p) + "], got " +
                        std::to_string(kmax));
    const std::size_t mm = subsample_size(n);
    if (mm < 1 || mm > n)
      throw DomainError("subsample size m=" + std::to_string(mm) + " must lie in [1, n=" +
                        std::to_string(n) + "]");
    if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("tau must lie in (0, 1]");
    if (B < 1) throw DomainError("B must be at least 1");
  }
};

using IndexSet = std::vector<std::size_t>;  // sorted

/// Rankings of both margins for every successful subsample fit.
struct SubsampleRankings {
  std::size_t total = 0;   // B * r subsample fits attempted
  std::size_t failed = 0;
  std::vector<std::vector<std::size_t>> order1, order2;  // successful fits only
  std::vector<OptimReport> reports;                      // successful fits only
};

inline IndexSet top_set(const std::vector<std::size_t>& order, std::size_t k) {
  IndexSet s(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, order.size())));
  std::sort(s.begin(), s.end());
  return s;
}

/// pi_hat(A) for every top-k set A observed: count over successful subsamples.
inline std::map<IndexSet, double> estimate_pi(const std::vector<std::vector<std::size_t>>& orders,
                                              std::size_t k) {
  std::map<IndexSet, double> pi;
  if (k == 0) {
    pi[{}] = 1.0;
    return pi;
  }
  if (orders.empty()) return pi;
  for (const auto& o : orders) pi[top_set(o, k)] += 1.0;
  for (auto& [set, v] : pi) v /= static_cast<double>(orders.size());
  return pi;
}

/// Most probable set; ties go to the lexicographically smallest index tuple.
inline std::pair<IndexSet, double> argmax_set(const std::map<IndexSet, double>& pi) {
  std::pair<IndexSet, double> best{{}, -1.0};
  for (const auto& [set, v] : pi)
    if (v > best.second) best = {set, v};
  if (best.second < 0.0) best.second = 0.0;
  return best;
}

/// argmin over k = 0..kmax-1 of pi[k+1]^tau / pi[k]; ties to the smaller k.
inline std::size_t select_size(const std::vector<double>& pi_by_k, double tau, std::size_t kmax) {
  if (pi_by_k.size() < kmax + 1) throw DomainError("need probabilities for k = 0..kmax");
  std::size_t best = 0;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kmax; ++k) {
    const double ratio = pi_by_k[k] > 0.0 ? std::pow(pi_by_k[k + 1], tau) / pi_by_k[k]
                                          : std::numeric_limits<double>::infinity();
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return best;
}

/// Fraction of subsamples ranking each covariate of the selected set within
/// the top s positions. Covariates outside the set are not reported.
inline std::vector<std::pair<std::size_t, double>> selection_frequencies(
    const std::vector<std::vector<std::size_t>>& orders, const IndexSet& selected) {
  std::vector<std::pair<std::size_t, double>> out;
  const std::size_t s = selected.size();
  for (auto j : selected) {
    double c = 0.0;
    for (const auto& o : orders) {
      const auto top = top_set(o, s);
      c += std::binary_search(top.begin(), top.end(), j) ? 1.0 : 0.0;
    }
    out.emplace_back(j, orders.empty() ? 0.0 : c / static_cast<double>(orders.size()));
  }
  return out;
}

struct MarginSelection {
  std::vector<std::map<IndexSet, double>> pi;  // k = 0..kmax
  std::vector<IndexSet> A_hat;                 // k = 0..kmax
  std::vector<double> pi_max;                  // k = 0..kmax
  std::size_t s_hat = 0;
  IndexSet selected;
  std::vector<std::pair<std::size_t, double>> frequencies;
};

struct BrbvsResult {
  std::vector<std::string> names;
  Metric metric = Metric::FIM;
  std::size_t subsamples = 0;
  std::size_t failed = 0;
  MarginSelection margin1, margin2;
  std::vector<std::string> warnings;

  std::vector<std::string> selected_names(int which) const {
    std::vector<std::string> out;
    for (auto j : (which == 1 ? margin1 : margin2).selected) out.push_back(names[j]);
    return out;
  }
};

/// Subsample index sets of every replicate, from per-replicate derived seeds.
inline std::vector<std::vector<std::size_t>> brbvs_subsamples(std::size_t n,
                                                              const BrbvsConfig& cfg) {
  std::vector<std::vector<std::size_t>> all;
  const std::size_t m = cfg.subsample_size(n);
  for (std::size_t b = 0; b < cfg.B; ++b) {
    Rng rng(derive_seed(cfg.seed, b));
    for (auto& s : draw_subsamples(n, m, rng)) all.push_back(std::move(s));
  }
  return all;
}

/// Fits every subsample once and ranks both margins under each metric.
inline std::map<Metric, SubsampleRankings> rank_subsamples(const Dataset& d, const BrbvsConfig& cfg,
                                                           const std::vector<Metric>& metrics) {
  cfg.validate(d.n(), d.p());
  const auto subsamples = brbvs_subsamples(d.n(), cfg);
  ModelSpec spec;
  spec.copula = cfg.copula;
  spec.link1 = cfg.link1;
  spec.link2 = cfg.link2;
  spec.eta1 = d.names;
  spec.eta2 = d.names;
  spec.interior_knots = cfg.interior_knots;
  spec.ridge = cfg.ridge;
  FitOptions fo;
  fo.optim = cfg.optim;

  struct Slot {
    bool ok = false;
    OptimReport report;
    std::map<Metric, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> orders;
  };
  std::vector<Slot> slots(subsamples.size());
  parallel_for(subsamples.size(), [&](std::size_t q) {
    try {
      const Dataset sub = d.rows(subsamples[q]);
      const FittedModel fm = fit_model(spec, sub, fo);
      if (!fm.converged()) return;
      for (Metric mt : metrics) {
        const auto r1 = rank_margin(measure(mt, fm, 1), 1);
        const auto r2 = rank_margin(measure(mt, fm, 2), 2);
        slots[q].orders[mt] = {r1.order, r2.order};
      }
      slots[q].report = fm.report;
      slots[q].ok = true;
    } catch (const std::exception&) {
      slots[q].ok = false;
    }
  });

  std::map<Metric, SubsampleRankings> out;
  for (Metric mt : metrics) {
    auto& r = out[mt];
    r.total = slots.size();
    for (const auto& s : slots) {
      if (!s.ok) {
        ++r.failed;
        continue;
      }
      r.order1.push_back(s.orders.at(mt).first);
      r.order2.push_back(s.orders.at(mt).second);
      r.reports.push_back(s.report);
    }
  }
  return out;
}

inline MarginSelection select_margin(const std::vector<std::vector<std::size_t>>& orders,
                                     std::size_t kmax, double tau) {
  MarginSelection ms;
  for (std::size_t k = 0; k <= kmax; ++k) {
    ms.pi.push_back(estimate_pi(orders, k));
    auto [set, v] = argmax_set(ms.pi.back());
    ms.A_hat.push_back(set);
    ms.pi_max.push_back(v);
  }
  ms.s_hat = select_size(ms.pi_max, tau, kmax);
  ms.selected = ms.A_hat[ms.s_hat];
  ms.frequencies = selection_frequencies(orders, ms.selected);
  return ms;
}

inline BrbvsResult aggregate(const SubsampleRankings& r, const BrbvsConfig& cfg,
                             const std::vector<std::string>& names, Metric metric) {
  if (r.order1.empty())
    throw NumericError("all " + std::to_string(r.total) + " subsample fits failed");
  BrbvsResult res;
  res.names = names;
  res.metric = metric;
  res.subsamples = r.total;
  res.failed = r.failed;
  if (5 * r.failed > r.total)
    res.warnings.push_back(std::to_string(r.failed) + " of " + std::to_string(r.total) +
                           " subsample fits failed and were excluded");
  res.margin1 = select_margin(r.order1, cfg.kmax, cfg.tau);
  res.margin2 = select_margin(r.order2, cfg.kmax, cfg.tau);
  return res;
}

inline BrbvsResult run_brbvs(const Dataset& d, const BrbvsConfig& cfg) {
  const auto r = rank_subsamples(d, cfg, {cfg.metric});
  return aggregate(r.at(cfg.metric), cfg, d.names, cfg.metric);
}

}  // namespace brbvs
