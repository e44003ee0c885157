// Information-criterion driven link choice and stepwise covariate selection.
// Stepwise moves add or drop a covariate in all three predictors at once.

#pragma once

#include <array>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "brbvs/fit.hpp"
#include "brbvs/parallel.hpp"

namespace brbvs {

enum class Criterion { AIC, BIC };

inline std::string_view code(Criterion c) { return c == Criterion::AIC ? "AIC" : "BIC"; }

inline Criterion criterion_from_code(std::string_view s) {
  if (s == "AIC" || s == "aic") return Criterion::AIC;
  if (s == "BIC" || s == "bic") return Criterion::BIC;
  throw DomainError("unknown criterion '" + std::string(s) + "' (expected AIC or BIC)");
}

/// Criterion of a fit; +infinity unless it converged.
inline double criterion_value(const FitCore& f, Criterion c) {
  if (!f.converged()) return std::numeric_limits<double>::infinity();
  return c == Criterion::AIC ? f.aic() : f.bic();
}

struct StepOptions {
  int interior_knots = 8;
  double ridge = 1e-4;
  OptimOptions optim;
};

struct LinkSelection {
  margin::Link link1 = margin::Link::PH;
  margin::Link link2 = margin::Link::PH;
  std::array<double, 3> values1{};  // in kAllLinks order
  std::array<double, 3> values2{};
};

/// Per margin, the link of the copula-free fit with the smallest criterion.
/// Ties keep the earlier link in PH, PO, probit order.
inline LinkSelection select_link(const Dataset& d, Criterion measure,
                                 const std::vector<std::string>& eta1,
                                 const std::vector<std::string>& eta2,
                                 const StepOptions& opt = {}) {
  LinkSelection sel;
  std::array<double, 6> v{};
  parallel_for(6, [&](std::size_t k) {
    const int which = k < 3 ? 1 : 2;
    const auto link = margin::kAllLinks[k % 3];
    try {
      const auto f = fit_margin(d, which, link, which == 1 ? eta1 : eta2, opt.interior_knots,
                                opt.ridge, opt.optim);
      v[k] = criterion_value(f, measure);
    } catch (const NumericError&) {
      v[k] = std::numeric_limits<double>::infinity();
    }
  });
  for (int which = 1; which <= 2; ++which) {
    auto& vals = which == 1 ? sel.values1 : sel.values2;
    std::size_t best = 3;
    for (std::size_t l = 0; l < 3; ++l) {
      vals[l] = v[(which - 1) * 3 + l];
      if (vals[l] < std::numeric_limits<double>::infinity() && (best == 3 || vals[l] < vals[best]))
        best = l;
    }
    if (best == 3)
      throw NumericError("no link could be fitted for margin " + std::to_string(which));
    (which == 1 ? sel.link1 : sel.link2) = margin::kAllLinks[best];
  }
  return sel;
}

struct Step {
  std::string label;  // "(full model)", "(intercept)", "Remove: x", "Add: x"
  std::vector<std::string> covariates;
  double value = 0.0;
};

struct StepTrace {
  Criterion measure = Criterion::AIC;
  std::vector<Step> steps;
  ModelSpec final_spec;
};

namespace step_detail {

inline ModelSpec spec_with(const ModelSpec& base, const std::vector<std::string>& cov) {
  ModelSpec s = base;
  s.eta1 = s.eta2 = s.eta3 = cov;
  return s;
}

inline double score(const ModelSpec& spec, const Dataset& d, Criterion measure,
                    const StepOptions& opt) {
  try {
    FitOptions fo;
    fo.optim = opt.optim;
    return criterion_value(fit_model(spec, d, fo), measure);
  } catch (const NumericError&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Greedy search; `candidates(current)` lists the neighbouring covariate sets
/// with their labels.
template <class Neighbours>
StepTrace greedy(const Dataset& d, const ModelSpec& base, Criterion measure,
                 const StepOptions& opt, std::vector<std::string> start, std::string start_label,
                 Neighbours&& neighbours) {
  StepTrace tr;
  tr.measure = measure;
  const double v0 = score(spec_with(base, start), d, measure, opt);
  if (!(v0 < std::numeric_limits<double>::infinity()))
    throw NumericError("starting model " + start_label + " could not be fitted");
  tr.steps.push_back({std::move(start_label), start, v0});
  for (;;) {
    const auto& cur = tr.steps.back();
    const auto cands = neighbours(cur.covariates);
    if (cands.empty()) break;
    std::vector<double> vals(cands.size());
    parallel_for(cands.size(), [&](std::size_t k) {
      vals[k] = score(spec_with(base, cands[k].second), d, measure, opt);
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < vals.size(); ++k)
      if (vals[k] < vals[best]) best = k;
    if (!(vals[best] < cur.value)) break;
    tr.steps.push_back({cands[best].first, cands[best].second, vals[best]});
  }
  for (std::size_t k = 1; k < tr.steps.size(); ++k)
    if (!(tr.steps[k].value < tr.steps[k - 1].value))
      throw std::logic_error("stepwise criterion did not decrease");
  tr.final_spec = spec_with(base, tr.steps.back().covariates);
  return tr;
}

}  // namespace step_detail

inline StepTrace backward(const Dataset& d, copula::Family copula, margin::Link link1,
                          margin::Link link2, Criterion measure, const StepOptions& opt = {},
                          std::vector<std::string> covariates = {}) {
  if (covariates.empty()) covariates = d.names;
  if (covariates.empty()) throw DomainError("backward selection needs at least one covariate");
  ModelSpec base;
  base.copula = copula;
  base.link1 = link1;
  base.link2 = link2;
  base.interior_knots = opt.interior_knots;
  base.ridge = opt.ridge;
  return step_detail::greedy(
      d, base, measure, opt, covariates, "(full model)", [](const std::vector<std::string>& cur) {
        std::vector<std::pair<std::string, std::vector<std::string>>> c;
        for (std::size_t j = 0; j < cur.size(); ++j) {
          auto next = cur;
          next.erase(next.begin() + static_cast<std::ptrdiff_t>(j));
          c.emplace_back("Remove: " + cur[j], std::move(next));
        }
        return c;
      });
}

inline StepTrace forward(const Dataset& d, copula::Family copula, margin::Link link1,
                         margin::Link link2, Criterion measure, const StepOptions& opt = {},
                         std::vector<std::string> covariates = {}) {
  if (covariates.empty()) covariates = d.names;
  ModelSpec base;
  base.copula = copula;
  base.link1 = link1;
  base.link2 = link2;
  base.interior_knots = opt.interior_knots;
  base.ridge = opt.ridge;
  return step_detail::greedy(
      d, base, measure, opt, {}, "(intercept)", [covariates](const std::vector<std::string>& cur) {
        std::vector<std::pair<std::string, std::vector<std::string>>> c;
        for (const auto& v : covariates) {
          if (std::find(cur.begin(), cur.end(), v) != cur.end()) continue;
          auto next = cur;
          next.push_back(v);
          c.emplace_back("Add: " + v, std::move(next));
        }
        return c;
      });
}

}  // namespace brbvs
