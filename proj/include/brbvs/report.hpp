// JSON and plain-text renderings of fits, selections, traces and evaluations.

#pragma once

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "brbvs/evaluation.hpp"
#include "brbvs/fit.hpp"
#include "brbvs/selection.hpp"
#include "brbvs/simulator.hpp"
#include "brbvs/stepwise.hpp"

namespace brbvs::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// NaN and infinities are stored as null.
inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
inline double num(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline Json to_json(const OptimReport& r) {
  return Json{{"iterations", r.iterations},
              {"max_abs_gradient", num(r.max_abs_gradient)},
              {"info_positive_definite", r.info_positive_definite},
              {"eigen_range", Json::array({num(r.eigen_min), num(r.eigen_max)})},
              {"converged", r.converged},
              {"stop_reason", r.stop_reason}};
}

inline OptimReport optim_report_from_json(const Json& j) {
  OptimReport r;
  r.iterations = j.at("iterations").get<int>();
  r.max_abs_gradient = num(j.at("max_abs_gradient"));
  r.info_positive_definite = j.at("info_positive_definite").get<bool>();
  r.eigen_min = num(j.at("eigen_range").at(0));
  r.eigen_max = num(j.at("eigen_range").at(1));
  r.converged = j.at("converged").get<bool>();
  r.stop_reason = j.at("stop_reason").get<std::string>();
  return r;
}

inline Json to_json(const std::vector<CoefRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows)
    a.push_back({{"name", r.name}, {"estimate", num(r.estimate)}, {"se", num(r.se)},
                 {"z", num(r.z)}, {"p", num(r.p)}});
  return a;
}

inline std::vector<CoefRow> coef_rows_from_json(const Json& a) {
  std::vector<CoefRow> rows;
  for (const auto& r : a)
    rows.push_back({r.at("name").get<std::string>(), num(r.at("estimate")), num(r.at("se")),
                    num(r.at("z")), num(r.at("p"))});
  return rows;
}

inline Json to_json(const FitSummary& s) {
  return Json{{"copula", s.copula},
              {"margin1", s.margin1},
              {"margin2", s.margin2},
              {"theta_link", s.theta_link},
              {"eta1", to_json(s.eta1)},
              {"eta2", to_json(s.eta2)},
              {"eta3", to_json(s.eta3)},
              {"theta", {{"estimate", num(s.theta)}, {"ci", {num(s.theta_lo), num(s.theta_hi)}}}},
              {"kendall_tau", num(s.kendall_tau)},
              {"n", s.n},
              {"edf", num(s.edf)},
              {"loglik", num(s.loglik)},
              {"aic", num(s.aic)},
              {"bic", num(s.bic)},
              {"convergence", to_json(s.report)},
              {"warnings", s.warnings}};
}

inline FitSummary fit_summary_from_json(const Json& j) {
  FitSummary s;
  s.copula = j.at("copula").get<std::string>();
  s.margin1 = j.at("margin1").get<std::string>();
  s.margin2 = j.at("margin2").get<std::string>();
  s.theta_link = j.at("theta_link").get<std::string>();
  s.eta1 = coef_rows_from_json(j.at("eta1"));
  s.eta2 = coef_rows_from_json(j.at("eta2"));
  s.eta3 = coef_rows_from_json(j.at("eta3"));
  s.theta = num(j.at("theta").at("estimate"));
  s.theta_lo = num(j.at("theta").at("ci").at(0));
  s.theta_hi = num(j.at("theta").at("ci").at(1));
  s.kendall_tau = num(j.at("kendall_tau"));
  s.n = j.at("n").get<std::size_t>();
  s.edf = num(j.at("edf"));
  s.loglik = num(j.at("loglik"));
  s.aic = num(j.at("aic"));
  s.bic = num(j.at("bic"));
  s.report = optim_report_from_json(j.at("convergence"));
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

inline std::string format_g(double v, int digits = 4) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NA" : (v > 0 ? "Inf" : "-Inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// Convergence check in the usual diagnostic layout.
inline std::string convergence_text(const OptimReport& r) {
  std::ostringstream o;
  o << "Largest absolute gradient value: " << format_g(r.max_abs_gradient, 7) << "\n"
    << "Observed information matrix is "
    << (r.info_positive_definite ? "positive definite" : "not positive definite") << "\n"
    << "Eigenvalue range: [" << format_g(r.eigen_min, 7) << "," << format_g(r.eigen_max, 7)
    << "]\n"
    << "Damped Newton iterations: " << r.iterations << " (" << r.stop_reason << ")\n";
  return o.str();
}

inline std::string coef_table(const std::vector<CoefRow>& rows) {
  std::ostringstream o;
  std::size_t w = 12;
  for (const auto& r : rows) w = std::max(w, r.name.size() + 1);
  o << std::left << std::setw(static_cast<int>(w)) << "" << std::right << std::setw(10)
    << "Estimate" << std::setw(12) << "Std. Error" << std::setw(10) << "z value" << std::setw(12)
    << "Pr(>|z|)" << "\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%10.4f%12.4f%10.3f%12s", r.estimate, r.se, r.z,
                  format_g(r.p, 3).c_str());
    o << std::left << std::setw(static_cast<int>(w)) << r.name << std::right << line << "\n";
  }
  if (rows.empty()) o << "(no covariates)\n";
  return o.str();
}

inline std::string summary_text(const FitSummary& s) {
  std::ostringstream o;
  o << "COPULA:   " << s.copula << "\n"
    << "MARGIN 1: " << s.margin1 << "\n"
    << "MARGIN 2: " << s.margin2 << "\n\n"
    << "EQUATION 1 (baseline: monotone spline in log time)\n" << coef_table(s.eta1) << "\n"
    << "EQUATION 2 (baseline: monotone spline in log time)\n" << coef_table(s.eta2) << "\n"
    << "EQUATION 3\nLink function for theta: " << s.theta_link << "\n" << coef_table(s.eta3)
    << "\n"
    << "theta = " << format_g(s.theta, 3) << "(" << format_g(s.theta_lo, 3) << ","
    << format_g(s.theta_hi, 3) << ")  tau = " << format_g(s.kendall_tau, 3) << "\n"
    << "n = " << s.n << "  total edf = " << format_g(s.edf, 3) << "\n"
    << "logLik = " << format_g(s.loglik, 8) << "  AIC = " << format_g(s.aic, 8)
    << "  BIC = " << format_g(s.bic, 8) << "\n\n"
    << convergence_text(s.report);
  for (const auto& w : s.warnings) o << "Warning: " << w << "\n";
  return o.str();
}

inline Json to_json(const BrbvsConfig& c) {
  return Json{{"kmax", c.kmax},
              {"copula", copula::code(c.copula)},
              {"margins", {margin::code(c.link1), margin::code(c.link2)}},
              {"m", c.m},
              {"tau", c.tau},
              {"B", c.B},
              {"metric", code(c.metric)},
              {"seed", c.seed},
              {"interior_knots", c.interior_knots},
              {"ridge", c.ridge}};
}

inline Json names_of(const IndexSet& s, const std::vector<std::string>& names) {
  Json a = Json::array();
  for (auto j : s) a.push_back(names[j]);
  return a;
}

inline Json to_json(const MarginSelection& m, const std::vector<std::string>& names) {
  Json pi = Json::array();
  for (std::size_t k = 0; k < m.pi.size(); ++k) {
    Json sets = Json::array();
    for (const auto& [set, v] : m.pi[k]) sets.push_back({{"set", names_of(set, names)}, {"pi", v}});
    pi.push_back({{"k", k}, {"sets", sets}});
  }
  Json a_hat = Json::array();
  for (std::size_t k = 0; k < m.A_hat.size(); ++k)
    a_hat.push_back({{"k", k}, {"set", names_of(m.A_hat[k], names)}, {"pi", m.pi_max[k]}});
  Json freq = Json::array();
  for (const auto& [j, f] : m.frequencies) freq.push_back({{"covariate", names[j]}, {"frequency", f}});
  return Json{{"s_hat", m.s_hat},
              {"selected", names_of(m.selected, names)},
              {"frequencies", freq},
              {"A_hat", a_hat},
              {"pi", pi}};
}

inline Json to_json(const BrbvsResult& r) {
  return Json{{"metric", code(r.metric)},
              {"subsample_fits", r.subsamples},
              {"failed_fits", r.failed},
              {"warnings", r.warnings},
              {"margin1", to_json(r.margin1, r.names)},
              {"margin2", to_json(r.margin2, r.names)}};
}

inline std::string ordinal(std::size_t k) {
  const char* suf = (k % 100 >= 11 && k % 100 <= 13) ? "th"
                    : k % 10 == 1                     ? "st"
                    : k % 10 == 2                     ? "nd"
                    : k % 10 == 3                     ? "rd"
                                                      : "th";
  return std::to_string(k) + suf;
}

inline std::string brbvs_text(const BrbvsResult& r, const BrbvsConfig& c) {
  std::ostringstream o;
  o << "Sets of Relevant Covariates\n================================\n\n"
    << "Metric: " << code(r.metric) << "\nkmax: " << c.kmax << "\nCopula: " << copula::code(c.copula)
    << "\nMargins: " << margin::code(c.link1) << " " << margin::code(c.link2)
    << "\nSubsample fits: " << r.subsamples - r.failed << " of " << r.subsamples
    << " used\n\n================================\n";
  for (int which = 1; which <= 2; ++which) {
    const auto& m = which == 1 ? r.margin1 : r.margin2;
    o << "\nSurvival Function " << which << ":\n";
    if (m.frequencies.empty()) o << "  (no variables selected)\n";
    // frequencies in ranking order of the selected set
    auto freq = m.frequencies;
    std::stable_sort(freq.begin(), freq.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::size_t k = 1;
    for (const auto& [j, f] : freq) {
      char pct[32];
      std::snprintf(pct, sizeof pct, "%.2f%%", 100.0 * f);
      o << "  - " << ordinal(k++) << ": " << r.names[j] << " (" << pct << ")\n";
    }
  }
  for (const auto& w : r.warnings) o << "\nWarning: " << w << "\n";
  return o.str();
}

inline Json to_json(const LinkSelection& s, Criterion measure) {
  auto per = [&](const std::array<double, 3>& v) {
    Json j = Json::object();
    for (std::size_t l = 0; l < 3; ++l) j[std::string(margin::code(margin::kAllLinks[l]))] = num(v[l]);
    return j;
  };
  return Json{{"criterion", code(measure)},
              {"margin1", {{"best", margin::code(s.link1)}, {"values", per(s.values1)}}},
              {"margin2", {{"best", margin::code(s.link2)}, {"values", per(s.values2)}}}};
}

inline std::string link_text(const LinkSelection& s, Criterion measure) {
  std::ostringstream o;
  auto best = [&](const std::array<double, 3>& v, margin::Link l) {
    for (std::size_t k = 0; k < 3; ++k)
      if (margin::kAllLinks[k] == l) return v[k];
    return 0.0;
  };
  char buf[64];
  o << "Summary of Best Margins for Survival Analysis:\n"
    << "-------------------------------------------------\n";
  std::snprintf(buf, sizeof buf, "%.6f", best(s.values1, s.link1));
  o << "Survival 1:\nBest Link Function: " << margin::code(s.link1) << "\n" << code(measure)
    << " Value: " << buf << "\n-------------------------------------------------\n";
  std::snprintf(buf, sizeof buf, "%.6f", best(s.values2, s.link2));
  o << "Survival 2:\nBest Link Function: " << margin::code(s.link2) << "\n" << code(measure)
    << " Value: " << buf << "\n-------------------------------------------------\n";
  return o.str();
}

inline Json to_json(const StepTrace& t) {
  Json steps = Json::array();
  for (std::size_t k = 0; k < t.steps.size(); ++k)
    steps.push_back({{"step", k + 1}, {"model", t.steps[k].label}, {"value", num(t.steps[k].value)}});
  return Json{{"criterion", code(t.measure)},
              {"steps", steps},
              {"equations",
               {{"eta1", t.final_spec.eta1}, {"eta2", t.final_spec.eta2}, {"eta3", t.final_spec.eta3}}}};
}

inline std::string trace_text(const StepTrace& t) {
  std::ostringstream o;
  std::size_t w = 14;
  for (const auto& s : t.steps) w = std::max(w, s.label.size() + 2);
  o << "Results\n" << std::setw(6) << "Step" << std::setw(static_cast<int>(w)) << "Model"
    << std::setw(12) << code(t.measure) << "\n";
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    char v[32];
    std::snprintf(v, sizeof v, "%.3f", t.steps[k].value);
    o << std::setw(6) << k + 1 << std::setw(static_cast<int>(w)) << t.steps[k].label
      << std::setw(12) << v << "\n";
  }
  auto eq = [&](const char* lhs, const std::vector<std::string>& cov, bool baseline) {
    o << lhs << " ~ " << (baseline ? "baseline(t)" : "1");
    for (const auto& c : cov) o << " + " << c;
    o << "\n";
  };
  o << "\nEquations\n";
  eq("eta1", t.final_spec.eta1, true);
  eq("eta2", t.final_spec.eta2, true);
  eq("eta3", t.final_spec.eta3, false);
  return o.str();
}

inline Json to_json(const sim::MarginEval& e) {
  return Json{{"FP", e.fp},          {"FN", e.fn},          {"mean_size", e.size},
              {"mean_overlap", e.overlap}, {"contains_rate", e.contains}, {"exact_rate", e.exact}};
}

inline Json to_json(const sim::EvalReport& r) {
  return Json{{"replicates", r.replicates}, {"margin1", to_json(r.margin1)}, {"margin2", to_json(r.margin2)}};
}

inline std::string eval_text(const sim::EvalReport& r) {
  std::ostringstream o;
  char buf[256];
  o << "Replicates: " << r.replicates << "\n";
  o << "margin      FP      FN  <|s_hat|>  <|s_hat & s|>  contains  exact\n";
  for (int which = 1; which <= 2; ++which) {
    const auto& e = which == 1 ? r.margin1 : r.margin2;
    std::snprintf(buf, sizeof buf, "%6d %7.3f %7.3f %10.3f %14.3f %9.3f %6.3f\n", which, e.fp, e.fn,
                  e.size, e.overlap, e.contains, e.exact);
    o << buf;
  }
  return o.str();
}

inline Json to_json(const sim::SimConfig& c) {
  return Json{{"n", c.n},
              {"p", c.p},
              {"scenario", std::string(1, c.scenario)},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"beta30", c.beta30},
              {"beta3", c.beta3},
              {"margins", {margin::code(c.link1), margin::code(c.link2)}},
              {"copula", "C0"},
              {"seed", c.seed}};
}

/// Hidden truths and true times; kept out of the model-facing CSV.
inline Json sidecar_json(const sim::SimResult& r, const sim::SimConfig& c) {
  return Json{{"schema_version", kSchemaVersion},
              {"config", to_json(c)},
              {"truth", {{"s1", r.s1}, {"s2", r.s2}}},
              {"censoring_rate", {r.cens_rate1, r.cens_rate2}},
              {"t1_true", r.t1_true},
              {"t2_true", r.t2_true},
              {"theta", r.theta}};
}

/// Envelope shared by every CLI artifact.
inline Json envelope(std::string_view command, Json config, Json result) {
  return Json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"config", std::move(config)},
              {"result", std::move(result)}};
}

}  // namespace brbvs::report
