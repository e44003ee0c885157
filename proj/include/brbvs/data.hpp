// Bivariate censored survival data: in-memory model, CSV input/output,
// standardization and subsampling.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "brbvs/errors.hpp"
#include "brbvs/rng.hpp"
#include "brbvs/stats.hpp"

namespace brbvs {

enum class Censor : char { Uncensored = 'U', Right = 'R', Interval = 'I' };

inline char censor_char(Censor c) { return static_cast<char>(c); }

inline std::optional<Censor> censor_from_string(std::string_view s) {
  if (s == "U") return Censor::Uncensored;
  if (s == "R") return Censor::Right;
  if (s == "I") return Censor::Interval;
  return std::nullopt;
}

struct Dataset {
  std::vector<double> t1_lower;
  std::vector<std::optional<double>> t1_upper;
  std::vector<double> t2_lower;
  std::vector<std::optional<double>> t2_upper;
  std::vector<Censor> cens1;
  std::vector<Censor> cens2;
  Eigen::MatrixXd X;
  std::vector<std::string> names;

  std::size_t n() const { return t1_lower.size(); }
  std::size_t p() const { return names.size(); }

  /// Combined two-letter code, e.g. "IR".
  std::string combined_code(std::size_t i) const {
    return {censor_char(cens1[i]), censor_char(cens2[i])};
  }

  std::size_t column(std::string_view label) const {
    const auto it = std::find(names.begin(), names.end(), label);
    if (it == names.end()) throw DomainError("unknown covariate '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - names.begin());
  }

  bool operator==(const Dataset& o) const {
    return t1_lower == o.t1_lower && t1_upper == o.t1_upper && t2_lower == o.t2_lower &&
           t2_upper == o.t2_upper && cens1 == o.cens1 && cens2 == o.cens2 && X == o.X &&
           names == o.names;
  }

  /// Throws DomainError naming the first violated invariant.
  void validate() const {
    const std::size_t m = n();
    if (t1_upper.size() != m || t2_lower.size() != m || t2_upper.size() != m ||
        cens1.size() != m || cens2.size() != m || static_cast<std::size_t>(X.rows()) != m)
      throw DomainError("dataset columns have inconsistent lengths");
    if (static_cast<std::size_t>(X.cols()) != names.size())
      throw DomainError("covariate matrix width does not match the number of labels");
    std::set<std::string> seen;
    for (const auto& s : names)
      if (!seen.insert(s).second) throw DomainError("duplicate covariate label '" + s + "'");
    auto check_margin = [&](int margin, const std::vector<double>& lo,
                            const std::vector<std::optional<double>>& hi,
                            const std::vector<Censor>& cens) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::string where =
            "unit " + std::to_string(i) + ", margin " + std::to_string(margin);
        if (!(lo[i] >= 0.0) || !std::isfinite(lo[i]))
          throw DomainError(where + ": time must be a finite nonnegative value");
        if (cens[i] == Censor::Interval) {
          if (!hi[i]) throw DomainError(where + ": interval censoring requires an upper bound");
          if (!(*hi[i] > lo[i]) || !std::isfinite(*hi[i]))
            throw DomainError(where + ": interval upper bound must exceed the lower bound");
        } else {
          if (hi[i]) throw DomainError(where + ": only interval-censored units carry an upper bound");
          if (cens[i] == Censor::Uncensored && !(lo[i] > 0.0))
            throw DomainError(where + ": event times must be positive");
        }
      }
    };
    check_margin(1, t1_lower, t1_upper, cens1);
    check_margin(2, t2_lower, t2_upper, cens2);
    if (!X.allFinite()) throw DomainError("covariate matrix has missing or non-finite entries");
  }

  /// Rows in the given order (duplicates allowed).
  Dataset rows(std::span<const std::size_t> idx) const {
    Dataset d;
    d.names = names;
    d.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t i = idx[k];
      d.t1_lower.push_back(t1_lower[i]);
      d.t1_upper.push_back(t1_upper[i]);
      d.t2_lower.push_back(t2_lower[i]);
      d.t2_upper.push_back(t2_upper[i]);
      d.cens1.push_back(cens1[i]);
      d.cens2.push_back(cens2[i]);
      d.X.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(i));
    }
    return d;
  }

  /// Covariate submatrix for the given labels, in that order.
  Eigen::MatrixXd columns(std::span<const std::string> labels) const {
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(labels.size()));
    for (std::size_t j = 0; j < labels.size(); ++j)
      out.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(column(labels[j])));
    return out;
  }
};

/// Column names of the time bounds and censoring codes; every other column
/// not listed in `ignore` becomes a covariate.
struct ColumnSchema {
  std::string t11 = "t11";
  std::string t12 = "t12";
  std::string t21 = "t21";
  std::string t22 = "t22";
  std::string cens1 = "cens1";
  std::string cens2 = "cens2";
  std::vector<std::string> ignore = {"cens"};
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline bool is_missing(std::string_view s) { return s.empty() || s == "NA" || s == "NaN"; }

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline Dataset parse_dataset(std::istream& in, const ColumnSchema& schema = {}) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV input: missing header row");
  const auto header_views = detail::split_csv(line);
  std::vector<std::string> header(header_views.begin(), header_views.end());
  auto find = [&](const std::string& col) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) throw ParseError("header is missing column '" + col + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c11 = find(schema.t11), c12 = find(schema.t12), c21 = find(schema.t21),
                    c22 = find(schema.t22), cc1 = find(schema.cens1), cc2 = find(schema.cens2);
  std::vector<std::size_t> cov_cols;
  std::set<std::size_t> reserved = {c11, c12, c21, c22, cc1, cc2};
  for (const auto& ig : schema.ignore) {
    const auto it = std::find(header.begin(), header.end(), ig);
    if (it != header.end()) reserved.insert(static_cast<std::size_t>(it - header.begin()));
  }
  Dataset d;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (reserved.count(j)) continue;
    cov_cols.push_back(j);
    d.names.push_back(header[j]);
  }

  std::vector<std::vector<double>> cov;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto f = detail::split_csv(line);
    auto where = [&](std::size_t col) {
      return "row " + std::to_string(row) + ", column '" + header[col] + "'";
    };
    if (f.size() != header.size())
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(f.size()));
    auto number = [&](std::size_t col) {
      const auto v = detail::parse_double(f[col]);
      if (!v) throw ParseError(where(col) + ": non-numeric value '" + std::string(f[col]) + "'");
      return *v;
    };
    auto upper = [&](std::size_t col) -> std::optional<double> {
      if (detail::is_missing(f[col])) return std::nullopt;
      return number(col);
    };
    auto code = [&](std::size_t col) {
      const auto c = censor_from_string(f[col]);
      if (!c)
        throw ParseError(where(col) + ": unknown censor code '" + std::string(f[col]) +
                         "' (expected U, R or I)");
      return *c;
    };
    auto margin = [&](std::size_t lo, std::size_t hi, std::size_t cc, std::vector<double>& lower,
                      std::vector<std::optional<double>>& upper_out, std::vector<Censor>& cens) {
      const Censor c = code(cc);
      const double l = number(lo);
      auto u = upper(hi);
      if (c == Censor::Interval && !u)
        throw ParseError(where(hi) + ": interval-censored row is missing its upper bound");
      if (c != Censor::Interval) u.reset();
      lower.push_back(l);
      upper_out.push_back(u);
      cens.push_back(c);
    };
    margin(c11, c12, cc1, d.t1_lower, d.t1_upper, d.cens1);
    margin(c21, c22, cc2, d.t2_lower, d.t2_upper, d.cens2);
    std::vector<double> xr;
    for (std::size_t j : cov_cols) {
      if (detail::is_missing(f[j])) throw ParseError(where(j) + ": missing covariate value");
      xr.push_back(number(j));
    }
    cov.push_back(std::move(xr));
  }
  d.X.resize(static_cast<Eigen::Index>(cov.size()), static_cast<Eigen::Index>(d.names.size()));
  for (std::size_t i = 0; i < cov.size(); ++i)
    for (std::size_t j = 0; j < cov_cols.size(); ++j)
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov[i][j];
  try {
    d.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return d;
}

inline Dataset parse_dataset(const std::string& path, const ColumnSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_dataset(in, schema);
}

/// Shortest round-trip decimal representation; NA for absent upper bounds.
inline void write_csv(std::ostream& out, const Dataset& d) {
  out << "t11,t12,t21,t22,cens1,cens2";
  for (const auto& s : d.names) out << ',' << s;
  out << '\n';
  auto opt = [](const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string("NA");
  };
  for (std::size_t i = 0; i < d.n(); ++i) {
    out << detail::format_double(d.t1_lower[i]) << ',' << opt(d.t1_upper[i]) << ','
        << detail::format_double(d.t2_lower[i]) << ',' << opt(d.t2_upper[i]) << ','
        << censor_char(d.cens1[i]) << ',' << censor_char(d.cens2[i]);
    for (Eigen::Index j = 0; j < d.X.cols(); ++j)
      out << ',' << detail::format_double(d.X(static_cast<Eigen::Index>(i), j));
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  write_csv(out, d);
}

/// Centre and scale the listed columns to mean 0, sample sd 1.
inline Dataset standardize(Dataset d, std::span<const std::string> labels) {
  for (const auto& label : labels) {
    const auto j = static_cast<Eigen::Index>(d.column(label));
    std::vector<double> col(d.X.col(j).begin(), d.X.col(j).end());
    const double m = stats::mean(col);
    const double sd = stats::sample_sd(col);
    if (!(sd > 0.0)) throw DomainError("cannot standardize zero-variance column '" + label + "'");
    d.X.col(j) = (d.X.col(j).array() - m) / sd;
  }
  return d;
}

/// r = floor(n / m) disjoint subsamples of size m: consecutive chunks of one
/// uniform random permutation. The remainder of the permutation is unused.
inline std::vector<std::vector<std::size_t>> draw_subsamples(std::size_t n, std::size_t m,
                                                             Rng& rng) {
  if (m < 1 || m > n)
    throw DomainError("subsample size m=" + std::to_string(m) + " must lie in [1, n=" +
                      std::to_string(n) + "]");
  const auto perm = permutation(n, rng);
  const std::size_t r = n / m;
  std::vector<std::vector<std::size_t>> out(r);
  for (std::size_t q = 0; q < r; ++q)
    out[q].assign(perm.begin() + static_cast<std::ptrdiff_t>(q * m),
                  perm.begin() + static_cast<std::ptrdiff_t>((q + 1) * m));
  return out;
}

inline std::vector<std::vector<std::size_t>> draw_subsamples(const Dataset& d, std::size_t m,
                                                             Rng& rng) {
  return draw_subsamples(d.n(), m, rng);
}

}  // namespace brbvs
