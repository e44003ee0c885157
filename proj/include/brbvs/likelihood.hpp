// Censored log-likelihoods of the bivariate copula survival model and of a
// single margin, with gradients and observed information.
//
// Every unit contribution depends on the parameters only through a handful of
// linear predictors ("slots"). Contributions are differentiated in slot space
// with forward-mode duals, the Hessian in slot space by central differences of
// that exact gradient, and both are pulled back to the parameter vector through
// the sparse linear maps. Baseline blocks are stored raw (level, log-increments)
// and mapped to spline coefficients before the linear maps apply.

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "brbvs/copula.hpp"
#include "brbvs/data.hpp"
#include "brbvs/dual.hpp"
#include "brbvs/errors.hpp"
#include "brbvs/margin.hpp"

namespace brbvs {

struct ModelSpec {
  copula::Family copula = copula::Family::Clayton;
  margin::Link link1 = margin::Link::PH;
  margin::Link link2 = margin::Link::PH;
  std::vector<std::string> eta1;
  std::vector<std::string> eta2;
  std::vector<std::string> eta3;
  int interior_knots = 8;
  double ridge = 1e-4;
};

struct Block {
  std::size_t offset = 0;
  std::size_t size = 0;
  std::size_t end() const { return offset + size; }
};

/// delta = (baseline1 raw, beta1, baseline2 raw, beta2, beta3), where beta3
/// starts with the intercept of the third predictor.
struct ParamLayout {
  Block base1, beta1, base2, beta2, beta3;

  static ParamLayout make(std::size_t k1, std::size_t p1, std::size_t k2, std::size_t p2,
                          std::size_t p3) {
    ParamLayout l;
    l.base1 = {0, k1};
    l.beta1 = {l.base1.end(), p1};
    l.base2 = {l.beta1.end(), k2};
    l.beta2 = {l.base2.end(), p2};
    l.beta3 = {l.beta2.end(), p3 + 1};
    return l;
  }
  std::size_t size() const { return beta3.end(); }
};

namespace lik {

inline constexpr double kSurvLo = 1e-10;
inline constexpr double kSurvHi = 1.0 - 1e-10;
inline constexpr double kNegativeTolerance = -1e-12;
inline constexpr double kFloor = 1e-300;

/// log(x) for a probability mass that should be nonnegative. Round-off
/// negatives down to -1e-12 are floored; anything below becomes NaN.
template <class T>
T log_mass(const T& x) {
  using std::log;
  const double v = ad::value_of(x);
  if (v >= kFloor) return log(x);
  if (v >= kNegativeTolerance) return T(std::log(kFloor));
  return T(std::numeric_limits<double>::quiet_NaN());
}

template <class T>
T clamp_survival(const T& s) {
  return math::clamp(s, kSurvLo, kSurvHi);
}

/// Sparse linear maps from the (coefficient-space) parameter vector to the
/// slot predictors of every unit, stored row-compressed over (unit, slot).
template <int S>
class SlotMaps {
 public:
  explicit SlotMaps(std::size_t n = 0) : rows_(n * S) {}

  void add(std::size_t unit, int slot, std::size_t index, double weight) {
    rows_[unit * S + static_cast<std::size_t>(slot)].emplace_back(index, weight);
  }

  void finalize() {
    start_.assign(1, 0);
    for (const auto& r : rows_) {
      for (const auto& [idx, w] : r) {
        index_.push_back(idx);
        weight_.push_back(w);
      }
      start_.push_back(index_.size());
    }
    rows_.clear();
    rows_.shrink_to_fit();
  }

  std::size_t units() const { return (start_.size() - 1) / S; }

  double value(std::size_t unit, int slot, const Eigen::VectorXd& coef) const {
    const std::size_t r = unit * S + static_cast<std::size_t>(slot);
    double acc = 0.0;
    for (std::size_t e = start_[r]; e < start_[r + 1]; ++e) acc += weight_[e] * coef[index_[e]];
    return acc;
  }

  bool empty(std::size_t unit, int slot) const {
    const std::size_t r = unit * S + static_cast<std::size_t>(slot);
    return start_[r] == start_[r + 1];
  }

  template <class F>
  void for_each(std::size_t unit, int slot, F&& f) const {
    const std::size_t r = unit * S + static_cast<std::size_t>(slot);
    for (std::size_t e = start_[r]; e < start_[r + 1]; ++e) f(index_[e], weight_[e]);
  }

 private:
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> index_;
  std::vector<double> weight_;
};

/// Sum of kernel contributions over units, differentiated with respect to a
/// parameter vector whose monotone blocks hold raw baseline parameters.
template <class Kernel>
class AdditiveLikelihood {
 public:
  static constexpr int S = Kernel::kSlots;
  using D = ad::Dual<S>;

  AdditiveLikelihood() = default;
  AdditiveLikelihood(Kernel kernel, SlotMaps<S> maps, std::size_t dim,
                     std::vector<Block> monotone, double ridge)
      : kernel_(std::move(kernel)),
        maps_(std::move(maps)),
        dim_(dim),
        monotone_(std::move(monotone)),
        ridge_(ridge) {}

  std::size_t dim() const { return dim_; }
  std::size_t units() const { return maps_.units(); }
  const Kernel& kernel() const { return kernel_; }
  const std::vector<Block>& monotone_blocks() const { return monotone_; }
  double ridge() const { return ridge_; }

  /// Spline coefficients in place of the raw baseline parameters.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& raw) const {
    Eigen::VectorXd c = raw;
    for (const auto& b : monotone_) {
      for (std::size_t k = 1; k < b.size; ++k)
        c[b.offset + k] = c[b.offset + k - 1] + std::exp(raw[b.offset + k]);
    }
    return c;
  }

  /// Log-likelihood, or NaN when some contribution is not finite.
  double value_nothrow(const Eigen::VectorXd& raw, std::size_t* bad_unit = nullptr) const {
    const Eigen::VectorXd coef = coefficients(raw);
    double total = 0.0;
    std::array<double, S> s{};
    for (std::size_t i = 0; i < units(); ++i) {
      for (int k = 0; k < S; ++k) s[k] = maps_.value(i, k, coef);
      const double c = kernel_.template log_contribution<double>(i, s);
      if (!std::isfinite(c)) {
        if (bad_unit) *bad_unit = i;
        return std::numeric_limits<double>::quiet_NaN();
      }
      total += c;
    }
    return total;
  }

  double value(const Eigen::VectorXd& raw) const {
    check_dim(raw);
    std::size_t bad = 0;
    const double v = value_nothrow(raw, &bad);
    if (!std::isfinite(v)) throw NumericError("non-finite log-likelihood contribution at " +
                                              kernel_.describe(bad));
    return v;
  }

  /// Log-likelihood and its gradient; false (and NaN value) on a non-finite unit.
  bool value_gradient_nothrow(const Eigen::VectorXd& raw, double& value, Eigen::VectorXd& grad,
                              std::size_t* bad_unit = nullptr) const {
    const Eigen::VectorXd coef = coefficients(raw);
    Eigen::VectorXd gc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
    value = 0.0;
    std::array<D, S> s;
    for (std::size_t i = 0; i < units(); ++i) {
      for (int k = 0; k < S; ++k) s[k] = D::variable(maps_.value(i, k, coef), k);
      const D c = kernel_.template log_contribution<D>(i, s);
      bool finite = std::isfinite(c.v);
      for (int k = 0; k < S; ++k) finite = finite && std::isfinite(c.d[k]);
      if (!finite) {
        if (bad_unit) *bad_unit = i;
        value = std::numeric_limits<double>::quiet_NaN();
        return false;
      }
      value += c.v;
      for (int k = 0; k < S; ++k) {
        if (c.d[k] == 0.0) continue;
        maps_.for_each(i, k, [&](std::size_t idx, double w) { gc[idx] += c.d[k] * w; });
      }
    }
    grad = pull_back_gradient(raw, gc);
    return true;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& raw) const {
    check_dim(raw);
    double v = 0.0;
    Eigen::VectorXd g;
    std::size_t bad = 0;
    if (!value_gradient_nothrow(raw, v, g, &bad))
      throw NumericError("non-finite log-likelihood gradient at " + kernel_.describe(bad));
    return g;
  }

  /// Hessian of the log-likelihood.
  Eigen::MatrixXd hessian(const Eigen::VectorXd& raw) const {
    check_dim(raw);
    const Eigen::VectorXd coef = coefficients(raw);
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd hc = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd gc = Eigen::VectorXd::Zero(n);
    std::array<double, S> s0{};
    for (std::size_t i = 0; i < units(); ++i) {
      for (int k = 0; k < S; ++k) s0[k] = maps_.value(i, k, coef);
      const auto g0 = slot_gradient(i, s0);
      for (int k = 0; k < S; ++k) {
        if (g0[k] == 0.0) continue;
        maps_.for_each(i, k, [&](std::size_t idx, double w) { gc[idx] += g0[k] * w; });
      }
      Eigen::Matrix<double, S, S> hs = Eigen::Matrix<double, S, S>::Zero();
      for (int k = 0; k < S; ++k) {
        if (maps_.empty(i, k)) continue;  // slot unused by this unit's case
        const double h = 1e-5 * (1.0 + std::abs(s0[k]));
        auto sp = s0, sm = s0;
        sp[k] += h;
        sm[k] -= h;
        const auto gp = slot_gradient(i, sp);
        const auto gm = slot_gradient(i, sm);
        for (int j = 0; j < S; ++j) hs(j, k) = (gp[j] - gm[j]) / (2.0 * h);
      }
      hs = (0.5 * (hs + hs.transpose())).eval();
      for (int a = 0; a < S; ++a) {
        for (int b = 0; b < S; ++b) {
          const double hab = hs(a, b);
          if (hab == 0.0) continue;
          maps_.for_each(i, a, [&](std::size_t ia, double wa) {
            maps_.for_each(i, b, [&](std::size_t ib, double wb) {
              hc(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ib)) += hab * wa * wb;
            });
          });
        }
      }
    }
    // Pull back through the raw-to-coefficient map: J' Hc J + sum_k g_k d2c_k.
    const Eigen::MatrixXd J = jacobian(raw);
    Eigen::MatrixXd H = J.transpose() * hc * J;
    for (const auto& b : monotone_) {
      double tail = 0.0;
      for (std::size_t k = b.size; k-- > 1;) {
        tail += gc[b.offset + k];
        H(b.offset + k, b.offset + k) += std::exp(raw[b.offset + k]) * tail;
      }
    }
    return 0.5 * (H + H.transpose());
  }

  /// Ridge on the log-increments of each baseline block.
  double penalty(const Eigen::VectorXd& raw) const {
    double s = 0.0;
    for (const auto& b : monotone_)
      for (std::size_t k = 1; k < b.size; ++k) s += raw[b.offset + k] * raw[b.offset + k];
    return 0.5 * ridge_ * s;
  }
  Eigen::VectorXd penalty_gradient(const Eigen::VectorXd& raw) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(raw.size());
    for (const auto& b : monotone_)
      for (std::size_t k = 1; k < b.size; ++k) g[b.offset + k] = ridge_ * raw[b.offset + k];
    return g;
  }
  /// Second derivative of the penalty (diagonal).
  Eigen::MatrixXd penalty_matrix() const {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_),
                                              static_cast<Eigen::Index>(dim_));
    for (const auto& b : monotone_)
      for (std::size_t k = 1; k < b.size; ++k) P(b.offset + k, b.offset + k) = ridge_;
    return P;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& raw) const {
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
    for (const auto& b : monotone_) {
      for (std::size_t k = 0; k < b.size; ++k) {
        for (std::size_t j = 1; j <= k; ++j) J(b.offset + k, b.offset + j) = std::exp(raw[b.offset + j]);
        J(b.offset + k, b.offset) = 1.0;
      }
    }
    return J;
  }

 private:
  void check_dim(const Eigen::VectorXd& raw) const {
    if (static_cast<std::size_t>(raw.size()) != dim_)
      throw DomainError("parameter vector has length " + std::to_string(raw.size()) +
                        ", model expects " + std::to_string(dim_));
  }

  std::array<double, S> slot_gradient(std::size_t i, const std::array<double, S>& s) const {
    std::array<D, S> sd;
    for (int k = 0; k < S; ++k) sd[k] = D::variable(s[k], k);
    const D c = kernel_.template log_contribution<D>(i, sd);
    std::array<double, S> g;
    for (int k = 0; k < S; ++k) g[k] = c.d[k];
    return g;
  }

  Eigen::VectorXd pull_back_gradient(const Eigen::VectorXd& raw, Eigen::VectorXd gc) const {
    for (const auto& b : monotone_) {
      double tail = 0.0;
      for (std::size_t k = b.size; k-- > 1;) {
        tail += gc[b.offset + k];
        gc[b.offset + k] = std::exp(raw[b.offset + k]) * tail;
      }
      gc[b.offset] += tail;
    }
    return gc;
  }

  Kernel kernel_;
  SlotMaps<S> maps_;
  std::size_t dim_ = 0;
  std::vector<Block> monotone_;
  double ridge_ = 0.0;
};

struct MarginCase {
  Censor cens = Censor::Uncensored;
  bool lower_zero = false;  // lower bound at t = 0, so S(lower) = 1
};

/// Slot maps of one margin: slot a holds eta at the (lower) time, slot b holds
/// d eta / dt for events or eta at the upper bound for interval units.
inline std::vector<MarginCase> add_margin_slots(auto& maps, const Dataset& d, int which,
                                                const margin::MonotoneBaseline& base,
                                                const Block& base_block, const Block& beta_block,
                                                const Eigen::MatrixXd& X, int slot_a,
                                                int slot_b) {
  const auto& lower = which == 1 ? d.t1_lower : d.t2_lower;
  const auto& upper = which == 1 ? d.t1_upper : d.t2_upper;
  const auto& cens = which == 1 ? d.cens1 : d.cens2;
  std::vector<MarginCase> cases(d.n());
  auto add_eta = [&](std::size_t i, int slot, double t) {
    const auto [row, slope] = base.rows_at(t);
    for (int j = 0; j < 3; ++j)
      if (row.w[j] != 0.0) maps.add(i, slot, base_block.offset + row.first + j, row.w[j]);
    for (std::size_t j = 0; j < beta_block.size; ++j)
      maps.add(i, slot, beta_block.offset + j, X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  };
  for (std::size_t i = 0; i < d.n(); ++i) {
    cases[i].cens = cens[i];
    const double tl = lower[i];
    switch (cens[i]) {
      case Censor::Uncensored: {
        add_eta(i, slot_a, tl);
        const auto slope = base.rows_at(tl).second;
        for (int j = 0; j < 3; ++j)
          if (slope.w[j] != 0.0) maps.add(i, slot_b, base_block.offset + slope.first + j, slope.w[j]);
        break;
      }
      case Censor::Right:
        if (tl > 0.0) add_eta(i, slot_a, tl);
        else cases[i].lower_zero = true;
        break;
      case Censor::Interval:
        if (tl > 0.0) add_eta(i, slot_a, tl);
        else cases[i].lower_zero = true;
        add_eta(i, slot_b, *upper[i]);
        break;
    }
  }
  return cases;
}

inline std::vector<double> margin_times(const Dataset& d, int which) {
  const auto& lower = which == 1 ? d.t1_lower : d.t2_lower;
  const auto& upper = which == 1 ? d.t1_upper : d.t2_upper;
  std::vector<double> t;
  for (std::size_t i = 0; i < d.n(); ++i) {
    if (lower[i] > 0.0) t.push_back(lower[i]);
    if (upper[i]) t.push_back(*upper[i]);
  }
  return t;
}

/// Joint contribution; slots (eta1 a, eta1 b, eta2 a, eta2 b, eta3).
class JointKernel {
 public:
  static constexpr int kSlots = 5;

  JointKernel() = default;
  JointKernel(copula::Family f, margin::Link l1, margin::Link l2, std::vector<MarginCase> c1,
              std::vector<MarginCase> c2)
      : family_(f), link1_(l1), link2_(l2), c1_(std::move(c1)), c2_(std::move(c2)) {}

  std::string describe(std::size_t i) const {
    return "unit " + std::to_string(i) + " (case " + censor_char(c1_[i].cens) +
           censor_char(c2_[i].cens) + ")";
  }

  template <class T>
  T log_contribution(std::size_t i, const std::array<T, kSlots>& s) const {
    using std::log;
    using C = Censor;
    const MarginCase& m1 = c1_[i];
    const MarginCase& m2 = c2_[i];
    auto surv = [](margin::Link l, const T& eta) {
      return clamp_survival(margin::link_inverse(l, eta));
    };
    auto log_dens = [](margin::Link l, const T& eta, const T& slope) {
      return margin::log_neg_link_inverse_deriv(l, eta) + log_mass(slope);
    };
    const T one(1.0);
    const T theta = copula::theta_from_eta(family_, s[4]);
    const copula::Family f = family_;

    const T S1 = m1.lower_zero ? one : surv(link1_, s[0]);
    const T S2 = m2.lower_zero ? one : surv(link2_, s[2]);

    if (m1.cens == C::Uncensored) {
      const T lf1 = log_dens(link1_, s[0], s[1]);
      switch (m2.cens) {
        case C::Uncensored:
          return log_mass(copula::eval_density(f, S1, S2, theta)) + lf1 +
                 log_dens(link2_, s[2], s[3]);
        case C::Right: return log_mass(copula::eval_h1(f, S1, S2, theta)) + lf1;
        case C::Interval: {
          const T S2u = surv(link2_, s[3]);
          return log_mass(copula::eval_h1(f, S1, S2, theta) - copula::eval_h1(f, S1, S2u, theta)) + lf1;
        }
      }
    }
    if (m2.cens == C::Uncensored) {
      const T lf2 = log_dens(link2_, s[2], s[3]);
      if (m1.cens == C::Right) return log_mass(copula::eval_h2(f, S1, S2, theta)) + lf2;
      const T S1u = surv(link1_, s[1]);
      return log_mass(copula::eval_h2(f, S1, S2, theta) - copula::eval_h2(f, S1u, S2, theta)) + lf2;
    }
    if (m1.cens == C::Right && m2.cens == C::Right)
      return log_mass(copula::eval_cdf(f, S1, S2, theta));
    if (m1.cens == C::Right) {
      const T S2u = surv(link2_, s[3]);
      return log_mass(copula::eval_cdf(f, S1, S2, theta) - copula::eval_cdf(f, S1, S2u, theta));
    }
    if (m2.cens == C::Right) {
      const T S1u = surv(link1_, s[1]);
      return log_mass(copula::eval_cdf(f, S1, S2, theta) - copula::eval_cdf(f, S1u, S2, theta));
    }
    const T S1u = surv(link1_, s[1]);
    const T S2u = surv(link2_, s[3]);
    return log_mass(copula::eval_cdf(f, S1, S2, theta) - copula::eval_cdf(f, S1u, S2, theta) -
                    copula::eval_cdf(f, S1, S2u, theta) + copula::eval_cdf(f, S1u, S2u, theta));
  }

 private:
  copula::Family family_ = copula::Family::Clayton;
  margin::Link link1_ = margin::Link::PH;
  margin::Link link2_ = margin::Link::PH;
  std::vector<MarginCase> c1_, c2_;
};

/// Single-margin contribution; slots (eta a, eta b).
class MarginKernel {
 public:
  static constexpr int kSlots = 2;

  MarginKernel() = default;
  MarginKernel(margin::Link l, std::vector<MarginCase> c) : link_(l), c_(std::move(c)) {}

  std::string describe(std::size_t i) const {
    return "unit " + std::to_string(i) + " (case " + censor_char(c_[i].cens) + ")";
  }

  template <class T>
  T log_contribution(std::size_t i, const std::array<T, kSlots>& s) const {
    const MarginCase& m = c_[i];
    switch (m.cens) {
      case Censor::Uncensored:
        return margin::log_neg_link_inverse_deriv(link_, s[0]) + log_mass(s[1]);
      case Censor::Right:
        if (m.lower_zero) return T(0.0);
        return log_mass(margin::link_inverse(link_, s[0]));
      case Censor::Interval: {
        const T Su = margin::link_inverse(link_, s[1]);
        if (m.lower_zero) return log_mass(T(1.0) - Su);
        return log_mass(margin::link_inverse(link_, s[0]) - Su);
      }
    }
    return T(0.0);
  }

 private:
  margin::Link link_ = margin::Link::PH;
  std::vector<MarginCase> c_;
};

}  // namespace lik

/// Joint model bound to a dataset: baselines, layout and likelihood.
class JointModel {
 public:
  JointModel(const ModelSpec& spec, const Dataset& d,
             std::optional<std::pair<margin::MonotoneBaseline, margin::MonotoneBaseline>> bases = {})
      : spec_(spec) {
    if (spec.ridge < 0.0) throw DomainError("ridge penalty must be nonnegative");
    if (bases) {
      base1_ = bases->first;
      base2_ = bases->second;
    } else {
      base1_ = margin::MonotoneBaseline::from_times(lik::margin_times(d, 1), spec.interior_knots);
      base2_ = margin::MonotoneBaseline::from_times(lik::margin_times(d, 2), spec.interior_knots);
    }
    layout_ = ParamLayout::make(static_cast<std::size_t>(base1_.size()), spec.eta1.size(),
                                static_cast<std::size_t>(base2_.size()), spec.eta2.size(),
                                spec.eta3.size());
    const Eigen::MatrixXd X1 = d.columns(spec.eta1);
    const Eigen::MatrixXd X2 = d.columns(spec.eta2);
    const Eigen::MatrixXd X3 = d.columns(spec.eta3);
    lik::SlotMaps<5> maps(d.n());
    auto c1 = lik::add_margin_slots(maps, d, 1, base1_, layout_.base1, layout_.beta1, X1, 0, 1);
    auto c2 = lik::add_margin_slots(maps, d, 2, base2_, layout_.base2, layout_.beta2, X2, 2, 3);
    for (std::size_t i = 0; i < d.n(); ++i) {
      maps.add(i, 4, layout_.beta3.offset, 1.0);
      for (std::size_t j = 0; j < spec.eta3.size(); ++j)
        maps.add(i, 4, layout_.beta3.offset + 1 + j,
                 X3(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    maps.finalize();
    lik_ = lik::AdditiveLikelihood<lik::JointKernel>(
        lik::JointKernel(spec.copula, spec.link1, spec.link2, std::move(c1), std::move(c2)),
        std::move(maps), layout_.size(), {layout_.base1, layout_.base2}, spec.ridge);
  }

  const ModelSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }
  const margin::MonotoneBaseline& baseline1() const { return base1_; }
  const margin::MonotoneBaseline& baseline2() const { return base2_; }
  const lik::AdditiveLikelihood<lik::JointKernel>& likelihood() const { return lik_; }
  std::size_t dim() const { return layout_.size(); }

  double loglik(const Eigen::VectorXd& delta) const { return lik_.value(delta); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& delta) const { return lik_.gradient(delta); }
  Eigen::MatrixXd observed_information(const Eigen::VectorXd& delta) const {
    return -lik_.hessian(delta);
  }

  /// Labels aligned with the parameter vector.
  std::vector<std::string> parameter_names() const {
    std::vector<std::string> n;
    for (std::size_t k = 0; k < layout_.base1.size; ++k) n.push_back("eta1:baseline[" + std::to_string(k) + "]");
    for (const auto& s : spec_.eta1) n.push_back("eta1:" + s);
    for (std::size_t k = 0; k < layout_.base2.size; ++k) n.push_back("eta2:baseline[" + std::to_string(k) + "]");
    for (const auto& s : spec_.eta2) n.push_back("eta2:" + s);
    n.push_back("eta3:(Intercept)");
    for (const auto& s : spec_.eta3) n.push_back("eta3:" + s);
    return n;
  }

 private:
  ModelSpec spec_;
  margin::MonotoneBaseline base1_, base2_;
  ParamLayout layout_;
  lik::AdditiveLikelihood<lik::JointKernel> lik_;
};

/// One margin fitted on its own, ignoring the copula.
class MarginOnlyModel {
 public:
  MarginOnlyModel(margin::Link link, std::vector<std::string> covariates, const Dataset& d,
                  int which, int interior_knots = 8, double ridge = 1e-4,
                  std::optional<margin::MonotoneBaseline> base = {})
      : link_(link), covariates_(std::move(covariates)) {
    if (which != 1 && which != 2) throw DomainError("margin index must be 1 or 2");
    base_ = base ? *base
                 : margin::MonotoneBaseline::from_times(lik::margin_times(d, which), interior_knots);
    base_block_ = {0, static_cast<std::size_t>(base_.size())};
    beta_block_ = {base_block_.end(), covariates_.size()};
    const Eigen::MatrixXd X = d.columns(covariates_);
    lik::SlotMaps<2> maps(d.n());
    auto cases = lik::add_margin_slots(maps, d, which, base_, base_block_, beta_block_, X, 0, 1);
    maps.finalize();
    lik_ = lik::AdditiveLikelihood<lik::MarginKernel>(lik::MarginKernel(link, std::move(cases)),
                                                      std::move(maps), beta_block_.end(),
                                                      {base_block_}, ridge);
  }

  margin::Link link() const { return link_; }
  const std::vector<std::string>& covariates() const { return covariates_; }
  const margin::MonotoneBaseline& baseline() const { return base_; }
  Block baseline_block() const { return base_block_; }
  Block beta_block() const { return beta_block_; }
  const lik::AdditiveLikelihood<lik::MarginKernel>& likelihood() const { return lik_; }
  std::size_t dim() const { return beta_block_.end(); }

  double loglik(const Eigen::VectorXd& delta) const { return lik_.value(delta); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& delta) const { return lik_.gradient(delta); }

 private:
  margin::Link link_;
  std::vector<std::string> covariates_;
  margin::MonotoneBaseline base_;
  Block base_block_, beta_block_;
  lik::AdditiveLikelihood<lik::MarginKernel> lik_;
};

inline double loglik(const ModelSpec& spec, const Eigen::VectorXd& delta, const Dataset& d) {
  return JointModel(spec, d).loglik(delta);
}
inline Eigen::VectorXd gradient(const ModelSpec& spec, const Eigen::VectorXd& delta,
                                const Dataset& d) {
  return JointModel(spec, d).gradient(delta);
}
inline Eigen::MatrixXd observed_information(const ModelSpec& spec, const Eigen::VectorXd& delta,
                                            const Dataset& d) {
  return JointModel(spec, d).observed_information(delta);
}

/// Central differences of a gradient, symmetrized. Throws if the raw
/// difference matrix is asymmetric beyond `symmetry_tol` (relative).
inline Eigen::MatrixXd numeric_hessian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad, const Eigen::VectorXd& x,
    double rel_step = 1e-5, double symmetry_tol = 1e-4) {
  const auto n = x.size();
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = rel_step * (1.0 + std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    H.col(j) = (grad(xp) - grad(xm)) / (2.0 * h);
  }
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale)
    throw NumericError("finite-difference Hessian is not symmetric");
  return 0.5 * (H + H.transpose());
}

}  // namespace brbvs
