// Damped Newton maximizer. Each iteration solves (-H + lambda I) s = g and
// adapts lambda from the ratio of actual to predicted gain, which is the
// Levenberg form of a trust region.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "brbvs/errors.hpp"

namespace brbvs {

struct OptimOptions {
  double gradient_tol = 1e-6;   // stop when max|g| falls below
  double step_tol = 1e-12;      // stop when the step norm falls below
  int max_iterations = 200;
  double converged_gradient = 1e-4;  // reported convergence threshold
};

struct OptimReport {
  int iterations = 0;
  double max_abs_gradient = std::numeric_limits<double>::infinity();
  bool info_positive_definite = false;
  double eigen_min = 0.0;
  double eigen_max = 0.0;
  bool converged = false;
  std::string stop_reason;
};

/// Objective to maximize. `value_gradient` returns false when the point is not
/// admissible (non-finite value); the optimizer then shrinks the step.
struct Objective {
  std::function<bool(const Eigen::VectorXd&, double&, Eigen::VectorXd&)> value_gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  OptimReport report;
  std::vector<double> trace;  // objective at every accepted iterate
};

/// Eigenvalue summary of the information matrix (-H).
inline void describe_information(const Eigen::MatrixXd& info, OptimReport& r) {
  if (info.size() == 0) {
    r.info_positive_definite = true;
    r.eigen_min = r.eigen_max = 0.0;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info, Eigen::EigenvaluesOnly);
  r.eigen_min = es.eigenvalues().minCoeff();
  r.eigen_max = es.eigenvalues().maxCoeff();
  r.info_positive_definite = std::isfinite(r.eigen_min) && r.eigen_min > 0.0;
}

inline OptimResult maximize(const Objective& f, const Eigen::VectorXd& start,
                            const OptimOptions& opt = {}) {
  OptimResult res;
  res.x = start;
  if (!f.value_gradient(res.x, res.value, res.gradient) || !std::isfinite(res.value))
    throw NumericError("objective is not finite at the starting point");
  res.trace.push_back(res.value);
  const auto n = start.size();
  double lambda = 0.0;
  auto& rep = res.report;
  rep.stop_reason = "iteration limit";
  bool need_hessian = true;
  Eigen::MatrixXd H;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    rep.max_abs_gradient = n ? res.gradient.cwiseAbs().maxCoeff() : 0.0;
    if (rep.max_abs_gradient < opt.gradient_tol) {
      rep.stop_reason = "gradient tolerance";
      break;
    }
    if (need_hessian) {
      H = f.hessian(res.x);
      need_hessian = false;
    }
    if (!H.allFinite()) {
      rep.stop_reason = "non-finite Hessian";
      break;
    }
    const Eigen::MatrixXd A = -H;
    // Cholesky of A + lambda I, raising lambda until it succeeds.
    Eigen::LLT<Eigen::MatrixXd> llt;
    const double scale = std::max(1.0, A.diagonal().cwiseAbs().maxCoeff());
    for (int tries = 0;; ++tries) {
      Eigen::MatrixXd M = A;
      M.diagonal().array() += lambda;
      llt.compute(M);
      if (llt.info() == Eigen::Success) break;
      lambda = std::max(lambda * 4.0, 1e-8 * scale);
      if (tries > 200) throw NumericError("damped Newton system could not be factorized");
    }
    const Eigen::VectorXd step = llt.solve(res.gradient);
    if (!step.allFinite()) {
      rep.stop_reason = "non-finite step";
      break;
    }
    if (step.norm() < opt.step_tol) {
      rep.stop_reason = "step tolerance";
      break;
    }
    const double predicted = res.gradient.dot(step) + 0.5 * step.dot(H * step);
    const Eigen::VectorXd trial = res.x + step;
    double value = 0.0;
    Eigen::VectorXd grad;
    const bool ok = f.value_gradient(trial, value, grad) && std::isfinite(value);
    const double gain = ok ? value - res.value : -std::numeric_limits<double>::infinity();
    const double rho = predicted > 0.0 ? gain / predicted : (gain > 0.0 ? 1.0 : -1.0);
    if (ok && rho > 1e-4 && gain >= 0.0) {
      res.x = trial;
      res.value = value;
      res.gradient = grad;
      res.trace.push_back(value);
      need_hessian = true;
      if (rho > 0.75) {
        lambda /= 3.0;
        if (lambda < 1e-12) lambda = 0.0;
      } else if (rho < 0.25) {
        lambda *= 2.0;
      }
    } else {
      lambda = std::max(lambda * 4.0, 1e-6 * scale);
      if (lambda > 1e20 * scale) {
        rep.stop_reason = "step rejected repeatedly";
        break;
      }
    }
  }
  rep.iterations = it;
  rep.max_abs_gradient = n ? res.gradient.cwiseAbs().maxCoeff() : 0.0;
  res.hessian = need_hessian ? f.hessian(res.x) : H;
  describe_information(-res.hessian, rep);
  rep.converged = rep.max_abs_gradient < opt.converged_gradient && rep.info_positive_definite;
  return res;
}

}  // namespace brbvs
