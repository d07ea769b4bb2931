#pragma once

// Jacobi polynomials P_n^{(alpha, beta)} on [-1, 1]: evaluation, normalization
// constants and Gauss-Jacobi quadrature.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isofield/errors.hpp"

namespace isofield {

struct JacobiParams {
  double alpha = 0.0;
  double beta = 0.0;

  friend bool operator==(const JacobiParams&, const JacobiParams&) = default;
};

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, inside (-1, 1)
  std::vector<double> weights;  // strictly positive
  JacobiParams params;
  int order = 0;
};

/// Inputs that overshoot [-1, 1] by at most this much are clamped.
inline constexpr double kClampTolerance = 1e-12;

namespace detail {

inline std::string describe(JacobiParams p) {
  std::ostringstream os;
  os << "(alpha=" << p.alpha << ", beta=" << p.beta << ")";
  return os.str();
}

inline void require_params(JacobiParams p) {
  if (!(p.alpha > -1.0) || !(p.beta > -1.0)) {
    throw ParameterDomainError("Jacobi parameters must satisfy alpha, beta > -1, got " +
                               describe(p));
  }
}

inline void require_degree(int n) {
  if (n < 0) throw ParameterDomainError("Jacobi degree must be nonnegative, got " + std::to_string(n));
}

inline double clamp_argument(double x) {
  if (std::isnan(x) || x < -1.0 - kClampTolerance || x > 1.0 + kClampTolerance) {
    std::ostringstream os;
    os << "Jacobi argument " << x << " outside [-1, 1]";
    throw DomainError(os.str());
  }
  return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x);
}

// Total mass of (1-x)^a (1+x)^b on [-1, 1].
inline double weight_mass(JacobiParams p) {
  const double a = p.alpha, b = p.beta;
  return std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                  std::lgamma(a + b + 2.0));
}

// Ascending three-term recurrence; fills out[0..n].
inline void jacobi_recurrence(int n, double a, double b, double x, double* out) {
  out[0] = 1.0;
  if (n == 0) return;
  out[1] = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  const double a2b2 = a * a - b * b;
  for (int k = 2; k <= n; ++k) {
    const double s = 2.0 * k + a + b;
    const double c1 = 2.0 * k * (k + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a2b2);
    const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
    out[k] = (c2 * out[k - 1] - c3 * out[k - 2]) / c1;
  }
}

}  // namespace detail

/// P_n^{(alpha,beta)}(x) by the three-term recurrence in n.
inline double jacobi_eval(int n, JacobiParams params, double x) {
  detail::require_params(params);
  detail::require_degree(n);
  x = detail::clamp_argument(x);
  if (n == 0) return 1.0;
  const double a = params.alpha, b = params.beta;
  double prev = 1.0;
  double cur = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  for (int k = 2; k <= n; ++k) {
    const double s = 2.0 * k + a + b;
    const double next = ((s - 1.0) * (s * (s - 2.0) * x + a * a - b * b) * cur -
                         2.0 * (k + a - 1.0) * (k + b - 1.0) * s * prev) /
                        (2.0 * k * (k + a + b) * (s - 2.0));
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Values P_0(x), ..., P_{max_degree}(x) in one recurrence pass.
inline std::vector<double> jacobi_sequence(int max_degree, JacobiParams params, double x) {
  detail::require_params(params);
  detail::require_degree(max_degree);
  x = detail::clamp_argument(x);
  std::vector<double> out(static_cast<std::size_t>(max_degree) + 1);
  detail::jacobi_recurrence(max_degree, params.alpha, params.beta, x, out.data());
  return out;
}

/// P_n(1) = Gamma(n+alpha+1) / (Gamma(n+1) Gamma(alpha+1)), evaluated in log space.
inline double jacobi_at_one(int n, JacobiParams params) {
  detail::require_params(params);
  detail::require_degree(n);
  if (n == 0) return 1.0;
  return std::exp(std::lgamma(n + params.alpha + 1.0) - std::lgamma(n + 1.0) -
                  std::lgamma(params.alpha + 1.0));
}

/// R_n(x) = P_n(x) / P_n(1); bounded by 1 in absolute value on [-1, 1].
inline double jacobi_normalized(int n, JacobiParams params, double x) {
  return jacobi_eval(n, params, x) / jacobi_at_one(n, params);
}

/// Squared L2 norm of P_j against the weight (1-x)^alpha (1+x)^beta.
inline double jacobi_norm_constant(int j, JacobiParams params) {
  detail::require_params(params);
  detail::require_degree(j);
  if (j == 0) return detail::weight_mass(params);
  const double a = params.alpha, b = params.beta;
  const double log_value = (a + b + 1.0) * std::log(2.0) - std::log(2.0 * j + a + b + 1.0) +
                           std::lgamma(j + a + 1.0) + std::lgamma(j + b + 1.0) -
                           std::lgamma(j + 1.0) - std::lgamma(j + a + b + 1.0);
  return std::exp(log_value);
}

/// Gauss-Jacobi rule of the given order from the eigen-decomposition of the
/// symmetric tridiagonal Jacobi matrix of the monic recurrence.
inline QuadratureRule gauss_jacobi(int order, JacobiParams params) {
  detail::require_params(params);
  if (order < 1) throw ParameterDomainError("quadrature order must be positive");
  const double a = params.alpha, b = params.beta;
  const Eigen::Index k_max = order;

  Eigen::VectorXd diag(k_max);
  Eigen::VectorXd sub(k_max > 1 ? k_max - 1 : 1);
  diag(0) = (b - a) / (a + b + 2.0);
  for (Eigen::Index k = 1; k < k_max; ++k) {
    const double s = 2.0 * static_cast<double>(k) + a + b;
    diag(k) = (b * b - a * a) / (s * (s + 2.0));
  }
  for (Eigen::Index k = 1; k < k_max; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    double beta_k;
    if (k == 1) {
      // (k + a + b) / (s - 1) cancels when a + b = -1
      beta_k = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      beta_k = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(k - 1) = std::sqrt(beta_k);
  }

  QuadratureRule rule;
  rule.params = params;
  rule.order = order;
  const double mass = detail::weight_mass(params);
  if (order == 1) {
    rule.nodes = {diag(0)};
    rule.weights = {mass};
    return rule;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(k_max - 1), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Gauss-Jacobi eigensolver did not converge for order " +
                       std::to_string(order) + " " + detail::describe(params));
  }
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (Eigen::Index k = 0; k < k_max; ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    rule.weights[static_cast<std::size_t>(k)] = mass * v0 * v0;
  }
  return rule;
}

}  // namespace isofield
