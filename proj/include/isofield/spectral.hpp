#pragma once

// Covariance matrix functions given by Jacobi series
//
//   C(rho; t) = sum_n B_n(t) P_n^{(alpha,beta)}(cos rho)
//
// with per-degree m x m coefficients. Lag convention: cov(Z(x1; t1), Z(x2; t2))
// = C(rho(x1, x2); t1 - t2), so C(rho; -t) = C(rho; t)^T.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "isofield/errors.hpp"
#include "isofield/spaces.hpp"
#include "isofield/specialfn.hpp"

namespace isofield {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Geometric envelope c r^n dominating ||B_n|| P_n(1) beyond the stored degrees.
struct TailEnvelope {
  double c = 0.0;
  double r = 0.0;
};

struct SpatialModel {
  SpaceParams space;
  int m = 1;
  std::vector<Matrix> coeffs;  // B_0 .. B_N
  std::optional<TailEnvelope> tail;

  int max_degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

enum class TimeDomain { Integers, Reals };

/// B_n(t) = B_n for every lag; the field is constant in time.
struct PureSpatial {};

/// B_n(t) = B_n r(t) with a scalar stationary correlation r.
struct SeparableScalar {
  enum class Kind { AR1, Exponential };
  Kind kind = Kind::AR1;
  double parameter = 0.0;  // phi for AR1, theta for Exponential

  double correlation(double t) const {
    const double lag = std::abs(t);
    if (kind == Kind::AR1) return std::pow(parameter, std::round(lag));
    return std::exp(-parameter * lag);
  }
};

/// Vector MA(1) Z(t) = eps(t) + Phi eps(t-1), eps ~ N(0, Sigma_n) per degree;
/// the model coefficients hold Sigma_n.
struct VectorMA1 {
  Matrix phi;
};

/// Explicit B_n(t) for nonzero integer lags (zero for lags not listed); the
/// model coefficients hold B_n(0).
struct LagTable {
  std::map<long long, std::vector<Matrix>> lags;
};

using TemporalKernel = std::variant<PureSpatial, SeparableScalar, VectorMA1, LagTable>;

struct SpatioTemporalModel {
  SpaceParams space;
  int m = 1;
  std::vector<Matrix> coeffs;
  TemporalKernel kernel;
  TimeDomain domain = TimeDomain::Reals;
  std::optional<TailEnvelope> tail;

  int max_degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

using Model = std::variant<SpatialModel, SpatioTemporalModel>;

enum class ViolationKind { Asymmetric, Indefinite, Divergent };

inline const char* kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Asymmetric: return "asymmetric";
    case ViolationKind::Indefinite: return "indefinite";
    case ViolationKind::Divergent: return "divergent";
  }
  return "?";
}

struct Violation {
  int degree = 0;
  std::optional<double> lag;  // empty for purely spatial checks
  ViolationKind kind = ViolationKind::Indefinite;
  double magnitude = 0.0;
};

struct ValidityReport {
  bool valid = true;
  std::vector<Violation> violations;

  void add(Violation v) {
    valid = false;
    violations.push_back(v);
  }
};

namespace detail {

inline void require_square(const std::vector<Matrix>& coeffs, int m, const char* what) {
  if (coeffs.empty()) throw ConfigurationError(std::string(what) + ": at least one coefficient is required");
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    if (coeffs[n].rows() != m || coeffs[n].cols() != m) {
      throw ConfigurationError(std::string(what) + ": coefficient " + std::to_string(n) + " is not " +
                               std::to_string(m) + "x" + std::to_string(m));
    }
  }
}

inline bool is_integer_lag(double t) { return std::abs(t - std::round(t)) <= 1e-12; }

inline void require_lag(TimeDomain domain, double t) {
  if (!std::isfinite(t)) throw UsageError("lag must be finite");
  if (domain == TimeDomain::Integers && !is_integer_lag(t)) {
    throw UsageError("lag " + std::to_string(t) + " is not an integer but the model's temporal domain is Z");
  }
}

inline double rho_cosine(double rho) {
  constexpr double pi = 3.14159265358979323846;
  if (!(rho >= -kClampTolerance && rho <= pi + kClampTolerance)) {
    throw DomainError("rho must lie in [0, pi], got " + std::to_string(rho));
  }
  return std::cos(std::clamp(rho, 0.0, pi));
}

inline void require_trunc(int trunc, int max_degree) {
  if (trunc < 0 || trunc > max_degree) {
    throw UsageError("truncation degree " + std::to_string(trunc) + " outside stored range 0.." +
                     std::to_string(max_degree));
  }
}

inline double operator_norm(const Matrix& b) {
  if (b.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(b);
  return svd.singularValues()(0);
}

inline double max_abs(const Matrix& b) { return b.size() == 0 ? 0.0 : b.cwiseAbs().maxCoeff(); }

// Minimum eigenvalue of the symmetric part and the scale used for tolerances.
inline std::pair<double, double> min_eig_and_scale(const Matrix& b) {
  const Matrix sym = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  return {ev.minCoeff(), scale};
}

inline void check_tail(const std::optional<TailEnvelope>& tail, int next_degree, ValidityReport& report) {
  if (!tail) return;
  const bool ok = std::isfinite(tail->c) && tail->c >= 0.0 && std::isfinite(tail->r) && tail->r > 0.0 &&
                  tail->r < 1.0;
  if (!ok) report.add({next_degree, std::nullopt, ViolationKind::Divergent, tail->r});
}

}  // namespace detail

inline SpatialModel make_spatial_model(SpaceParams space, std::vector<Matrix> coeffs,
                                       std::optional<TailEnvelope> tail = std::nullopt) {
  if (coeffs.empty()) throw ConfigurationError("spatial model: at least one coefficient is required");
  const int m = static_cast<int>(coeffs.front().rows());
  if (m < 1) throw ConfigurationError("spatial model: field dimension must be positive");
  detail::require_square(coeffs, m, "spatial model");
  return SpatialModel{std::move(space), m, std::move(coeffs), tail};
}

/// Builds a spatio-temporal model. The temporal domain is implied by the kernel
/// (AR1, MA(1), lag tables: Z; exponential: R) except for PureSpatial, which
/// takes `pure_domain`.
inline SpatioTemporalModel make_spatiotemporal_model(SpaceParams space, std::vector<Matrix> coeffs,
                                                     TemporalKernel kernel,
                                                     TimeDomain pure_domain = TimeDomain::Reals,
                                                     std::optional<TailEnvelope> tail = std::nullopt) {
  if (coeffs.empty()) throw ConfigurationError("spatio-temporal model: at least one coefficient is required");
  const int m = static_cast<int>(coeffs.front().rows());
  if (m < 1) throw ConfigurationError("spatio-temporal model: field dimension must be positive");
  detail::require_square(coeffs, m, "spatio-temporal model");
  TimeDomain domain = pure_domain;
  if (const auto* sep = std::get_if<SeparableScalar>(&kernel)) {
    if (sep->kind == SeparableScalar::Kind::AR1) {
      if (!(sep->parameter > -1.0 && sep->parameter < 1.0))
        throw ConfigurationError("AR1 coefficient phi must lie in (-1, 1)");
      domain = TimeDomain::Integers;
    } else {
      if (!(sep->parameter > 0.0) || !std::isfinite(sep->parameter))
        throw ConfigurationError("exponential rate theta must be positive");
      domain = TimeDomain::Reals;
    }
  } else if (const auto* ma = std::get_if<VectorMA1>(&kernel)) {
    if (ma->phi.rows() != m || ma->phi.cols() != m)
      throw ConfigurationError("MA(1) Phi must be " + std::to_string(m) + "x" + std::to_string(m));
    domain = TimeDomain::Integers;
  } else if (const auto* table = std::get_if<LagTable>(&kernel)) {
    for (const auto& [lag, mats] : table->lags) {
      if (lag == 0) throw ConfigurationError("lag table: lag 0 comes from the model coefficients");
      if (mats.size() != coeffs.size())
        throw ConfigurationError("lag table: lag " + std::to_string(lag) + " needs one matrix per degree");
      detail::require_square(mats, m, "lag table");
    }
    domain = TimeDomain::Integers;
  }
  return SpatioTemporalModel{std::move(space), m, std::move(coeffs), std::move(kernel), domain, tail};
}

/// B_n(t) of a spatio-temporal model.
inline Matrix lag_matrix(const SpatioTemporalModel& model, int n, double t) {
  detail::require_lag(model.domain, t);
  if (n < 0 || n > model.max_degree()) throw UsageError("degree " + std::to_string(n) + " not stored");
  const Matrix& c = model.coeffs[static_cast<std::size_t>(n)];
  return std::visit(
      [&](const auto& k) -> Matrix {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PureSpatial>) {
          return c;
        } else if constexpr (std::is_same_v<K, SeparableScalar>) {
          return c * k.correlation(t);
        } else if constexpr (std::is_same_v<K, VectorMA1>) {
          const long long lag = std::llround(t);
          if (lag == 0) return c + k.phi * c * k.phi.transpose();
          if (lag == 1) return k.phi * c;
          if (lag == -1) return c * k.phi.transpose();
          return Matrix::Zero(model.m, model.m);
        } else {
          const long long lag = std::llround(t);
          if (lag == 0) return c;
          const auto it = k.lags.find(lag);
          if (it == k.lags.end()) return Matrix::Zero(model.m, model.m);
          return it->second[static_cast<std::size_t>(n)];
        }
      },
      model.kernel);
}

/// Symmetry, nonnegative-definiteness and convergence of every B_n.
inline ValidityReport validate_spatial(const SpatialModel& model) {
  ValidityReport report;
  for (int n = 0; n <= model.max_degree(); ++n) {
    const Matrix& b = model.coeffs[static_cast<std::size_t>(n)];
    if (!b.allFinite()) {
      report.add({n, std::nullopt, ViolationKind::Divergent, std::numeric_limits<double>::infinity()});
      continue;
    }
    const double asym = detail::max_abs(b - b.transpose());
    if (asym > 1e-12 * std::max(1.0, detail::max_abs(b))) {
      report.add({n, std::nullopt, ViolationKind::Asymmetric, asym});
    }
    const auto [min_eig, scale] = detail::min_eig_and_scale(b);
    if (min_eig < -1e-10 * scale) report.add({n, std::nullopt, ViolationKind::Indefinite, min_eig});
  }
  detail::check_tail(model.tail, model.max_degree() + 1, report);
  return report;
}

/// Necessary conditions for a spatio-temporal model on the given probe lags:
/// B_n(-t) = B_n(t)^T at every probe difference, and the block matrix
/// [B_n(t_i - t_j)] over the probes is nonnegative-definite. Passing every probe
/// does not prove validity on a continuous time domain.
inline ValidityReport validate_spatiotemporal(const SpatioTemporalModel& model,
                                              const std::vector<double>& probe_lags) {
  if (probe_lags.empty() || std::none_of(probe_lags.begin(), probe_lags.end(), [](double t) { return t == 0.0; })) {
    throw UsageError("probe lags must be nonempty and contain 0");
  }
  std::set<double> probes;
  for (double t : probe_lags) {
    if (!std::isfinite(t)) continue;
    if (model.domain == TimeDomain::Integers) {
      if (!detail::is_integer_lag(t)) continue;
      t = std::round(t);
    }
    probes.insert(t);
  }
  const std::vector<double> grid(probes.begin(), probes.end());
  std::set<double> diffs;
  for (double a : grid)
    for (double b : grid)
      if (a - b >= 0.0) diffs.insert(a - b);

  ValidityReport report;
  const int m = model.m;
  const auto k = static_cast<Eigen::Index>(grid.size());
  for (int n = 0; n <= model.max_degree(); ++n) {
    if (!model.coeffs[static_cast<std::size_t>(n)].allFinite()) {
      report.add({n, 0.0, ViolationKind::Divergent, std::numeric_limits<double>::infinity()});
      continue;
    }
    for (double t : diffs) {
      const Matrix plus = lag_matrix(model, n, t);
      const Matrix minus = lag_matrix(model, n, -t);
      const double asym = detail::max_abs(minus - plus.transpose());
      if (asym > 1e-12 * std::max({1.0, detail::max_abs(plus), detail::max_abs(minus)})) {
        report.add({n, t, ViolationKind::Asymmetric, asym});
      }
    }
    Matrix block(k * m, k * m);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        block.block(i * m, j * m, m, m) = lag_matrix(model, n, grid[i] - grid[j]);
    const auto [min_eig, scale] = detail::min_eig_and_scale(block);
    if (min_eig < -1e-9 * scale) report.add({n, std::nullopt, ViolationKind::Indefinite, min_eig});
  }
  detail::check_tail(model.tail, model.max_degree() + 1, report);
  return report;
}

inline ValidityReport validate(const Model& model, const std::vector<double>& probe_lags = {-2, -1, 0, 1, 2}) {
  if (const auto* s = std::get_if<SpatialModel>(&model)) return validate_spatial(*s);
  return validate_spatiotemporal(std::get<SpatioTemporalModel>(model), probe_lags);
}

/// Partial sum of the series through degree `trunc` at distance rho, lag 0.
inline Matrix eval_cov(const SpatialModel& model, double rho, double t, int trunc) {
  if (t != 0.0) throw UsageError("purely spatial models are evaluated at lag 0 only");
  detail::require_trunc(trunc, model.max_degree());
  const auto p = jacobi_sequence(trunc, model.space.geom, detail::rho_cosine(rho));
  Matrix out = Matrix::Zero(model.m, model.m);
  for (int n = 0; n <= trunc; ++n) out += model.coeffs[static_cast<std::size_t>(n)] * p[static_cast<std::size_t>(n)];
  return out;
}

/// Partial sum of sum_n B_n(t) P_n(cos rho) through degree `trunc`.
inline Matrix eval_cov(const SpatioTemporalModel& model, double rho, double t, int trunc) {
  detail::require_lag(model.domain, t);
  detail::require_trunc(trunc, model.max_degree());
  const auto p = jacobi_sequence(trunc, model.space.geom, detail::rho_cosine(rho));
  Matrix out = Matrix::Zero(model.m, model.m);
  for (int n = 0; n <= trunc; ++n) out += lag_matrix(model, n, t) * p[static_cast<std::size_t>(n)];
  return out;
}

inline Matrix eval_cov(const Model& model, double rho, double t, int trunc) {
  return std::visit([&](const auto& m) { return eval_cov(m, rho, t, trunc); }, model);
}

/// (C(rho; t) + C(rho; -t)) / 2.
inline Matrix eval_cov_symmetrized(const SpatioTemporalModel& model, double rho, double t, int trunc) {
  const Matrix half = 0.5 * (eval_cov(model, rho, t, trunc) + eval_cov(model, rho, -t, trunc));
  return 0.5 * (half + half.transpose());
}

namespace detail {

inline double tail_bound_impl(const SpaceParams& space, int max_degree, const std::optional<TailEnvelope>& tail,
                              int n_cut, const std::function<Matrix(int)>& at_zero) {
  if (n_cut < 0) throw UsageError("truncation degree must be nonnegative");
  double bound = 0.0;
  for (int n = n_cut + 1; n <= max_degree; ++n) {
    bound += operator_norm(at_zero(n)) * jacobi_at_one(n, space.geom);
  }
  if (tail) {
    const int first = std::max(n_cut, max_degree) + 1;
    bound += tail->c * std::pow(tail->r, first) / (1.0 - tail->r);
  }
  return bound;
}

}  // namespace detail

/// sum_{n > N} ||B_n(0)|| P_n(1): stored coefficients past N plus the envelope.
inline double truncation_bound(const SpatialModel& model, int n_cut) {
  return detail::tail_bound_impl(model.space, model.max_degree(), model.tail, n_cut,
                                 [&](int n) { return model.coeffs[static_cast<std::size_t>(n)]; });
}

inline double truncation_bound(const SpatioTemporalModel& model, int n_cut) {
  return detail::tail_bound_impl(model.space, model.max_degree(), model.tail, n_cut,
                                 [&](int n) { return lag_matrix(model, n, 0.0); });
}

inline double truncation_bound(const Model& model, int n_cut) {
  return std::visit([&](const auto& m) { return truncation_bound(m, n_cut); }, model);
}

/// C_n = B_n / dim H_n.
inline Matrix angular_power_spectrum(const SpatialModel& model, int n) {
  if (n < 0 || n > model.max_degree()) {
    throw UsageError("degree " + std::to_string(n) + " outside stored range 0.." + std::to_string(model.max_degree()));
  }
  return model.coeffs[static_cast<std::size_t>(n)] / dim_eigenspace(model.space, n);
}

using CovarianceFunction = std::function<Matrix(double rho)>;

/// Projects a covariance function onto P_0..P_N with Gauss-Jacobi quadrature
/// of the given order: B_n = (1/h_n) sum_k w_k C(arccos x_k) P_n(x_k).
inline SpatialModel recover_coefficients(const CovarianceFunction& cov, const SpaceParams& space, int m,
                                         int max_degree, int order) {
  if (max_degree < 0) throw UsageError("maximum degree must be nonnegative");
  if (order < max_degree + 1) throw UsageError("quadrature order must be at least max degree + 1");
  if (m < 1) throw UsageError("field dimension must be positive");
  const QuadratureRule rule = gauss_jacobi(order, space.geom);
  std::vector<Matrix> coeffs(static_cast<std::size_t>(max_degree) + 1, Matrix::Zero(m, m));
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double x = rule.nodes[k];
    const Matrix c = cov(std::acos(std::clamp(x, -1.0, 1.0)));
    if (c.rows() != m || c.cols() != m) throw InputError("covariance callback returned a matrix of the wrong shape");
    if (!c.allFinite()) throw InputError("covariance callback returned a non-finite value");
    const auto p = jacobi_sequence(max_degree, space.geom, x);
    for (int n = 0; n <= max_degree; ++n) {
      coeffs[static_cast<std::size_t>(n)] += (rule.weights[k] * p[static_cast<std::size_t>(n)]) * c;
    }
  }
  for (int n = 0; n <= max_degree; ++n) {
    Matrix& b = coeffs[static_cast<std::size_t>(n)];
    b /= jacobi_norm_constant(n, space.geom);
    b = 0.5 * (b + b.transpose()).eval();
  }
  return SpatialModel{space, m, std::move(coeffs), std::nullopt};
}

/// 64-bit FNV-1a over the model's space, coefficients and kernel parameters.
inline std::uint64_t model_fingerprint(const Model& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto mix_int = [&](long long v) { mix_bytes(&v, sizeof v); };
  auto mix_double = [&](double v) { mix_bytes(&v, sizeof v); };
  auto mix_matrix = [&](const Matrix& a) {
    mix_int(a.rows());
    mix_int(a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) mix_double(a(i, j));
  };
  auto mix_common = [&](const SpaceParams& s, const std::vector<Matrix>& coeffs,
                        const std::optional<TailEnvelope>& tail) {
    mix_int(static_cast<long long>(s.family));
    mix_int(s.d);
    mix_int(static_cast<long long>(coeffs.size()));
    for (const auto& c : coeffs) mix_matrix(c);
    mix_int(tail ? 1 : 0);
    if (tail) {
      mix_double(tail->c);
      mix_double(tail->r);
    }
  };
  if (const auto* s = std::get_if<SpatialModel>(&model)) {
    mix_int(0);
    mix_common(s->space, s->coeffs, s->tail);
    return h;
  }
  const auto& st = std::get<SpatioTemporalModel>(model);
  mix_int(1);
  mix_common(st.space, st.coeffs, st.tail);
  mix_int(static_cast<long long>(st.domain));
  mix_int(static_cast<long long>(st.kernel.index()));
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SeparableScalar>) {
          mix_int(static_cast<long long>(k.kind));
          mix_double(k.parameter);
        } else if constexpr (std::is_same_v<K, VectorMA1>) {
          mix_matrix(k.phi);
        } else if constexpr (std::is_same_v<K, LagTable>) {
          for (const auto& [lag, mats] : k.lags) {
            mix_int(lag);
            for (const auto& a : mats) mix_matrix(a);
          }
        }
      },
      st.kernel);
  return h;
}

inline const SpaceParams& model_space(const Model& model) {
  return std::visit([](const auto& m) -> const SpaceParams& { return m.space; }, model);
}

inline int model_dimension(const Model& model) {
  return std::visit([](const auto& m) { return m.m; }, model);
}

inline int model_max_degree(const Model& model) {
  return std::visit([](const auto& m) { return m.max_degree(); }, model);
}

}  // namespace isofield
