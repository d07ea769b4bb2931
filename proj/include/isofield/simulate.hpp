#pragma once

// Truncated series simulation
//
//   Z(x; t) = sum_{n <= N} W_n(t) P_n(cos rho(x, U))
//
// with U uniform on the space and independent per-degree Gaussian terms W_n:
// W_n = B_n^{1/2} V_n, V_n ~ N(0, a_n^2 I) for spatial models, and a
// stationary path with cov(W_n(t1), W_n(t2)) = a_n^2 B_n(t1 - t2) otherwise.
//
// Random streams: U uses sub-stream 0 of the seed, degree n uses sub-stream
// n + 1 (see derive_seed). A single realization is not ergodic in U; ensemble
// statistics need independent replicates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "isofield/detail/parallel.hpp"
#include "isofield/detail/random.hpp"
#include "isofield/errors.hpp"
#include "isofield/spaces.hpp"
#include "isofield/spectral.hpp"

namespace isofield {

/// Symmetric square root S D^{1/2} S^T. Eigenvalues in [-tol * scale, 0) are
/// clipped to zero; anything more negative is rejected.
inline Matrix matrix_sqrt(const Matrix& b, double rel_tol = 1e-10) {
  if (b.rows() != b.cols()) throw UsageError("matrix_sqrt requires a square matrix");
  if (b.size() == 0) return b;
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > rel_tol * scale) {
    throw UsageError("matrix_sqrt requires a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed in matrix_sqrt");
  Vector ev = es.eigenvalues();
  const double ev_scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -rel_tol * ev_scale) {
      throw IndefiniteMatrixError("matrix_sqrt: eigenvalue " + std::to_string(ev(i)) + " below tolerance", ev(i));
    }
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  const Matrix r = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

struct Realization {
  SpaceParams space;
  int m = 1;
  std::vector<Point> points;
  std::vector<double> times;  // {0} for spatial models
  std::vector<double> values;  // index (point * times + time) * m + component
  Point latent_u;
  int trunc = 0;
  std::uint64_t seed = 0;
  std::uint64_t model_hash = 0;
  /// degree_terms[n] is times x m: the coefficient W_n(t) multiplying P_n(cos rho(x, U)).
  std::vector<Matrix> degree_terms;

  std::size_t index(std::size_t point, std::size_t time, std::size_t component) const {
    return (point * times.size() + time) * static_cast<std::size_t>(m) + component;
  }
  double value(std::size_t point, std::size_t time, std::size_t component) const {
    return values[index(point, time, component)];
  }
  Vector value_vector(std::size_t point, std::size_t time) const {
    return Eigen::Map<const Vector>(values.data() + index(point, time, 0), m);
  }

  /// Field at an arbitrary point from the recorded latent draws.
  Vector field_at(const Point& x, std::size_t time) const {
    const auto p = jacobi_sequence(trunc, space.geom, cos_distance(space, x, latent_u));
    Vector z = Vector::Zero(m);
    for (int n = 0; n <= trunc; ++n) {
      z += degree_terms[static_cast<std::size_t>(n)].row(static_cast<Eigen::Index>(time)).transpose() *
           p[static_cast<std::size_t>(n)];
    }
    return z;
  }

  /// Degree-n term W_n(t) P_n(cos rho(x, U)).
  Vector term_at(int n, const Point& x, std::size_t time) const {
    const double p = jacobi_eval(n, space.geom, cos_distance(space, x, latent_u));
    return degree_terms[static_cast<std::size_t>(n)].row(static_cast<Eigen::Index>(time)).transpose() * p;
  }
};

namespace detail {

inline Vector standard_normals(Rng& rng, Eigen::Index count) {
  std::normal_distribution<double> gauss;
  Vector v(count);
  for (Eigen::Index i = 0; i < count; ++i) v(i) = gauss(rng);
  return v;
}

inline void require_sampling(const SpaceParams& space) {
  if (!supports_points(space)) {
    throw UnsupportedGeometryError(to_string(space) + " has parameter-level support only; simulation needs point sampling");
  }
}

inline void require_points(const SpaceParams& space, const std::vector<Point>& points) {
  for (const auto& p : points) require_same(space, p);
}

inline std::vector<double> shifted_times(const std::vector<double>& times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(t - times.front());
  return out;
}

inline void fill_values(Realization& r) {
  const std::size_t n_times = r.times.size();
  r.values.assign(r.points.size() * n_times * static_cast<std::size_t>(r.m), 0.0);
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    const auto seq = jacobi_sequence(r.trunc, r.space.geom, cos_distance(r.space, r.points[p], r.latent_u));
    for (std::size_t t = 0; t < n_times; ++t) {
      for (int n = 0; n <= r.trunc; ++n) {
        const auto row = r.degree_terms[static_cast<std::size_t>(n)].row(static_cast<Eigen::Index>(t));
        const double w = seq[static_cast<std::size_t>(n)];
        for (int c = 0; c < r.m; ++c) r.values[r.index(p, t, static_cast<std::size_t>(c))] += row(c) * w;
      }
    }
  }
}

inline Realization simulate_spatial_unchecked(const SpatialModel& model, const std::vector<Point>& points, int trunc,
                                              std::uint64_t seed, const std::vector<Matrix>& roots) {
  Realization r;
  r.space = model.space;
  r.m = model.m;
  r.points = points;
  r.times = {0.0};
  r.trunc = trunc;
  r.seed = seed;
  Rng u_stream = make_stream(seed, 0);
  r.latent_u = sample_uniform(model.space, u_stream);
  r.degree_terms.reserve(static_cast<std::size_t>(trunc) + 1);
  for (int n = 0; n <= trunc; ++n) {
    Rng stream = make_stream(seed, static_cast<std::uint64_t>(n) + 1);
    const Vector v = a_constant(model.space, n) * standard_normals(stream, model.m);
    const Vector w = roots[static_cast<std::size_t>(n)] * v;
    r.degree_terms.emplace_back(w.transpose());
  }
  fill_values(r);
  return r;
}

// Path of W_n over the time grid; rows are times.
inline Matrix degree_path(const SpatioTemporalModel& model, int n, const std::vector<double>& times, Rng& rng,
                          const Matrix& root) {
  const auto k = static_cast<Eigen::Index>(times.size());
  const int m = model.m;
  const double a = a_constant(model.space, n);
  Matrix path(k, m);
  std::visit(
      [&](const auto& kernel) {
        using K = std::decay_t<decltype(kernel)>;
        if constexpr (std::is_same_v<K, PureSpatial>) {
          const Vector w = a * (root * standard_normals(rng, m));
          for (Eigen::Index i = 0; i < k; ++i) path.row(i) = w.transpose();
        } else if constexpr (std::is_same_v<K, SeparableScalar>) {
          // r(s + t) = r(s) r(t) for both kernels, so sequential conditioning on
          // the previous time is exact for arbitrary gaps.
          Vector xi = standard_normals(rng, m);
          for (Eigen::Index i = 0; i < k; ++i) {
            if (i > 0) {
              const double c = kernel.correlation(times[static_cast<std::size_t>(i)] -
                                                  times[static_cast<std::size_t>(i - 1)]);
              xi = c * xi + std::sqrt(std::max(0.0, 1.0 - c * c)) * standard_normals(rng, m);
            }
            path.row(i) = (a * (root * xi)).transpose();
          }
        } else if constexpr (std::is_same_v<K, VectorMA1>) {
          // eps at every t and t - 1, drawn in increasing time order
          std::set<long long> needed;
          for (double t : times) {
            needed.insert(std::llround(t));
            needed.insert(std::llround(t) - 1);
          }
          std::map<long long, Vector> eps;
          for (long long t : needed) eps.emplace(t, root * standard_normals(rng, m));
          for (Eigen::Index i = 0; i < k; ++i) {
            const long long t = std::llround(times[static_cast<std::size_t>(i)]);
            path.row(i) = (a * (eps.at(t) + kernel.phi * eps.at(t - 1))).transpose();
          }
        } else {
          // general kernel: joint Gaussian over the grid from the block covariance root
          const Vector w = a * (root * standard_normals(rng, k * m));
          for (Eigen::Index i = 0; i < k; ++i) path.row(i) = w.segment(i * m, m).transpose();
        }
      },
      model.kernel);
  return path;
}

// Per-degree factor consumed by degree_path: B_n^{1/2} for PureSpatial and
// separable kernels, Sigma_n^{1/2} for MA(1), the block-covariance root for lag tables.
inline std::vector<Matrix> spatiotemporal_roots(const SpatioTemporalModel& model, const std::vector<double>& times,
                                                int trunc) {
  std::vector<Matrix> roots;
  roots.reserve(static_cast<std::size_t>(trunc) + 1);
  const auto k = static_cast<Eigen::Index>(times.size());
  const int m = model.m;
  for (int n = 0; n <= trunc; ++n) {
    const Matrix& c = model.coeffs[static_cast<std::size_t>(n)];
    if (std::holds_alternative<LagTable>(model.kernel)) {
      Matrix block(k * m, k * m);
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
          block.block(i * m, j * m, m, m) =
              lag_matrix(model, n, times[static_cast<std::size_t>(i)] - times[static_cast<std::size_t>(j)]);
      roots.push_back(matrix_sqrt(0.5 * (block + block.transpose()), 1e-9));
    } else {
      roots.push_back(matrix_sqrt(c));
    }
  }
  return roots;
}

inline Realization simulate_spatiotemporal_unchecked(const SpatioTemporalModel& model,
                                                     const std::vector<Point>& points,
                                                     const std::vector<double>& times, int trunc, std::uint64_t seed,
                                                     const std::vector<Matrix>& roots) {
  Realization r;
  r.space = model.space;
  r.m = model.m;
  r.points = points;
  r.times = times;
  r.trunc = trunc;
  r.seed = seed;
  Rng u_stream = make_stream(seed, 0);
  r.latent_u = sample_uniform(model.space, u_stream);
  r.degree_terms.reserve(static_cast<std::size_t>(trunc) + 1);
  for (int n = 0; n <= trunc; ++n) {
    Rng stream = make_stream(seed, static_cast<std::uint64_t>(n) + 1);
    r.degree_terms.push_back(degree_path(model, n, times, stream, roots[static_cast<std::size_t>(n)]));
  }
  fill_values(r);
  return r;
}

inline void require_times(const SpatioTemporalModel& model, const std::vector<double>& times) {
  if (times.empty()) throw UsageError("at least one time is required");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require_lag(model.domain, times[i]);
    if (i > 0 && !(times[i] > times[i - 1])) throw UsageError("times must be strictly increasing");
  }
}

inline std::string describe_report(const ValidityReport& report) {
  std::string s = "model is not a valid covariance:";
  for (const auto& v : report.violations) {
    s += " [degree " + std::to_string(v.degree) + " " + kind_name(v.kind) + "]";
  }
  return s;
}

inline void require_spatial_valid(const SpatialModel& model, int trunc) {
  require_sampling(model.space);
  require_trunc(trunc, model.max_degree());
  const auto report = validate_spatial(model);
  if (!report.valid) throw ModelError(describe_report(report));
}

inline void require_spatiotemporal_valid(const SpatioTemporalModel& model, const std::vector<double>& times,
                                         int trunc) {
  require_sampling(model.space);
  require_trunc(trunc, model.max_degree());
  require_times(model, times);
  const auto report = validate_spatiotemporal(model, shifted_times(times));
  if (!report.valid) throw ModelError(describe_report(report));
}

}  // namespace detail

/// One realization of the truncated spatial series at the given points.
inline Realization simulate_spatial(const SpatialModel& model, const std::vector<Point>& points, int trunc,
                                    std::uint64_t seed) {
  detail::require_spatial_valid(model, trunc);
  detail::require_points(model.space, points);
  std::vector<Matrix> roots;
  for (int n = 0; n <= trunc; ++n) roots.push_back(matrix_sqrt(model.coeffs[static_cast<std::size_t>(n)]));
  auto r = detail::simulate_spatial_unchecked(model, points, trunc, seed, roots);
  r.model_hash = model_fingerprint(model);
  return r;
}

/// One realization of the truncated spatio-temporal series on points x times.
inline Realization simulate_spatiotemporal(const SpatioTemporalModel& model, const std::vector<Point>& points,
                                           const std::vector<double>& times, int trunc, std::uint64_t seed) {
  detail::require_spatiotemporal_valid(model, times, trunc);
  detail::require_points(model.space, points);
  const auto roots = detail::spatiotemporal_roots(model, times, trunc);
  auto r = detail::simulate_spatiotemporal_unchecked(model, points, times, trunc, seed, roots);
  r.model_hash = model_fingerprint(model);
  return r;
}

inline Realization simulate(const Model& model, const std::vector<Point>& points, const std::vector<double>& times,
                            int trunc, std::uint64_t seed) {
  if (const auto* s = std::get_if<SpatialModel>(&model)) {
    if (times.size() != 1 || times.front() != 0.0) throw UsageError("purely spatial models are simulated at time 0 only");
    return simulate_spatial(*s, points, trunc, seed);
  }
  return simulate_spatiotemporal(std::get<SpatioTemporalModel>(model), points, times, trunc, seed);
}

/// Independent replicates; replicate i uses seed derive_seed(base_seed, i).
/// Results do not depend on `threads`.
inline std::vector<Realization> simulate_ensemble(const Model& model, const std::vector<Point>& points,
                                                  const std::vector<double>& times, int trunc, std::uint64_t base_seed,
                                                  std::size_t count, unsigned threads = 0) {
  std::vector<Realization> out(count);
  const std::uint64_t hash = model_fingerprint(model);
  if (const auto* s = std::get_if<SpatialModel>(&model)) {
    if (times.size() != 1 || times.front() != 0.0) throw UsageError("purely spatial models are simulated at time 0 only");
    detail::require_spatial_valid(*s, trunc);
    detail::require_points(s->space, points);
    std::vector<Matrix> roots;
    for (int n = 0; n <= trunc; ++n) roots.push_back(matrix_sqrt(s->coeffs[static_cast<std::size_t>(n)]));
    detail::parallel_for(count, threads, [&](std::size_t i) {
      out[i] = detail::simulate_spatial_unchecked(*s, points, trunc, derive_seed(base_seed, i), roots);
      out[i].model_hash = hash;
    });
    return out;
  }
  const auto& st = std::get<SpatioTemporalModel>(model);
  detail::require_spatiotemporal_valid(st, times, trunc);
  detail::require_points(st.space, points);
  const auto roots = detail::spatiotemporal_roots(st, times, trunc);
  detail::parallel_for(count, threads, [&](std::size_t i) {
    out[i] = detail::simulate_spatiotemporal_unchecked(st, points, times, trunc, derive_seed(base_seed, i), roots);
    out[i].model_hash = hash;
  });
  return out;
}

}  // namespace isofield
