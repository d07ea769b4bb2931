#pragma once

// Numeric oracles: Monte-Carlo checks of the orthogonality and covariance
// identities over uniform points, ensemble covariance estimates, V_n recovery
// and exact checks of the per-space constants.
//
// Every Monte-Carlo estimate carries a standard error and a z-score
// max |value - target| / std_error; the pass threshold is kZThreshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "isofield/detail/parallel.hpp"
#include "isofield/detail/random.hpp"
#include "isofield/errors.hpp"
#include "isofield/simulate.hpp"
#include "isofield/spaces.hpp"
#include "isofield/spectral.hpp"
#include "isofield/specialfn.hpp"

namespace isofield {

inline constexpr double kZThreshold = 5.0;

struct MCEstimate {
  Matrix value;
  Matrix std_error;
  Matrix target;
  long long replicates = 0;
  double z_score = 0.0;

  bool passes(double threshold = kZThreshold) const { return z_score <= threshold; }
};

struct OracleOptions {
  unsigned threads = 0;
  /// Multiplier applied to a_n inside the oracles. 1 except for fault injection.
  double a_scale = 1.0;
};

namespace detail {

// Floor on the standard error so deterministic integrands (zero sample
// variance) still give a finite z-score; rounding-level deviations pass.
inline double se_floor(double value, double target) {
  return 1e-12 * std::max({1.0, std::abs(value), std::abs(target)});
}

/// Mean and standard error of per-replicate matrix samples laid out as
/// samples[r * size + k], k indexing the entries column-major.
inline MCEstimate summarize(const std::vector<double>& samples, Eigen::Index rows, Eigen::Index cols,
                            const Matrix& target, double scale = 1.0) {
  const auto size = static_cast<std::size_t>(rows * cols);
  const std::size_t count = size == 0 ? 0 : samples.size() / size;
  MCEstimate est;
  est.replicates = static_cast<long long>(count);
  est.value = Matrix::Zero(rows, cols);
  est.std_error = Matrix::Zero(rows, cols);
  est.target = target;
  for (std::size_t k = 0; k < size; ++k) {
    double mean = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < count; ++r) {
      const double x = samples[r * size + k];
      const double delta = x - mean;
      mean += delta / static_cast<double>(r + 1);
      m2 += delta * (x - mean);
    }
    const double var = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    const double value = scale * mean;
    const double tgt = target(static_cast<Eigen::Index>(k) % rows, static_cast<Eigen::Index>(k) / rows);
    const double se = std::max(std::abs(scale) * std::sqrt(var / static_cast<double>(std::max<std::size_t>(count, 1))),
                               se_floor(value, tgt));
    est.value(static_cast<Eigen::Index>(k) % rows, static_cast<Eigen::Index>(k) / rows) = value;
    est.std_error(static_cast<Eigen::Index>(k) % rows, static_cast<Eigen::Index>(k) / rows) = se;
  }
  double z = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      z = std::max(z, std::abs(est.value(i, j) - target(i, j)) / est.std_error(i, j));
  est.z_score = z;
  return est;
}

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// Jacobi sequences at x1 and x2 for each replicate's uniform U:
// out[r * 2(K+1) + n] = P_n(cos rho(x1, U)), then the same for x2.
inline std::vector<double> zonal_samples(const SpaceParams& space, int max_degree, const Point& x1, const Point& x2,
                                         long long replicates, std::uint64_t seed, unsigned threads) {
  if (!supports_points(space)) {
    throw UnsupportedGeometryError(to_string(space) + " has parameter-level support only; Monte-Carlo oracles need sampling");
  }
  require_same(space, x1);
  require_same(space, x2);
  if (replicates < 2) throw UsageError("Monte-Carlo oracles need at least 2 replicates");
  const auto stride = static_cast<std::size_t>(2 * (max_degree + 1));
  std::vector<double> out(static_cast<std::size_t>(replicates) * stride);
  parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t r) {
    Rng rng = make_stream(seed, r);
    const Point u = sample_uniform(space, rng);
    detail::jacobi_recurrence(max_degree, space.geom.alpha, space.geom.beta, cos_distance(space, x1, u),
                              out.data() + r * stride);
    detail::jacobi_recurrence(max_degree, space.geom.alpha, space.geom.beta, cos_distance(space, x2, u),
                              out.data() + r * stride + stride / 2);
  });
  return out;
}

}  // namespace detail

/// Funk-Hecke estimates for all 0 <= i, j <= max_degree from one sample of U:
/// omega_d E[P_i(cos rho(x1, U)) P_j(cos rho(x2, U))] against
/// delta_ij (omega_d / a_i^2) P_i(cos rho(x1, x2)). Indexed [i][j].
inline std::vector<std::vector<MCEstimate>> mc_funk_hecke_table(const SpaceParams& space, int max_degree,
                                                                const Point& x1, const Point& x2,
                                                                long long replicates, std::uint64_t seed,
                                                                const OracleOptions& opts = {}) {
  const auto samples = detail::zonal_samples(space, max_degree, x1, x2, replicates, seed, opts.threads);
  const auto stride = static_cast<std::size_t>(2 * (max_degree + 1));
  const auto half = stride / 2;
  const double c12 = cos_distance(space, x1, x2);
  std::vector<std::vector<MCEstimate>> table(static_cast<std::size_t>(max_degree) + 1);
  std::vector<double> prod(static_cast<std::size_t>(replicates));
  for (int i = 0; i <= max_degree; ++i) {
    for (int j = 0; j <= max_degree; ++j) {
      for (std::size_t r = 0; r < prod.size(); ++r) {
        prod[r] = samples[r * stride + static_cast<std::size_t>(i)] *
                  samples[r * stride + half + static_cast<std::size_t>(j)];
      }
      double target = 0.0;
      if (i == j) {
        const double a = opts.a_scale * a_constant(space, i);
        target = space.volume / (a * a) * jacobi_eval(i, space.geom, c12);
      }
      table[static_cast<std::size_t>(i)].push_back(detail::summarize(prod, 1, 1, detail::scalar(target), space.volume));
    }
  }
  return table;
}

inline MCEstimate mc_funk_hecke(const SpaceParams& space, int i, int j, const Point& x1, const Point& x2,
                                long long replicates, std::uint64_t seed, const OracleOptions& opts = {}) {
  if (i < 0 || j < 0) throw UsageError("degrees must be nonnegative");
  auto table = mc_funk_hecke_table(space, std::max(i, j), x1, x2, replicates, seed, opts);
  return table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

struct ZonalEstimates {
  MCEstimate mean;        // E[Z_n(x1)], target 0
  MCEstimate covariance;  // E[Z_n(x1) Z_n(x2)], target P_n(cos rho(x1, x2))
  MCEstimate cross;       // E[Z_k(x1) Z_n(x2)], k != n, target 0
};

/// Zonal field Z_n(x) = a_n P_n(cos rho(x, U)). The field is centred, so the
/// covariance estimates use plain product means; the mean is checked separately.
inline ZonalEstimates mc_zonal_covariance(const SpaceParams& space, int n, int other_degree, const Point& x1,
                                          const Point& x2, long long replicates, std::uint64_t seed,
                                          const OracleOptions& opts = {}) {
  if (n < 1) throw UsageError("zonal covariance oracle needs n >= 1");
  if (other_degree < 0 || other_degree == n) throw UsageError("cross-degree oracle needs a different degree");
  const int top = std::max(n, other_degree);
  const auto samples = detail::zonal_samples(space, top, x1, x2, replicates, seed, opts.threads);
  const auto stride = static_cast<std::size_t>(2 * (top + 1));
  const auto half = stride / 2;
  const double an = opts.a_scale * a_constant(space, n);
  const double ak = opts.a_scale * a_constant(space, other_degree);
  const auto count = static_cast<std::size_t>(replicates);
  std::vector<double> mean(count), cov(count), cross(count);
  for (std::size_t r = 0; r < count; ++r) {
    const double* s = samples.data() + r * stride;
    const double z1 = an * s[n];
    const double z2 = an * s[half + static_cast<std::size_t>(n)];
    mean[r] = z1;
    cov[r] = z1 * z2;
    cross[r] = ak * s[other_degree] * z2;
  }
  const double target = jacobi_eval(n, space.geom, cos_distance(space, x1, x2));
  return {detail::summarize(mean, 1, 1, detail::scalar(0.0)), detail::summarize(cov, 1, 1, detail::scalar(target)),
          detail::summarize(cross, 1, 1, detail::scalar(0.0))};
}

namespace detail {

inline void require_ensemble(const std::vector<Realization>& reals, std::size_t a, std::size_t b) {
  if (reals.size() < 2) throw UsageError("ensemble estimates need at least 2 realizations");
  const auto& first = reals.front();
  std::set<std::uint64_t> seeds;
  for (const auto& r : reals) {
    if (!(r.space == first.space) || r.m != first.m || r.points.size() != first.points.size() ||
        r.times != first.times || r.trunc != first.trunc || r.model_hash != first.model_hash) {
      throw UsageError("realizations must share model, points, times and truncation");
    }
    seeds.insert(r.seed);
  }
  if (seeds.size() != reals.size()) throw UsageError("realizations must have distinct seeds");
  if (a >= first.points.size() || b >= first.points.size()) throw UsageError("point index out of range");
}

// Index pairs (i, j) with times[i] - times[j] == lag.
inline std::vector<std::pair<std::size_t, std::size_t>> lag_pairs(const std::vector<double>& times, double lag) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t j = 0; j < times.size(); ++j)
      if (std::abs(times[i] - times[j] - lag) <= 1e-9) pairs.emplace_back(i, j);
  if (pairs.empty()) throw UsageError("lag " + std::to_string(lag) + " is not realizable on the time grid");
  return pairs;
}

}  // namespace detail

/// Ensemble estimate of E[Z(x_a; t + lag) Z(x_b; t)^T]. Within a replicate the
/// product is averaged over every t on the grid (variance reduction only); the
/// standard error comes from the spread across replicates. Uses the known zero
/// mean of the field.
inline MCEstimate empirical_cov(const Model& model, const std::vector<Realization>& reals, std::size_t a,
                                std::size_t b, double lag) {
  detail::require_ensemble(reals, a, b);
  const auto& first = reals.front();
  if (first.model_hash != model_fingerprint(model)) throw UsageError("realizations were not produced by this model");
  const auto pairs = detail::lag_pairs(first.times, lag);
  const int m = first.m;
  const auto size = static_cast<std::size_t>(m * m);
  std::vector<double> samples(reals.size() * size, 0.0);
  for (std::size_t r = 0; r < reals.size(); ++r) {
    Matrix acc = Matrix::Zero(m, m);
    for (const auto& [i, j] : pairs) acc += reals[r].value_vector(a, i) * reals[r].value_vector(b, j).transpose();
    acc /= static_cast<double>(pairs.size());
    std::copy(acc.data(), acc.data() + size, samples.begin() + static_cast<std::ptrdiff_t>(r * size));
  }
  const double rho = distance(first.space, first.points[a], first.points[b]);
  const Matrix target = eval_cov(model, rho, lag, first.trunc);
  return detail::summarize(samples, m, m, target);
}

/// Ensemble covariance between the degree-i term at x_a and the degree-j term
/// at x_b (same time); target 0 for i != j.
inline MCEstimate term_cross_cov(const std::vector<Realization>& reals, int i, int j, std::size_t a, std::size_t b,
                                 std::size_t time = 0) {
  if (i == j) throw UsageError("term_cross_cov checks distinct degrees only");
  detail::require_ensemble(reals, a, b);
  const auto& first = reals.front();
  if (i < 0 || j < 0 || i > first.trunc || j > first.trunc) throw UsageError("degree outside the truncation");
  if (time >= first.times.size()) throw UsageError("time index out of range");
  const int m = first.m;
  const auto size = static_cast<std::size_t>(m * m);
  std::vector<double> samples(reals.size() * size);
  for (std::size_t r = 0; r < reals.size(); ++r) {
    const Matrix prod =
        reals[r].term_at(i, reals[r].points[a], time) * reals[r].term_at(j, reals[r].points[b], time).transpose();
    std::copy(prod.data(), prod.data() + size, samples.begin() + static_cast<std::ptrdiff_t>(r * size));
  }
  return detail::summarize(samples, m, m, Matrix::Zero(m, m));
}

/// Recovers W_n(t) from one realization via
///   W_n(t) = a_n^2 / (omega_d P_n(1)) * integral Z(x; t) P_n(cos rho(x, U)) dx,
/// with the integral replaced by omega_d times a Monte-Carlo mean over uniform
/// x. Returns one m x 1 estimate per time; the target is the recorded term
/// (zero for degrees beyond the truncation).
inline std::vector<MCEstimate> mc_recover_vn(const Realization& real, int n, long long samples, std::uint64_t seed,
                                             const OracleOptions& opts = {}) {
  if (real.degree_terms.size() != static_cast<std::size_t>(real.trunc) + 1 || real.latent_u.coords.empty()) {
    throw UsageError("realization carries no latent draws");
  }
  if (n < 0) throw UsageError("degree must be nonnegative");
  if (samples < 2) throw UsageError("need at least 2 integration samples");
  const auto& space = real.space;
  const int m = real.m;
  const std::size_t n_times = real.times.size();
  const int top = std::max(n, real.trunc);
  const auto stride = n_times * static_cast<std::size_t>(m);
  std::vector<double> raw(static_cast<std::size_t>(samples) * stride);
  detail::parallel_for(static_cast<std::size_t>(samples), opts.threads, [&](std::size_t s) {
    Rng rng = make_stream(seed, s);
    const Point x = sample_uniform(space, rng);
    const auto p = jacobi_sequence(top, space.geom, cos_distance(space, x, real.latent_u));
    for (std::size_t t = 0; t < n_times; ++t) {
      Vector z = Vector::Zero(m);
      for (int k = 0; k <= real.trunc; ++k) {
        z += real.degree_terms[static_cast<std::size_t>(k)].row(static_cast<Eigen::Index>(t)).transpose() *
             p[static_cast<std::size_t>(k)];
      }
      z *= p[static_cast<std::size_t>(n)];
      for (int c = 0; c < m; ++c) raw[s * stride + t * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)] = z(c);
    }
  });
  const double an = opts.a_scale * a_constant(space, n);
  const double scale = an * an / jacobi_at_one(n, space.geom);
  std::vector<MCEstimate> out;
  out.reserve(n_times);
  std::vector<double> column(static_cast<std::size_t>(samples) * static_cast<std::size_t>(m));
  for (std::size_t t = 0; t < n_times; ++t) {
    for (std::size_t s = 0; s < static_cast<std::size_t>(samples); ++s)
      for (int c = 0; c < m; ++c)
        column[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)] =
            raw[s * stride + t * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)];
    Matrix target = Matrix::Zero(m, 1);
    if (n <= real.trunc) {
      target = real.degree_terms[static_cast<std::size_t>(n)].row(static_cast<Eigen::Index>(t)).transpose();
    }
    out.push_back(detail::summarize(column, m, 1, target, scale));
  }
  return out;
}

/// One checked identity. Deterministic checks leave std_error at 0 and z NaN.
struct IdentityRecord {
  std::string name;
  std::string reference;
  std::string space;
  double target = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  bool pass = false;
};

struct IdentityReport {
  std::vector<IdentityRecord> records;

  bool all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const IdentityRecord& r) { return r.pass; });
  }
  void append(const IdentityReport& other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
  }
};

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

// alpha and beta are integers or half-integers for every supported space.
inline Rational half_integer(double v) {
  const long long twice = std::llround(2.0 * v);
  return Rational(twice, 2);
}

/// dim H_n in exact arithmetic:
/// (2n+a+b+1) prod_{k=2}^n (a+b+k) prod_{k=1}^n (a+k) / (n! prod_{k=1}^n (b+k)).
inline Rational exact_dim_eigenspace(JacobiParams g, int n) {
  if (n == 0) return Rational(1);
  const Rational a = half_integer(g.alpha), b = half_integer(g.beta);
  Rational v = 2 * n + a + b + 1;
  for (int k = 2; k <= n; ++k) v *= a + b + k;
  for (int k = 1; k <= n; ++k) {
    v *= a + k;
    v /= Rational(k) * (b + k);
  }
  return v;
}

inline int expected_span(SpaceFamily f, int d) {
  switch (f) {
    case SpaceFamily::Sphere: return d;
    case SpaceFamily::RealProjective: return 1;
    case SpaceFamily::ComplexProjective: return 2;
    case SpaceFamily::QuaternionProjective: return 4;
    case SpaceFamily::OctonionProjective: return 8;
  }
  return 0;
}

inline IdentityRecord exact_record(std::string name, std::string reference, const SpaceParams& s, double target,
                                   double estimate, double rel_tol) {
  IdentityRecord r;
  r.name = std::move(name);
  r.reference = std::move(reference);
  r.space = to_string(s);
  r.target = target;
  r.estimate = estimate;
  r.tolerance = rel_tol;
  r.pass = std::abs(estimate - target) <= rel_tol * std::max(1.0, std::abs(target));
  return r;
}

}  // namespace detail

/// Highest degree used by the eigenspace identities.
inline constexpr int kIdentityMaxDegree = 50;

/// Volume, Weinstein integer, dimension relations and eigenspace identities
/// for one space. Failures are report entries, never exceptions.
inline IdentityReport check_space_identities(const SpaceParams& s) {
  IdentityReport rep;
  const auto& g = s.geom;
  const double iw = weinstein_formula(g);
  rep.records.push_back(detail::exact_record("volume = weinstein * sphere volume", "volume of M^d", s,
                                             iw * sphere_volume(s.d), s.volume, 1e-9));
  rep.records.push_back(
      detail::exact_record("weinstein integrality", "Weinstein integer", s, std::round(iw), iw, 1e-9));
  rep.records.push_back(detail::exact_record("weinstein closed form", "Weinstein integer table", s,
                                             static_cast<double>(detail::weinstein_table(s.family, s.d)), iw, 1e-9));
  rep.records.push_back(detail::exact_record("d = 2 alpha + 2", "dimension relation", s, s.d, 2.0 * g.alpha + 2.0, 0.0));
  rep.records.push_back(detail::exact_record("e = 2 beta + 2", "antipodal span relation", s,
                                             detail::expected_span(s.family, s.d), 2.0 * g.beta + 2.0, 0.0));
  if (s.family == SpaceFamily::Sphere) {
    rep.records.push_back(detail::exact_record("sphere volume: closed form vs gamma form", "volume of S^d", s,
                                               sphere_volume(s.d), s.volume, 1e-12));
  }
  rep.records.push_back(detail::exact_record("a_0 = 1", "Funk-Hecke constant", s, 1.0, a_constant(s, 0), 0.0));
  rep.records.push_back(detail::exact_record("dim H_0 = 1", "eigenspace dimension", s, 1.0, dim_eigenspace(s, 0), 0.0));

  // a_n^2 P_n(1) = dim H_n: report the worst relative deviation over n <= 50.
  double worst = 0.0;
  int worst_n = 0;
  double worst_exact = 1.0;
  bool integral = true;
  double worst_float = 0.0;
  for (int n = 0; n <= kIdentityMaxDegree; ++n) {
    const detail::Rational exact = detail::exact_dim_eigenspace(g, n);
    if (denominator(exact) != 1) integral = false;
    const double exact_d = static_cast<double>(exact);
    const double an = a_constant(s, n);
    const double lhs = an * an * jacobi_at_one(n, g);
    const double rel = std::abs(lhs - exact_d) / exact_d;
    if (rel > worst) {
      worst = rel;
      worst_n = n;
      worst_exact = exact_d;
    }
    worst_float = std::max(worst_float, std::abs(dim_eigenspace(s, n) - exact_d) / exact_d);
  }
  {
    auto r = detail::exact_record("a_n^2 P_n(1) = dim H_n, n <= 50 (worst n=" + std::to_string(worst_n) + ")",
                                  "Funk-Hecke constant vs eigenspace dimension", s, worst_exact,
                                  worst_exact * (1.0 + worst), 1e-8);
    r.pass = worst <= 1e-8;
    rep.records.push_back(r);
  }
  {
    auto r = detail::exact_record("dim H_n integral for n <= 50 (exact arithmetic)", "eigenspace dimension", s, 1.0,
                                  integral ? 1.0 : 0.0, 0.0);
    rep.records.push_back(r);
    auto f = detail::exact_record("dim H_n floating vs exact, n <= 50", "eigenspace dimension", s, 0.0, worst_float,
                                  1e-10);
    f.pass = worst_float <= 1e-10;
    rep.records.push_back(f);
  }
  if (s.family == SpaceFamily::Sphere && s.d == 2) {
    double dev = 0.0;
    for (int n = 0; n <= kIdentityMaxDegree; ++n) dev = std::max(dev, std::abs(dim_eigenspace(s, n) - (2.0 * n + 1.0)));
    auto r = detail::exact_record("dim H_n = 2n + 1 on S^2", "eigenspace dimension", s, 0.0, dev, 1e-9);
    rep.records.push_back(r);
  }
  return rep;
}

/// Every supported space used by the identity suite: S^1..S^16, P^2..P^16(R),
/// P^4..P^16(C), P^8, P^12, P^16(H) and P^16(O).
inline std::vector<SpaceParams> space_catalog() {
  std::vector<SpaceParams> out;
  for (int d = 1; d <= 16; ++d) out.push_back(make_space(SpaceFamily::Sphere, d));
  for (int d = 2; d <= 16; ++d) out.push_back(make_space(SpaceFamily::RealProjective, d));
  for (int d = 4; d <= 16; d += 2) out.push_back(make_space(SpaceFamily::ComplexProjective, d));
  for (int d = 8; d <= 16; d += 4) out.push_back(make_space(SpaceFamily::QuaternionProjective, d));
  out.push_back(make_space(SpaceFamily::OctonionProjective, 16));
  return out;
}

struct SuiteConfig {
  std::vector<SpaceParams> identity_spaces = space_catalog();
  std::vector<SpaceParams> mc_spaces;
  int max_degree = 4;
  int pairs = 3;
  long long replicates = 100000;
  std::uint64_t seed = 0;
  OracleOptions options;
};

namespace detail {

inline IdentityRecord mc_record(std::string name, std::string reference, const SpaceParams& s,
                                const MCEstimate& est) {
  IdentityRecord r;
  r.name = std::move(name);
  r.reference = std::move(reference);
  r.space = to_string(s);
  r.target = est.target(0, 0);
  r.estimate = est.value(0, 0);
  r.std_error = est.std_error(0, 0);
  r.z = est.z_score;
  r.tolerance = kZThreshold;
  r.pass = est.passes();
  return r;
}

}  // namespace detail

/// Exact identities on every configured space plus the Monte-Carlo
/// orthogonality and zonal-field oracles on random point pairs of the
/// sampling-capable spaces.
inline IdentityReport run_identity_suite(const SuiteConfig& cfg) {
  IdentityReport rep;
  for (const auto& s : cfg.identity_spaces) rep.append(check_space_identities(s));
  for (std::size_t si = 0; si < cfg.mc_spaces.size(); ++si) {
    const auto& s = cfg.mc_spaces[si];
    for (int pair = 0; pair < cfg.pairs; ++pair) {
      const std::uint64_t pair_seed = derive_seed(cfg.seed, 1000 * (si + 1) + static_cast<std::uint64_t>(pair));
      Rng rng = make_stream(pair_seed, 0);
      const Point x1 = sample_uniform(s, rng);
      const Point x2 = sample_uniform(s, rng);
      const std::string tag = " pair=" + std::to_string(pair);
      const auto table = mc_funk_hecke_table(s, cfg.max_degree, x1, x2, cfg.replicates, derive_seed(pair_seed, 1),
                                             cfg.options);
      for (int i = 0; i <= cfg.max_degree; ++i)
        for (int j = 0; j <= cfg.max_degree; ++j)
          rep.records.push_back(detail::mc_record(
              "funk-hecke i=" + std::to_string(i) + " j=" + std::to_string(j) + tag,
              "Funk-Hecke orthogonality over M^d", s,
              table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
      for (int n = 1; n <= cfg.max_degree; ++n) {
        const int other = n == cfg.max_degree ? n - 1 : n + 1;
        const auto z = mc_zonal_covariance(s, n, other, x1, x2, cfg.replicates, derive_seed(pair_seed, 2), cfg.options);
        const std::string deg = " n=" + std::to_string(n);
        rep.records.push_back(detail::mc_record("zonal mean" + deg + tag, "zonal random field is centred", s, z.mean));
        rep.records.push_back(
            detail::mc_record("zonal covariance" + deg + tag, "zonal random field covariance", s, z.covariance));
        rep.records.push_back(detail::mc_record("zonal cross k=" + std::to_string(other) + deg + tag,
                                                "distinct-degree zonal fields uncorrelated", s, z.cross));
      }
    }
  }
  return rep;
}

}  // namespace isofield
