#pragma once

// Compact two-point homogeneous spaces: parameter tables, spectral constants,
// point geometry and uniform sampling.
//
// Distances are normalized so that every closed geodesic has length 2 pi, so
// rho ranges over [0, pi] for every family. Series always use the geometric
// (alpha, beta) pair; the Lie pair only feeds laplace_eigenvalue.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "isofield/detail/random.hpp"
#include "isofield/errors.hpp"
#include "isofield/quaternion.hpp"
#include "isofield/specialfn.hpp"

namespace isofield {

enum class SpaceFamily { Sphere, RealProjective, ComplexProjective, QuaternionProjective, OctonionProjective };

struct SpaceParams {
  SpaceFamily family = SpaceFamily::Sphere;
  int d = 2;
  JacobiParams geom;  // geometric convention, used by every series
  JacobiParams lie;   // Lie-algebra convention
  int p = 0;          // dimension of the antipodal manifold
  int q = 0;
  int epsilon = 1;
  double volume = 0.0;  // omega_d
  int weinstein = 1;    // i(M^d)
  int e = 0;            // span of geodesic tangents toward the antipodal manifold

  friend bool operator==(const SpaceParams& a, const SpaceParams& b) {
    return a.family == b.family && a.d == b.d;
  }
};

inline std::string_view family_name(SpaceFamily f) {
  switch (f) {
    case SpaceFamily::Sphere: return "sphere";
    case SpaceFamily::RealProjective: return "projR";
    case SpaceFamily::ComplexProjective: return "projC";
    case SpaceFamily::QuaternionProjective: return "projH";
    case SpaceFamily::OctonionProjective: return "projO";
  }
  return "?";
}

inline std::optional<SpaceFamily> family_from_name(std::string_view name) {
  for (auto f : {SpaceFamily::Sphere, SpaceFamily::RealProjective, SpaceFamily::ComplexProjective,
                 SpaceFamily::QuaternionProjective, SpaceFamily::OctonionProjective}) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

/// Volume of the unit sphere S^d in R^{d+1}.
inline double sphere_volume(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

/// omega_d = (4 pi)^{alpha+1} Gamma(beta+1) / Gamma(alpha+beta+2).
inline double volume_formula(JacobiParams g) {
  return std::exp((g.alpha + 1.0) * std::log(4.0 * std::numbers::pi) + std::lgamma(g.beta + 1.0) -
                  std::lgamma(g.alpha + g.beta + 2.0));
}

/// i(M^d) = 2^{2 alpha+1} Gamma(alpha+3/2) Gamma(beta+1) / (sqrt(pi) Gamma(alpha+beta+2)).
inline double weinstein_formula(JacobiParams g) {
  return std::exp((2.0 * g.alpha + 1.0) * std::log(2.0) + std::lgamma(g.alpha + 1.5) +
                  std::lgamma(g.beta + 1.0) - 0.5 * std::log(std::numbers::pi) -
                  std::lgamma(g.alpha + g.beta + 2.0));
}

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Closed forms of the Weinstein integer per family.
inline long long weinstein_table(SpaceFamily f, int d) {
  switch (f) {
    case SpaceFamily::Sphere: return 1;
    case SpaceFamily::RealProjective: return 1LL << (d - 1);
    case SpaceFamily::ComplexProjective: return std::llround(binomial(d - 1, d / 2 - 1));
    case SpaceFamily::QuaternionProjective:
      return std::llround(binomial(d - 1, d / 2 - 1) / (d / 2 + 1));
    case SpaceFamily::OctonionProjective: return 39;
  }
  return 0;
}

}  // namespace detail

inline SpaceParams make_space(SpaceFamily family, int d) {
  const std::string label = std::string(family_name(family)) + ":" + std::to_string(d);
  SpaceParams s;
  s.family = family;
  s.d = d;
  // geometric (p, q) per family; Lie (p, q) differs only for real projective spaces
  int lie_p = 0, lie_q = 0;
  switch (family) {
    case SpaceFamily::Sphere:
      if (d < 1) throw ConfigurationError(label + ": sphere requires d >= 1");
      s.p = 0;
      s.q = d - 1;
      lie_p = 0;
      lie_q = d - 1;
      s.epsilon = 1;
      break;
    case SpaceFamily::RealProjective:
      if (d < 2) throw ConfigurationError(label + ": real projective space requires d >= 2");
      s.p = d - 1;
      s.q = 0;
      lie_p = 0;
      lie_q = d - 1;
      s.epsilon = 2;
      break;
    case SpaceFamily::ComplexProjective:
      if (d < 4 || d % 2 != 0)
        throw ConfigurationError(label + ": complex projective space requires even d >= 4");
      s.p = lie_p = d - 2;
      s.q = lie_q = 1;
      s.epsilon = 1;
      break;
    case SpaceFamily::QuaternionProjective:
      if (d < 8 || d % 4 != 0)
        throw ConfigurationError(label + ": quaternionic projective space requires d in {8, 12, ...}");
      s.p = lie_p = d - 4;
      s.q = lie_q = 3;
      s.epsilon = 1;
      break;
    case SpaceFamily::OctonionProjective:
      if (d != 16) throw ConfigurationError(label + ": octonionic projective plane requires d = 16");
      s.p = lie_p = 8;
      s.q = lie_q = 7;
      s.epsilon = 1;
      break;
  }
  s.lie = {(lie_p + lie_q - 1) / 2.0, (lie_q - 1) / 2.0};
  s.geom = {(s.p + s.q - 1) / 2.0, (s.q - 1) / 2.0};
  s.volume = volume_formula(s.geom);
  s.weinstein = static_cast<int>(std::lround(weinstein_formula(s.geom)));
  s.e = static_cast<int>(std::lround(2.0 * s.geom.beta + 2.0));
  return s;
}

/// Parses `family:dimension`, e.g. `sphere:2`, `projR:3`, `projC:4`, `projH:8`, `projO:16`.
inline SpaceParams parse_space(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigurationError("space spec '" + std::string(spec) + "' is not of the form family:dimension");
  }
  const auto family = family_from_name(spec.substr(0, colon));
  if (!family) {
    throw ConfigurationError("unknown space family '" + std::string(spec.substr(0, colon)) +
                             "' (expected sphere, projR, projC, projH or projO)");
  }
  const std::string digits(spec.substr(colon + 1));
  std::size_t used = 0;
  int d = 0;
  try {
    d = std::stoi(digits, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != digits.size()) {
    throw ConfigurationError("space spec '" + std::string(spec) + "' has a non-integer dimension");
  }
  return make_space(*family, d);
}

inline std::string to_string(const SpaceParams& s) {
  return std::string(family_name(s.family)) + ":" + std::to_string(s.d);
}

inline bool supports_points(const SpaceParams& s) {
  return s.family != SpaceFamily::OctonionProjective;
}

/// Number of real ambient coordinates of a point representative.
inline int ambient_dimension(const SpaceParams& s) {
  switch (s.family) {
    case SpaceFamily::Sphere:
    case SpaceFamily::RealProjective: return s.d + 1;
    case SpaceFamily::ComplexProjective: return s.d + 2;     // d/2 + 1 complex coordinates
    case SpaceFamily::QuaternionProjective: return s.d + 4;  // d/4 + 1 quaternion coordinates
    case SpaceFamily::OctonionProjective: break;
  }
  throw UnsupportedGeometryError("projO:16 has parameter-level support only; points are not available");
}

/// Unit-norm representative in real ambient coordinates. Complex coordinates
/// are stored as (re, im) pairs, quaternions as (w, x, y, z) tuples.
struct Point {
  SpaceFamily family = SpaceFamily::Sphere;
  int d = 0;
  std::vector<double> coords;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Normalizes `coords` into a representative of a point of `space`.
inline Point make_point(const SpaceParams& space, std::vector<double> coords) {
  const int n = ambient_dimension(space);
  if (static_cast<int>(coords.size()) != n) {
    throw UsageError(to_string(space) + " points need " + std::to_string(n) + " real coordinates, got " +
                     std::to_string(coords.size()));
  }
  double norm2 = 0.0;
  for (double c : coords) {
    if (!std::isfinite(c)) throw DomainError("point coordinates must be finite");
    norm2 += c * c;
  }
  if (!(norm2 > 0.0)) throw DomainError("point representative must be nonzero");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& c : coords) c *= inv;
  return Point{space.family, space.d, std::move(coords)};
}

namespace detail {

inline void require_same(const SpaceParams& space, const Point& x) {
  if (x.family != space.family || x.d != space.d) {
    throw UsageError("point does not belong to " + to_string(space));
  }
}

inline double clamp_unit(double v) {
  if (v > 1.0 + kClampTolerance || v < -1.0 - kClampTolerance) {
    throw DomainError("inner product of unit representatives outside [-1, 1]");
  }
  return std::clamp(v, -1.0, 1.0);
}

/// |<x, y>| for the projective families; signed dot product for spheres.
inline double gauge_inner(const SpaceParams& space, const Point& x, const Point& y) {
  const auto& a = x.coords;
  const auto& b = y.coords;
  switch (space.family) {
    case SpaceFamily::Sphere: {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
      return s;
    }
    case SpaceFamily::RealProjective: {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
      return std::abs(s);
    }
    case SpaceFamily::ComplexProjective: {
      std::complex<double> s{};
      for (std::size_t k = 0; k + 1 < a.size(); k += 2) {
        s += std::conj(std::complex<double>(a[k], a[k + 1])) * std::complex<double>(b[k], b[k + 1]);
      }
      return std::abs(s);
    }
    case SpaceFamily::QuaternionProjective: {
      Quaternion s{};
      for (std::size_t k = 0; k + 3 < a.size(); k += 4) {
        const Quaternion qa{a[k], a[k + 1], a[k + 2], a[k + 3]};
        const Quaternion qb{b[k], b[k + 1], b[k + 2], b[k + 3]};
        s += qa.conj() * qb;
      }
      return s.norm();
    }
    case SpaceFamily::OctonionProjective: break;
  }
  throw UnsupportedGeometryError("projO:16 has parameter-level support only; distances are not available");
}

inline void require_pair(const SpaceParams& space, const Point& x, const Point& y) {
  if (!supports_points(space)) {
    throw UnsupportedGeometryError("projO:16 has parameter-level support only; distances are not available");
  }
  require_same(space, x);
  require_same(space, y);
}

}  // namespace detail

/// cos(rho(x, y)), computed without the arccos round trip.
inline double cos_distance(const SpaceParams& space, const Point& x, const Point& y) {
  detail::require_pair(space, x, y);
  const double g = detail::clamp_unit(detail::gauge_inner(space, x, y));
  if (space.family == SpaceFamily::Sphere) return g;
  return std::clamp(2.0 * g * g - 1.0, -1.0, 1.0);
}

/// Geodesic distance in [0, pi].
inline double distance(const SpaceParams& space, const Point& x, const Point& y) {
  detail::require_pair(space, x, y);
  const double g = detail::clamp_unit(detail::gauge_inner(space, x, y));
  if (space.family == SpaceFamily::Sphere) return std::acos(g);
  return 2.0 * std::acos(g);
}

/// Zonal spherical function R_n(cos rho(x, y)).
inline double zonal(const SpaceParams& space, int n, const Point& x, const Point& y) {
  return jacobi_normalized(n, space.geom, cos_distance(space, x, y));
}

/// Draws a point from the isometry-invariant probability measure: a standard
/// Gaussian vector in ambient coordinates, normalized. Any representative of
/// the projective class is a valid sample.
inline Point sample_uniform(const SpaceParams& space, Rng& rng) {
  if (!supports_points(space)) {
    throw UnsupportedGeometryError("projO:16 has parameter-level support only; sampling is not available");
  }
  std::normal_distribution<double> gauss;
  std::vector<double> v(static_cast<std::size_t>(ambient_dimension(space)));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& c : v) {
      c = gauss(rng);
      norm2 += c * c;
    }
  } while (norm2 == 0.0);
  return make_point(space, std::move(v));
}

/// a_n from the Funk-Hecke constant; a_0 = 1.
inline double a_constant(const SpaceParams& space, int n) {
  detail::require_degree(n);
  if (n == 0) return 1.0;
  const double a = space.geom.alpha, b = space.geom.beta;
  const double log_sq = std::lgamma(b + 1.0) + std::log(2.0 * n + a + b + 1.0) + std::lgamma(n + a + b + 1.0) -
                        std::lgamma(a + b + 2.0) - std::lgamma(n + b + 1.0);
  return std::exp(0.5 * log_sq);
}

/// Dimension of the n-th eigenspace of the Laplace-Beltrami operator.
inline double dim_eigenspace(const SpaceParams& space, int n) {
  detail::require_degree(n);
  if (n == 0) return 1.0;
  const double a = space.geom.alpha, b = space.geom.beta;
  const double log_dim = std::log(2.0 * n + a + b + 1.0) + std::lgamma(b + 1.0) + std::lgamma(n + a + b + 1.0) +
                         std::lgamma(n + a + 1.0) - std::lgamma(a + 1.0) - std::lgamma(a + b + 2.0) -
                         std::lgamma(n + 1.0) - std::lgamma(n + b + 1.0);
  return std::exp(log_dim);
}

/// lambda_n = -eps n (eps n + alpha + beta + 1) with the Lie pair.
inline double laplace_eigenvalue(const SpaceParams& space, int n) {
  detail::require_degree(n);
  if (n == 0) return 0.0;
  const double en = static_cast<double>(space.epsilon) * n;
  return -en * (en + space.lie.alpha + space.lie.beta + 1.0);
}

/// Deterministic quasi-uniform grid of K points on S^2.
inline std::vector<Point> fibonacci_points(const SpaceParams& space, int count) {
  if (space.family != SpaceFamily::Sphere || space.d != 2) {
    throw ConfigurationError("fibonacci point sets are only defined on sphere:2");
  }
  if (count < 1) throw UsageError("fibonacci point count must be positive");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back(make_point(space, {r * std::cos(phi), r * std::sin(phi), z}));
  }
  return pts;
}

}  // namespace isofield
