#pragma once

// JSON and CSV interchange for models, validity reports, realizations and
// identity reports.
//
// Model file:
//   {
//     "space": "sphere:2",
//     "coeffs": [ [[1, 0], [0, 1]], [[0.5, 0], [0, 0.5]] ],   // B_0 .. B_N, rows
//     "tail": {"c": 0.1, "r": 0.5},                            // optional
//     "temporal": {"kernel": "ma1", "phi": [[0.5, 0], [0.2, 0.3]]}  // optional
//   }
// Kernels: "pure_spatial" (+ "domain": "integers" | "reals"), "ar1" (+ "phi"),
// "exponential" (+ "theta"), "ma1" (+ "phi" matrix; coeffs hold Sigma_n) and
// "lag_table" (+ "lags": {"1": [B_0(1), ..., B_N(1)], ...}).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "isofield/errors.hpp"
#include "isofield/simulate.hpp"
#include "isofield/spaces.hpp"
#include "isofield/spectral.hpp"
#include "isofield/verify.hpp"

namespace isofield::io {

using nlohmann::json;

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::uint64_t parse_hex64(const std::string& s, const std::string& field) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError(field + ": not a hex integer");
  return v;
}

namespace detail {

inline int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

inline Matrix matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ParseError(where + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  Matrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = v[static_cast<std::size_t>(i)];
    const std::string rw = where + " row " + std::to_string(i);
    if (!row.is_array()) throw ParseError(rw + ": expected an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      if (cols == 0) throw ParseError(rw + ": empty row");
      out.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(rw + ": has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j)
      out(i, j) = number(row[static_cast<std::size_t>(j)], rw + " col " + std::to_string(j));
  }
  return out;
}

inline std::vector<Matrix> matrices(const json& v, const std::string& where, Eigen::Index m) {
  if (!v.is_array() || v.empty()) throw ParseError(where + ": expected a nonempty array of matrices");
  std::vector<Matrix> out;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const std::string w = where + "[" + std::to_string(n) + "]";
    Matrix b = matrix(v[n], w);
    if (m < 0) m = b.rows();
    if (b.rows() != m || b.cols() != m) {
      throw ParseError(w + ": is " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ", expected " +
                       std::to_string(m) + "x" + std::to_string(m));
    }
    out.push_back(std::move(b));
  }
  return out;
}

inline json matrix_json(const Matrix& b) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < b.cols(); ++j) row.push_back(b(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json matrices_json(const std::vector<Matrix>& bs) {
  json out = json::array();
  for (const auto& b : bs) out.push_back(matrix_json(b));
  return out;
}

inline json optional_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                     e.what());
  }
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace detail

inline json model_to_json(const Model& model) {
  json j;
  const auto& space = model_space(model);
  j["space"] = to_string(space);
  std::visit(
      [&](const auto& m) {
        j["coeffs"] = detail::matrices_json(m.coeffs);
        if (m.tail) j["tail"] = {{"c", m.tail->c}, {"r", m.tail->r}};
      },
      model);
  if (const auto* st = std::get_if<SpatioTemporalModel>(&model)) {
    json t;
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, PureSpatial>) {
            t["kernel"] = "pure_spatial";
            t["domain"] = st->domain == TimeDomain::Integers ? "integers" : "reals";
          } else if constexpr (std::is_same_v<K, SeparableScalar>) {
            if (k.kind == SeparableScalar::Kind::AR1) {
              t["kernel"] = "ar1";
              t["phi"] = k.parameter;
            } else {
              t["kernel"] = "exponential";
              t["theta"] = k.parameter;
            }
          } else if constexpr (std::is_same_v<K, VectorMA1>) {
            t["kernel"] = "ma1";
            t["phi"] = detail::matrix_json(k.phi);
          } else {
            t["kernel"] = "lag_table";
            json lags = json::object();
            for (const auto& [lag, mats] : k.lags) lags[std::to_string(lag)] = detail::matrices_json(mats);
            t["lags"] = std::move(lags);
          }
        },
        st->kernel);
    j["temporal"] = std::move(t);
  }
  return j;
}

/// Builds a model from parsed JSON. Structural problems raise ParseError with
/// the offending field; domain problems (e.g. |phi| >= 1) raise ConfigurationError.
inline Model model_from_json(const json& j) {
  const auto& space_field = detail::field(j, "space", "model");
  if (!space_field.is_string()) throw ParseError("space: expected a string such as \"sphere:2\"");
  SpaceParams space;
  try {
    space = parse_space(space_field.get<std::string>());
  } catch (const ConfigurationError& e) {
    throw ParseError(std::string("space: ") + e.what());
  }
  auto coeffs = detail::matrices(detail::field(j, "coeffs", "model"), "coeffs", -1);
  const auto m = coeffs.front().rows();
  std::optional<TailEnvelope> tail;
  if (const auto it = j.find("tail"); it != j.end()) {
    tail = TailEnvelope{detail::number(detail::field(*it, "c", "tail"), "tail.c"),
                        detail::number(detail::field(*it, "r", "tail"), "tail.r")};
  }
  const auto it = j.find("temporal");
  if (it == j.end()) return make_spatial_model(space, std::move(coeffs), tail);

  const json& t = *it;
  const auto& kernel_field = detail::field(t, "kernel", "temporal");
  if (!kernel_field.is_string()) throw ParseError("temporal.kernel: expected a string");
  const auto kernel = kernel_field.get<std::string>();
  if (kernel == "pure_spatial") {
    TimeDomain domain = TimeDomain::Reals;
    if (const auto d = t.find("domain"); d != t.end()) {
      if (*d == "integers") {
        domain = TimeDomain::Integers;
      } else if (*d != "reals") {
        throw ParseError("temporal.domain: expected \"integers\" or \"reals\"");
      }
    }
    return make_spatiotemporal_model(space, std::move(coeffs), PureSpatial{}, domain, tail);
  }
  if (kernel == "ar1") {
    const double phi = detail::number(detail::field(t, "phi", "temporal"), "temporal.phi");
    return make_spatiotemporal_model(space, std::move(coeffs), SeparableScalar{SeparableScalar::Kind::AR1, phi},
                                     TimeDomain::Integers, tail);
  }
  if (kernel == "exponential") {
    const double theta = detail::number(detail::field(t, "theta", "temporal"), "temporal.theta");
    return make_spatiotemporal_model(space, std::move(coeffs),
                                     SeparableScalar{SeparableScalar::Kind::Exponential, theta}, TimeDomain::Reals,
                                     tail);
  }
  if (kernel == "ma1") {
    Matrix phi = detail::matrix(detail::field(t, "phi", "temporal"), "temporal.phi");
    if (phi.rows() != m || phi.cols() != m) throw ParseError("temporal.phi: must be " + std::to_string(m) + "x" + std::to_string(m));
    return make_spatiotemporal_model(space, std::move(coeffs), VectorMA1{std::move(phi)}, TimeDomain::Integers, tail);
  }
  if (kernel == "lag_table") {
    const auto& lags = detail::field(t, "lags", "temporal");
    if (!lags.is_object()) throw ParseError("temporal.lags: expected an object keyed by integer lag");
    LagTable table;
    for (const auto& [key, value] : lags.items()) {
      long long lag = 0;
      const auto res = std::from_chars(key.data(), key.data() + key.size(), lag);
      if (res.ec != std::errc{} || res.ptr != key.data() + key.size()) {
        throw ParseError("temporal.lags: key '" + key + "' is not an integer");
      }
      if (lag == 0) throw ParseError("temporal.lags: lag 0 comes from coeffs");
      auto mats = detail::matrices(value, "temporal.lags." + key, m);
      if (mats.size() != coeffs.size()) {
        throw ParseError("temporal.lags." + key + ": expected " + std::to_string(coeffs.size()) + " matrices");
      }
      table.lags.emplace(lag, std::move(mats));
    }
    return make_spatiotemporal_model(space, std::move(coeffs), std::move(table), TimeDomain::Integers, tail);
  }
  throw ParseError("temporal.kernel: unknown kernel '" + kernel +
                   "' (expected pure_spatial, ar1, exponential, ma1 or lag_table)");
}

inline Model parse_model(const std::string& text, const std::string& source = "model") {
  return model_from_json(detail::parse_text(text, source));
}

inline Model read_model(const std::filesystem::path& path) { return parse_model(detail::read_file(path), path.string()); }

inline void write_model(const std::filesystem::path& path, const Model& model) {
  detail::write_file(path, model_to_json(model).dump(2) + "\n");
}

inline json report_to_json(const ValidityReport& report) {
  json v = json::array();
  for (const auto& x : report.violations) {
    v.push_back({{"degree", x.degree},
                 {"lag", x.lag ? json(*x.lag) : json(nullptr)},
                 {"kind", kind_name(x.kind)},
                 {"magnitude", detail::optional_number(x.magnitude)}});
  }
  return {{"valid", report.valid}, {"violations", std::move(v)}};
}

inline std::string report_to_csv(const ValidityReport& report) {
  std::string out = "degree,lag,kind,magnitude\n";
  for (const auto& x : report.violations) {
    out += std::to_string(x.degree) + "," + (x.lag ? format_double(*x.lag) : "") + "," + kind_name(x.kind) + "," +
           format_double(x.magnitude) + "\n";
  }
  return out;
}

inline json identity_report_to_json(const IdentityReport& report) {
  json recs = json::array();
  for (const auto& r : report.records) {
    recs.push_back({{"name", r.name},
                    {"reference", r.reference},
                    {"space", r.space},
                    {"target", detail::optional_number(r.target)},
                    {"estimate", detail::optional_number(r.estimate)},
                    {"std_error", r.std_error},
                    {"z", detail::optional_number(r.z)},
                    {"tolerance", r.tolerance},
                    {"pass", r.pass}});
  }
  return {{"all_pass", report.all_pass()}, {"records", std::move(recs)}};
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string identity_report_to_csv(const IdentityReport& report) {
  std::string out = "name,reference,space,target,estimate,std_error,z,tolerance,pass\n";
  for (const auto& r : report.records) {
    out += csv_field(r.name) + "," + csv_field(r.reference) + "," + r.space + "," + format_double(r.target) + "," +
           format_double(r.estimate) + "," + format_double(r.std_error) + "," +
           (std::isnan(r.z) ? std::string() : format_double(r.z)) + "," + format_double(r.tolerance) + "," +
           (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

// Realizations are a directory holding values.csv (one row per point, time
// and component) and metadata.json with everything needed to rebuild the
// field: seed, truncation, latent U, point coordinates and per-degree terms.

inline std::string realization_values_csv(const Realization& r) {
  std::string out = "point_index,time,component,value\n";
  for (std::size_t p = 0; p < r.points.size(); ++p)
    for (std::size_t t = 0; t < r.times.size(); ++t)
      for (int c = 0; c < r.m; ++c) {
        out += std::to_string(p) + "," + format_double(r.times[t]) + "," + std::to_string(c) + "," +
               format_double(r.value(p, t, static_cast<std::size_t>(c))) + "\n";
      }
  return out;
}

inline json realization_metadata(const Realization& r) {
  json points = json::array();
  for (const auto& p : r.points) points.push_back(p.coords);
  return {{"space", to_string(r.space)},
          {"m", r.m},
          {"trunc", r.trunc},
          {"seed", r.seed},
          {"model_hash", hex64(r.model_hash)},
          {"times", r.times},
          {"latent_u", r.latent_u.coords},
          {"points", std::move(points)},
          {"degree_terms", detail::matrices_json(r.degree_terms)}};
}

inline void write_realization(const std::filesystem::path& dir, const Realization& r) {
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "values.csv", realization_values_csv(r));
  detail::write_file(dir / "metadata.json", realization_metadata(r).dump(2) + "\n");
}

inline std::vector<double> parse_csv_doubles(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    auto end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    std::string cell = line.substr(start, end - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t lead = cell.find_first_not_of(' ');
    cell = lead == std::string::npos ? std::string() : cell.substr(lead);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
      throw ParseError(where + ": '" + cell + "' is not a number");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

/// Rebuilds a realization from write_realization output; values are read back
/// from values.csv and checked against the metadata shape.
inline Realization read_realization(const std::filesystem::path& dir) {
  const auto meta_path = dir / "metadata.json";
  const json j = detail::parse_text(detail::read_file(meta_path), meta_path.string());
  Realization r;
  try {
    r.space = parse_space(detail::field(j, "space", "metadata").get<std::string>());
  } catch (const ConfigurationError& e) {
    throw ParseError(std::string("metadata space: ") + e.what());
  }
  try {
    r.m = j.at("m").get<int>();
    r.trunc = j.at("trunc").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.model_hash = parse_hex64(j.at("model_hash").get<std::string>(), "metadata model_hash");
    r.times = j.at("times").get<std::vector<double>>();
    r.latent_u = make_point(r.space, j.at("latent_u").get<std::vector<double>>());
    r.latent_u.coords = j.at("latent_u").get<std::vector<double>>();
    for (const auto& p : j.at("points")) {
      Point pt = make_point(r.space, p.get<std::vector<double>>());
      pt.coords = p.get<std::vector<double>>();
      r.points.push_back(std::move(pt));
    }
  } catch (const json::exception& e) {
    throw ParseError(meta_path.string() + ": " + e.what());
  }
  const auto& terms = detail::field(j, "degree_terms", "metadata");
  if (!terms.is_array() || terms.size() != static_cast<std::size_t>(r.trunc) + 1) {
    throw ParseError("metadata degree_terms: expected trunc + 1 matrices");
  }
  for (std::size_t n = 0; n < terms.size(); ++n) {
    r.degree_terms.push_back(detail::matrix(terms[n], "degree_terms[" + std::to_string(n) + "]"));
  }

  std::istringstream in(detail::read_file(dir / "values.csv"));
  std::string line;
  std::getline(in, line);
  if (line.rfind("point_index,time,component,value", 0) != 0) throw ParseError("values.csv: unexpected header");
  r.values.assign(r.points.size() * r.times.size() * static_cast<std::size_t>(r.m),
                  std::numeric_limits<double>::quiet_NaN());
  int lineno = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = parse_csv_doubles(line, "values.csv line " + std::to_string(lineno));
    if (cells.size() != 4) throw ParseError("values.csv line " + std::to_string(lineno) + ": expected 4 fields");
    const auto p = static_cast<std::size_t>(cells[0]);
    const auto c = static_cast<std::size_t>(cells[2]);
    std::size_t t = r.times.size();
    for (std::size_t k = 0; k < r.times.size(); ++k)
      if (r.times[k] == cells[1]) t = k;
    if (p >= r.points.size() || t == r.times.size() || c >= static_cast<std::size_t>(r.m)) {
      throw ParseError("values.csv line " + std::to_string(lineno) + ": index out of range");
    }
    r.values[r.index(p, t, c)] = cells[3];
    ++rows;
  }
  if (rows != r.values.size()) throw ParseError("values.csv: expected " + std::to_string(r.values.size()) + " rows");
  return r;
}

/// Point coordinates, one point per line as comma-separated ambient
/// coordinates; blank lines and lines starting with '#' are skipped. Each row
/// is normalized onto the space.
inline std::vector<Point> read_points(const std::filesystem::path& path, const SpaceParams& space) {
  std::istringstream in(detail::read_file(path));
  std::string line;
  std::vector<Point> out;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = path.string() + " line " + std::to_string(lineno);
    auto coords = parse_csv_doubles(line, where);
    try {
      out.push_back(make_point(space, std::move(coords)));
    } catch (const UnsupportedGeometryError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace isofield::io
