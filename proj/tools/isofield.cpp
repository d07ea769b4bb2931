// isofield: validate, evaluate, simulate and check isotropic random field models.
//
// Exit codes: 0 ok, 1 invalid model or failed check, 2 parse/usage error,
// 3 unsupported geometry.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isofield/io.hpp"
#include "isofield/simulate.hpp"
#include "isofield/spaces.hpp"
#include "isofield/spectral.hpp"
#include "isofield/verify.hpp"

namespace fs = std::filesystem;
using namespace isofield;
using isofield::io::format_double;
using isofield::io::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240917;

enum Exit : int { kOk = 0, kInvalid = 1, kParse = 2, kUnsupported = 3 };

struct RunConfig {
  std::string model_path;
  std::vector<std::string> spaces;
  std::uint64_t seed = kDefaultSeed;
  std::optional<int> trunc;
  long long replicates = 100000;
  std::string rho_grid = "0:pi:101";
  std::string lags;
  std::string times = "0";
  std::string points = "random:100";
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
  double inject_fault = 1.0;
  int max_degree = 4;
  int pairs = 3;
};

// Writes to --out when given, stdout otherwise.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path path(cfg.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + cfg.out);
  out << text;
}

double parse_real(const std::string& s) {
  if (s == "pi") return std::numbers::pi;
  if (s == "-pi") return -std::numbers::pi;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParseError("'" + s + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_real(item));
  if (out.empty()) throw ParseError("empty list");
  return out;
}

/// a:b:n, n evenly spaced values from a to b inclusive.
std::vector<double> parse_grid(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw ParseError("grid '" + s + "' is not of the form a:b:n");
  const double a = parse_real(parts[0]), b = parse_real(parts[1]);
  const double n = parse_real(parts[2]);
  if (n < 1 || n != std::floor(n)) throw ParseError("grid count must be a positive integer");
  const auto count = static_cast<int>(n);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
  if (count > 1) out.back() = b;
  return out;
}

std::vector<Point> parse_points(const std::string& spec, const SpaceParams& space, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  if (kind == "random" || kind == "fibonacci") {
    const double k = parse_real(arg);
    if (k < 1 || k != std::floor(k)) throw ParseError("point count must be a positive integer");
    if (kind == "fibonacci") {
      if (space.family != SpaceFamily::Sphere || space.d != 2) throw UsageError("fibonacci:K needs sphere:2");
      return fibonacci_points(space, static_cast<int>(k));
    }
    if (!supports_points(space)) {
      throw UnsupportedGeometryError(to_string(space) + " has parameter-level support only; no point sampling");
    }
    // points draw from their own sub-stream so they never overlap the field's streams
    Rng rng = make_stream(derive_seed(seed, 0xFFFFFFFFULL), 0);
    std::vector<Point> out;
    for (int i = 0; i < static_cast<int>(k); ++i) out.push_back(sample_uniform(space, rng));
    return out;
  }
  if (kind == "file") return io::read_points(arg, space);
  return io::read_points(spec, space);
}

SpaceParams parse_space_arg(const std::string& spec) {
  try {
    return parse_space(spec);
  } catch (const ConfigurationError& e) {
    throw ParseError(std::string("--space: ") + e.what());
  }
}

Model load_model(const RunConfig& cfg) {
  if (cfg.model_path.empty()) throw UsageError("--model is required");
  return io::read_model(cfg.model_path);
}

int cmd_validate(const RunConfig& cfg) {
  const Model model = load_model(cfg);
  const auto probes = cfg.lags.empty() ? std::vector<double>{-2, -1, 0, 1, 2} : parse_list(cfg.lags);
  const auto report = validate(model, probes);
  emit(cfg, cfg.format == "json" ? io::report_to_json(report).dump(2) + "\n" : io::report_to_csv(report));
  if (!report.valid) {
    std::cerr << "invalid model:";
    for (const auto& v : report.violations) std::cerr << " degree " << v.degree << " " << kind_name(v.kind) << ";";
    std::cerr << "\n";
  }
  return report.valid ? kOk : kInvalid;
}

int cmd_eval_cov(const RunConfig& cfg) {
  const Model model = load_model(cfg);
  const auto report = validate(model);
  if (!report.valid) {
    std::cerr << detail::describe_report(report) << "\n";
    return kInvalid;
  }
  const int trunc = cfg.trunc.value_or(model_max_degree(model));
  const auto rhos = parse_grid(cfg.rho_grid);
  const auto lags = cfg.lags.empty() ? std::vector<double>{0.0} : parse_list(cfg.lags);
  const double bound = truncation_bound(model, trunc);
  const int m = model_dimension(model);
  std::string csv = "rho,lag,i,j,value,tail_bound\n";
  json rows = json::array();
  for (double lag : lags) {
    for (double rho : rhos) {
      const Matrix c = eval_cov(model, rho, lag, trunc);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (cfg.format == "json") {
            rows.push_back({{"rho", rho}, {"lag", lag}, {"i", i}, {"j", j}, {"value", c(i, j)}, {"tail_bound", bound}});
          } else {
            csv += format_double(rho) + "," + format_double(lag) + "," + std::to_string(i) + "," + std::to_string(j) +
                   "," + format_double(c(i, j)) + "," + format_double(bound) + "\n";
          }
        }
    }
  }
  emit(cfg, cfg.format == "json" ? json{{"trunc", trunc}, {"rows", rows}}.dump(2) + "\n" : csv);
  return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const Model model = load_model(cfg);
  if (cfg.out.empty()) throw UsageError("simulate needs --out DIR");
  const auto& space = model_space(model);
  if (!supports_points(space)) {
    throw UnsupportedGeometryError(to_string(space) +
                                   " has parameter-level support only: no point model exists for sampling");
  }
  const int trunc = cfg.trunc.value_or(model_max_degree(model));
  const auto points = parse_points(cfg.points, space, cfg.seed);
  const auto times = parse_list(cfg.times);
  const Realization r = simulate(model, points, times, trunc, cfg.seed);
  io::write_realization(cfg.out, r);
  std::cerr << "wrote " << r.values.size() << " values to " << cfg.out << "\n";
  return kOk;
}

int cmd_check(const RunConfig& cfg) {
  SuiteConfig suite;
  if (cfg.spaces.empty()) {
    for (const char* s : {"sphere:2", "projR:3", "projC:4", "projH:8"}) suite.mc_spaces.push_back(parse_space_arg(s));
  } else {
    for (const auto& s : cfg.spaces) {
      if (s == "none") continue;
      suite.mc_spaces.push_back(parse_space_arg(s));
    }
  }
  for (const auto& s : suite.mc_spaces) {
    if (!supports_points(s)) {
      throw UnsupportedGeometryError(to_string(s) + " has parameter-level support only; Monte-Carlo oracles need sampling");
    }
  }
  suite.replicates = cfg.replicates;
  suite.seed = cfg.seed;
  suite.max_degree = cfg.max_degree;
  suite.pairs = cfg.pairs;
  suite.options.threads = cfg.threads;
  suite.options.a_scale = cfg.inject_fault;
  const auto report = run_identity_suite(suite);
  emit(cfg, cfg.format == "json" ? io::identity_report_to_json(report).dump(2) + "\n"
                                 : io::identity_report_to_csv(report));
  std::size_t failed = 0;
  for (const auto& r : report.records) {
    if (r.pass) continue;
    ++failed;
    std::cerr << "FAILED " << r.space << " " << r.name << " (" << r.reference << ")\n";
  }
  std::cerr << report.records.size() - failed << "/" << report.records.size() << " identities passed\n";
  return failed == 0 ? kOk : kInvalid;
}

// With --model: angular power spectrum B_n / dim H_n (lag-0 coefficients for
// spatio-temporal models). With --space only: per-degree constants.
int cmd_spectrum(const RunConfig& cfg) {
  if (cfg.model_path.empty()) {
    if (cfg.spaces.size() != 1) throw UsageError("spectrum needs --model or exactly one --space");
    const auto space = parse_space_arg(cfg.spaces.front());
    const int top = cfg.trunc.value_or(10);
    std::string csv = "n,a_n,p_n_at_one,dim_eigenspace,laplace_eigenvalue\n";
    json rows = json::array();
    for (int n = 0; n <= top; ++n) {
      const double a = a_constant(space, n), p1 = jacobi_at_one(n, space.geom);
      const double dim = dim_eigenspace(space, n), lambda = laplace_eigenvalue(space, n);
      csv += std::to_string(n) + "," + format_double(a) + "," + format_double(p1) + "," + format_double(dim) + "," +
             format_double(lambda) + "\n";
      rows.push_back({{"n", n}, {"a_n", a}, {"p_n_at_one", p1}, {"dim_eigenspace", dim}, {"laplace_eigenvalue", lambda}});
    }
    emit(cfg, cfg.format == "json" ? json{{"space", to_string(space)}, {"rows", rows}}.dump(2) + "\n" : csv);
    return kOk;
  }
  const Model model = load_model(cfg);
  SpatialModel lag0;
  if (const auto* s = std::get_if<SpatialModel>(&model)) {
    lag0 = *s;
  } else {
    const auto& st = std::get<SpatioTemporalModel>(model);
    std::vector<Matrix> b0;
    for (int n = 0; n <= st.max_degree(); ++n) b0.push_back(lag_matrix(st, n, 0.0));
    lag0 = make_spatial_model(st.space, std::move(b0));
  }
  const int top = std::min(cfg.trunc.value_or(lag0.max_degree()), lag0.max_degree());
  std::string csv = "n,dim_eigenspace,i,j,b_n,c_n\n";
  json rows = json::array();
  for (int n = 0; n <= top; ++n) {
    const Matrix c = angular_power_spectrum(lag0, n);
    const Matrix& b = lag0.coeffs[static_cast<std::size_t>(n)];
    const double dim = dim_eigenspace(lag0.space, n);
    for (int i = 0; i < lag0.m; ++i)
      for (int j = 0; j < lag0.m; ++j) {
        csv += std::to_string(n) + "," + format_double(dim) + "," + std::to_string(i) + "," + std::to_string(j) + "," +
               format_double(b(i, j)) + "," + format_double(c(i, j)) + "\n";
        rows.push_back({{"n", n}, {"dim_eigenspace", dim}, {"i", i}, {"j", j}, {"b_n", b(i, j)}, {"c_n", c(i, j)}});
      }
  }
  emit(cfg, cfg.format == "json" ? json{{"space", to_string(lag0.space)}, {"rows", rows}}.dump(2) + "\n" : csv);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isotropic random fields on spheres and projective spaces"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "Output file (directory for simulate); stdout when omitted");
    sub->add_option("--threads", cfg.threads, "Worker cap, 0 = hardware concurrency");
    sub->add_option("--seed", cfg.seed, "Master seed")->default_val(kDefaultSeed);
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a model file for validity");
  validate_cmd->add_option("--model", cfg.model_path, "Model JSON file")->required();
  validate_cmd->add_option("--lags", cfg.lags, "Probe lags, comma separated (default -2,-1,0,1,2)");
  add_common(validate_cmd);

  auto* eval_cmd = app.add_subcommand("eval-cov", "Tabulate C(rho; t) on a grid");
  eval_cmd->add_option("--model", cfg.model_path, "Model JSON file")->required();
  eval_cmd->add_option("--rho-grid", cfg.rho_grid, "a:b:n distances, 'pi' allowed")->default_val(cfg.rho_grid);
  eval_cmd->add_option("--lags", cfg.lags, "Lags, comma separated (default 0)");
  eval_cmd->add_option("--trunc", cfg.trunc, "Truncation degree (default: all stored)");
  add_common(eval_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate one realization");
  sim_cmd->add_option("--model", cfg.model_path, "Model JSON file")->required();
  sim_cmd->add_option("--points", cfg.points, "random:K, fibonacci:K (sphere:2) or a coordinate file")
      ->default_val(cfg.points);
  sim_cmd->add_option("--times", cfg.times, "Times, comma separated, increasing")->default_val(cfg.times);
  sim_cmd->add_option("--trunc", cfg.trunc, "Truncation degree (default: all stored)");
  add_common(sim_cmd);

  auto* check_cmd = app.add_subcommand("check", "Run the identity suite");
  check_cmd->add_option("--space", cfg.spaces, "Spaces for the Monte-Carlo oracles (repeatable; 'none' to skip)");
  check_cmd->add_option("--replicates", cfg.replicates, "Monte-Carlo replicates per oracle")
      ->default_val(cfg.replicates)
      ->check(CLI::Range(2LL, 1000000000LL));
  check_cmd->add_option("--max-degree", cfg.max_degree, "Highest degree in the oracles")
      ->default_val(cfg.max_degree)
      ->check(CLI::Range(1, 50));
  check_cmd->add_option("--pairs", cfg.pairs, "Random point pairs per space")->default_val(cfg.pairs)->check(CLI::Range(1, 100));
  check_cmd->add_option("--inject-fault", cfg.inject_fault, "Scale a_n inside the oracles (testing)")
      ->group("");
  add_common(check_cmd);

  auto* spec_cmd = app.add_subcommand("spectrum", "Angular power spectrum or per-degree constants");
  spec_cmd->add_option("--model", cfg.model_path, "Model JSON file");
  spec_cmd->add_option("--space", cfg.spaces, "Space for the constants table, e.g. projC:4");
  spec_cmd->add_option("--trunc", cfg.trunc, "Highest degree");
  add_common(spec_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*validate_cmd) return cmd_validate(cfg);
    if (*eval_cmd) return cmd_eval_cov(cfg);
    if (*sim_cmd) return cmd_simulate(cfg);
    if (*check_cmd) return cmd_check(cfg);
    if (*spec_cmd) return cmd_spectrum(cfg);
  } catch (const UnsupportedGeometryError& e) {
    std::cerr << "unsupported geometry: " << e.what() << "\n";
    return kUnsupported;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const ModelError& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  } catch (const ConfigurationError& e) {
    std::cerr << "invalid model: " << e.what() << "\n";
    return kInvalid;
  } catch (const IndefiniteMatrixError& e) {
    std::cerr << "invalid model: " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
  return kParse;
}
