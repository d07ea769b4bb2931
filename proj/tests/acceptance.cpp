// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "isofield/io.hpp"
#include "isofield/verify.hpp"

using namespace isofield;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

struct Context {
  std::string cli;
  fs::path workdir;
};

constexpr std::uint64_t kSeed = 20240917;

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// Worst |z| over the entries of an estimate, for reporting.
double worst_z(const MCEstimate& e) { return std::abs(e.z_score); }

Outcome jacobi_orthogonality(const Context&) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SpaceParams> spaces = {
      make_space(SpaceFamily::Sphere, 2), make_space(SpaceFamily::RealProjective, 3),
      make_space(SpaceFamily::ComplexProjective, 4), make_space(SpaceFamily::QuaternionProjective, 8),
      make_space(SpaceFamily::OctonionProjective, 16)};
  double worst = 0.0;
  for (const auto& s : spaces) {
    const auto rule = gauss_jacobi(26, s.geom);
    std::vector<std::vector<double>> vals;
    for (double x : rule.nodes) vals.push_back(jacobi_sequence(25, s.geom, x));
    for (int i = 0; i <= 25; ++i)
      for (int j = 0; j <= 25; ++j) {
        double q = 0.0;
        for (std::size_t k = 0; k < vals.size(); ++k)
          q += rule.weights[k] * vals[k][static_cast<std::size_t>(i)] * vals[k][static_cast<std::size_t>(j)];
        const double h = jacobi_norm_constant(std::max(i, j), s.geom);
        const double err = std::abs(q - (i == j ? jacobi_norm_constant(i, s.geom) : 0.0)) / h;
        worst = std::max(worst, err);
        o.require(err <= 1e-9, to_string(s) + " i=" + std::to_string(i) + " j=" + std::to_string(j));
      }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 1.0, "runtime " + fmt(secs) + " s");
  if (o.pass) o.detail = "worst error " + fmt(worst) + " x norm constant, " + fmt(secs) + " s";
  return o;
}

Outcome space_identities(const Context&) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::size_t records = 0;
  bool saw_39 = false, saw_2n1 = false;
  for (const auto& s : space_catalog()) {
    const auto rep = check_space_identities(s);
    for (const auto& r : rep.records) {
      ++records;
      o.require(r.pass, to_string(s) + ": " + r.name);
      if (s.family == SpaceFamily::OctonionProjective && r.name == "weinstein integrality")
        saw_39 = std::abs(r.estimate - 39.0) <= 1e-9;
      if (r.name == "dim H_n = 2n + 1 on S^2") saw_2n1 = r.pass;
    }
  }
  o.require(saw_39, "P16(O) Weinstein integer is not 39");
  o.require(saw_2n1, "dim H_n = 2n + 1 on S^2 not checked");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 1.0, "runtime " + fmt(secs) + " s");
  if (o.pass) o.detail = std::to_string(records) + " identities over " + std::to_string(space_catalog().size()) + " spaces, " + fmt(secs) + " s";
  return o;
}

const std::vector<SpaceParams>& mc_spaces() {
  static const std::vector<SpaceParams> s = {
      make_space(SpaceFamily::Sphere, 2), make_space(SpaceFamily::RealProjective, 3),
      make_space(SpaceFamily::ComplexProjective, 4), make_space(SpaceFamily::QuaternionProjective, 8)};
  return s;
}

std::pair<Point, Point> random_pair(const SpaceParams& s, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  Point a = sample_uniform(s, rng);
  Point b = sample_uniform(s, rng);
  return {a, b};
}

Outcome funk_hecke(const Context&) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::size_t si = 0; si < mc_spaces().size(); ++si) {
    const auto& s = mc_spaces()[si];
    for (int pair = 0; pair < 3; ++pair) {
      const auto seed = derive_seed(kSeed, 100 * (si + 1) + static_cast<std::uint64_t>(pair));
      const auto [x1, x2] = random_pair(s, seed);
      const auto table = mc_funk_hecke_table(s, 4, x1, x2, 100000, derive_seed(seed, 1));
      for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j) {
          const auto& e = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          worst = std::max(worst, worst_z(e));
          o.require(e.passes(), to_string(s) + " pair " + std::to_string(pair) + " i=" + std::to_string(i) +
                                    " j=" + std::to_string(j) + " z=" + fmt(e.z_score));
        }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 60.0, "runtime " + fmt(secs) + " s");
  if (o.pass) o.detail = "300 estimates, worst |z| " + fmt(worst) + ", " + fmt(secs) + " s";
  return o;
}

Outcome zonal_field(const Context&) {
  Outcome o;
  double worst = 0.0;
  int count = 0;
  for (std::size_t si = 0; si < mc_spaces().size(); ++si) {
    const auto& s = mc_spaces()[si];
    for (int pair = 0; pair < 3; ++pair) {
      const auto seed = derive_seed(kSeed, 200 * (si + 1) + static_cast<std::uint64_t>(pair));
      const auto [x1, x2] = random_pair(s, seed);
      for (int n = 1; n <= 4; ++n) {
        const int other = n == 4 ? 3 : n + 1;
        const auto z = mc_zonal_covariance(s, n, other, x1, x2, 100000, derive_seed(seed, static_cast<std::uint64_t>(n)));
        const std::string tag = to_string(s) + " pair " + std::to_string(pair) + " n=" + std::to_string(n);
        for (const auto* e : {&z.mean, &z.covariance, &z.cross}) {
          worst = std::max(worst, worst_z(*e));
          ++count;
        }
        o.require(z.mean.passes(), tag + " mean z=" + fmt(z.mean.z_score));
        o.require(z.covariance.passes(), tag + " covariance z=" + fmt(z.covariance.z_score));
        o.require(z.cross.passes(), tag + " cross-degree z=" + fmt(z.cross.z_score));
      }
    }
  }
  if (o.pass) o.detail = std::to_string(count) + " estimates, worst |z| " + fmt(worst);
  return o;
}

Outcome spatial_reproduction(const Context&) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto s2 = make_space(SpaceFamily::Sphere, 2);
  const Model model{make_spatial_model(s2, {Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2),
                                            0.25 * Matrix::Identity(2, 2)})};
  std::vector<Point> pts;
  Rng rng = make_stream(derive_seed(kSeed, 300), 0);
  for (int i = 0; i < 10; ++i) pts.push_back(sample_uniform(s2, rng));
  const auto reals = simulate_ensemble(model, pts, {0.0}, 2, derive_seed(kSeed, 301), 20000);
  double worst = 0.0;
  for (std::size_t p = 0; p < 5; ++p) {
    const std::size_t a = 2 * p, b = 2 * p + 1;
    const auto e = empirical_cov(model, reals, a, b, 0.0);
    worst = std::max(worst, worst_z(e));
    o.require(e.passes(), "pair " + std::to_string(p) + " covariance z=" + fmt(e.z_score));
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; j <= 2; ++j) {
        if (i == j) continue;
        const auto t = term_cross_cov(reals, i, j, a, b);
        worst = std::max(worst, worst_z(t));
        o.require(t.passes(), "pair " + std::to_string(p) + " terms " + std::to_string(i) + "," + std::to_string(j) +
                                  " z=" + fmt(t.z_score));
      }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 60.0, "runtime " + fmt(secs) + " s");
  if (o.pass) o.detail = "5 pairs, worst |z| " + fmt(worst) + ", " + fmt(secs) + " s";
  return o;
}

Outcome ma1_reproduction(const Context&) {
  Outcome o;
  const auto s2 = make_space(SpaceFamily::Sphere, 2);
  const Model model{make_spatiotemporal_model(
      s2, {mat2(1.0, 0.3, 0.3, 0.8), mat2(0.5, 0.1, 0.1, 0.4), mat2(0.25, 0.0, 0.0, 0.2)},
      VectorMA1{mat2(0.6, 0.2, -0.1, 0.4)})};
  const auto [x1, x2] = random_pair(s2, derive_seed(kSeed, 400));
  const std::vector<Point> pts = {x1, x2};
  const auto reals = simulate_ensemble(model, pts, {0, 1, 2, 3}, 2, derive_seed(kSeed, 401), 20000);
  double worst = 0.0;
  for (int lag = -2; lag <= 2; ++lag) {
    for (auto [a, b] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 0}, {0, 0}}) {
      const auto e = empirical_cov(model, reals, a, b, lag);
      worst = std::max(worst, worst_z(e));
      const std::string tag = "points " + std::to_string(a) + "," + std::to_string(b) + " lag " + std::to_string(lag);
      o.require(e.passes(), tag + " z=" + fmt(e.z_score));
      if (std::abs(lag) == 2) o.require(e.target.cwiseAbs().maxCoeff() == 0.0, tag + " target is not zero");
      const auto back = empirical_cov(model, reals, a, b, -lag);
      const Matrix diff = (e.value - back.value.transpose()).cwiseAbs();
      const Matrix band = 5.0 * (e.std_error + back.std_error.transpose());
      o.require((diff.array() <= band.array()).all(), tag + " transpose law outside mutual band");
    }
  }
  if (o.pass) o.detail = "lags -2..2, worst |z| " + fmt(worst);
  return o;
}

Outcome coefficient_round_trip(const Context&) {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> g;
  double worst = 0.0;
  const auto spaces = space_catalog();
  for (const auto& s : spaces) {
    std::vector<Matrix> coeffs;
    for (int n = 0; n <= 8; ++n) {
      Matrix a(2, 2);
      a << g(rng), g(rng), g(rng), g(rng);
      coeffs.push_back(a * a.transpose() / 2.0);
    }
    const auto model = make_spatial_model(s, coeffs);
    o.require(validate_spatial(model).valid, to_string(s) + " random model invalid");
    const auto back = recover_coefficients([&](double rho) { return eval_cov(model, rho, 0.0, 8); }, s, 2, 8, 20);
    for (int n = 0; n <= 8; ++n) {
      const double err = (back.coeffs[static_cast<std::size_t>(n)] - coeffs[static_cast<std::size_t>(n)]).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      o.require(err <= 1e-9, to_string(s) + " degree " + std::to_string(n) + " error " + fmt(err));
    }
  }
  if (o.pass) o.detail = std::to_string(spaces.size()) + " spaces, worst entry error " + fmt(worst);
  return o;
}

Outcome vn_recovery(const Context&) {
  Outcome o;
  const auto s2 = make_space(SpaceFamily::Sphere, 2);
  std::vector<Matrix> coeffs;
  for (int n = 0; n <= 5; ++n) coeffs.push_back(std::pow(0.6, n) * mat2(1.0, 0.3, 0.3, 0.8));
  const auto model = make_spatiotemporal_model(s2, coeffs, VectorMA1{mat2(0.5, 0.1, 0.0, 0.3)});
  Rng rng = make_stream(derive_seed(kSeed, 500), 0);
  const auto r = simulate_spatiotemporal(model, {sample_uniform(s2, rng)}, {0, 1}, 5, derive_seed(kSeed, 501));
  double worst = 0.0;
  for (int n = 0; n <= 6; ++n) {
    const auto est = mc_recover_vn(r, n, 100000, derive_seed(kSeed, 510 + static_cast<std::uint64_t>(n)));
    for (std::size_t t = 0; t < est.size(); ++t) {
      worst = std::max(worst, worst_z(est[t]));
      o.require(est[t].passes(), "n=" + std::to_string(n) + " t=" + std::to_string(t) + " z=" + fmt(est[t].z_score));
      if (n == 6) o.require(est[t].target.cwiseAbs().maxCoeff() == 0.0, "n=6 target is not zero");
    }
  }
  if (o.pass) o.detail = "degrees 0..6 at 2 times, worst |z| " + fmt(worst);
  return o;
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const Context& ctx) {
  Outcome o;
  if (ctx.cli.empty()) {
    o.require(false, "no --cli given");
    return o;
  }
  const auto dir = ctx.workdir / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const Model model{make_spatiotemporal_model(
      make_space(SpaceFamily::Sphere, 2), {mat2(1.0, 0.3, 0.3, 0.8), mat2(0.5, 0.1, 0.1, 0.4)},
      VectorMA1{mat2(0.6, 0.2, -0.1, 0.4)})};
  io::write_model(dir / "model.json", model);
  const std::string base = "\"" + ctx.cli + "\" simulate --model \"" + (dir / "model.json").string() +
                           "\" --points random:200 --times 0,1,2 --seed 7";
  o.require(run_command(base + " --out \"" + (dir / "run1").string() + "\"") == 0, "first run failed");
  o.require(run_command(base + " --out \"" + (dir / "run2").string() + "\"") == 0, "second run failed");
  if (!o.pass) return o;
  for (const char* f : {"values.csv", "metadata.json"}) {
    const auto a = slurp(dir / "run1" / f), b = slurp(dir / "run2" / f);
    o.require(!a.empty(), std::string(f) + " is empty");
    o.require(a == b, std::string(f) + " differs between runs");
  }
  if (o.pass) o.detail = "values.csv and metadata.json byte-identical";
  return o;
}

Outcome validity_gate(const Context&) {
  Outcome o;
  const auto s2 = make_space(SpaceFamily::Sphere, 2);
  const auto indefinite =
      validate(Model{make_spatial_model(s2, {Matrix::Identity(2, 2), mat2(1.0, 0.0, 0.0, -0.5), Matrix::Identity(2, 2)})});
  o.require(!indefinite.valid, "indefinite B_1 accepted");
  o.require(indefinite.violations.size() == 1 && indefinite.violations[0].degree == 1 &&
                indefinite.violations[0].kind == ViolationKind::Indefinite,
            "indefinite B_1 not attributed to degree 1");

  LagTable table;
  table.lags[1] = {mat2(0.1, 0.0, 0.0, 0.1), mat2(0.2, 0.1, 0.0, 0.1)};
  table.lags[-1] = {mat2(0.1, 0.0, 0.0, 0.1), mat2(0.2, 0.1, 0.0, 0.1)};
  const auto asym = validate(Model{make_spatiotemporal_model(s2, {Matrix::Identity(2, 2), Matrix::Identity(2, 2)}, table)});
  o.require(!asym.valid, "B_1(1) != B_1(-1)^T accepted");
  bool attributed = !asym.violations.empty();
  for (const auto& v : asym.violations)
    attributed = attributed && v.degree == 1 && v.kind == ViolationKind::Asymmetric && v.lag.has_value();
  o.require(attributed, "asymmetric kernel not attributed to degree 1");

  const auto ma1 = validate(Model{make_spatiotemporal_model(
      s2, {mat2(1.0, 0.3, 0.3, 0.8), mat2(0.5, 0.1, 0.1, 0.4)}, VectorMA1{mat2(0.6, 0.2, -0.1, 0.4)})});
  o.require(ma1.valid, "MA(1) family rejected");
  if (o.pass) o.detail = "indefinite and asymmetric rejected with degree 1 records, MA(1) accepted";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isofield acceptance run"};
  Context ctx;
  std::string workdir = (fs::temp_directory_path() / "isofield_acceptance").string();
  app.add_option("--cli", ctx.cli, "Path to the isofield executable");
  app.add_option("--workdir", workdir, "Scratch directory");
  CLI11_PARSE(app, argc, argv);
  ctx.workdir = workdir;
  fs::create_directories(ctx.workdir);

  const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria = {
      {"Jacobi orthogonality at quadrature order 26", jacobi_orthogonality},
      {"space identities", space_identities},
      {"Funk-Hecke orthogonality Monte Carlo", funk_hecke},
      {"zonal field mean and covariance", zonal_field},
      {"spatial covariance reproduction on S^2", spatial_reproduction},
      {"MA(1) cross-covariance reproduction", ma1_reproduction},
      {"coefficient round trip", coefficient_round_trip},
      {"V_n recovery from one realization", vn_recovery},
      {"simulate determinism", determinism},
      {"validity gate", validity_gate},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second(ctx);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << ": " << criteria[k].first << " (" << o.detail
              << ")" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
