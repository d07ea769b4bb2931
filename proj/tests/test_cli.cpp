#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "isofield/io.hpp"

using namespace isofield;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("isofield_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string model(const std::string& name) { return std::string(ISOFIELD_MODELS_DIR) + "/" + name; }

Result run(const std::string& args) {
  const auto out = work_dir() / "stdout.txt", err = work_dir() / "stderr.txt";
  const std::string cmd = std::string("\"") + ISOFIELD_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("validate").code, 2);
  EXPECT_EQ(run("eval-cov --model " + model("ma1_sphere2.json") + " --rho-grid 0:1").code, 2);
}

TEST(Cli, ValidateExitCodes) {
  const auto ok = run("validate --model " + model("ma1_sphere2.json"));
  EXPECT_EQ(ok.code, 0) << ok.err;
  const auto bad = run("validate --model " + model("asymmetric_b1.json"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("degree 1"), std::string::npos) << bad.err;
  EXPECT_NE(bad.out.find("asymmetric"), std::string::npos) << bad.out;
  const auto parse = run("validate --model " + model("bad_row_length.json"));
  EXPECT_EQ(parse.code, 2);
  EXPECT_NE(parse.err.find("coeffs"), std::string::npos) << parse.err;
  EXPECT_EQ(run("validate --model " + (work_dir() / "nope.json").string()).code, 2);
  const auto js = run("validate --format json --model " + model("ma1_sphere2.json"));
  EXPECT_TRUE(nlohmann::json::parse(js.out)["valid"].get<bool>());
}

TEST(Cli, EvalCovMatchesLibrary) {
  const auto r = run("eval-cov --model " + model("ma1_sphere2.json") + " --rho-grid 0:pi:5 --lags -2,-1,0,1,2");
  ASSERT_EQ(r.code, 0) << r.err;
  const Model m = io::read_model(model("ma1_sphere2.json"));
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "rho,lag,i,j,value,tail_bound");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto c = io::parse_csv_doubles(line, "row");
    ASSERT_EQ(c.size(), 6u);
    const Matrix expect = eval_cov(m, c[0], c[1], model_max_degree(m));
    EXPECT_EQ(c[4], expect(static_cast<int>(c[2]), static_cast<int>(c[3]))) << line;
    if (std::abs(c[1]) == 2.0) {
      EXPECT_EQ(c[4], 0.0);
    }
    ++rows;
  }
  EXPECT_EQ(rows, 5u * 5u * 4u);
  EXPECT_EQ(run("eval-cov --model " + model("asymmetric_b1.json")).code, 1);
  const auto js = run("eval-cov --format json --model " + model("spatial_sphere2.json") + " --rho-grid 0:1:2 --trunc 1");
  ASSERT_EQ(js.code, 0) << js.err;
  const auto j = nlohmann::json::parse(js.out);
  EXPECT_EQ(j["trunc"], 1);
  EXPECT_GT(j["rows"][0]["tail_bound"].get<double>(), 0.0);
}

TEST(Cli, SimulateDeterministicAndShaped) {
  const auto a = work_dir() / "sim_a", b = work_dir() / "sim_b", c = work_dir() / "sim_c";
  const std::string base = "simulate --model " + model("ma1_sphere2.json") + " --points fibonacci:500 --times 0,1,2 --seed 11";
  ASSERT_EQ(run(base + " --out " + a.string()).code, 0);
  ASSERT_EQ(run(base + " --threads 3 --out " + b.string()).code, 0);
  ASSERT_EQ(run("simulate --model " + model("ma1_sphere2.json") + " --points fibonacci:500 --times 0,1,2 --seed 12 --out " +
                c.string())
                .code,
            0);
  EXPECT_EQ(slurp(a / "values.csv"), slurp(b / "values.csv"));
  EXPECT_EQ(slurp(a / "metadata.json"), slurp(b / "metadata.json"));
  EXPECT_NE(slurp(a / "values.csv"), slurp(c / "values.csv"));
  EXPECT_EQ(count_lines(slurp(a / "values.csv")), 1u + 500u * 3u * 2u);
  const auto r = io::read_realization(a);
  EXPECT_EQ(r.seed, 11u);
  EXPECT_EQ(r.model_hash, model_fingerprint(io::read_model(model("ma1_sphere2.json"))));
}

TEST(Cli, SimulateOtherModelsAndErrors) {
  const auto d = work_dir() / "sim_other";
  EXPECT_EQ(run("simulate --model " + model("ar1_projC4.json") + " --points random:20 --times 0,1,4 --out " + (d / "ar").string()).code, 0);
  EXPECT_EQ(run("simulate --model " + model("exponential_projH8.json") + " --points random:5 --times 0,0.25,1.5 --out " + (d / "ex").string()).code, 0);
  const auto o = run("simulate --model " + model("scalar_projO16.json") + " --out " + (d / "o").string());
  EXPECT_EQ(o.code, 3);
  EXPECT_FALSE(o.err.empty());
  EXPECT_EQ(run("simulate --model " + model("asymmetric_b1.json") + " --out " + (d / "bad").string()).code, 1);
  EXPECT_EQ(run("simulate --model " + model("ma1_sphere2.json")).code, 2);
  EXPECT_EQ(run("simulate --model " + model("ma1_sphere2.json") + " --times 0,0.5 --out " + (d / "x").string()).code, 2);
  EXPECT_EQ(run("simulate --model " + model("ar1_projC4.json") + " --points fibonacci:10 --out " + (d / "y").string()).code, 2);
  {
    std::ofstream pts(d / "pts.csv");
    pts << "# two points\n1,0,0\n0,0,1\n";
  }
  const auto f = run("simulate --model " + model("spatial_sphere2.json") + " --points file:" + (d / "pts.csv").string() +
                     " --out " + (d / "f").string());
  EXPECT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(io::read_realization(d / "f").points.size(), 2u);
}

TEST(Cli, SpectrumTables) {
  const auto s = run("spectrum --space sphere:2 --trunc 3");
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(count_lines(s.out), 5u);
  EXPECT_NE(s.out.find("3,"), std::string::npos);
  const auto o = run("spectrum --space projO:16 --trunc 2");
  EXPECT_EQ(o.code, 0) << o.err;
  const auto m = run("spectrum --model " + model("ma1_sphere2.json"));
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(count_lines(m.out), 1u + 3u * 4u);
  EXPECT_EQ(run("spectrum").code, 2);
  EXPECT_EQ(run("spectrum --space torus:2").code, 2);
}

TEST(Cli, CheckPassesAndFaultInjectionFails) {
  const std::string base = "check --space sphere:2 --space projC:4 --max-degree 2 --pairs 1";
  const auto ok = run(base + " --replicates 20000");
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.out.rfind("name,reference,space", 0), 0u);
  const auto bad = run(base + " --replicates 100000 --inject-fault 1.1");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("FAILED"), std::string::npos);
  EXPECT_NE(bad.err.find("funk-hecke"), std::string::npos) << bad.err;
  const auto none = run("check --space none --format json");
  ASSERT_EQ(none.code, 0) << none.err;
  EXPECT_TRUE(nlohmann::json::parse(none.out)["all_pass"].get<bool>());
  EXPECT_EQ(run("check --space projO:16").code, 3);
}

TEST(Cli, OutFileOption) {
  const auto path = work_dir() / "cov.csv";
  ASSERT_EQ(run("eval-cov --model " + model("spatial_sphere2.json") + " --out " + path.string()).code, 0);
  EXPECT_EQ(slurp(path).rfind("rho,lag,i,j,value,tail_bound", 0), 0u);
}
