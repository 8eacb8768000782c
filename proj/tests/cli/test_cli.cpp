#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "seabed_cli/cli.hpp"

using seabed::cli::run_cli;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() / ("seabed-cli-" + tag + "-" + std::to_string(++counter));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

// Mother grid over [-0.5, 1.5] with the unit observation window.
const char* kPairBase = R"(
[grid]
a1 = -0.5
a2 = 1.5
n = 65
n_sigma = 17

[window]
a1 = 0
a2 = 1

[physics]
depth_floor = 0.4
)";

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("missing config flag is an invocation error") {
  CHECK(run_cli({"verify"}) != 0);
}

TEST_CASE("unknown config key exits 2") {
  TempDir dir("badkey");
  write_file(dir.file("bad.ini"), "[grid]\na1 = 0\na2 = 1\nn = 33\nzz = 3\n");
  CHECK(run_cli({"verify", "--config", dir.file("bad.ini"), "--out", dir.file("out")}) == 2);
}

TEST_CASE("missing config file exits 2") {
  TempDir dir("nofile");
  CHECK(run_cli({"verify", "--config", dir.file("absent.ini"), "--out", dir.file("out")}) == 2);
}

TEST_CASE("simulate from rest stays at rest") {
  TempDir dir("rest");
  write_file(dir.file("cfg.ini"),
             "[grid]\na1 = 0\na2 = 1\nn = 33\nn_sigma = 9\n"
             "[profiles]\nbottom = -1\n"
             "[time]\ndt = 0.01\nt_end = 0.05\n");
  CHECK(run_cli({"simulate", "--config", dir.file("cfg.ini"), "--out", dir.file("out")}) == 0);
  CHECK(fs::exists(dir.file("out/trajectory.csv")));
  CHECK(fs::exists(dir.file("out/final_state.svg")));
  nlohmann::json rep = read_json(dir.file("out/simulate_report.json"));
  CHECK(rep["surface_final"]["max"].get<double>() == 0.0);
  CHECK(rep["rng"]["algorithm"].is_string());
}

TEST_CASE("solve writes the potential and diagnostics") {
  TempDir dir("solve");
  write_file(dir.file("cfg.ini"),
             "[grid]\na1 = 0\na2 = 1\nn = 33\nn_sigma = 9\n"
             "[profiles]\nbottom = -1\npsi = sin(2*pi*X)\n");
  CHECK(run_cli({"solve", "--config", dir.file("cfg.ini"), "--out", dir.file("out")}) == 0);
  CHECK(fs::exists(dir.file("out/potential.csv")));
  CHECK(fs::exists(dir.file("out/dno.csv")));
  nlohmann::json rep = read_json(dir.file("out/solve_report.json"));
  CHECK(rep["solver"]["method"].get<std::string>() == "direct");
  CHECK(rep["energy"].get<double>() > 0.0);
}

TEST_CASE("certify on a genuine pair writes the report and chart") {
  TempDir dir("certify");
  write_file(dir.file("cfg.ini"),
             std::string(kPairBase) +
                 "[profiles]\nbottom = -1 + 0.03*sin(pi*X)\n"
                 "bottom0 = -1 + 0.03*sin(pi*X) + 0.05*exp(-120*(X - 0.5)^2)\n"
                 "surface = 0.02*cos(pi*X)\npsi = 0.06*sin(pi*X)\n");
  const int code = run_cli({"certify", "--config", dir.file("cfg.ini"), "--out", dir.file("out")});
  CHECK((code == 0 || code == 5));
  nlohmann::json rep = read_json(dir.file("out/certificate.json"));
  const std::string verdict = rep["verdict"].get<std::string>();
  CHECK((verdict == "HOLDS" || verdict == "NON_INFORMATIVE" || verdict == "VIOLATED"));
  if (verdict == "NON_INFORMATIVE") CHECK(code == 5);
  CHECK(fs::exists(dir.file("out/certificate_terms.csv")));
  CHECK(fs::exists(dir.file("out/certificate_terms.svg")));
}

TEST_CASE("certify on an identical pair exits 4") {
  TempDir dir("identical");
  write_file(dir.file("cfg.ini"),
             std::string(kPairBase) +
                 "[profiles]\nbottom = -1 + 0.03*sin(pi*X)\n"
                 "surface = 0.02*cos(pi*X)\npsi = 0.06*sin(pi*X)\n");
  CHECK(run_cli({"certify", "--config", dir.file("cfg.ini"), "--out", dir.file("out")}) == 4);
}

TEST_CASE("sweep writes one row per epsilon") {
  TempDir dir("sweep");
  write_file(dir.file("cfg.ini"),
             std::string(kPairBase) +
                 "[profiles]\nbottom = -1 + 0.03*sin(pi*X)\n"
                 "bottom0 = -1 + 0.03*sin(pi*X) + 0.05*exp(-120*(X - 0.5)^2)\n"
                 "surface = 0.02*cos(pi*X)\npsi = 0.06*sin(pi*X)\n"
                 "[certificate]\nepsilons = 1.0, 0.5\n");
  CHECK(run_cli({"sweep", "--config", dir.file("cfg.ini"), "--out", dir.file("out")}) == 0);
  std::ifstream csv(dir.file("out/sweep.csv"));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  CHECK(line == "epsilon,l1_distance,final_rhs,verdict");
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
  nlohmann::json rep = read_json(dir.file("out/sweep_report.json"));
  CHECK(rep["rows"].size() == 2);
  CHECK(fs::exists(dir.file("out/sweep.svg")));
}

TEST_CASE("measure then invert round trip") {
  TempDir dir("pipeline");
  write_file(dir.file("cfg.ini"),
             std::string(kPairBase) +
                 "[profiles]\nbottom = -1 + 0.1*exp(-50*(X - 0.5)^2)\n"
                 "surface = 0.02*cos(pi*X)\npsi = 0.05*sin(pi*X)\n"
                 "[time]\ndt = 0.005\nt_end = 0.01\nt0 = 0.01\n"
                 "[inversion]\nmax_iters = 10\n");
  CHECK(run_cli({"measure", "--config", dir.file("cfg.ini"), "--out", dir.file("m")}) == 0);
  CHECK(fs::exists(dir.file("m/measurement.json")));
  CHECK(fs::exists(dir.file("m/theta.csv")));

  CHECK(run_cli({"invert", "--config", dir.file("cfg.ini"), "--out", dir.file("inv"),
                 "--measurement", dir.file("m/measurement.json")}) == 0);
  CHECK(fs::exists(dir.file("inv/b_est.csv")));
  CHECK(fs::exists(dir.file("inv/convergence.svg")));
  nlohmann::json rep = read_json(dir.file("inv/inversion.json"));
  const auto hist = rep["misfit_history"].get<std::vector<double>>();
  REQUIRE(!hist.empty());
  for (size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1] * (1.0 + 1e-12));
  CHECK(rep["non_identifiable"].get<bool>() == false);
  CHECK(rep["l1_error"].is_number());
}

TEST_CASE("invert with an infeasible start exits 6") {
  TempDir dir("infeasible");
  write_file(dir.file("cfg.ini"),
             std::string(kPairBase) +
                 "[profiles]\nbottom = -1\nsurface = 0.01*cos(pi*X)\npsi = 0.05*sin(pi*X)\n"
                 "b_init = 0\n"
                 "[time]\ndt = 0.005\nt_end = 0.01\nt0 = 0.01\n");
  CHECK(run_cli({"invert", "--config", dir.file("cfg.ini"), "--out", dir.file("out")}) == 6);
}

TEST_CASE("invert flags still water as non-identifiable") {
  TempDir dir("still");
  write_file(dir.file("cfg.ini"),
             std::string(kPairBase) +
                 "[profiles]\nbottom = -1\n"
                 "[time]\ndt = 0.005\nt_end = 0.01\nt0 = 0.01\n"
                 "[inversion]\nmax_iters = 3\n");
  CHECK(run_cli({"invert", "--config", dir.file("cfg.ini"), "--out", dir.file("out")}) == 0);
  nlohmann::json rep = read_json(dir.file("out/inversion.json"));
  CHECK(rep["non_identifiable"].get<bool>() == true);
}

TEST_CASE("verify passes on the default experiment") {
  TempDir dir("verify");
  write_file(dir.file("cfg.ini"), "[grid]\na1 = 0\na2 = 1\nn = 65\nn_sigma = 33\n");
  CHECK(run_cli({"verify", "--config", dir.file("cfg.ini"), "--out", dir.file("out")}) == 0);
  nlohmann::json rep = read_json(dir.file("out/verify_report.json"));
  CHECK(rep["all_pass"].get<bool>() == true);
  CHECK(rep["checks"].size() > 10);
}

TEST_CASE("verify fails under a loosened iterative solver") {
  TempDir dir("fault");
  write_file(dir.file("cfg.ini"),
             "[grid]\na1 = 0\na2 = 1\nn = 65\nn_sigma = 33\n"
             "[physics]\nsolver_method = bicgstab\nsolver_tol = 1e-2\n");
  CHECK(run_cli({"verify", "--config", dir.file("cfg.ini"), "--out", dir.file("out")}) == 1);
  nlohmann::json rep = read_json(dir.file("out/verify_report.json"));
  CHECK(rep["all_pass"].get<bool>() == false);
}
