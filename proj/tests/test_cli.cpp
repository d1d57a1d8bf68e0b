#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lagmf_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(LAGMF_BINARY) + " " + args + " --out " + out.string() + " > " +
                          (out / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("verify writes a passing report") {
  fs::path out = scratch("verify");
  REQUIRE(run("verify --model open-toda --sites 3 --seed 7", out) == 0);
  nlohmann::json r = read_json(out / "report.json");
  REQUIRE(r.is_array());
  REQUIRE_FALSE(r.empty());
  for (const auto& e : r) {
    CHECK(e["model"].get<std::string>().rfind("open-toda", 0) == 0);
    CHECK(e["pass"] == true);
    CHECK(e.contains("identity"));
    CHECK(e.contains("params"));
    CHECK(e.contains("residual"));
    CHECK(e.contains("tolerance"));
  }
}

TEST_CASE("an unattainable tolerance exits with status 1") {
  fs::path out = scratch("fail");
  CHECK(run("verify --model open-toda --identity isospectral --tol isospectral=1e-300", out) == 1);
  nlohmann::json r = read_json(out / "report.json");
  bool any_fail = false;
  for (const auto& e : r) any_fail = any_fail || e["pass"] == false;
  CHECK(any_fail);
}

TEST_CASE("configuration errors exit with status 2") {
  fs::path out = scratch("config");
  CHECK(run("verify --model no-such-model", out) == 2);
  CHECK(run("integrate --model periodic-toda --step -1", out) == 2);
  CHECK(run("verify --tol isospectral", out) == 2);
  CHECK(run("frobnicate", out) == 2);
  {
    std::ofstream bad(out / "bad.json");
    bad << "{bad";
  }
  CHECK(run("verify --config " + (out / "bad.json").string(), out) == 2);
  CHECK_FALSE(fs::exists(out / "report.json"));
}

TEST_CASE("integrate emits one CSV row per step") {
  fs::path out = scratch("integrate");
  REQUIRE(run("integrate --model periodic-toda --T 3 --flow 1,0 --duration 1.0 --step 1e-3", out) == 0);
  REQUIRE(fs::exists(out / "trajectory.csv"));
  CHECK(count_lines(out / "trajectory.csv") == 1 + 1001);
  nlohmann::json r = read_json(out / "report.json");
  for (const auto& e : r) CHECK(e["pass"] == true);
}

TEST_CASE("a JSON config drives the run and flags override it") {
  fs::path out = scratch("json");
  {
    std::ofstream cfg(out / "run.json");
    cfg << R"({"command": "integrate",
               "model": {"family": "dst", "T": 2},
               "flow": "1,1",
               "numerics": {"step": 0.01, "duration": 0.5, "seed": 4},
               "output": {"formats": ["csv"]}})";
  }
  REQUIRE(run("--config " + (out / "run.json").string(), out) == 0);
  CHECK(count_lines(out / "trajectory.csv") == 1 + 51);
  CHECK_FALSE(fs::exists(out / "report.json"));
  REQUIRE(run("--config " + (out / "run.json").string() + " --duration 0.2", out) == 0);
  CHECK(count_lines(out / "trajectory.csv") == 1 + 21);
}

TEST_CASE("closure reports both residuals") {
  fs::path out = scratch("closure");
  REQUIRE(run("closure --model open-toda --seed 3", out) == 0);
  nlohmann::json r = read_json(out / "report.json");
  bool closure = false, commutativity = false;
  for (const auto& e : r) {
    closure = closure || e["identity"] == "closure";
    commutativity = commutativity || e["identity"] == "commutativity";
  }
  CHECK(closure);
  CHECK(commutativity);
}
