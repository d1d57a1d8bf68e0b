// One line per acceptance criterion; exits nonzero if any criterion fails.
#include "lagmf/verify.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>

using namespace lagmf;
namespace fs = std::filesystem;

namespace {

std::string param(const ReportEntry& e, const std::string& key) {
  for (const auto& [k, v] : e.params)
    if (k == key) return v;
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

using Pred = std::function<bool(const ReportEntry&)>;

// Collects problems against thresholds owned by this file, independent of the
// tolerances the suite writes into its entries.
struct Outcome {
  std::vector<std::string> problems;
  int entries = 0;
  double worst = 0.0;  // max residual / threshold

  void expect(const Report& r, const std::string& label, const Pred& pick, double threshold) {
    int n = 0;
    for (const auto& e : r.entries) {
      if (!pick(e)) continue;
      ++n;
      const std::string err = param(e, "error");
      if (!err.empty()) problems.push_back(label + ": " + err);
      if (!(e.residual < threshold) || !e.pass)
        problems.push_back(label + " " + e.model + ": residual " + std::to_string(e.residual));
      if (std::isfinite(e.residual)) worst = std::max(worst, e.residual / threshold);
    }
    if (n == 0) problems.push_back("no entries for " + label);
    entries += n;
  }
  void require(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

Pred is(const std::string& id, const std::string& model_prefix, std::vector<std::pair<std::string, std::string>> kv = {}) {
  return [=](const ReportEntry& e) {
    if (e.identity != id || !starts_with(e.model, model_prefix)) return false;
    for (const auto& [k, v] : kv)
      if (param(e, k) != v) return false;
    return true;
  };
}

Report suite(std::set<std::string> ids, std::set<Family> families = {}) {
  SuiteConfig c;
  c.seed = 1;
  c.identities = std::move(ids);
  c.families = std::move(families);
  return run_suite(c);
}

int failures = 0;

void criterion(int k, const std::string& title, double budget, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.problems.push_back(std::string("exception: ") + e.what());
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(dt < budget, "runtime over budget");
  const bool ok = o.problems.empty();
  if (!ok) ++failures;
  std::printf("[%s] %2d %-52s entries=%-3d worst=%.2e of threshold  %.3fs / %.0fs\n", ok ? "PASS" : "FAIL", k,
              title.c_str(), o.entries, o.worst, dt, budget);
  for (const auto& p : o.problems) std::printf("       %s\n", p.c_str());
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(LAGMF_BINARY) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string without_seconds(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  static const std::regex seconds(R"("seconds": [-+0-9.eE]+)");
  return std::regex_replace(ss.str(), seconds, "\"seconds\": _");
}

}  // namespace

int main() {
  criterion(1, "mCYBE for AKS and Cartan splittings, sl2-sl4", 1.0, [](Outcome& o) {
    Report r = suite({"mcybe"});
    for (const char* s : {"splitting/aks", "splitting/cartan"})
      for (const char* n : {"2", "3", "4"})
        o.expect(r, std::string("mcybe ") + s + " n=" + n, is("mcybe", s, {{"n", n}, {"pairs", "50"}}), 1e-12);
  });

  criterion(2, "CYBE for rational and cyclotomic kernels", 5.0, [](Outcome& o) {
    Report r = suite({"cybe"});
    for (const char* k : {"kernel/rational", "kernel/cyclotomic"})
      for (const char* n : {"2", "3"})
        o.expect(r, std::string("cybe ") + k + " n=" + n, is("cybe", k, {{"n", n}, {"triples", "20"}}), 1e-11);
  });

  criterion(3, "open Toda Lax cross-check and chart maps", 2.0, [](Outcome& o) {
    Report r = suite({"lax-crosscheck", "chart-maps"}, {Family::OpenTodaFlaschka, Family::OpenTodaSkew});
    for (const char* n : {"2", "3"})
      for (const char* f : {"1", "2"}) {
        o.expect(r, std::string("lax N=") + n + " flow " + f,
                 is("lax-crosscheck", "open-toda/flaschka", {{"N", n}, {"flow", f}, {"states", "10"}}), 1e-6);
        o.expect(r, std::string("(u,b) map N=") + n + " flow " + f,
                 is("chart-maps", "open-toda/canonical-ub", {{"N", n}, {"flow", f}}), 1e-9);
        o.expect(r, std::string("(w,z) map N=") + n + " flow " + f,
                 is("chart-maps", "open-toda-skew", {{"N", n}, {"flow", f}}), 1e-9);
      }
  });

  criterion(4, "isospectral drift over unit time at step 1e-3", 30.0, [](Outcome& o) {
    Report r = suite({"isospectral"});
    const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> cases = {
        {"open-toda/flaschka", {{"flow", "1"}}},
        {"open-toda/flaschka", {{"flow", "2"}}},
        {"periodic-toda", {{"T", "3"}, {"probes", "1+0i;0+2i"}}},
        {"dst", {{"T", "2"}}},
        {"coupled-toda-dst", {{"beta", "0.5"}}},
        {"rational-gaudin", {{"N", "2"}}},
        {"cyclotomic-gaudin", {{"T", "2"}, {"N", "1"}}},
        {"elliptic-gaudin", {{"n", "2"}, {"N", "2"}, {"tau", "0+1i"}}},
    };
    for (const auto& [model, kv] : cases) {
      auto with_steps = kv;
      with_steps.emplace_back("steps", "1000");
      with_steps.emplace_back("duration", "1");
      o.expect(r, "isospectral " + model, is("isospectral", model, with_steps), 1e-8);
    }
  });

  criterion(5, "flow commutativity and RK4 order", 20.0, [](Outcome& o) {
    Report r = suite({"commutativity", "rk4-order"});
    for (const char* m : {"open-toda/flaschka", "periodic-toda", "dst", "coupled-toda-dst", "rational-gaudin",
                          "cyclotomic-gaudin", "elliptic-gaudin"})
      o.expect(r, std::string("commutativity ") + m, is("commutativity", m, {{"delta", "0.1"}, {"steps", "100"}}),
               1e-8);
    int orders = 0;
    for (const auto& e : r.entries) {
      if (e.identity != "rk4-order" || !starts_with(e.model, "open-toda")) continue;
      ++orders;
      const double ratio = std::stod(param(e, "ratio"));
      o.require(ratio >= 8.0 && ratio <= 32.0, "rk4 ratio " + std::to_string(ratio) + " on " + e.model);
      o.require(e.pass, "rk4-order entry failed on " + e.model);
    }
    o.require(orders > 0, "no rk4-order entries");
    o.entries += orders;
  });

  criterion(6, "closure on shell, grid 8, delta 0.1", 30.0, [](Outcome& o) {
    Report r = suite({"closure"}, {Family::OpenTodaFlaschka, Family::CoupledTodaDST, Family::RationalGaudin});
    const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> cases = {
        {"open-toda", {{"flows", "1;2"}}},
        {"coupled-toda-dst", {{"beta", "0"}, {"flows", "1,0;1,1"}}},
        {"coupled-toda-dst", {{"beta", "0.5"}, {"flows", "1,0;1,1"}}},
        {"rational-gaudin", {{"flows", "1,1;1,2"}}},
    };
    for (const auto& [model, kv] : cases) {
      auto full = kv;
      full.emplace_back("grid", "8");
      full.emplace_back("delta", "0.1");
      o.expect(r, "closure " + model, is("closure", model, full), 1e-5);
    }
  });

  criterion(7, "involutivity by canonical brackets", 5.0, [](Outcome& o) {
    Report r = suite({"involutivity"}, {Family::OpenTodaFlaschka, Family::DST, Family::CoupledTodaDST});
    o.expect(r, "open Toda H1,H2", is("involutivity", "open-toda", {{"hamiltonians", "1;2"}}), 1e-6);
    o.expect(r, "coupled Toda vs DST", is("involutivity", "coupled-toda-dst", {{"hamiltonians", "1,0;1,1"}}), 1e-6);
    o.expect(r, "DST", is("involutivity", "dst", {{"hamiltonians", "1,0;1,1"}}), 1e-6);
  });

  criterion(8, "double-zero identity on the open Toda canonical chart", 5.0, [](Outcome& o) {
    Report r = suite({"double-zero"}, {Family::OpenTodaFlaschka});
    o.expect(r, "random velocities",
             is("double-zero", "open-toda/canonical-ub", {{"velocities", "random"}, {"samples", "10"}}), 1e-6);
    o.expect(r, "zero velocities", is("double-zero", "open-toda/canonical-ub", {{"velocities", "zero"}}), 1e-10);
    o.expect(r, "on-shell velocities", is("double-zero", "open-toda/canonical-ub", {{"velocities", "on-shell"}}),
             1e-6);
  });

  criterion(9, "Sklyanin bracket with the cyclotomic kernel", 20.0, [](Outcome& o) {
    Report r = suite({"sklyanin"});
    for (const char* t : {"2", "3"})
      o.expect(r, std::string("periodic Toda T=") + t,
               is("sklyanin", "periodic-toda", {{"T", t}, {"kernel", "cyclotomic"}, {"triples", "5"}}), 1e-8);
    o.expect(r, "DST T=2", is("sklyanin", "dst", {{"T", "2"}, {"kernel", "cyclotomic"}, {"triples", "5"}}), 1e-8);
  });

  criterion(10, "Weierstrass kernel identities", 5.0, [](Outcome& o) {
    Report r = suite({"elliptic-kernel"});
    for (const char* tau : {"0+1i", "0.3+1i"}) {
      const std::string t = std::string(" tau=") + tau;
      o.expect(r, "legendre" + t, is("elliptic-kernel", "weierstrass", {{"tau", tau}, {"check", "legendre"}}), 1e-10);
      o.expect(r, "zeta'+p" + t, is("elliptic-kernel", "weierstrass", {{"tau", tau}, {"check", "zeta'+p"}}), 1e-6);
      o.expect(r, "p periodicity" + t,
               is("elliptic-kernel", "weierstrass", {{"tau", tau}, {"check", "p-periodicity"}}), 1e-9);
      o.expect(r, "sigma law" + t,
               is("elliptic-kernel", "weierstrass", {{"tau", tau}, {"check", "sigma-quasi-period"}}), 1e-8);
    }
    for (const auto& e : r.entries)
      if (param(e, "check") == "sigma-quasi-period") o.require(!param(e, "law").empty(), "sigma law not recorded");
  });

  criterion(11, "cyclotomic residue sum at p=1, T=2", 1.0, [](Outcome& o) {
    Report r = suite({"residue-sum"});
    for (const char* n : {"1", "2"})
      o.expect(r, std::string("N=") + n, is("residue-sum", "cyclotomic-gaudin", {{"T", "2"}, {"N", n}, {"p", "1"}}),
               1e-10);
  });

  criterion(12, "CLI determinism and full-suite runtime", 60.0, [](Outcome& o) {
    const fs::path base = fs::temp_directory_path() / "lagmf_acceptance";
    fs::remove_all(base);
    const auto t0 = std::chrono::steady_clock::now();
    const int a = run_cli("verify --seed 5 --out " + (base / "a").string());
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const int b = run_cli("verify --seed 5 --out " + (base / "b").string());
    o.require(a == 0 && b == 0, "full suite exit codes " + std::to_string(a) + ", " + std::to_string(b));
    const std::string ra = without_seconds(base / "a" / "report.json");
    const std::string rb = without_seconds(base / "b" / "report.json");
    o.require(!ra.empty(), "report.json missing");
    o.require(ra == rb, "reports differ outside the seconds fields");
    o.require(dt < 60.0, "full suite took " + std::to_string(dt) + " s");
    o.entries = 2;
  });

  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
