#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lagmf/verify.hpp"

#include "json.hpp"

#include <tuple>

using namespace lagmf;

namespace {

PhaseState sample(const Model& m, std::uint64_t seed) {
  Rng rng(seed);
  return random_state(m, rng, sample_scale(m.spec.family));
}

ScalarFn coordinate(int i) {
  return [i](const CVector& x) { return x[i]; };
}

ScalarFn hamiltonian(const Model& m, const FlowLabel& f, Chart c) {
  return [&m, f, c](const CVector& x) { return hamiltonian_eval(m, f, PhaseState{c, x}); };
}

Model canonical_toda(int sites) {
  ModelSpec s = default_spec(Family::OpenTodaFlaschka);
  s.chart = Chart::CanonicalUB;
  s.sites = sites;
  return build_model(s);
}

using PassKey = std::tuple<std::string, std::string, bool>;

std::set<PassKey> pass_set(const Report& r) {
  std::set<PassKey> out;
  for (const auto& e : r.entries) out.insert({e.identity, e.model, e.pass});
  return out;
}

}  // namespace

TEST_CASE("canonical Poisson matrices") {
  for (Family f : {Family::OpenTodaSkew, Family::PeriodicToda, Family::DST, Family::CoupledTodaDST}) {
    Model m = build_model(default_spec(f));
    CanonicalChart ch = canonical_chart(m, m.spec.chart);
    CMatrix p = ch.poisson_matrix();
    REQUIRE(p.rows() == ch.size);
    CHECK(norm(CMatrix(p + p.transpose())) == 0.0);
    CMatrix w = ch.symplectic_matrix();
    CHECK(norm(CMatrix(p * w + CMatrix::Identity(ch.size, ch.size))) < 1e-14);
  }
  // {b_j, u_j} = 1 in the (u, b) chart.
  Model ub = canonical_toda(3);
  CMatrix p = canonical_chart(ub, Chart::CanonicalUB).poisson_matrix();
  CHECK(p(3, 0) == cplx(1.0));
  CHECK(p(0, 3) == cplx(-1.0));
  CHECK(p(3, 1) == cplx(0.0));
  // Coupled chart: {x, X} = 1/β.
  ModelSpec cs = default_spec(Family::CoupledTodaDST);
  cs.beta = 0.5;
  Model coupled = build_model(cs);
  const int t = coupled.spec.order;
  CHECK(std::abs(canonical_chart(coupled, Chart::Coupled).poisson_matrix()(2 * t, 3 * t) - 2.0) < 1e-15);
}

TEST_CASE("charts without Darboux coordinates throw") {
  CHECK_THROWS_AS(canonical_chart(build_model(default_spec(Family::RationalGaudin)), Chart::GaudinOrbit), Error);
  CHECK_THROWS_AS(canonical_chart(build_model(default_spec(Family::CyclotomicGaudin)), Chart::CyclotomicOrbit),
                  Error);
  Model fl = build_model(default_spec(Family::OpenTodaFlaschka));
  CHECK_THROWS_AS(canonical_chart(fl, Chart::Flaschka), Error);
  CHECK_NOTHROW(canonical_chart(fl, Chart::CanonicalUB));
  CHECK_THROWS_AS(canonical_chart(fl, Chart::Periodic), Error);
  ModelSpec cs = default_spec(Family::CoupledTodaDST);
  cs.beta = 0.0;
  CHECK_THROWS_AS(canonical_chart(build_model(cs), Chart::Coupled), Error);
  CanonicalChart ell = canonical_chart(build_model(default_spec(Family::EllipticGaudin)), Chart::Elliptic);
  CHECK(ell.kks);
  CHECK_THROWS_AS(ell.symplectic_matrix(), Error);
}

TEST_CASE("finite-difference bracket on coordinate functions") {
  Model m = canonical_toda(2);
  CanonicalChart ch = canonical_chart(m, Chart::CanonicalUB);
  PhaseState s = sample(m, 3);
  CHECK(std::abs(poisson_bracket_fd(m, ch, coordinate(2), coordinate(0), s) - 1.0) < 1e-9);
  CHECK(std::abs(poisson_bracket_fd(m, ch, coordinate(0), coordinate(2), s) + 1.0) < 1e-9);
  CHECK(std::abs(poisson_bracket_fd(m, ch, coordinate(0), coordinate(1), s)) < 1e-9);
  // {u_1 b_1, u_1} = u_1 {b_1, u_1} = u_1.
  ScalarFn ub = [](const CVector& x) { return x[0] * x[2]; };
  CHECK(std::abs(poisson_bracket_fd(m, ch, ub, coordinate(0), s) - s.x[0]) < 1e-8);
  CHECK_THROWS_AS(poisson_bracket_fd(m, ch, ub, ub, PhaseState{Chart::SkewWZ, s.x}), Error);
}

TEST_CASE("flows are Hamiltonian: ξ̇ = {ξ, H}") {
  std::vector<Model> models = {canonical_toda(3), build_model(default_spec(Family::OpenTodaSkew)),
                               build_model(default_spec(Family::PeriodicToda)),
                               build_model(default_spec(Family::CoupledTodaDST))};
  for (const Model& m : models) {
    CanonicalChart ch = canonical_chart(m, m.spec.chart);
    PhaseState s = sample(m, 8);
    for (const FlowLabel& f : m.flows) {
      CVector v = flow_rhs(m, f, s);
      ScalarFn h = hamiltonian(m, f, m.spec.chart);
      for (int i = 0; i < ch.size; ++i)
        CHECK(std::abs(poisson_bracket_fd(m, ch, coordinate(i), h, s) - v[i]) < 1e-7);
    }
  }
}

TEST_CASE("DST flow is Hamiltonian up to the scaling gauge") {
  // The flow drops the k = 0 self term; the difference is a multiple of the
  // scaling x -> e^s x, X -> e^{-s} X generated by the constrained Σ x X.
  Model m = build_model(default_spec(Family::DST));
  CanonicalChart ch = canonical_chart(m, Chart::DSTChart);
  const int t = m.spec.order;
  for (std::uint64_t seed : {8, 9, 10}) {
    PhaseState s = sample(m, seed);
    CVector v = flow_rhs(m, {1, 1}, s);
    ScalarFn h = hamiltonian(m, {1, 1}, Chart::DSTChart);
    CVector d(ch.size);
    for (int i = 0; i < ch.size; ++i) d[i] = poisson_bracket_fd(m, ch, coordinate(i), h, s) - v[i];
    const cplx c = d[0] / s.x[0];
    for (int i = 0; i < t; ++i) {
      CHECK(std::abs(d[i] - c * s.x[i]) < 1e-7);
      CHECK(std::abs(d[t + i] + c * s.x[t + i]) < 1e-7);
    }
    CHECK(std::abs(c) > 1e-2);
  }
}

TEST_CASE("involutivity and the double zero") {
  Model m = canonical_toda(3);
  CanonicalChart ch = canonical_chart(m, Chart::CanonicalUB);
  PhaseState s = sample(m, 9);
  CHECK(involutivity_residual(m, ch, {1, 0}, {2, 0}, s) < 1e-8);
  // H_1 does not Poisson-commute with a coordinate.
  CHECK(std::abs(poisson_bracket_fd(m, ch, hamiltonian(m, {1, 0}, Chart::CanonicalUB), coordinate(0), s)) > 1e-3);
  Rng rng(10);
  CVector zero = CVector::Zero(ch.size);
  CVector vk = rng.vector(ch.size), vl = rng.vector(ch.size);
  CHECK(double_zero_residual(m, ch, {1, 0}, {2, 0}, s, vk, vl) < 1e-7);
  CHECK(double_zero_residual(m, ch, {1, 0}, {2, 0}, s, zero, zero) < 1e-7);
  CHECK(double_zero_residual(m, ch, {1, 0}, {2, 0}, s, flow_rhs(m, {1, 0}, s), flow_rhs(m, {2, 0}, s)) < 1e-7);
}

TEST_CASE("Sklyanin bracket for the twisted Toda Lax matrix") {
  Model m = build_model(default_spec(Family::PeriodicToda));
  CanonicalChart ch = canonical_chart(m, Chart::Periodic);
  PhaseState s = sample(m, 11);
  const cplx lambda(0.7, 0.4), mu(-0.5, 0.9);
  RKernel k = cyclotomic_kernel(m.spec.order);
  CHECK(sklyanin_residual(m, ch, lambda, mu, s, k) < 1e-8);
  CHECK(trace_pair_residual(m, ch, lambda, mu, s) < 1e-8);
  CHECK(trace_pair_residual(m, ch, lambda, mu, s, 2, 3) < 1e-7);
  // The untwisted kernel does not reproduce the bracket.
  CHECK(sklyanin_residual(m, ch, lambda, mu, s, rational_kernel(m.spec.order)) > 1e-3);
  CHECK_THROWS_AS(sklyanin_residual(m, ch, lambda, mu, s, cyclotomic_kernel(m.spec.order + 1)), Error);
}

TEST_CASE("flow cross-check against the M-matrix") {
  Model m = build_model(default_spec(Family::DST));
  PhaseState s = sample(m, 12);
  CHECK(flow_crosscheck(m, {1, 1}, s, default_probes(Family::DST)) < 1e-8);
  CHECK_THROWS_AS(flow_crosscheck(m, {1, 1}, s, {}), Error);
}

TEST_CASE("entries pass strictly below tolerance") {
  CHECK(make_entry("x", "m", {}, 0.5, 1.0, 0.0).pass);
  CHECK_FALSE(make_entry("x", "m", {}, 1.0, 1.0, 0.0).pass);
  CHECK_FALSE(make_entry("x", "m", {}, std::nan(""), 1.0, 0.0).pass);
  CHECK_FALSE(make_entry("x", "m", {}, INFINITY, 1.0, 0.0).pass);
  Report r;
  r.entries = {make_entry("a", "m", {}, 0.0, 1.0, 0.0), make_entry("b", "m", {}, 2.0, 1.0, 0.0)};
  CHECK_FALSE(r.all_pass());
  REQUIRE(r.failures().size() == 1);
  CHECK(r.failures()[0]->identity == "b");
}

TEST_CASE("report JSON layout") {
  Report r;
  r.entries = {make_entry("cybe", "kernel/rational", {{"n", "3"}}, 1e-14, 1e-10, 0.25),
               make_entry("closure", "dst", {}, std::nan(""), 1e-6, 0.0)};
  auto j = nlohmann::json::parse(report_json(r));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["identity"] == "cybe");
  CHECK(j[0]["model"] == "kernel/rational");
  CHECK(j[0]["params"]["n"] == "3");
  CHECK(j[0]["residual"].get<double>() == 1e-14);
  CHECK(j[0]["tolerance"].get<double>() == 1e-10);
  CHECK(j[0]["pass"] == true);
  CHECK(j[0]["seconds"].get<double>() == 0.25);
  CHECK(j[1]["residual"].is_null());
  CHECK(j[1]["pass"] == false);
}

TEST_CASE("suite selection") {
  SuiteConfig empty;
  CHECK(run_suite(empty).entries.empty());
  SuiteConfig c;
  c.identities = {"involutivity"};
  c.families = {Family::DST};
  c.tolerances["involutivity"] = 0.125;
  Report r = run_suite(c);
  REQUIRE_FALSE(r.entries.empty());
  for (const auto& e : r.entries) {
    CHECK(e.identity == "involutivity");
    CHECK(e.model == "dst");
    CHECK(e.tolerance == 0.125);
  }
  // An identity-level override reaches every sub-check of that identity.
  SuiteConfig k;
  k.identities = {"elliptic-kernel"};
  k.tolerances["elliptic-kernel"] = 0.5;
  Report rk = run_suite(k);
  REQUIRE(rk.entries.size() == 10);
  for (const auto& e : rk.entries) CHECK(e.tolerance == 0.5);
}

TEST_CASE("the default suite passes and its pass set is seed independent") {
  SuiteConfig c = default_suite_config();
  Report r1 = run_suite(c);
  for (const ReportEntry* e : r1.failures()) FAIL_CHECK(e->identity << " " << e->model << " " << e->residual);
  CHECK(r1.all_pass());
  std::set<std::string> seen;
  for (const auto& e : r1.entries) seen.insert(e.identity);
  CHECK(seen.size() == identity_families().size());
  c.seed = 2;
  Report r2 = run_suite(c);
  CHECK(pass_set(r1) == pass_set(r2));
  // Same seed, same residuals.
  c.seed = 1;
  Report r3 = run_suite(c);
  REQUIRE(r3.entries.size() == r1.entries.size());
  for (std::size_t i = 0; i < r1.entries.size(); ++i) CHECK(r1.entries[i].residual == r3.entries[i].residual);
}
