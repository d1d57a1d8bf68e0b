#pragma once

#include "lagmf/models.hpp"
#include "lagmf/multitime.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lagmf {

// {ξ_first, ξ_second} = weight; all other coordinate brackets vanish.
struct BracketPair {
  int first = 0;
  int second = 0;
  cplx weight = 1.0;
};

struct CanonicalChart {
  Chart chart = Chart::CanonicalUB;
  int size = 0;
  std::vector<BracketPair> pairs;
  // Elliptic: orbit blocks carry the Kirillov-Kostant bracket of each L_α.
  bool kks = false;

  // P_mn = {ξ_m, ξ_n}.
  CMatrix poisson_matrix() const;
  // W with Euler-Lagrange form W_mn v^m = ∂_n H; P = -W^{-1}.
  CMatrix symplectic_matrix() const;
};

// Charts are derived from each model's kinetic term; Gaudin orbit charts have
// no Darboux coordinates and throw.
CanonicalChart canonical_chart(const Model& m, Chart c);

// Σ_m,n P_mn ∂f/∂ξ_m ∂g/∂ξ_n by central differences, plus the orbit blocks
// Tr(L_α[∇_α f, ∇_α g]) (with the flow sign) for the elliptic chart.
cplx poisson_bracket_fd(const Model& m, const CanonicalChart& chart, const ScalarFn& f, const ScalarFn& g,
                        const PhaseState& s, double h = kFdStep);

double involutivity_residual(const Model& m, const CanonicalChart& chart, const FlowLabel& i, const FlowLabel& j,
                             const PhaseState& s, double h = kFdStep);

// |∂_k ℒ_l - ∂_l ℒ_k + Υ_k P Υ_l - {H_k, H_l}| with Υ_k,n = W_mn v_k^m - ∂_n H_k
// and ∂_k ℒ_l the derivative along v_k at fixed v_l.
double double_zero_residual(const Model& m, const CanonicalChart& chart, const FlowLabel& k, const FlowLabel& l,
                            const PhaseState& s, const CVector& vk, const CVector& vl, double h = kFdStep);

// norm({L_1(λ), L_2(μ)} - [r_12(λ,μ), L_1(λ)] + [r_21(μ,λ), L_2(μ)]).
double sklyanin_residual(const Model& m, const CanonicalChart& chart, cplx lambda, cplx mu, const PhaseState& s,
                         const RKernel& kernel, double h = kFdStep);

// Scalar trace-pair version: |{Tr L(λ)^a, Tr L(μ)^b}|, usable on any chart
// with a bracket (including the KKS blocks).
double trace_pair_residual(const Model& m, const CanonicalChart& chart, cplx lambda, cplx mu, const PhaseState& s,
                           int a = 1, int b = 1, double h = kFdStep);

// max over probes of norm(dL/dt along flow_rhs - [M(λ), L(λ)]).
double flow_crosscheck(const Model& m, const FlowLabel& f, const PhaseState& s, const std::vector<cplx>& probes,
                       double h = kFdStep);

struct ReportEntry {
  std::string identity;
  std::string model;
  std::vector<std::pair<std::string, std::string>> params;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

struct Report {
  std::vector<ReportEntry> entries;
  bool all_pass() const;
  std::vector<const ReportEntry*> failures() const;
};

// Entry with pass = residual < tolerance (non-finite residuals fail).
ReportEntry make_entry(std::string identity, std::string model,
                       std::vector<std::pair<std::string, std::string>> params, double residual, double tolerance,
                       double seconds);

std::string report_json(const Report& r, int indent = 2);

// Identity families: mcybe, cybe, omega-identity, lax-crosscheck, chart-maps,
// isospectral, conservation, constraints, commutativity, rk4-order, closure,
// involutivity, double-zero, sklyanin, elliptic-kernel, residue-sum,
// residue-flow.
std::vector<std::string> identity_families();

// λ probes per family, chosen off the poles and their Γ-images.
std::vector<cplx> default_probes(Family f);

// Radius of the suite's random states for a family.
double sample_scale(Family f);

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::set<std::string> identities;     // empty: nothing runs
  std::set<Family> families;            // empty: all families
  std::optional<int> sites;             // open Toda N override
  std::optional<int> order;             // cyclotomic / periodic T override
  int samples = 0;                      // random samples per entry; 0: per-identity defaults
  std::map<std::string, double> tolerances;  // identity -> tolerance override
  double fd_step = kFdStep;             // central-difference step of the bracket identities
};

SuiteConfig default_suite_config();

Report run_suite(const SuiteConfig& cfg);

}  // namespace lagmf
