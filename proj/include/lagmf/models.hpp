#pragma once

#include "lagmf/dialgebra.hpp"
#include "lagmf/elliptic.hpp"
#include "lagmf/matrixcore.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lagmf {

enum class Family {
  OpenTodaFlaschka,
  OpenTodaSkew,
  PeriodicToda,
  DST,
  CoupledTodaDST,
  RationalGaudin,
  CyclotomicGaudin,
  EllipticGaudin,
};

enum class Chart {
  Flaschka,        // (a_1..a_{N+1}, b_1..b_N)
  CanonicalUB,     // (u_1..u_N, b_1..b_N)
  SkewWZ,          // (w_1..w_N, z_1..z_N)
  Periodic,        // (q^1..q^T, p_1..p_T)
  DSTChart,        // (x^1..x^T, X_1..X_T)
  Coupled,         // periodic ⊕ DST
  GaudinOrbit,     // φ_1..φ_N, each n×n row-major
  CyclotomicOrbit, // φ_1..φ_N, φ_0^(0), φ_0^(1), each T×T row-major
  Elliptic,        // (q^μ, p_μ, φ_1..φ_N row-major)
};

std::string family_name(Family f);
std::string chart_name(Chart c);
std::optional<Family> parse_family(const std::string& s);

struct ModelSpec {
  Family family = Family::OpenTodaFlaschka;
  Chart chart = Chart::Flaschka;  // open Toda: Flaschka or CanonicalUB
  int sites = 2;                  // open Toda N (algebra sl_{N+1})
  int order = 2;                  // cyclotomic order T
  int dim = 2;                    // gl_n for rational / elliptic Gaudin
  int levels = 1;                 // periodic Toda: flows (p,0), p = 1..levels (levels <= 2)
  std::vector<cplx> poles;        // ζ_r
  std::vector<CMatrix> orbit_reps;  // Λ_r
  CMatrix constant;               // Ω (rational), Λ_∞ (cyclotomic)
  CMatrix origin0;                // Λ_0^(0) (cyclotomic)
  CMatrix origin1;                // Λ_0^(1) (cyclotomic)
  std::vector<cplx> dst_c;        // c_i
  double beta = 0.0;
  cplx tau{0.0, 1.0};
  int trunc = 60;
  std::vector<cplx> marked_points;  // 𝗉_α
  std::vector<cplx> eval_points;    // 𝗊_i
};

struct FlowLabel {
  int p = 1;
  int r = 0;
  bool operator==(const FlowLabel&) const = default;
};

struct PhaseState {
  Chart chart = Chart::Flaschka;
  CVector x;
};

struct Model {
  ModelSpec spec;
  std::vector<FlowLabel> flows;
  int n = 0;  // Lax matrix dimension
  bool spectral = false;
  std::optional<Splitting> splitting;
  std::optional<EllipticLattice> lattice;
  std::vector<CMatrix> cartan;  // H_μ (elliptic)
  CMatrix cartan_metric;        // Tr(H_μ H_ν)
};

Model build_model(const ModelSpec& spec);

std::string flow_name(const Model& m, const FlowLabel& f);
// "1", "2" for single-index families, "p,r" otherwise.
FlowLabel parse_flow(const Model& m, const std::string& s);
bool has_flow(const Model& m, const FlowLabel& f);

int state_size(const Model& m, Chart c);
std::vector<std::string> coordinate_names(const Model& m, Chart c);

CMatrix lax_eval(const Model& m, const PhaseState& s, std::optional<cplx> lambda = std::nullopt);
cplx hamiltonian_eval(const Model& m, const FlowLabel& f, const PhaseState& s);
CVector flow_rhs(const Model& m, const FlowLabel& f, const PhaseState& s);
CMatrix m_matrix_eval(const Model& m, const FlowLabel& f, const PhaseState& s,
                      std::optional<cplx> lambda = std::nullopt);

// V_s with ∂φ_s = V_s φ_s (orbit charts).
std::vector<CMatrix> group_flow_rhs(const Model& m, const FlowLabel& f, const PhaseState& s);
CVector group_tangent_to_coordinates(const Model& m, const PhaseState& s,
                                     const std::vector<CMatrix>& v);

// Closed-form componentwise equations on the residues A_s (rational Gaudin).
std::vector<CMatrix> residue_flow(const Model& m, const FlowLabel& f, const PhaseState& s);

cplx kinetic_term(const Model& m, const PhaseState& s, const CVector& velocity);
cplx lagrangian_coeff(const Model& m, const FlowLabel& f, const PhaseState& s,
                      const CVector& velocity);

// Largest violation of the chart's invariants (0 when none apply).
double invariant_violation(const Model& m, const PhaseState& s);

// Orbit residues: rational A_r; cyclotomic A_1..A_N, A_0^(0), A_0^(1);
// elliptic L_α.
std::vector<CMatrix> residues(const Model& m, const PhaseState& s);

// Cyclotomic H_{1,∞} = Res_{λ=∞} (λ/2) Tr L(λ)^2 dλ. It generates no flow of
// its own (it is minus the sum of the finite ones) and is exposed for the
// residue-theorem check.
cplx cyclotomic_infinity_hamiltonian(const Model& m, const PhaseState& s);

// Open Toda chart maps into Flaschka coordinates, with exact pushforward of
// tangent vectors.
PhaseState to_flaschka(const Model& m, const PhaseState& s);
CVector pushforward_to_flaschka(const Model& m, const PhaseState& s, const CVector& v);

// Elliptic reconstruction of π^μ from p_μ.
CVector elliptic_pi(const Model& m, const PhaseState& s);

// Elliptic Hamiltonian as a function of (q, p, {L_α}).
cplx elliptic_hamiltonian(const Model& m, int point, const CVector& q, const CVector& p,
                          const std::vector<CMatrix>& ls);
CMatrix elliptic_lax(const Model& m, cplx z, const CVector& q, const CVector& p,
                     const std::vector<CMatrix>& ls);

// Exact partial derivatives of the elliptic Hamiltonian; dl[α] is the
// gradient with respect to L_α under the trace pairing.
struct EllipticGradient {
  CVector dq, dp;
  std::vector<CMatrix> dl;
};
EllipticGradient elliptic_gradient(const Model& m, int point, const CVector& q, const CVector& p,
                                   const std::vector<CMatrix>& ls);

// Deterministic sample states satisfying the chart invariants.
PhaseState random_state(const Model& m, Rng& rng, double scale = 0.5);

// Default specs used by the suite, CLI and tests.
ModelSpec default_spec(Family f);

}  // namespace lagmf
