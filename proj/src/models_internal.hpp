#pragma once

#include "lagmf/models.hpp"

#include <cmath>
#include <numbers>

namespace lagmf::detail {

inline cplx root_of_unity(int t, int k) {
  double a = 2.0 * std::numbers::pi * static_cast<double>(((k % t) + t) % t) / static_cast<double>(t);
  return {std::cos(a), std::sin(a)};
}

inline int md(int i, int t) { return ((i % t) + t) % t; }

inline CMatrix get_mat(const CVector& x, int offset, int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = x[offset + i * n + j];
  return m;
}

inline void put_mat(CVector& x, int offset, const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x[offset + i * n + j] = m(i, j);
}

inline CMatrix inverse(const CMatrix& m) {
  Eigen::FullPivLU<CMatrix> lu(m);
  if (!lu.isInvertible()) throw Error("singular group element");
  return lu.inverse();
}

inline void require_lambda(const std::optional<cplx>& lambda) {
  if (!lambda) throw Error("lax_eval: spectral parameter required");
}

inline void guard_pole(cplx lambda, cplx pole) {
  if (std::abs(lambda - pole) <= 1e-8) throw Error("spectral parameter at a pole");
}

[[noreturn]] inline void bad_flow(const Model& m, const FlowLabel& f) {
  throw Error("invalid flow label (" + std::to_string(f.p) + "," + std::to_string(f.r) +
              ") for " + family_name(m.spec.family));
}

// Open Toda (Flaschka, canonical-ub, skew-wz)
CMatrix toda_open_lax(const Model& m, const PhaseState& s);
cplx toda_open_hamiltonian(const Model& m, const FlowLabel& f, const PhaseState& s);
CVector toda_open_flow(const Model& m, const FlowLabel& f, const PhaseState& s);
CMatrix toda_open_m(const Model& m, const FlowLabel& f, const PhaseState& s);
cplx toda_open_kinetic(const Model& m, const PhaseState& s, const CVector& v);

// Periodic Toda, DST, coupled
CMatrix cyclic_lax(const Model& m, const PhaseState& s, cplx lambda);
cplx cyclic_hamiltonian(const Model& m, const FlowLabel& f, const PhaseState& s);
CVector cyclic_flow(const Model& m, const FlowLabel& f, const PhaseState& s);
CMatrix cyclic_m(const Model& m, const FlowLabel& f, const PhaseState& s, cplx lambda);
cplx cyclic_kinetic(const Model& m, const PhaseState& s, const CVector& v);

// Rational and cyclotomic Gaudin
CMatrix gaudin_lax(const Model& m, const PhaseState& s, cplx lambda);
cplx gaudin_hamiltonian(const Model& m, const FlowLabel& f, const PhaseState& s);
std::vector<CMatrix> gaudin_group_flow(const Model& m, const FlowLabel& f, const PhaseState& s);
CMatrix gaudin_m(const Model& m, const FlowLabel& f, const PhaseState& s, cplx lambda);
std::vector<CMatrix> gaudin_residue_flow(const Model& m, const FlowLabel& f, const PhaseState& s);
cplx gaudin_kinetic(const Model& m, const PhaseState& s, const CVector& v);
std::vector<CMatrix> gaudin_residues(const Model& m, const PhaseState& s);
cplx cyclotomic_infinity(const Model& m, const PhaseState& s);

// Elliptic Gaudin
std::vector<CMatrix> elliptic_residues(const Model& m, const PhaseState& s);
CVector elliptic_flow(const Model& m, const FlowLabel& f, const PhaseState& s);
cplx elliptic_kinetic(const Model& m, const PhaseState& s, const CVector& v);

}  // namespace lagmf::detail
