#pragma once

#include "lagmf/matrixcore.hpp"

#include <functional>

namespace lagmf {

enum class SplittingFamily { AKS, Cartan };

// sl_n = g_+ ∔ g_-, with R = P_+ - P_- and X = R_+ X - R_- X.
struct Splitting {
  int n = 0;
  SplittingFamily family = SplittingFamily::AKS;

  // AKS: g_+ skew-symmetric, g_- upper triangular traceless.
  // Cartan: P_+/P_- strictly upper/lower, P_0 diagonal.
  CMatrix project_plus(const CMatrix& x) const;
  CMatrix project_minus(const CMatrix& x) const;
  CMatrix project_zero(const CMatrix& x) const;  // Cartan only; zero for AKS
  CMatrix r_plus(const CMatrix& x) const;
  CMatrix r_minus(const CMatrix& x) const;
  CMatrix r(const CMatrix& x) const;
};

Splitting make_splitting(SplittingFamily family, int n);

struct SplitPair {
  CMatrix plus;   // R_+ X
  CMatrix minus;  // R_- X
};

SplitPair split_apply(const CMatrix& x, const Splitting& s);

CMatrix r_bracket(const CMatrix& x, const CMatrix& y, const Splitting& s);

using LinearMap = std::function<CMatrix(const CMatrix&)>;

double mcybe_residual(const CMatrix& x, const CMatrix& y, const LinearMap& r);
double mcybe_residual(const CMatrix& x, const CMatrix& y, const Splitting& s);

// Gradient of Tr(L^{k+1})/(k+1) under the trace pairing.
CMatrix invariant_gradient(const CMatrix& l, int k);

struct LaxSign {
  bool use_plus = true;  // R_+ or R_-
  cplx scale = 1.0;      // H_k = scale * Tr(L^{k+1}) / (k+1)
};

// [R_± ∇H_k(L), L]
CMatrix dialgebra_lax_rhs(const CMatrix& l, int k, const LaxSign& sign, const Splitting& s);

enum class KernelFamily { Rational, Cyclotomic };

// r_12(λ, μ) on gl_n ⊗ gl_n. Cyclotomic uses σ(E_ij) = ω^{j-i} E_ij, n = T.
struct RKernel {
  int n = 0;
  KernelFamily family = KernelFamily::Rational;
  int order = 1;  // T
  cplx omega = 1.0;

  TensorMatrix operator()(cplx lambda, cplx mu) const;
  // r_21(μ, λ) = P r_12(μ, λ) P
  TensorMatrix swapped(cplx mu, cplx lambda) const;
};

RKernel rational_kernel(int n);
RKernel cyclotomic_kernel(int t);

// Casimir C_12 = Σ E_ij ⊗ E_ji.
TensorMatrix casimir(int n);

// σ^k on gl_T for σ(E_ij) = ω^{j-i} E_ij.
CMatrix automorphism_power(const CMatrix& x, int k, int t);

// Spectral points are ω-equivalent when one is a T-th root-of-unity multiple
// of the other.
bool omega_equivalent(cplx a, cplx b, int t, double tol = 1e-8);

double cybe_residual(const RKernel& k, cplx lambda, cplx mu, cplx nu);

// z1^{T-1-[l]} z2^{[l]}/(z1^T - z2^T) - (1/T) Σ_k ω^{-kl}/(z1 - ω^k z2), [l] = l mod T.
cplx omega_identity_residual(cplx z1, cplx z2, int l, int t);

}  // namespace lagmf
