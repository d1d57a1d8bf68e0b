#include "models_internal.hpp"

namespace lagmf::detail {

namespace {

bool cyclotomic(const Model& m) { return m.spec.family == Family::CyclotomicGaudin; }

int matrix_dim(const Model& m) { return cyclotomic(m) ? m.spec.order : m.spec.dim; }

int pole_count(const Model& m) { return static_cast<int>(m.spec.poles.size()); }

struct Residues {
  std::vector<CMatrix> a;  // A_1..A_N
  CMatrix a00, a01;        // cyclotomic origin coefficients
};

Residues residues_of(const Model& m, const PhaseState& s) {
  const int n = matrix_dim(m), np = pole_count(m), sz = n * n;
  Residues r;
  for (int i = 0; i < np; ++i) {
    CMatrix phi = get_mat(s.x, i * sz, n);
    r.a.push_back(phi * m.spec.orbit_reps[i] * inverse(phi));
  }
  if (cyclotomic(m)) {
    CMatrix p0 = get_mat(s.x, np * sz, n), p1 = get_mat(s.x, (np + 1) * sz, n);
    CMatrix p0i = inverse(p0);
    r.a01 = p0 * m.spec.origin1 * p0i;
    r.a00 = p0 * m.spec.origin0 * p0i + commutator(p1 * p0i, r.a01);
  }
  return r;
}

// Rational: B_r = Σ_{s≠r} A_s/(ζ_r-ζ_s) + Ω, C_r = -Σ_{s≠r} A_s/(ζ_r-ζ_s)^2
CMatrix rational_b(const Model& m, const Residues& res, int r) {
  CMatrix b = m.spec.constant;
  for (int s = 0; s < pole_count(m); ++s)
    if (s != r) b += res.a[s] / (m.spec.poles[r] - m.spec.poles[s]);
  return b;
}

CMatrix rational_c(const Model& m, const Residues& res, int r) {
  CMatrix c = CMatrix::Zero(m.n, m.n);
  for (int s = 0; s < pole_count(m); ++s)
    if (s != r) {
      cplx d = m.spec.poles[r] - m.spec.poles[s];
      c -= res.a[s] / (d * d);
    }
  return c;
}

CMatrix rational_m(const Model& m, const Residues& res, const FlowLabel& f, cplx lambda) {
  const int r = f.r - 1;
  cplx x = lambda - m.spec.poles[r];
  const CMatrix& ar = res.a[r];
  if (f.p == 1) return -ar / x;
  CMatrix b = rational_b(m, res, r);
  return -(ar * ar / (x * x) + (ar * b + b * ar) / x);
}

// Cyclotomic pieces; T = order, poles ω^k ζ_r carry σ^k A_r / T.
CMatrix sig(const Model& m, const CMatrix& x, int k) { return automorphism_power(x, k, m.spec.order); }

// Regular part at ζ_r of L: L minus its pole A_r/(T(λ-ζ_r)), evaluated at ζ_r.
CMatrix cyclo_l_rest(const Model& m, const Residues& res, int r) {
  const int t = m.spec.order;
  const cplx z = m.spec.poles[r];
  CMatrix l = res.a00 / z + res.a01 / (z * z) + m.spec.constant;
  for (int s = 0; s < pole_count(m); ++s)
    for (int k = 0; k < t; ++k) {
      if (s == r && k == 0) continue;
      l += sig(m, res.a[s], k) / (static_cast<double>(t) * (z - root_of_unity(t, k) * m.spec.poles[s]));
    }
  return l;
}

CMatrix cyclo_m(const Model& m, const Residues& res, int r, cplx lambda, bool skip_own_pole) {
  const int t = m.spec.order;
  CMatrix out = CMatrix::Zero(t, t);
  if (r == 0) return -res.a01 / lambda;
  const cplx z = m.spec.poles[r - 1];
  for (int k = 0; k < t; ++k) {
    if (skip_own_pole && k == 0) continue;
    cplx w = root_of_unity(t, k) * z;
    out -= w * sig(m, res.a[r - 1], k) / (lambda - w);
  }
  return out / static_cast<double>(t);
}

}  // namespace

cplx cyclotomic_infinity(const Model& m, const PhaseState& s) {
  // L = A_∞ + B_1/λ + B_2/λ^2 + ... at infinity, so the 1/λ coefficient of
  // (λ/2) Tr L^2 is Tr(A_∞ B_2) + Tr(B_1^2)/2 and the residue is its negative.
  Residues res = residues_of(m, s);
  const int t = m.spec.order;
  CMatrix b1 = res.a00, b2 = res.a01;
  for (int r = 0; r < pole_count(m); ++r)
    for (int k = 0; k < t; ++k) {
      CMatrix a = sig(m, res.a[r], k) / static_cast<double>(t);
      b1 += a;
      b2 += root_of_unity(t, k) * m.spec.poles[r] * a;
    }
  return -(m.spec.constant * b2).trace() - 0.5 * (b1 * b1).trace();
}

std::vector<CMatrix> gaudin_residues(const Model& m, const PhaseState& s) {
  Residues r = residues_of(m, s);
  std::vector<CMatrix> out = r.a;
  if (cyclotomic(m)) {
    out.push_back(r.a00);
    out.push_back(r.a01);
  }
  return out;
}

CMatrix gaudin_lax(const Model& m, const PhaseState& s, cplx lambda) {
  Residues res = residues_of(m, s);
  const int np = pole_count(m);
  if (!cyclotomic(m)) {
    CMatrix l = m.spec.constant;
    for (int r = 0; r < np; ++r) {
      guard_pole(lambda, m.spec.poles[r]);
      l += res.a[r] / (lambda - m.spec.poles[r]);
    }
    return l;
  }
  const int t = m.spec.order;
  guard_pole(lambda, 0.0);
  CMatrix l = res.a00 / lambda + res.a01 / (lambda * lambda) + m.spec.constant;
  for (int r = 0; r < np; ++r)
    for (int k = 0; k < t; ++k) {
      cplx w = root_of_unity(t, k) * m.spec.poles[r];
      guard_pole(lambda, w);
      l += sig(m, res.a[r], k) / (static_cast<double>(t) * (lambda - w));
    }
  return l;
}

cplx gaudin_hamiltonian(const Model& m, const FlowLabel& f, const PhaseState& s) {
  if (!has_flow(m, f)) bad_flow(m, f);
  Residues res = residues_of(m, s);
  const int np = pole_count(m);
  if (!cyclotomic(m)) {
    const int r = f.r - 1;
    const CMatrix& ar = res.a[r];
    CMatrix b = rational_b(m, res, r);
    if (f.p == 1) return (ar * b).trace();
    CMatrix c = rational_c(m, res, r);
    return (ar * b * b).trace() + (ar * ar * c).trace();
  }
  const int t = m.spec.order;
  const double td = t;
  const CMatrix& ainf = m.spec.constant;
  if (f.r == 0) {
    cplx h = 0.5 * (res.a00 * res.a00).trace() + (res.a01 * ainf).trace();
    for (int r = 0; r < np; ++r) h -= (res.a01 * res.a[r]).trace() / m.spec.poles[r];
    return h;
  }
  const int r = f.r - 1;
  const cplx zr = m.spec.poles[r];
  const CMatrix& ar = res.a[r];
  cplx h = (res.a00 * ar).trace() + (res.a01 * ar).trace() / zr + zr * (ar * ainf).trace();
  for (int k = 0; k < t; ++k) h += (ar * sig(m, ar, k)).trace() / (2.0 * td);
  for (int s2 = 0; s2 < np; ++s2) {
    if (s2 == r) continue;
    for (int k = 0; k < t; ++k)
      h += (ar * sig(m, res.a[s2], k)).trace() * zr /
           (td * (zr - root_of_unity(t, k) * m.spec.poles[s2]));
  }
  return h;
}

CMatrix gaudin_m(const Model& m, const FlowLabel& f, const PhaseState& s, cplx lambda) {
  if (!has_flow(m, f)) bad_flow(m, f);
  Residues res = residues_of(m, s);
  if (!cyclotomic(m)) {
    guard_pole(lambda, m.spec.poles[f.r - 1]);
    return rational_m(m, res, f, lambda);
  }
  guard_pole(lambda, 0.0);
  if (f.r > 0)
    for (int k = 0; k < m.spec.order; ++k)
      guard_pole(lambda, root_of_unity(m.spec.order, k) * m.spec.poles[f.r - 1]);
  return cyclo_m(m, res, f.r, lambda, false);
}

std::vector<CMatrix> gaudin_group_flow(const Model& m, const FlowLabel& f, const PhaseState& s) {
  if (!has_flow(m, f)) bad_flow(m, f);
  Residues res = residues_of(m, s);
  const int np = pole_count(m);
  std::vector<CMatrix> v;
  if (!cyclotomic(m)) {
    const int r = f.r - 1;
    for (int q = 0; q < np; ++q) {
      if (q != r) {
        v.push_back(rational_m(m, res, f, m.spec.poles[q]));
        continue;
      }
      CMatrix b = rational_b(m, res, r);
      if (f.p == 1) {
        v.push_back(b);
      } else {
        CMatrix c = rational_c(m, res, r);
        v.push_back(res.a[r] * c + c * res.a[r] + b * b);
      }
    }
    return v;
  }
  const int t = m.spec.order;
  if (f.r == 0) {
    // M = -A_0^(1)/λ; at the origin use M + λL = A_0^(0) + λ G(λ)
    for (int q = 0; q < np; ++q) v.push_back(-res.a01 / m.spec.poles[q]);
    CMatrix g0 = m.spec.constant;
    for (int q = 0; q < np; ++q)
      for (int k = 0; k < t; ++k)
        g0 -= sig(m, res.a[q], k) / (static_cast<double>(t) * root_of_unity(t, k) * m.spec.poles[q]);
    v.push_back(res.a00);
    v.push_back(g0);
    return v;
  }
  const int r = f.r - 1;
  const cplx zr = m.spec.poles[r];
  for (int q = 0; q < np; ++q) {
    if (q != r) {
      v.push_back(cyclo_m(m, res, f.r, m.spec.poles[q], false));
    } else {
      // regular part of M + λL at ζ_r
      v.push_back(cyclo_m(m, res, f.r, zr, true) + zr * cyclo_l_rest(m, res, r));
    }
  }
  CMatrix v0 = CMatrix::Zero(t, t), v1 = CMatrix::Zero(t, t);
  for (int k = 0; k < t; ++k) {
    CMatrix sk = sig(m, res.a[r], k);
    v0 += sk;
    v1 += sk / (root_of_unity(t, k) * zr);
  }
  v.push_back(v0 / static_cast<double>(t));
  v.push_back(v1 / static_cast<double>(t));
  return v;
}

std::vector<CMatrix> gaudin_residue_flow(const Model& m, const FlowLabel& f, const PhaseState& s) {
  if (cyclotomic(m)) throw Error("residue_flow: componentwise residue equations exist for the rational model only");
  if (!has_flow(m, f)) bad_flow(m, f);
  Residues res = residues_of(m, s);
  const int np = pole_count(m), r = f.r - 1;
  const auto& zeta = m.spec.poles;
  const CMatrix& ar = res.a[r];
  const CMatrix& om = m.spec.constant;
  std::vector<CMatrix> out(np, CMatrix::Zero(m.n, m.n));
  if (f.p == 1) {
    for (int q = 0; q < np; ++q) {
      if (q == r) continue;
      CMatrix cm = commutator(ar, res.a[q]) / (zeta[r] - zeta[q]);
      out[q] = cm;
      out[r] -= cm;
    }
    out[r] -= commutator(ar, om);
    return out;
  }
  CMatrix ar2 = ar * ar;
  for (int q = 0; q < np; ++q) {
    if (q == r) continue;
    cplx d = zeta[r] - zeta[q];
    CMatrix rhs = -commutator(ar2, res.a[q]) / (d * d) + commutator(ar * om + om * ar, res.a[q]) / d;
    for (int q2 = 0; q2 < np; ++q2) {
      if (q2 == r) continue;
      rhs += commutator(ar * res.a[q2] + res.a[q2] * ar, res.a[q]) / (d * (zeta[r] - zeta[q2]));
    }
    out[q] = rhs;
  }
  CMatrix rr = -commutator(ar, om * om);
  for (int q = 0; q < np; ++q) {
    if (q == r) continue;
    cplx d = zeta[r] - zeta[q];
    rr += commutator(ar2, res.a[q]) / (d * d);
    rr -= commutator(ar, res.a[q] * om + om * res.a[q]) / d;
    for (int q2 = 0; q2 < np; ++q2) {
      if (q2 == r) continue;
      rr -= commutator(ar, res.a[q] * res.a[q2]) / (d * (zeta[r] - zeta[q2]));
    }
  }
  out[r] = rr;
  return out;
}

cplx gaudin_kinetic(const Model& m, const PhaseState& s, const CVector& v) {
  const int n = matrix_dim(m), np = pole_count(m), sz = n * n;
  cplx k = 0.0;
  if (!cyclotomic(m)) {
    for (int i = 0; i < np; ++i) {
      CMatrix phi = get_mat(s.x, i * sz, n), dphi = get_mat(v, i * sz, n);
      k += (m.spec.orbit_reps[i] * inverse(phi) * dphi).trace();
    }
    return k;
  }
  Residues res = residues_of(m, s);
  for (int i = 0; i < np; ++i) {
    CMatrix phi = get_mat(s.x, i * sz, n), dphi = get_mat(v, i * sz, n);
    k += (res.a[i] * dphi * inverse(phi)).trace();
  }
  CMatrix p0 = get_mat(s.x, np * sz, n), dp0 = get_mat(v, np * sz, n);
  k += (res.a00 * dp0 * inverse(p0)).trace();
  return k;
}

}  // namespace lagmf::detail
