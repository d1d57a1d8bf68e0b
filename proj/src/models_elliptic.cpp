#include "models_internal.hpp"

namespace lagmf {

namespace {

int rank_of(const Model& m) { return m.spec.dim - 1; }

// Cartan components in the basis H_μ = E_μμ - E_{μ+1,μ+1}: c^μ = Σ_{i<=μ} X_ii.
CVector cartan_components(const CMatrix& x, int rk) {
  CVector c(rk);
  cplx acc = 0.0;
  for (int mu = 0; mu < rk; ++mu) {
    acc += x(mu, mu);
    c[mu] = acc;
  }
  return c;
}

void unpack(const Model& m, const PhaseState& s, CVector& q, CVector& p, std::vector<CMatrix>& ls) {
  const int rk = rank_of(m), n = m.spec.dim;
  q = s.x.segment(0, rk);
  p = s.x.segment(rk, rk);
  ls.clear();
  for (std::size_t a = 0; a < m.spec.marked_points.size(); ++a) {
    CMatrix phi = detail::get_mat(s.x, 2 * rk + static_cast<int>(a) * n * n, n);
    ls.push_back(-phi * m.spec.orbit_reps[a] * detail::inverse(phi));
  }
}

CVector pi_of(const Model& m, const CVector& p, const std::vector<CMatrix>& ls) {
  const int rk = rank_of(m);
  CVector pi = m.cartan_metric.fullPivLu().solve(p);
  for (std::size_t a = 0; a < ls.size(); ++a)
    pi += cartan_components(ls[a], rk) * weierstrass(m.spec.marked_points[a], *m.lattice).zeta;
  return pi;
}

// Sign in V_α = kKksSign ∇_{L_α} H; with the kinetic term Tr(Λ φ^{-1} dφ) and
// L_α = -φ Λ φ^{-1} the Euler-Lagrange equations give L̇_α = -[∇H, L_α].
constexpr double kKksSign = -1.0;

// L(z) together with its linear dependence on the residues: for i != j,
// L_ij = Σ_α (L_α)_ij coef_α(i,j); the Cartan part of L_α enters through
// weight_α = ζ(z - z_α) + ζ(z_α); dlog_α(i,j) = ∂ log coef_α(i,j) / ∂ϱ.
struct LaxParts {
  CMatrix l;
  std::vector<CMatrix> coef;
  std::vector<cplx> weight;
  std::vector<CMatrix> dlog;
};

LaxParts lax_parts(const Model& m, cplx z, const CVector& q, const CVector& p, const std::vector<CMatrix>& ls) {
  const int rk = rank_of(m), n = m.spec.dim;
  const EllipticLattice& lat = *m.lattice;
  LaxParts out;
  CVector cart = m.cartan_metric.fullPivLu().solve(p);
  const cplx zz = weierstrass(z, lat).zeta;
  // Root part: residue (L_α)^ϱ at z_α, quasi-periodicity cancelled by
  // e^{-ϱ(Q) ζ(z)}, normalised by e^{ϱ(Q) ζ(z_α)}.
  std::vector<cplx> qd(n, 0.0);  // diagonal of Q = q^μ H_μ
  for (int mu = 0; mu < rk; ++mu) {
    qd[mu] += q[mu];
    qd[mu + 1] -= q[mu];
  }
  out.l = CMatrix::Zero(n, n);
  for (std::size_t a = 0; a < ls.size(); ++a) {
    const cplx za = m.spec.marked_points[a];
    WeierstrassValues wa = weierstrass(z - za, lat);
    const cplx zeta_a = weierstrass(za, lat).zeta;
    const cplx w = wa.zeta + zeta_a;
    cart += cartan_components(ls[a], rk) * w;
    CMatrix coef = CMatrix::Zero(n, n), dlog = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const cplx rho = qd[i] - qd[j];
        WeierstrassValues sr = weierstrass(rho, lat), su = weierstrass(rho + z - za, lat);
        coef(i, j) = su.sigma / (sr.sigma * wa.sigma) * std::exp(-rho * (zz - zeta_a));
        dlog(i, j) = su.zeta - sr.zeta - (zz - zeta_a);
        out.l(i, j) += ls[a](i, j) * coef(i, j);
      }
    out.coef.push_back(coef);
    out.weight.push_back(w);
    out.dlog.push_back(dlog);
  }
  for (int mu = 0; mu < rk; ++mu) {
    out.l(mu, mu) += cart[mu];
    out.l(mu + 1, mu + 1) -= cart[mu];
  }
  return out;
}

}  // namespace

CMatrix elliptic_lax(const Model& m, cplx z, const CVector& q, const CVector& p,
                     const std::vector<CMatrix>& ls) {
  return lax_parts(m, z, q, p, ls).l;
}

cplx elliptic_hamiltonian(const Model& m, int point, const CVector& q, const CVector& p,
                          const std::vector<CMatrix>& ls) {
  CMatrix l = elliptic_lax(m, m.spec.eval_points.at(point), q, p, ls);
  return 0.5 * (l * l).trace();
}

EllipticGradient elliptic_gradient(const Model& m, int point, const CVector& q, const CVector& p,
                                    const std::vector<CMatrix>& ls) {
  const int rk = rank_of(m), n = m.spec.dim;
  LaxParts lp = lax_parts(m, m.spec.eval_points.at(point), q, p, ls);
  const CMatrix& l = lp.l;
  EllipticGradient g;
  g.dq = CVector::Zero(rk);
  g.dp = CVector::Zero(rk);
  // H = Tr(L^2)/2, so dH = Tr(L dL).
  CVector trh(rk);
  for (int nu = 0; nu < rk; ++nu) trh[nu] = l(nu, nu) - l(nu + 1, nu + 1);
  g.dp = m.cartan_metric.fullPivLu().solve(trh);  // the metric is symmetric
  for (std::size_t a = 0; a < ls.size(); ++a) {
    CMatrix ga = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) ga(j, i) = l(j, i) * lp.coef[a](i, j);
    // c^μ = Σ_{k<=μ} X_kk, so ∂/∂X_kk picks up Σ_{μ>=k} H_μ = E_kk - E_{n-1,n-1}.
    for (int k = 0; k + 1 < n; ++k) ga(k, k) = lp.weight[a] * (l(k, k) - l(n - 1, n - 1));
    g.dl.push_back(ga);
  }
  for (int mu = 0; mu < rk; ++mu) {
    cplx acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double drho = (i == mu) - (i == mu + 1) - (j == mu) + (j == mu + 1);
        if (drho == 0.0) continue;
        cplx dlij = 0.0;
        for (std::size_t a = 0; a < ls.size(); ++a) dlij += ls[a](i, j) * lp.coef[a](i, j) * lp.dlog[a](i, j);
        acc += l(j, i) * dlij * drho;
      }
    g.dq[mu] = acc;
  }
  return g;
}

CVector elliptic_pi(const Model& m, const PhaseState& s) {
  CVector q, p;
  std::vector<CMatrix> ls;
  unpack(m, s, q, p, ls);
  return pi_of(m, p, ls);
}

namespace detail {

std::vector<CMatrix> elliptic_residues(const Model& m, const PhaseState& s) {
  CVector q, p;
  std::vector<CMatrix> ls;
  unpack(m, s, q, p, ls);
  return ls;
}

CVector elliptic_flow(const Model& m, const FlowLabel& f, const PhaseState& s) {
  if (!has_flow(m, f)) bad_flow(m, f);
  const int rk = rank_of(m), n = m.spec.dim;
  CVector q, p;
  std::vector<CMatrix> ls;
  unpack(m, s, q, p, ls);
  EllipticGradient g = elliptic_gradient(m, f.r - 1, q, p, ls);
  CVector out = CVector::Zero(s.x.size());
  out.segment(0, rk) = g.dp;
  out.segment(rk, rk) = -g.dq;
  std::vector<CMatrix> vs;
  for (CMatrix ga : g.dl) {
    ga -= (ga.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);
    vs.push_back(kKksSign * ga);
  }
  // Gauge fixing by the diagonal subgroup (Cartan plus centre, neither of
  // which moves any L_α on the constraint surface): the diagonal of φ_1 is
  // frozen, a slice on which the group acts freely, so the flows commute in
  // coordinates and not only modulo gauge.
  const CMatrix phi1 = get_mat(s.x, 2 * rk, n);
  const CMatrix v1 = vs[0] * phi1;
  CMatrix gauge = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(phi1(i, i)) < 1e-8) throw Error("elliptic gauge slice: vanishing diagonal entry of φ_1");
    gauge(i, i) = -v1(i, i) / phi1(i, i);
  }
  for (std::size_t a = 0; a < ls.size(); ++a) {
    const int off = 2 * rk + static_cast<int>(a) * n * n;
    put_mat(out, off, CMatrix((vs[a] + gauge) * get_mat(s.x, off, n)));
  }
  return out;
}

cplx elliptic_kinetic(const Model& m, const PhaseState& s, const CVector& v) {
  const int rk = rank_of(m), n = m.spec.dim;
  cplx k = 0.0;
  for (int mu = 0; mu < rk; ++mu) k += s.x[rk + mu] * v[mu];
  for (std::size_t a = 0; a < m.spec.marked_points.size(); ++a) {
    const int off = 2 * rk + static_cast<int>(a) * n * n;
    CMatrix phi = get_mat(s.x, off, n), dphi = get_mat(v, off, n);
    k += (m.spec.orbit_reps[a] * inverse(phi) * dphi).trace();
  }
  return k;
}

}  // namespace detail

}  // namespace lagmf
