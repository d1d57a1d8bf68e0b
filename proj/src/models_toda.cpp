#include "models_internal.hpp"

namespace lagmf::detail {

namespace {

struct Flaschka {
  std::vector<cplx> a;  // a[1..N+1], a[0] = a[N+2] = 0
  std::vector<cplx> b;  // b[1..N], b[0] = b[N+1] = 0
};

Flaschka flaschka_of(const Model& m, const PhaseState& s) {
  const int n = m.spec.sites;
  Flaschka f{std::vector<cplx>(n + 3, 0.0), std::vector<cplx>(n + 2, 0.0)};
  const CVector& x = s.x;
  switch (s.chart) {
    case Chart::Flaschka:
      for (int j = 1; j <= n + 1; ++j) f.a[j] = x[j - 1];
      for (int j = 1; j <= n; ++j) f.b[j] = x[n + j];
      break;
    case Chart::CanonicalUB: {
      for (int j = 1; j <= n; ++j) f.b[j] = x[n + j - 1];
      std::vector<cplx> bu(n + 2, 0.0);
      for (int j = 1; j <= n; ++j) bu[j] = f.b[j] * x[j - 1];
      for (int j = 1; j <= n + 1; ++j) f.a[j] = bu[j] - bu[j - 1];
      break;
    }
    case Chart::SkewWZ: {
      std::vector<cplx> e(n + 2, 0.0);
      for (int j = 1; j <= n; ++j) {
        e[j] = x[j - 1] * x[n + j - 1];
        f.b[j] = 0.5 * x[n + j - 1];
      }
      for (int j = 1; j <= n + 1; ++j) f.a[j] = 0.5 * (e[j] - e[j - 1]);
      break;
    }
    default:
      throw Error("open Toda: unsupported chart " + chart_name(s.chart));
  }
  return f;
}

CMatrix tridiagonal(const Flaschka& f, int n) {
  CMatrix l = CMatrix::Zero(n + 1, n + 1);
  for (int j = 1; j <= n + 1; ++j) l(j - 1, j - 1) = f.a[j];
  for (int j = 1; j <= n; ++j) {
    l(j - 1, j) = f.b[j];
    l(j, j - 1) = f.b[j];
  }
  return l;
}

bool skew_family(const Model& m) { return m.spec.family == Family::OpenTodaSkew; }

}  // namespace

CMatrix toda_open_lax(const Model& m, const PhaseState& s) {
  return tridiagonal(flaschka_of(m, s), m.spec.sites);
}

cplx toda_open_hamiltonian(const Model& m, const FlowLabel& f, const PhaseState& s) {
  CMatrix l = toda_open_lax(m, s);
  std::vector<cplx> tr = power_traces(l, 3);
  const bool skew = skew_family(m);
  if (f.p == 1) return skew ? tr[1] : -0.5 * tr[1];
  if (f.p == 2) return skew ? (2.0 / 3.0) * tr[2] : -tr[2] / 3.0;
  bad_flow(m, f);
}

CVector toda_open_flow(const Model& m, const FlowLabel& f, const PhaseState& s) {
  const int n = m.spec.sites;
  if (f.p != 1 && f.p != 2) bad_flow(m, f);
  const CVector& x = s.x;
  CVector out = CVector::Zero(x.size());
  if (s.chart == Chart::Flaschka) {
    Flaschka fl = flaschka_of(m, s);
    const auto& a = fl.a;
    const auto& b = fl.b;
    for (int j = 1; j <= n + 1; ++j) {
      // b_0 = b_{N+1} = 0 covers the boundary equations
      if (f.p == 1)
        out[j - 1] = 2.0 * (b[j] * b[j] - b[j - 1] * b[j - 1]);
      else
        out[j - 1] = 2.0 * b[j] * b[j] * (a[j] + a[j + 1]) -
                     2.0 * b[j - 1] * b[j - 1] * (a[j - 1] + a[j]);
    }
    for (int j = 1; j <= n; ++j) {
      if (f.p == 1)
        out[n + j] = b[j] * (a[j + 1] - a[j]);
      else
        out[n + j] = b[j] * (a[j + 1] * a[j + 1] - a[j] * a[j] + b[j + 1] * b[j + 1] -
                             b[j - 1] * b[j - 1]);
    }
    return out;
  }
  if (s.chart == Chart::CanonicalUB) {
    // d_j = b_j u_j - b_{j-1} u_{j-1}, with b_0 u_0 = b_{N+1} u_{N+1} = 0
    std::vector<cplx> u(n + 2, 0.0), b(n + 2, 0.0), bu(n + 2, 0.0), d(n + 3, 0.0);
    for (int j = 1; j <= n; ++j) {
      u[j] = x[j - 1];
      b[j] = x[n + j - 1];
      bu[j] = b[j] * u[j];
    }
    for (int j = 1; j <= n + 1; ++j) d[j] = bu[j] - bu[j - 1];
    for (int j = 1; j <= n; ++j) {
      if (f.p == 1) {
        out[j - 1] = u[j] * d[j] - u[j] * d[j + 1] + 2.0 * b[j];
        out[n + j - 1] = b[j] * (d[j + 1] - d[j]);
      } else {
        out[j - 1] = u[j] * (d[j] * d[j] - d[j + 1] * d[j + 1]) +
                     u[j] * (b[j - 1] * b[j - 1] - b[j + 1] * b[j + 1]) +
                     2.0 * b[j] * (bu[j + 1] - bu[j - 1]);
        out[n + j - 1] = b[j] * (d[j + 1] * d[j + 1] - d[j] * d[j]) -
                         b[j] * (b[j - 1] * b[j - 1] - b[j + 1] * b[j + 1]);
      }
    }
    return out;
  }
  if (s.chart == Chart::SkewWZ) {
    // e_i = w_i z_i, d_i = e_i - e_{i-1}, with e_0 = e_{N+1} = z_0 = z_{N+1} = 0
    std::vector<cplx> w(n + 2, 0.0), z(n + 2, 0.0), e(n + 2, 0.0), d(n + 3, 0.0);
    for (int i = 1; i <= n; ++i) {
      w[i] = x[i - 1];
      z[i] = x[n + i - 1];
      e[i] = w[i] * z[i];
    }
    for (int i = 1; i <= n + 1; ++i) d[i] = e[i] - e[i - 1];
    for (int i = 1; i <= n; ++i) {
      if (f.p == 1) {
        out[i - 1] = z[i] - 0.5 * w[i] * (d[i + 1] - d[i]);
        out[n + i - 1] = 0.5 * z[i] * (d[i + 1] - d[i]);
      } else {
        cplx br = d[i + 1] * d[i + 1] - d[i] * d[i] + z[i + 1] * z[i + 1] - z[i - 1] * z[i - 1];
        out[n + i - 1] = 0.25 * z[i] * br;
        out[i - 1] = 0.5 * z[i] * (d[i + 1] + d[i]) - 0.25 * w[i] * br;
      }
    }
    return out;
  }
  throw Error("open Toda: unsupported chart " + chart_name(s.chart));
}

CMatrix toda_open_m(const Model& m, const FlowLabel& f, const PhaseState& s) {
  if (f.p != 1 && f.p != 2) bad_flow(m, f);
  CMatrix l = toda_open_lax(m, s);
  CMatrix lk = invariant_gradient(l, f.p);
  // AKS realisation: R_+ ∇H_k = P_+(-L^k). Cartan realisation: R_+(2 L^k).
  if (skew_family(m)) return m.splitting->r_plus(2.0 * lk);
  return m.splitting->r_plus(-lk);
}

cplx toda_open_kinetic(const Model& m, const PhaseState& s, const CVector& v) {
  const int n = m.spec.sites;
  cplx k = 0.0;
  if (s.chart == Chart::CanonicalUB) {
    for (int j = 0; j < n; ++j) k -= s.x[n + j] * v[j];
    return k;
  }
  if (s.chart == Chart::SkewWZ) {
    for (int i = 0; i < n; ++i) k += s.x[n + i] * v[i];
    return k;
  }
  throw Error("open Toda: kinetic term requires the canonical-ub or skew-wz chart");
}

// ---- periodic Toda, DST, coupled ------------------------------------------

namespace {

struct Cyclic {
  int t = 0;
  std::vector<cplx> q, p, x, xx;  // xx = X
  bool toda = false, dst = false;
};

Cyclic cyclic_of(const Model& m, const PhaseState& s) {
  Cyclic c;
  c.t = m.spec.order;
  const int t = c.t;
  const CVector& v = s.x;
  int off = 0;
  if (m.spec.family == Family::PeriodicToda || m.spec.family == Family::CoupledTodaDST) {
    c.toda = true;
    c.q.assign(v.data(), v.data() + t);
    c.p.assign(v.data() + t, v.data() + 2 * t);
    off = 2 * t;
  }
  if (m.spec.family == Family::DST || m.spec.family == Family::CoupledTodaDST) {
    c.dst = true;
    c.x.assign(v.data() + off, v.data() + off + t);
    c.xx.assign(v.data() + off + t, v.data() + off + 2 * t);
  }
  return c;
}

// a_i = exp(q^i - q^{i+1}), indices mod T
std::vector<cplx> toda_a(const Cyclic& c) {
  std::vector<cplx> a(c.t);
  for (int i = 0; i < c.t; ++i) a[i] = std::exp(c.q[i] - c.q[md(i + 1, c.t)]);
  return a;
}

CMatrix shift_up(int t) {
  CMatrix j = CMatrix::Zero(t, t);
  for (int i = 0; i < t; ++i) j(i, md(i + 1, t)) += 1.0;
  return j;
}

CMatrix toda_j01(const Cyclic& c) {
  std::vector<cplx> a = toda_a(c);
  CMatrix j = CMatrix::Zero(c.t, c.t);
  for (int i = 0; i < c.t; ++i) j(md(i + 1, c.t), i) += a[i];
  return j;
}

CMatrix dst_k1(const Cyclic& c) {
  CMatrix k(c.t, c.t);
  for (int i = 0; i < c.t; ++i)
    for (int j = 0; j < c.t; ++j) k(i, j) = c.x[i] * c.xx[j];
  return k;
}

CMatrix dst_lax(const Model& m, const Cyclic& c, cplx lambda) {
  const int t = c.t;
  const cplx zeta = m.spec.poles.at(0);
  CMatrix l = CMatrix::Zero(t, t);
  for (int i = 0; i < t; ++i) l(i, i) += m.spec.dst_c[i] / lambda;
  CMatrix k1 = dst_k1(c);
  for (int k = 0; k < t; ++k) {
    cplx pole = root_of_unity(t, k) * zeta;
    guard_pole(lambda, pole);
    l += automorphism_power(k1, k, t) / (static_cast<double>(t) * (lambda - pole));
  }
  l += shift_up(t);
  return l;
}

CMatrix toda_lax(const Cyclic& c, cplx lambda) {
  CMatrix l = CMatrix::Zero(c.t, c.t);
  for (int i = 0; i < c.t; ++i) l(i, i) += c.p[i] / lambda;
  l += toda_j01(c) / (lambda * lambda);
  l += shift_up(c.t);
  return l;
}

}  // namespace

CMatrix cyclic_lax(const Model& m, const PhaseState& s, cplx lambda) {
  if (std::abs(lambda) <= 1e-8) throw Error("spectral parameter at a pole");
  Cyclic c = cyclic_of(m, s);
  switch (m.spec.family) {
    case Family::PeriodicToda:
      return toda_lax(c, lambda);
    case Family::DST:
      return dst_lax(m, c, lambda);
    case Family::CoupledTodaDST:
      return toda_lax(c, lambda) + m.spec.beta * dst_lax(m, c, lambda);
    default:
      throw Error("cyclic_lax: wrong family");
  }
}

cplx cyclic_hamiltonian(const Model& m, const FlowLabel& f, const PhaseState& s) {
  if (!has_flow(m, f)) bad_flow(m, f);
  Cyclic c = cyclic_of(m, s);
  const int t = c.t;
  const double beta = m.spec.beta;
  const auto& cc = m.spec.dst_c;
  cplx h = 0.0;
  if (m.spec.family == Family::PeriodicToda) {
    std::vector<cplx> a = toda_a(c);
    if (f.p == 1) {
      for (int i = 0; i < t; ++i) h += 0.5 * c.p[i] * c.p[i] + a[i];
    } else {
      for (int i = 0; i < t; ++i)
        h += c.p[i] * c.p[i] * c.p[i] / 3.0 + a[i] * (c.p[i] + c.p[md(i + 1, t)]);
    }
    return h;
  }
  const cplx zeta = m.spec.poles.at(0);
  // (1/2T) Σ_k Σ_ij ω^{k(j-i)} x^i x^j X_i X_j
  auto quartic = [&]() {
    cplx q = 0.0;
    for (int k = 0; k < t; ++k)
      for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j)
          q += root_of_unity(t, k * (j - i)) * c.x[i] * c.x[j] * c.xx[i] * c.xx[j];
    return q / (2.0 * t);
  };
  if (m.spec.family == Family::DST) {
    if (f.r == 0) {
      for (int i = 0; i < t; ++i) h += 0.5 * cc[i] * cc[i];
      return h;
    }
    h = quartic();
    for (int i = 0; i < t; ++i)
      h += cc[i] * c.x[i] * c.xx[i] + zeta * c.x[md(i + 1, t)] * c.xx[i];
    return h;
  }
  std::vector<cplx> a = toda_a(c);
  if (f.r == 0) {
    for (int i = 0; i < t; ++i)
      h += 0.5 * c.p[i] * c.p[i] + beta * cc[i] * c.p[i] + 0.5 * beta * beta * cc[i] * cc[i] +
           (1.0 + beta) * a[i] - (beta / zeta) * a[i] * c.x[i] * c.xx[md(i + 1, t)];
    return h;
  }
  h = beta * beta * quartic();
  for (int i = 0; i < t; ++i)
    h += beta * c.p[i] * c.x[i] * c.xx[i] + beta * beta * cc[i] * c.x[i] * c.xx[i] +
         (beta / zeta) * a[i] * c.x[i] * c.xx[md(i + 1, t)] +
         (beta + beta * beta) * zeta * c.x[md(i + 1, t)] * c.xx[i];
  return h;
}

CVector cyclic_flow(const Model& m, const FlowLabel& f, const PhaseState& s) {
  if (!has_flow(m, f)) bad_flow(m, f);
  Cyclic c = cyclic_of(m, s);
  const int t = c.t;
  const double beta = m.spec.beta;
  const auto& cc = m.spec.dst_c;
  CVector out = CVector::Zero(s.x.size());
  if (m.spec.family == Family::PeriodicToda) {
    std::vector<cplx> a = toda_a(c);
    for (int i = 0; i < t; ++i) {
      const int im = md(i - 1, t), ip = md(i + 1, t);
      if (f.p == 1) {
        out[i] = -c.p[i];
        out[t + i] = a[i] - a[im];
      } else {
        out[i] = -(c.p[i] * c.p[i] + a[i] + a[im]);
        out[t + i] = a[i] * (c.p[i] + c.p[ip]) - a[im] * (c.p[im] + c.p[i]);
      }
    }
    return out;
  }
  const cplx zeta = m.spec.poles.at(0);
  // g_i(kmin) = (1/T) Σ_{k>=kmin} Σ_j ω^{k(j-i)} x^j X_j
  auto self_sum = [&](int i, int kmin) {
    cplx g = 0.0;
    for (int k = kmin; k < t; ++k)
      for (int j = 0; j < t; ++j) g += root_of_unity(t, k * (j - i)) * c.x[j] * c.xx[j];
    return g / static_cast<double>(t);
  };
  if (m.spec.family == Family::DST) {
    if (f.r == 0) return out;
    for (int i = 0; i < t; ++i) {
      const int im = md(i - 1, t), ip = md(i + 1, t);
      cplx g = self_sum(i, 1);
      out[t + i] = -cc[i] * c.xx[i] - zeta * c.xx[im] - g * c.xx[i];
      out[i] = cc[i] * c.x[i] + zeta * c.x[ip] + g * c.x[i];
    }
    return out;
  }
  std::vector<cplx> a = toda_a(c);
  const int ox = 2 * t, oX = 3 * t;
  for (int i = 0; i < t; ++i) {
    const int im = md(i - 1, t), ip = md(i + 1, t);
    if (f.r == 0) {
      out[t + i] = (1.0 + beta) * (a[i] - a[im]) +
                   (beta / zeta) * (a[im] * c.x[im] * c.xx[i] - a[i] * c.x[i] * c.xx[ip]);
      out[i] = -c.p[i] - beta * cc[i];
      out[oX + i] = a[i] * c.xx[ip] / zeta;
      out[ox + i] = -a[im] * c.x[im] / zeta;
    } else {
      out[t + i] = (beta / zeta) * (a[i] * c.x[i] * c.xx[ip] - a[im] * c.x[im] * c.xx[i]);
      out[i] = -beta * c.x[i] * c.xx[i];
      cplx g = beta * self_sum(i, 0);
      out[oX + i] = -c.p[i] * c.xx[i] - beta * cc[i] * c.xx[i] - a[i] * c.xx[ip] / zeta -
                    g * c.xx[i] - (1.0 + beta) * zeta * c.xx[im];
      out[ox + i] = c.p[i] * c.x[i] + beta * cc[i] * c.x[i] + a[im] * c.x[im] / zeta +
                    g * c.x[i] + (1.0 + beta) * zeta * c.x[ip];
    }
  }
  return out;
}

CMatrix cyclic_m(const Model& m, const FlowLabel& f, const PhaseState& s, cplx lambda) {
  if (!has_flow(m, f)) bad_flow(m, f);
  if (std::abs(lambda) <= 1e-8) throw Error("spectral parameter at a pole");
  Cyclic c = cyclic_of(m, s);
  const int t = c.t;
  if (m.spec.family == Family::PeriodicToda) {
    if (f.p != 1) throw Error("periodic Toda: no generator available for flow (2,0)");
    return -toda_j01(c) / lambda;
  }
  if (f.r == 0) {
    if (m.spec.family == Family::DST) return CMatrix::Zero(t, t);
    return -toda_j01(c) / lambda;
  }
  const cplx zeta = m.spec.poles.at(0);
  const double weight = m.spec.family == Family::DST ? 1.0 : m.spec.beta;
  CMatrix k1 = dst_k1(c);
  CMatrix out = CMatrix::Zero(t, t);
  for (int k = 0; k < t; ++k) {
    cplx pole = root_of_unity(t, k) * zeta;
    guard_pole(lambda, pole);
    out -= pole * automorphism_power(k1, k, t) / (lambda - pole);
  }
  return (weight / static_cast<double>(t)) * out;
}

cplx cyclic_kinetic(const Model& m, const PhaseState& s, const CVector& v) {
  const int t = m.spec.order;
  cplx k = 0.0;
  switch (m.spec.family) {
    case Family::PeriodicToda:
      for (int i = 0; i < t; ++i) k -= s.x[t + i] * v[i];
      return k;
    case Family::DST:
      for (int i = 0; i < t; ++i) k += s.x[t + i] * v[i];
      return k;
    case Family::CoupledTodaDST:
      for (int i = 0; i < t; ++i) k += -s.x[t + i] * v[i] + m.spec.beta * s.x[3 * t + i] * v[2 * t + i];
      return k;
    default:
      throw Error("cyclic_kinetic: wrong family");
  }
}

}  // namespace lagmf::detail
