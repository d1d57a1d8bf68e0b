#include "models_internal.hpp"

#include <map>

namespace lagmf {

using detail::get_mat;
using detail::inverse;
using detail::md;
using detail::put_mat;
using detail::root_of_unity;

namespace {

const std::map<Family, std::string>& family_names() {
  static const std::map<Family, std::string> names = {
      {Family::OpenTodaFlaschka, "open-toda"},
      {Family::OpenTodaSkew, "open-toda-skew"},
      {Family::PeriodicToda, "periodic-toda"},
      {Family::DST, "dst"},
      {Family::CoupledTodaDST, "coupled-toda-dst"},
      {Family::RationalGaudin, "rational-gaudin"},
      {Family::CyclotomicGaudin, "cyclotomic-gaudin"},
      {Family::EllipticGaudin, "elliptic-gaudin"},
  };
  return names;
}

bool is_open_toda(Family f) { return f == Family::OpenTodaFlaschka || f == Family::OpenTodaSkew; }
bool is_cyclic(Family f) {
  return f == Family::PeriodicToda || f == Family::DST || f == Family::CoupledTodaDST;
}
bool is_gaudin(Family f) { return f == Family::RationalGaudin || f == Family::CyclotomicGaudin; }

// Residue of the grading: X ∈ g^(k) iff X_ij = 0 unless j - i ≡ k mod T.
double off_grade(const CMatrix& x, int k, int t) {
  double r = 0.0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j)
      if (md(j - i - k, t) != 0) r = std::max(r, std::abs(x(i, j)));
  return r;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error("build_model: " + what);
}

bool lattice_equivalent(cplx a, cplx b, cplx tau) {
  cplx d = a - b;
  double n = std::round(d.imag() / tau.imag());
  double m = std::round((d - n * tau).real());
  return std::abs(d - (m + n * tau)) < 1e-8;
}

Chart family_chart(const ModelSpec& s) {
  switch (s.family) {
    case Family::OpenTodaFlaschka:
      return s.chart == Chart::CanonicalUB ? Chart::CanonicalUB : Chart::Flaschka;
    case Family::OpenTodaSkew:
      return Chart::SkewWZ;
    case Family::PeriodicToda:
      return Chart::Periodic;
    case Family::DST:
      return Chart::DSTChart;
    case Family::CoupledTodaDST:
      return Chart::Coupled;
    case Family::RationalGaudin:
      return Chart::GaudinOrbit;
    case Family::CyclotomicGaudin:
      return Chart::CyclotomicOrbit;
    case Family::EllipticGaudin:
      return Chart::Elliptic;
  }
  return Chart::Flaschka;
}

void check_chart(const Model& m, const PhaseState& s) {
  if (s.chart != family_chart(m.spec) &&
      !(m.spec.family == Family::OpenTodaFlaschka &&
        (s.chart == Chart::Flaschka || s.chart == Chart::CanonicalUB)))
    throw Error("state chart " + chart_name(s.chart) + " does not belong to " +
                family_name(m.spec.family));
  if (s.x.size() != state_size(m, s.chart)) throw Error("state: coordinate vector has wrong length");
}

}  // namespace

std::string family_name(Family f) { return family_names().at(f); }

std::optional<Family> parse_family(const std::string& s) {
  for (const auto& [f, name] : family_names())
    if (name == s) return f;
  return std::nullopt;
}

std::string chart_name(Chart c) {
  switch (c) {
    case Chart::Flaschka: return "flaschka";
    case Chart::CanonicalUB: return "canonical-ub";
    case Chart::SkewWZ: return "skew-wz";
    case Chart::Periodic: return "periodic";
    case Chart::DSTChart: return "dst";
    case Chart::Coupled: return "coupled";
    case Chart::GaudinOrbit: return "gaudin-orbit";
    case Chart::CyclotomicOrbit: return "cyclotomic-orbit";
    case Chart::Elliptic: return "elliptic";
  }
  return "unknown";
}

Model build_model(const ModelSpec& spec) {
  Model m;
  m.spec = spec;
  m.spec.chart = family_chart(spec);
  const Family f = spec.family;
  if (is_open_toda(f)) {
    require(spec.sites >= 1, "open Toda needs at least one site");
    m.n = spec.sites + 1;
    m.splitting = make_splitting(f == Family::OpenTodaSkew ? SplittingFamily::Cartan : SplittingFamily::AKS, m.n);
    m.flows = {{1, 0}, {2, 0}};
    return m;
  }
  if (is_cyclic(f)) {
    const int t = spec.order;
    require(t >= 2, "cyclotomic order T must be at least 2");
    m.n = t;
    m.spectral = true;
    if (f == Family::PeriodicToda) {
      require(spec.levels >= 1 && spec.levels <= 2, "periodic Toda levels must be 1 or 2");
      for (int p = 1; p <= spec.levels; ++p) m.flows.push_back({p, 0});
      return m;
    }
    require(spec.poles.size() == 1, "DST needs exactly one pole ζ_1");
    require(std::abs(spec.poles[0]) > 1e-8, "DST pole must be nonzero");
    require(static_cast<int>(spec.dst_c.size()) == t, "DST needs T parameters c_i");
    if (f == Family::CoupledTodaDST) require(std::isfinite(spec.beta), "coupling must be finite");
    m.flows = {{1, 0}, {1, 1}};
    return m;
  }
  if (f == Family::RationalGaudin) {
    const int np = static_cast<int>(spec.poles.size());
    require(np >= 1, "rational Gaudin needs at least one pole");
    require(spec.dim >= 1, "dimension must be positive");
    require(static_cast<int>(spec.orbit_reps.size()) == np, "one orbit representative per pole");
    for (int r = 0; r < np; ++r)
      for (int s = r + 1; s < np; ++s)
        require(std::abs(spec.poles[r] - spec.poles[s]) > 1e-8, "poles must be pairwise distinct");
    m.n = spec.dim;
    if (m.spec.constant.size() == 0) m.spec.constant = CMatrix::Zero(m.n, m.n);
    require(m.spec.constant.rows() == m.n, "constant term has wrong dimension");
    for (const auto& l : spec.orbit_reps) require(l.rows() == m.n && l.cols() == m.n, "orbit representative has wrong dimension");
    m.spectral = true;
    for (int k = 1; k <= 2; ++k)
      for (int r = 1; r <= np; ++r) m.flows.push_back({k, r});
    return m;
  }
  if (f == Family::CyclotomicGaudin) {
    const int t = spec.order, np = static_cast<int>(spec.poles.size());
    require(t >= 2, "cyclotomic order T must be at least 2");
    require(static_cast<int>(spec.orbit_reps.size()) == np, "one orbit representative per pole");
    for (int r = 0; r < np; ++r) {
      require(std::abs(spec.poles[r]) > 1e-8, "poles must avoid the origin");
      for (int s = r + 1; s < np; ++s)
        require(!omega_equivalent(spec.poles[r], spec.poles[s], t), "Γ-orbits of the poles must be disjoint");
    }
    m.n = t;
    auto zero_if_empty = [t](CMatrix& x) {
      if (x.size() == 0) x = CMatrix::Zero(t, t);
    };
    zero_if_empty(m.spec.origin0);
    zero_if_empty(m.spec.origin1);
    zero_if_empty(m.spec.constant);
    require(off_grade(m.spec.origin0, 0, t) < 1e-14, "Λ_0^(0) must lie in g^(0)");
    require(off_grade(m.spec.origin1, -1, t) < 1e-14, "Λ_0^(1) must lie in g^(-1)");
    require(off_grade(m.spec.constant, 1, t) < 1e-14, "Λ_∞ must lie in g^(1)");
    m.spectral = true;
    for (int r = 0; r <= np; ++r) m.flows.push_back({1, r});
    return m;
  }
  // elliptic
  const int n = spec.dim, np = static_cast<int>(spec.marked_points.size());
  require(n >= 2, "elliptic model needs sl_m with m >= 2");
  require(np >= 1, "elliptic model needs marked points");
  require(static_cast<int>(spec.orbit_reps.size()) == np, "one orbit representative per marked point");
  require(!spec.eval_points.empty(), "elliptic model needs evaluation points");
  require(spec.tau.imag() > 0.0, "Im(tau) must be positive");
  for (int a = 0; a < np; ++a) {
    require(!lattice_equivalent(spec.marked_points[a], 0.0, spec.tau), "marked points must avoid the bundle point z = 0");
    for (int b = a + 1; b < np; ++b)
      require(!lattice_equivalent(spec.marked_points[a], spec.marked_points[b], spec.tau), "marked points must be distinct");
  }
  for (const auto& qi : spec.eval_points) {
    require(!lattice_equivalent(qi, 0.0, spec.tau), "evaluation points must avoid z = 0");
    for (const auto& pa : spec.marked_points)
      require(!lattice_equivalent(qi, pa, spec.tau), "evaluation points must be distinct from the poles");
  }
  for (std::size_t i = 0; i < spec.eval_points.size(); ++i)
    for (std::size_t j = i + 1; j < spec.eval_points.size(); ++j)
      require(!lattice_equivalent(spec.eval_points[i], spec.eval_points[j], spec.tau), "evaluation points must be distinct");
  m.n = n;
  m.spectral = true;
  m.lattice = make_lattice(spec.tau, spec.trunc);
  m.cartan_metric = CMatrix::Zero(n - 1, n - 1);
  for (int mu = 0; mu < n - 1; ++mu) {
    CMatrix h = CMatrix::Zero(n, n);
    h(mu, mu) = 1.0;
    h(mu + 1, mu + 1) = -1.0;
    m.cartan.push_back(h);
  }
  for (int mu = 0; mu < n - 1; ++mu)
    for (int nu = 0; nu < n - 1; ++nu) m.cartan_metric(mu, nu) = (m.cartan[mu] * m.cartan[nu]).trace();
  for (int i = 1; i <= static_cast<int>(spec.eval_points.size()); ++i) m.flows.push_back({1, i});
  return m;
}

bool has_flow(const Model& m, const FlowLabel& f) {
  for (const auto& g : m.flows)
    if (g == f) return true;
  return false;
}

std::string flow_name(const Model& m, const FlowLabel& f) {
  if (is_open_toda(m.spec.family)) return std::to_string(f.p);
  if (m.spec.family == Family::EllipticGaudin) return std::to_string(f.r);
  return std::to_string(f.p) + "," + std::to_string(f.r);
}

FlowLabel parse_flow(const Model& m, const std::string& s) {
  FlowLabel f;
  try {
    auto comma = s.find(',');
    if (comma == std::string::npos) {
      int k = std::stoi(s);
      if (is_open_toda(m.spec.family)) f = {k, 0};
      else if (m.spec.family == Family::EllipticGaudin) f = {1, k};
      else throw Error("flow label must be 'p,r' for " + family_name(m.spec.family));
    } else {
      f = {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
    }
  } catch (const std::logic_error&) {
    throw Error("malformed flow label '" + s + "'");
  }
  if (!has_flow(m, f)) throw Error("flow label '" + s + "' is not defined for " + family_name(m.spec.family));
  return f;
}

int state_size(const Model& m, Chart c) {
  const int nn = m.spec.sites, t = m.spec.order;
  switch (c) {
    case Chart::Flaschka: return 2 * nn + 1;
    case Chart::CanonicalUB:
    case Chart::SkewWZ: return 2 * nn;
    case Chart::Periodic:
    case Chart::DSTChart: return 2 * t;
    case Chart::Coupled: return 4 * t;
    case Chart::GaudinOrbit: return static_cast<int>(m.spec.poles.size()) * m.n * m.n;
    case Chart::CyclotomicOrbit: return (static_cast<int>(m.spec.poles.size()) + 2) * t * t;
    case Chart::Elliptic:
      return 2 * (m.spec.dim - 1) + static_cast<int>(m.spec.marked_points.size()) * m.spec.dim * m.spec.dim;
  }
  return 0;
}

std::vector<std::string> coordinate_names(const Model& m, Chart c) {
  std::vector<std::string> out;
  auto seq = [&out](const std::string& base, int count) {
    for (int i = 1; i <= count; ++i) out.push_back(base + std::to_string(i));
  };
  auto mats = [&out](const std::string& base, int count, int n) {
    for (int k = 1; k <= count; ++k)
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
          out.push_back(base + std::to_string(k) + "_" + std::to_string(i) + std::to_string(j));
  };
  const int nn = m.spec.sites, t = m.spec.order, np = static_cast<int>(m.spec.poles.size());
  switch (c) {
    case Chart::Flaschka: seq("a", nn + 1); seq("b", nn); break;
    case Chart::CanonicalUB: seq("u", nn); seq("b", nn); break;
    case Chart::SkewWZ: seq("w", nn); seq("z", nn); break;
    case Chart::Periodic: seq("q", t); seq("p", t); break;
    case Chart::DSTChart: seq("x", t); seq("X", t); break;
    case Chart::Coupled: seq("q", t); seq("p", t); seq("x", t); seq("X", t); break;
    case Chart::GaudinOrbit: mats("phi", np, m.n); break;
    case Chart::CyclotomicOrbit:
      mats("phi", np, t);
      mats("phi0_0_", 1, t);
      mats("phi0_1_", 1, t);
      break;
    case Chart::Elliptic:
      seq("q", m.spec.dim - 1);
      seq("p", m.spec.dim - 1);
      mats("phi", static_cast<int>(m.spec.marked_points.size()), m.spec.dim);
      break;
  }
  return out;
}

CMatrix lax_eval(const Model& m, const PhaseState& s, std::optional<cplx> lambda) {
  check_chart(m, s);
  CMatrix l;
  const Family f = m.spec.family;
  if (is_open_toda(f)) {
    l = detail::toda_open_lax(m, s);
  } else {
    detail::require_lambda(lambda);
    if (is_cyclic(f)) {
      l = detail::cyclic_lax(m, s, *lambda);
    } else if (is_gaudin(f)) {
      l = detail::gaudin_lax(m, s, *lambda);
    } else {
      if (lattice_equivalent(*lambda, 0.0, m.spec.tau)) throw Error("spectral parameter at the bundle point");
      for (const auto& pa : m.spec.marked_points)
        if (lattice_equivalent(*lambda, pa, m.spec.tau)) throw Error("spectral parameter at a pole");
      CVector q, p;
      std::vector<CMatrix> ls = detail::elliptic_residues(m, s);
      const int rk = m.spec.dim - 1;
      l = elliptic_lax(m, *lambda, s.x.segment(0, rk), s.x.segment(rk, rk), ls);
    }
  }
  if (!all_finite(l)) throw Error("lax_eval: non-finite Lax matrix");
  return l;
}

cplx hamiltonian_eval(const Model& m, const FlowLabel& f, const PhaseState& s) {
  check_chart(m, s);
  if (!has_flow(m, f)) detail::bad_flow(m, f);
  const Family fam = m.spec.family;
  if (is_open_toda(fam)) return detail::toda_open_hamiltonian(m, f, s);
  if (is_cyclic(fam)) return detail::cyclic_hamiltonian(m, f, s);
  if (is_gaudin(fam)) return detail::gaudin_hamiltonian(m, f, s);
  const int rk = m.spec.dim - 1;
  return elliptic_hamiltonian(m, f.r - 1, s.x.segment(0, rk), s.x.segment(rk, rk),
                              detail::elliptic_residues(m, s));
}

std::vector<CMatrix> group_flow_rhs(const Model& m, const FlowLabel& f, const PhaseState& s) {
  check_chart(m, s);
  if (!is_gaudin(m.spec.family)) throw Error("group_flow_rhs: orbit chart required");
  return detail::gaudin_group_flow(m, f, s);
}

CVector group_tangent_to_coordinates(const Model& m, const PhaseState& s, const std::vector<CMatrix>& v) {
  CVector out = CVector::Zero(s.x.size());
  const int n = m.n, sz = n * n;
  const int np = static_cast<int>(m.spec.poles.size());
  for (int i = 0; i < np; ++i) put_mat(out, i * sz, v[i] * get_mat(s.x, i * sz, n));
  if (m.spec.family == Family::CyclotomicGaudin) {
    CMatrix p0 = get_mat(s.x, np * sz, n), p1 = get_mat(s.x, (np + 1) * sz, n);
    const CMatrix& v0 = v[np];
    const CMatrix& v1 = v[np + 1];
    put_mat(out, np * sz, v0 * p0);
    put_mat(out, (np + 1) * sz, v0 * p1 + v1 * p0);
  }
  return out;
}

CVector flow_rhs(const Model& m, const FlowLabel& f, const PhaseState& s) {
  check_chart(m, s);
  if (!has_flow(m, f)) detail::bad_flow(m, f);
  const Family fam = m.spec.family;
  if (is_open_toda(fam)) return detail::toda_open_flow(m, f, s);
  if (is_cyclic(fam)) return detail::cyclic_flow(m, f, s);
  if (is_gaudin(fam)) return group_tangent_to_coordinates(m, s, detail::gaudin_group_flow(m, f, s));
  return detail::elliptic_flow(m, f, s);
}

CMatrix m_matrix_eval(const Model& m, const FlowLabel& f, const PhaseState& s, std::optional<cplx> lambda) {
  check_chart(m, s);
  if (!has_flow(m, f)) detail::bad_flow(m, f);
  const Family fam = m.spec.family;
  if (is_open_toda(fam)) return detail::toda_open_m(m, f, s);
  detail::require_lambda(lambda);
  if (is_cyclic(fam)) return detail::cyclic_m(m, f, s, *lambda);
  if (is_gaudin(fam)) return detail::gaudin_m(m, f, s, *lambda);
  throw Error("m_matrix_eval: no closed-form generator for the elliptic model");
}

std::vector<CMatrix> residue_flow(const Model& m, const FlowLabel& f, const PhaseState& s) {
  check_chart(m, s);
  if (!is_gaudin(m.spec.family)) throw Error("residue_flow: orbit chart required");
  return detail::gaudin_residue_flow(m, f, s);
}

std::vector<CMatrix> residues(const Model& m, const PhaseState& s) {
  check_chart(m, s);
  if (is_gaudin(m.spec.family)) return detail::gaudin_residues(m, s);
  if (m.spec.family == Family::EllipticGaudin) return detail::elliptic_residues(m, s);
  throw Error("residues: orbit chart required");
}

cplx kinetic_term(const Model& m, const PhaseState& s, const CVector& velocity) {
  check_chart(m, s);
  if (velocity.size() != s.x.size()) throw Error("velocity layout does not match the chart");
  const Family fam = m.spec.family;
  if (is_open_toda(fam)) return detail::toda_open_kinetic(m, s, velocity);
  if (is_cyclic(fam)) return detail::cyclic_kinetic(m, s, velocity);
  if (is_gaudin(fam)) return detail::gaudin_kinetic(m, s, velocity);
  return detail::elliptic_kinetic(m, s, velocity);
}

cplx lagrangian_coeff(const Model& m, const FlowLabel& f, const PhaseState& s, const CVector& velocity) {
  return kinetic_term(m, s, velocity) - hamiltonian_eval(m, f, s);
}

double invariant_violation(const Model& m, const PhaseState& s) {
  check_chart(m, s);
  const int t = m.spec.order;
  auto sum = [&](int off, int count) {
    cplx acc = 0.0;
    for (int i = 0; i < count; ++i) acc += s.x[off + i];
    return std::abs(acc);
  };
  auto dot = [&](int ox, int oX) {
    cplx acc = 0.0;
    for (int i = 0; i < t; ++i) acc += s.x[ox + i] * s.x[oX + i];
    return std::abs(acc - 1.0);
  };
  switch (s.chart) {
    case Chart::Flaschka: return sum(0, m.spec.sites + 1);
    case Chart::Periodic: return sum(t, t);
    case Chart::DSTChart: return dot(0, t);
    case Chart::Coupled: return std::max(sum(t, t), dot(2 * t, 3 * t));
    case Chart::CyclotomicOrbit: {
      const int np = static_cast<int>(m.spec.poles.size()), sz = t * t;
      return std::max(off_grade(get_mat(s.x, np * sz, t), 0, t), off_grade(get_mat(s.x, (np + 1) * sz, t), 1, t));
    }
    case Chart::Elliptic: {
      std::vector<CMatrix> ls = detail::elliptic_residues(m, s);
      CMatrix total = CMatrix::Zero(m.n, m.n);
      for (const auto& l : ls) total += l;
      double r = 0.0;
      for (int i = 0; i < m.n; ++i) r = std::max(r, std::abs(total(i, i)));
      return r;
    }
    default: return 0.0;
  }
}

cplx cyclotomic_infinity_hamiltonian(const Model& m, const PhaseState& s) {
  check_chart(m, s);
  if (m.spec.family != Family::CyclotomicGaudin) throw Error("H_{1,∞} is defined for the cyclotomic model");
  return detail::cyclotomic_infinity(m, s);
}

PhaseState to_flaschka(const Model& m, const PhaseState& s) {
  if (!is_open_toda(m.spec.family)) throw Error("to_flaschka: open Toda chart required");
  CMatrix l = lax_eval(m, s);
  const int n = m.spec.sites;
  PhaseState out{Chart::Flaschka, CVector(2 * n + 1)};
  for (int j = 0; j <= n; ++j) out.x[j] = l(j, j);
  for (int j = 0; j < n; ++j) out.x[n + 1 + j] = l(j, j + 1);
  return out;
}

CVector pushforward_to_flaschka(const Model& m, const PhaseState& s, const CVector& v) {
  const int n = m.spec.sites;
  if (s.chart == Chart::Flaschka) return v;
  CVector out = CVector::Zero(2 * n + 1);
  std::vector<cplx> e(n + 2, 0.0), de(n + 2, 0.0);
  if (s.chart == Chart::CanonicalUB) {
    for (int j = 1; j <= n; ++j) {
      cplx u = s.x[j - 1], b = s.x[n + j - 1], du = v[j - 1], db = v[n + j - 1];
      de[j] = db * u + b * du;
      out[n + j] = db;
    }
    for (int j = 1; j <= n + 1; ++j) out[j - 1] = de[j] - de[j - 1];
    return out;
  }
  if (s.chart == Chart::SkewWZ) {
    for (int i = 1; i <= n; ++i) {
      cplx w = s.x[i - 1], z = s.x[n + i - 1], dw = v[i - 1], dz = v[n + i - 1];
      de[i] = dw * z + w * dz;
      out[n + i] = 0.5 * dz;
    }
    for (int i = 1; i <= n + 1; ++i) out[i - 1] = 0.5 * (de[i] - de[i - 1]);
    return out;
  }
  throw Error("pushforward_to_flaschka: open Toda chart required");
}

PhaseState random_state(const Model& m, Rng& rng, double scale) {
  PhaseState s{family_chart(m.spec), CVector()};
  if (m.spec.family == Family::OpenTodaFlaschka) s.chart = m.spec.chart;
  s.x = CVector::Zero(state_size(m, s.chart));
  const int nn = m.spec.sites, t = m.spec.order;
  auto centred = [&](int off, int count) {
    cplx mean = 0.0;
    for (int i = 0; i < count; ++i) {
      s.x[off + i] = rng.uniform(-scale, scale);
      mean += s.x[off + i];
    }
    mean /= static_cast<double>(count);
    for (int i = 0; i < count; ++i) s.x[off + i] -= mean;
  };
  auto dst_pair = [&](int ox, int oX) {
    cplx dot = 0.0;
    for (int i = 0; i < t; ++i) {
      s.x[ox + i] = 1.0 + rng.uniform(-0.5, 0.5) * scale;
      s.x[oX + i] = 1.0 + rng.uniform(-0.5, 0.5) * scale;
      dot += s.x[ox + i] * s.x[oX + i];
    }
    for (int i = 0; i < t; ++i) s.x[oX + i] /= dot;
  };
  auto near_identity = [&](int n) {
    return CMatrix(CMatrix::Identity(n, n) + rng.matrix(n, 0.6 * scale));
  };
  switch (s.chart) {
    case Chart::Flaschka:
      centred(0, nn + 1);
      for (int j = 0; j < nn; ++j) s.x[nn + 1 + j] = rng.uniform(0.4, 0.4 + scale);
      break;
    case Chart::CanonicalUB:
    case Chart::SkewWZ:
      for (int j = 0; j < nn; ++j) {
        s.x[j] = rng.uniform(-scale, scale);
        s.x[nn + j] = rng.uniform(0.5, 0.5 + scale);
      }
      break;
    case Chart::Periodic:
      centred(0, t);
      centred(t, t);
      break;
    case Chart::DSTChart:
      dst_pair(0, t);
      break;
    case Chart::Coupled:
      centred(0, t);
      centred(t, t);
      dst_pair(2 * t, 3 * t);
      break;
    case Chart::GaudinOrbit: {
      const int np = static_cast<int>(m.spec.poles.size());
      for (int i = 0; i < np; ++i) put_mat(s.x, i * m.n * m.n, near_identity(m.n));
      break;
    }
    case Chart::CyclotomicOrbit: {
      const int np = static_cast<int>(m.spec.poles.size()), sz = t * t;
      for (int i = 0; i < np; ++i) put_mat(s.x, i * sz, near_identity(t));
      CMatrix p0 = CMatrix::Zero(t, t), p1 = CMatrix::Zero(t, t);
      for (int i = 0; i < t; ++i) {
        p0(i, i) = 1.0 + rng.complex_uniform(0.3 * scale);
        p1(i, md(i + 1, t)) = rng.complex_uniform(scale);
      }
      put_mat(s.x, np * sz, p0);
      put_mat(s.x, (np + 1) * sz, p1);
      break;
    }
    case Chart::Elliptic: {
      const int n = m.spec.dim, np = static_cast<int>(m.spec.marked_points.size());
      if (n != 2 || np > 2) throw Error("random_state: elliptic sample states are provided for sl_2 with one or two marked points");
      for (const auto& l : m.spec.orbit_reps)
        if (std::abs(l(0, 1)) > 0.0 || std::abs(l(1, 0)) > 0.0)
          throw Error("random_state: elliptic sample states need diagonal orbit representatives");
      if (np == 2 && norm(CMatrix(m.spec.orbit_reps[0] - m.spec.orbit_reps[1])) > 0.0)
        throw Error("random_state: two marked points need equal orbit representatives");
      s.x[0] = cplx(rng.uniform(0.2, 0.3), rng.uniform(0.2, 0.3));
      s.x[1] = rng.complex_uniform(scale);
      auto diag = [&]() {
        CMatrix d = CMatrix::Zero(2, 2);
        d(0, 0) = 1.0 + rng.complex_uniform(0.3 * scale);
        d(1, 1) = 1.0 + rng.complex_uniform(0.3 * scale);
        return d;
      };
      CMatrix w(2, 2);
      w << 0.0, 1.0, 1.0, 0.0;
      // For one marked point the quarter-turn zeroes the Cartan part of L_1.
      // For two, a small rotation keeps the residues off the Cartan
      // subalgebra but close to it, which keeps the particle away from
      // collisions; the swap makes the Cartan parts of L_1 and L_2 cancel.
      CMatrix rot(2, 2);
      rot << 1.0, 1.0, -1.0, 1.0;
      const double th = rng.uniform(0.1, 0.2);
      CMatrix small(2, 2);
      small << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
      CMatrix phi1 = np == 1 ? CMatrix(diag() * rot * diag()) : CMatrix(small * near_identity(2));
      put_mat(s.x, 2, phi1);
      if (np == 2) put_mat(s.x, 6, CMatrix(diag() * w * phi1 * diag()));
      break;
    }
  }
  return s;
}

ModelSpec default_spec(Family f) {
  ModelSpec s;
  s.family = f;
  switch (f) {
    case Family::OpenTodaFlaschka:
      s.sites = 2;
      s.chart = Chart::Flaschka;
      break;
    case Family::OpenTodaSkew:
      s.sites = 2;
      s.chart = Chart::SkewWZ;
      break;
    case Family::PeriodicToda:
      s.order = 3;
      s.levels = 2;
      break;
    case Family::DST:
      s.order = 2;
      s.poles = {1.0};
      s.dst_c = {0.3, -0.2};
      break;
    case Family::CoupledTodaDST:
      s.order = 2;
      s.poles = {1.0};
      s.dst_c = {0.3, -0.2};
      s.beta = 0.5;
      break;
    case Family::RationalGaudin: {
      s.dim = 2;
      s.poles = {cplx(-0.6, 0.1), cplx(0.7, -0.2)};
      CMatrix l1 = CMatrix::Zero(2, 2), l2 = CMatrix::Zero(2, 2), om = CMatrix::Zero(2, 2);
      l1(0, 0) = 0.5;
      l1(1, 1) = -0.5;
      l2(0, 0) = 0.4;
      l2(1, 1) = -0.3;
      om(0, 0) = 0.2;
      om(1, 1) = -0.2;
      om(0, 1) = 0.1;
      s.orbit_reps = {l1, l2};
      s.constant = om;
      break;
    }
    case Family::CyclotomicGaudin: {
      s.order = 2;
      s.poles = {cplx(0.8, 0.3)};
      CMatrix l1 = CMatrix::Zero(2, 2);
      l1(0, 0) = 0.6;
      l1(1, 1) = -0.2;
      s.orbit_reps = {l1};
      s.origin0 = CMatrix::Zero(2, 2);
      s.origin0(0, 0) = 0.3;
      s.origin0(1, 1) = -0.3;
      s.origin1 = CMatrix::Zero(2, 2);
      s.origin1(1, 0) = 0.5;
      s.origin1(0, 1) = 0.2;
      s.constant = CMatrix::Zero(2, 2);
      s.constant(0, 1) = 1.0;
      s.constant(1, 0) = 1.0;
      break;
    }
    case Family::EllipticGaudin: {
      s.dim = 2;
      s.tau = cplx(0.0, 1.0);
      s.marked_points = {cplx(0.5, 0.5), cplx(0.3, -0.3)};
      s.eval_points = {cplx(0.5, 0.0), cplx(0.0, 0.5)};
      CMatrix l = CMatrix::Zero(2, 2);
      l(0, 0) = 0.25;
      l(1, 1) = -0.25;
      s.orbit_reps = {l, l};
      break;
    }
  }
  return s;
}

}  // namespace lagmf
