#include "lagmf/multitime.hpp"

#include <cmath>
#include <iomanip>

namespace lagmf {

namespace {

void check_invariants(const Model& m, const PhaseState& s, int sample) {
  double v = invariant_violation(m, s);
  if (!(v <= kInvariantTolerance))
    throw IntegrationError("invariant violated (" + std::to_string(v) + ") at sample " + std::to_string(sample), sample);
  if (!all_finite(CMatrix(s.x)))
    throw IntegrationError("non-finite state at sample " + std::to_string(sample), sample);
}

std::vector<cplx> probe_traces(const Model& m, const PhaseState& s, const std::vector<cplx>& probes, int kmax) {
  std::vector<cplx> out;
  if (!m.spectral) {
    for (cplx t : power_traces(lax_eval(m, s), kmax)) out.push_back(t);
    return out;
  }
  for (cplx lam : probes)
    for (cplx t : power_traces(lax_eval(m, s, lam), kmax)) out.push_back(t);
  return out;
}

void check_steps(int steps) {
  if (steps < 1) throw Error("integration needs at least one step");
}

}  // namespace

PhaseState rk4_step(const Model& m, const FlowLabel& f, const PhaseState& s, double h) {
  auto F = [&](const CVector& x) { return flow_rhs(m, f, PhaseState{s.chart, x}); };
  CVector k1 = F(s.x);
  CVector k2 = F(s.x + 0.5 * h * k1);
  CVector k3 = F(s.x + 0.5 * h * k2);
  CVector k4 = F(s.x + h * k3);
  return {s.chart, s.x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};
}

PhaseState flow_for(const Model& m, const FlowLabel& f, const PhaseState& s, double duration, int steps) {
  check_steps(steps);
  if (!std::isfinite(duration)) throw Error("duration must be finite");
  PhaseState x = s;
  const double h = duration / steps;
  for (int k = 1; k <= steps; ++k) {
    x = rk4_step(m, f, x, h);
    check_invariants(m, x, k);
  }
  return x;
}

Trajectory integrate_path(const Model& m, const PhaseState& s0, const MultitimePath& path,
                          const std::vector<cplx>& probes, int kmax) {
  if (m.spectral && probes.empty()) throw Error("integrate_path: spectral model needs λ probes");
  check_invariants(m, s0, 0);
  Trajectory t;
  t.probes = m.spectral ? probes : std::vector<cplx>{};
  t.kmax = kmax;
  t.times.push_back(0.0);
  t.states.push_back(s0);
  t.traces.push_back(probe_traces(m, s0, probes, kmax));
  PhaseState x = s0;
  double tau = 0.0;
  for (const auto& seg : path.segments) {
    check_steps(seg.steps);
    if (!std::isfinite(seg.duration)) throw Error("duration must be finite");
    if (!has_flow(m, seg.flow)) throw Error("integrate_path: invalid flow " + flow_name(m, seg.flow));
    if (seg.duration == 0.0) continue;
    const double h = seg.duration / seg.steps;
    for (int k = 0; k < seg.steps; ++k) {
      x = rk4_step(m, seg.flow, x, h);
      tau += std::abs(h);
      check_invariants(m, x, static_cast<int>(t.states.size()));
      t.times.push_back(tau);
      t.states.push_back(x);
      t.traces.push_back(probe_traces(m, x, probes, kmax));
    }
  }
  return t;
}

double commutativity_residual(const Model& m, const FlowLabel& i, const FlowLabel& j, const PhaseState& s0,
                              double delta, int steps) {
  PhaseState a = flow_for(m, j, flow_for(m, i, s0, delta, steps), delta, steps);
  PhaseState b = flow_for(m, i, flow_for(m, j, s0, delta, steps), delta, steps);
  return norm(CVector(a.x - b.x));
}

double closure_residual(const Model& m, const FlowLabel& i, const FlowLabel& j, const PhaseState& s0,
                        double delta, int grid, double max_step, int stencil) {
  if (stencil != 2 && stencil != 4) throw Error("closure_residual: stencil order must be 2 or 4");
  const int reach = stencil / 2;
  if (grid < 2 * reach) throw Error("closure_residual: grid too small for the stencil");
  const double d = delta / grid;
  const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(d) / max_step - 1e-9)));
  const int g = grid + 1;
  std::vector<cplx> li(g * g), lj(g * g);
  PhaseState row = s0;
  for (int a = 0; a < g; ++a) {
    if (a > 0) row = flow_for(m, i, row, d, sub);
    PhaseState s = row;
    for (int b = 0; b < g; ++b) {
      if (b > 0) s = flow_for(m, j, s, d, sub);
      li[a * g + b] = lagrangian_coeff(m, i, s, flow_rhs(m, i, s));
      lj[a * g + b] = lagrangian_coeff(m, j, s, flow_rhs(m, j, s));
    }
  }
  // Central differences: f'(0) ≈ (f_1 - f_-1)/2d, or
  // (8(f_1 - f_-1) - (f_2 - f_-2))/12d for the fourth-order stencil.
  auto diff = [&](const std::vector<cplx>& f, int a, int b, int da, int db) {
    auto at = [&](int k) { return f[(a + k * da) * g + b + k * db]; };
    if (stencil == 2) return (at(1) - at(-1)) / (2.0 * d);
    return (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * d);
  };
  double r = 0.0;
  for (int a = reach; a + reach < g; ++a)
    for (int b = reach; b + reach < g; ++b) r = std::max(r, std::abs(diff(li, a, b, 0, 1) - diff(lj, a, b, 1, 0)));
  return r;
}

double isospectral_drift(const Trajectory& traj, int kmax) {
  if (traj.states.empty()) throw Error("isospectral_drift: empty trajectory");
  const int np = traj.probes.empty() ? 1 : static_cast<int>(traj.probes.size());
  const int kk = std::min(kmax, traj.kmax);
  double r = 0.0;
  for (const auto& tr : traj.traces)
    for (int p = 0; p < np; ++p)
      for (int k = 0; k < kk; ++k) r = std::max(r, std::abs(tr[p * traj.kmax + k] - traj.traces[0][p * traj.kmax + k]));
  return r;
}

void write_csv(std::ostream& out, const Model& m, const Trajectory& traj) {
  if (traj.states.empty()) return;
  out << "path_parameter";
  for (const auto& name : coordinate_names(m, traj.states[0].chart)) out << ',' << name << "_re," << name << "_im";
  const int np = traj.probes.empty() ? 1 : static_cast<int>(traj.probes.size());
  for (int p = 0; p < np; ++p)
    for (int k = 1; k <= traj.kmax; ++k) {
      std::string base = "tr_l" + std::to_string(p + 1) + "_k" + std::to_string(k);
      out << ',' << base << "_re," << base << "_im";
    }
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    out << traj.times[n];
    for (int c = 0; c < traj.states[n].x.size(); ++c) out << ',' << traj.states[n].x[c].real() << ',' << traj.states[n].x[c].imag();
    for (cplx t : traj.traces[n]) out << ',' << t.real() << ',' << t.imag();
    out << '\n';
  }
}

}  // namespace lagmf
