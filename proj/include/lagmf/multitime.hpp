#pragma once

#include "lagmf/models.hpp"

#include <ostream>

namespace lagmf {

struct PathSegment {
  FlowLabel flow;
  double duration = 0.0;
  int steps = 1;
};

// Ordered segments of a curve in multitime; zero-duration segments are skipped.
struct MultitimePath {
  std::vector<PathSegment> segments;
};

struct Trajectory {
  std::vector<double> times;  // cumulative path parameter
  std::vector<PhaseState> states;
  std::vector<cplx> probes;
  int kmax = 3;
  // Per sample: Tr L(probe)^k, probe-major, power-minor.
  std::vector<std::vector<cplx>> traces;
};

struct IntegrationError : Error {
  int sample;
  IntegrationError(const std::string& what, int sample_index)
      : Error(what), sample(sample_index) {}
};

inline constexpr double kInvariantTolerance = 1e-6;

PhaseState rk4_step(const Model& m, const FlowLabel& f, const PhaseState& s, double h);

// `steps` RK4 steps of flow f over `duration`, checking invariants after each.
PhaseState flow_for(const Model& m, const FlowLabel& f, const PhaseState& s, double duration, int steps);

Trajectory integrate_path(const Model& m, const PhaseState& s0, const MultitimePath& path,
                          const std::vector<cplx>& probes, int kmax = 3);

// |(flow i then j) - (flow j then i)|, each leg Δ with `steps` RK4 steps.
double commutativity_residual(const Model& m, const FlowLabel& i, const FlowLabel& j, const PhaseState& s0,
                              double delta, int steps);

// Max over interior lattice nodes of |∂_j ℒ_i - ∂_i ℒ_j| on the on-shell
// family s(t^i, t^j); lattice spacing Δ/grid, RK4 substeps of at most
// `max_step` per edge. Derivatives use central differences of order
// `stencil` (2 or 4); interior nodes are those the stencil reaches from.
double closure_residual(const Model& m, const FlowLabel& i, const FlowLabel& j, const PhaseState& s0,
                        double delta, int grid, double max_step = 1e-3, int stencil = 4);

double isospectral_drift(const Trajectory& traj, int kmax);

// Columns: path_parameter, coordinates (re/im pairs), probe traces.
void write_csv(std::ostream& out, const Model& m, const Trajectory& traj);

}  // namespace lagmf
