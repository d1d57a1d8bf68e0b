#pragma once

#include "lagmf/matrixcore.hpp"

namespace lagmf {

// Period lattice Z + tau Z, half periods w1 = 1/2, w2 = tau/2.
struct EllipticLattice {
  cplx tau;
  int trunc = 60;  // rows |n| <= trunc; each row summed over m in closed form
  cplx eta1;       // zeta(w1)
  cplx eta2;       // zeta(w2)
};

EllipticLattice make_lattice(cplx tau, int trunc = 60);

struct WeierstrassValues {
  cplx p;
  cplx zeta;
  cplx sigma;
};

inline constexpr double kPoleGuard = 1e-8;

// Reduces z to the fundamental cell, evaluates, then unfolds zeta and sigma
// with their quasi-period laws.
WeierstrassValues weierstrass(cplx z, const EllipticLattice& lat);

// Direct evaluation at z with no argument reduction.
WeierstrassValues weierstrass_unreduced(cplx z, const EllipticLattice& lat);

// eta1 w2 - eta2 w1 - pi i / 2
cplx legendre_defect(const EllipticLattice& lat);

}  // namespace lagmf
