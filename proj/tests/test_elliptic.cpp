#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lagmf/elliptic.hpp"

#include <array>
#include <numbers>

using namespace lagmf;

namespace {

struct Frozen {
  cplx z, p, zeta, sigma;
};

// Theta-function evaluations at 30 digits, frozen.
const std::array<Frozen, 3> kSquare = {{
    {cplx(0.3, 0.2), cplx(3.3721036737358195, -5.9914186004556428), cplx(2.3378955219576281, -1.6806382500007899),
     cplx(0.30469068530876179, 0.19905799361147396)},
    {cplx(-0.15, 0.4), cplx(-5.3209453386367132, 2.3213755954600744), cplx(-1.0444276984062219, -2.0843427774213745),
     cplx(-0.13907751020487846, 0.40258424373095057)},
    {cplx(0.45, -0.35), cplx(0.94779390568629544, 0.70248543480301351), cplx(1.6218808832485538, 1.5352462106545773),
     cplx(0.49546815281614132, -0.35819389514232594)},
}};

const std::array<Frozen, 3> kSheared = {{
    {cplx(0.3, 0.2), cplx(2.842784268436241, -6.0646193167241212), cplx(2.3798550084709056, -1.6275435580712162),
     cplx(0.30342506634884954, 0.20096599177864464)},
    {cplx(-0.15, 0.4), cplx(-4.1613701029284904, 2.9734528733981712), cplx(-0.93814864215207719, -2.2048775729225601),
     cplx(-0.14563757573227421, 0.40414240763594136)},
    {cplx(0.45, -0.35), cplx(0.14625081120978186, 1.7032189745862448), cplx(1.523704411232668, 1.3084962409573113),
     cplx(0.47459693871243671, -0.35083701545773103)},
}};

// Truncated 2D lattice sums over the square |m|, |n| <= big; every summand is
// O(|w|^-3) so the truncation error is O(1/big).
WeierstrassValues brute_force(cplx z, cplx tau, int big) {
  cplx p = 1.0 / (z * z), zeta = 1.0 / z, logsig = std::log(z);
  for (int m = -big; m <= big; ++m)
    for (int n = -big; n <= big; ++n) {
      if (m == 0 && n == 0) continue;
      const cplx w = double(m) + double(n) * tau, u = z / w;
      p += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w);
      zeta += 1.0 / (z - w) + 1.0 / w + z / (w * w);
      logsig += std::log(1.0 - u) + u + 0.5 * u * u;
    }
  return {p, zeta, std::exp(logsig)};
}

void check_frozen(cplx tau, const std::array<Frozen, 3>& table) {
  EllipticLattice lat = make_lattice(tau);
  for (const Frozen& f : table) {
    WeierstrassValues w = weierstrass(f.z, lat);
    CHECK(std::abs(w.p - f.p) < 1e-11);
    CHECK(std::abs(w.zeta - f.zeta) < 1e-11);
    CHECK(std::abs(w.sigma - f.sigma) < 1e-11);
  }
}

}  // namespace

TEST_CASE("values match the frozen theta-function evaluations") {
  check_frozen(cplx(0, 1), kSquare);
  check_frozen(cplx(0.3, 1), kSheared);
}

TEST_CASE("eta_1 matches the frozen value") {
  CHECK(std::abs(make_lattice(cplx(0, 1)).eta1 - std::numbers::pi / 2) < 1e-12);
  CHECK(std::abs(make_lattice(cplx(0.3, 1)).eta1 - cplx(1.668049248727726591, -0.0698720192291118835)) < 1e-12);
}

TEST_CASE("frozen values agree with a brute-force lattice sum") {
  for (const Frozen& f : kSheared) {
    WeierstrassValues b = brute_force(f.z, cplx(0.3, 1), 300);
    CHECK(std::abs(b.p - f.p) < 1e-3);
    CHECK(std::abs(b.zeta - f.zeta) < 1e-2);
    CHECK(std::abs(b.sigma - f.sigma) < 1e-3);
  }
}

TEST_CASE("the brute-force product fixes the sigma quasi-period law") {
  // σ(z + 2ω) = -σ(z) e^{2η(z+ω)} with ω = 1/2, η = ζ(1/2).
  const cplx tau(0.3, 1);
  EllipticLattice lat = make_lattice(tau);
  const cplx z(0.2, 0.15);
  const cplx ratio = brute_force(z + 1.0, tau, 300).sigma / brute_force(z, tau, 300).sigma;
  const cplx classical = -std::exp(2.0 * lat.eta1 * (z + 0.5));
  const cplx shifted = -std::exp(2.0 * lat.eta1 * (z + 1.0));
  CHECK(std::abs(ratio - classical) < 5e-2);
  CHECK(std::abs(ratio - shifted) > 1.0);
  // The library unfolds sigma with the classical law.
  CHECK(std::abs(weierstrass(z + 1.0, lat).sigma / weierstrass(z, lat).sigma - classical) < 1e-10);
}

TEST_CASE("Legendre relation") {
  for (cplx tau : {cplx(0, 1), cplx(0.3, 1), cplx(-0.2, 0.8), cplx(0.1, 2.5)}) {
    EllipticLattice lat = make_lattice(tau);
    CHECK(std::abs(legendre_defect(lat)) < 1e-10);
  }
}

TEST_CASE("periodicity and quasi-periodicity") {
  for (cplx tau : {cplx(0, 1), cplx(0.3, 1)}) {
    EllipticLattice lat = make_lattice(tau);
    for (cplx z : {cplx(0.21, 0.13), cplx(-0.33, 0.41), cplx(0.05, -0.27)}) {
      WeierstrassValues w = weierstrass(z, lat), w1 = weierstrass(z + 1.0, lat), wt = weierstrass(z + tau, lat);
      CHECK(std::abs(w1.p - w.p) < 1e-9);
      CHECK(std::abs(wt.p - w.p) < 1e-9);
      CHECK(std::abs(w1.zeta - w.zeta - 2.0 * lat.eta1) < 1e-9);
      CHECK(std::abs(wt.zeta - w.zeta - 2.0 * lat.eta2) < 1e-9);
      CHECK(std::abs(wt.sigma + w.sigma * std::exp(2.0 * lat.eta2 * (z + tau / 2.0))) < 1e-9 * std::abs(wt.sigma));
    }
  }
}

TEST_CASE("parity") {
  EllipticLattice lat = make_lattice(cplx(0.3, 1));
  for (cplx z : {cplx(0.21, 0.13), cplx(-0.33, 0.41)}) {
    WeierstrassValues a = weierstrass(z, lat), b = weierstrass(-z, lat);
    CHECK(std::abs(a.p - b.p) < 1e-11);
    CHECK(std::abs(a.zeta + b.zeta) < 1e-11);
    CHECK(std::abs(a.sigma + b.sigma) < 1e-11);
  }
}

TEST_CASE("derivative relations") {
  EllipticLattice lat = make_lattice(cplx(0, 1));
  const double h = 1e-6;
  for (cplx z : {cplx(0.21, 0.13), cplx(-0.33, 0.41), cplx(0.4, -0.1)}) {
    const WeierstrassValues w = weierstrass(z, lat);
    const cplx dzeta = (weierstrass(z + h, lat).zeta - weierstrass(z - h, lat).zeta) / (2 * h);
    const cplx dlogs = (std::log(weierstrass(z + h, lat).sigma) - std::log(weierstrass(z - h, lat).sigma)) / (2 * h);
    CHECK(std::abs(dzeta + w.p) < 1e-7);
    CHECK(std::abs(dlogs - w.zeta) < 1e-7);
  }
}

TEST_CASE("Laurent behaviour at the origin") {
  EllipticLattice lat = make_lattice(cplx(0.3, 1));
  const cplx z(1e-3, 5e-4);
  WeierstrassValues w = weierstrass(z, lat);
  CHECK(std::abs(w.p - 1.0 / (z * z)) < 1e-4);
  CHECK(std::abs(w.zeta - 1.0 / z) < 1e-6);
  CHECK(std::abs(w.sigma / z - 1.0) < 1e-9);
}

TEST_CASE("lattice symmetries") {
  // τ and τ + 1 span the same lattice.
  EllipticLattice a = make_lattice(cplx(0.3, 1)), b = make_lattice(cplx(1.3, 1));
  const cplx z(0.17, 0.22);
  CHECK(std::abs(weierstrass(z, a).p - weierstrass(z, b).p) < 1e-10);
  CHECK(std::abs(weierstrass(z, a).sigma - weierstrass(z, b).sigma) < 1e-10);
  // The square lattice is invariant under z -> iz, so ℘(iz) = -℘(z).
  EllipticLattice sq = make_lattice(cplx(0, 1));
  CHECK(std::abs(weierstrass(I_unit * z, sq).p + weierstrass(z, sq).p) < 1e-10);
}

TEST_CASE("reduced and unreduced evaluation agree inside the cell") {
  EllipticLattice lat = make_lattice(cplx(0.3, 1));
  for (const Frozen& f : kSheared) {
    WeierstrassValues a = weierstrass(f.z, lat), b = weierstrass_unreduced(f.z, lat);
    CHECK(std::abs(a.p - b.p) < 1e-11);
    CHECK(std::abs(a.zeta - b.zeta) < 1e-11);
    CHECK(std::abs(a.sigma - b.sigma) < 1e-11);
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(make_lattice(cplx(0.5, 0.0)), Error);
  CHECK_THROWS_AS(make_lattice(cplx(0.5, -1.0)), Error);
  CHECK_THROWS_AS(make_lattice(cplx(0, 1), -1), Error);
  EllipticLattice lat = make_lattice(cplx(0.3, 1));
  CHECK_THROWS_AS(weierstrass(cplx(0, 0), lat), Error);
  CHECK_THROWS_AS(weierstrass(cplx(1.3, 1), lat), Error);
}
