#include "lagmf/elliptic.hpp"

#include <cmath>
#include <numbers>

namespace lagmf {

namespace {

constexpr double kPi = std::numbers::pi;

// cot x = s + t with s = -i (Im x >= 0) or +i, and t decaying like
// exp(-2|Im x|); keeping the split lets lattice rows cancel exactly.
struct CotSplit {
  cplx s;
  cplx t;
};

CotSplit cot_split(cplx x) {
  if (x.imag() >= 0.0) {
    cplx u = std::exp(2.0 * I_unit * x);
    return {-I_unit, -2.0 * I_unit * u / (1.0 - u)};
  }
  cplx v = std::exp(-2.0 * I_unit * x);
  return {I_unit, 2.0 * I_unit * v / (1.0 - v)};
}

cplx cot(cplx x) {
  CotSplit c = cot_split(x);
  return c.s + c.t;
}

cplx csc2(cplx x) {
  cplx u = x.imag() >= 0.0 ? std::exp(2.0 * I_unit * x) : std::exp(-2.0 * I_unit * x);
  return -4.0 * u / ((1.0 - u) * (1.0 - u));
}

void check_tau(cplx tau) {
  if (!(tau.imag() > 0.0)) throw Error("elliptic: Im(tau) must be positive");
}

// Nearest lattice point m + n tau to z.
void nearest(cplx z, cplx tau, double& m, double& n) {
  n = std::round(z.imag() / tau.imag());
  m = std::round((z - n * tau).real());
}

// Rows n != 0: sum over m taken in closed form, pairs combined so that each
// row is the absolutely convergent Weierstrass summand.
WeierstrassValues direct(cplx z, const EllipticLattice& lat) {
  const cplx tau = lat.tau;
  const double pi2 = kPi * kPi;
  cplx sz = std::sin(kPi * z);
  cplx c0 = cot(kPi * z);
  cplx p = pi2 * csc2(kPi * z) - pi2 / 3.0;
  cplx zeta = kPi * c0 + z * pi2 / 3.0;
  cplx sigma = (sz / kPi) * std::exp(pi2 * z * z / 6.0);
  // Rows decay like exp(-2π|n| Im τ); stop once a symmetric pair of rows no
  // longer changes any of the three values.
  for (int k = 1; k <= lat.trunc; ++k) {
    cplx dp = 0.0, dz = 0.0, fs = 1.0;
    for (int n : {k, -k}) {
      cplx c = static_cast<double>(n) * tau;
      CotSplit kc = cot_split(kPi * c), kz = cot_split(kPi * (z - c));
      cplx k2 = csc2(kPi * c);
      dp += pi2 * (csc2(kPi * (z - c)) - k2);
      dz += kPi * ((kz.s + kc.s) + (kz.t + kc.t)) + z * pi2 * k2;
      fs *= (1.0 - kc.t * sz * std::exp(kc.s * kPi * z)) * std::exp(z * kPi * kc.t + 0.5 * z * z * pi2 * k2);
    }
    p += dp;
    zeta += dz;
    sigma *= fs;
    const double eps = 1e-17;
    if (std::abs(dp) <= eps * (1.0 + std::abs(p)) && std::abs(dz) <= eps * (1.0 + std::abs(zeta)) &&
        std::abs(fs - 1.0) <= eps)
      break;
  }
  return {p, zeta, sigma};
}

}  // namespace

EllipticLattice make_lattice(cplx tau, int trunc) {
  check_tau(tau);
  if (trunc < 0) throw Error("elliptic: truncation must be nonnegative");
  EllipticLattice lat{tau, trunc, {}, {}};
  lat.eta1 = direct(0.5, lat).zeta;
  lat.eta2 = direct(0.5 * tau, lat).zeta;
  return lat;
}

WeierstrassValues weierstrass_unreduced(cplx z, const EllipticLattice& lat) {
  check_tau(lat.tau);
  double m, n;
  nearest(z, lat.tau, m, n);
  if (std::abs(z - (m + n * lat.tau)) <= kPoleGuard) throw Error("elliptic: argument on the lattice");
  return direct(z, lat);
}

WeierstrassValues weierstrass(cplx z, const EllipticLattice& lat) {
  check_tau(lat.tau);
  double m, n;
  nearest(z, lat.tau, m, n);
  cplx z0 = z - (m + n * lat.tau);
  if (std::abs(z0) <= kPoleGuard) throw Error("elliptic: argument on the lattice");
  WeierstrassValues v = direct(z0, lat);
  // z = z0 + 2 m w1 + 2 n w2; unfold the tau-shifts first, then the unit shifts.
  const cplx w1 = 0.5, w2 = 0.5 * lat.tau;
  cplx u = z0;
  auto shift = [&](cplx w, cplx eta, int count) {
    int step = count > 0 ? 1 : -1;
    for (int k = 0; k != count; k += step) {
      if (step > 0) {
        // sigma(u + 2w) = -sigma(u) exp(2 eta (u + w))
        v.sigma *= -std::exp(2.0 * eta * (u + w));
        v.zeta += 2.0 * eta;
        u += 2.0 * w;
      } else {
        u -= 2.0 * w;
        v.sigma /= -std::exp(2.0 * eta * (u + w));
        v.zeta -= 2.0 * eta;
      }
    }
  };
  shift(w2, lat.eta2, static_cast<int>(n));
  shift(w1, lat.eta1, static_cast<int>(m));
  return v;
}

cplx legendre_defect(const EllipticLattice& lat) {
  return lat.eta1 * (0.5 * lat.tau) - lat.eta2 * 0.5 - 0.5 * kPi * I_unit;
}

}  // namespace lagmf
