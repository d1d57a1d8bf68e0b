#include "lagmf/dialgebra.hpp"

#include <cmath>
#include <numbers>

namespace lagmf {

namespace {

constexpr double kTraceTol = 1e-10;

void check_dim(const CMatrix& x, int n, const char* what) {
  if (x.rows() != n || x.cols() != n) throw Error(std::string(what) + ": dimension mismatch");
}

cplx root_of_unity(int t, int k) {
  double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(t);
  return {std::cos(a), std::sin(a)};
}

}  // namespace

Splitting make_splitting(SplittingFamily family, int n) {
  if (n < 2) throw Error("splitting: dimension must be at least 2");
  return {n, family};
}

CMatrix Splitting::project_plus(const CMatrix& x) const {
  check_dim(x, n, "splitting");
  CMatrix out = CMatrix::Zero(n, n);
  if (family == SplittingFamily::AKS) {
    // skew part S with S_lower = X_lower
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        out(i, j) = x(i, j);
        out(j, i) = -x(i, j);
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) out(i, j) = x(i, j);
  }
  return out;
}

CMatrix Splitting::project_minus(const CMatrix& x) const {
  check_dim(x, n, "splitting");
  if (family == SplittingFamily::AKS) return x - project_plus(x);
  CMatrix out = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) out(i, j) = x(i, j);
  return out;
}

CMatrix Splitting::project_zero(const CMatrix& x) const {
  check_dim(x, n, "splitting");
  CMatrix out = CMatrix::Zero(n, n);
  if (family == SplittingFamily::Cartan)
    for (int i = 0; i < n; ++i) out(i, i) = x(i, i);
  return out;
}

CMatrix Splitting::r_plus(const CMatrix& x) const {
  if (family == SplittingFamily::AKS) return project_plus(x);
  return project_plus(x) + 0.5 * project_zero(x);
}

CMatrix Splitting::r_minus(const CMatrix& x) const {
  if (family == SplittingFamily::AKS) return -project_minus(x);
  return -(project_minus(x) + 0.5 * project_zero(x));
}

CMatrix Splitting::r(const CMatrix& x) const { return project_plus(x) - project_minus(x); }

SplitPair split_apply(const CMatrix& x, const Splitting& s) {
  check_dim(x, s.n, "split_apply");
  if (std::abs(x.trace()) > kTraceTol) throw Error("split_apply: argument must be traceless");
  return {s.r_plus(x), s.r_minus(x)};
}

CMatrix r_bracket(const CMatrix& x, const CMatrix& y, const Splitting& s) {
  check_dim(x, s.n, "r_bracket");
  check_dim(y, s.n, "r_bracket");
  return 0.5 * (commutator(s.r(x), y) + commutator(x, s.r(y)));
}

double mcybe_residual(const CMatrix& x, const CMatrix& y, const LinearMap& r) {
  CMatrix rx = r(x), ry = r(y);
  CMatrix res = commutator(rx, ry) - r(commutator(rx, y) + commutator(x, ry)) + commutator(x, y);
  return norm(res);
}

double mcybe_residual(const CMatrix& x, const CMatrix& y, const Splitting& s) {
  return mcybe_residual(x, y, [&s](const CMatrix& m) { return s.r(m); });
}

CMatrix invariant_gradient(const CMatrix& l, int k) {
  if (k < 1) throw Error("invariant_gradient: k must be at least 1");
  CMatrix p = l;
  for (int i = 1; i < k; ++i) p = p * l;
  return p;
}

CMatrix dialgebra_lax_rhs(const CMatrix& l, int k, const LaxSign& sign, const Splitting& s) {
  CMatrix grad = sign.scale * invariant_gradient(l, k);
  CMatrix m = sign.use_plus ? s.r_plus(grad) : s.r_minus(grad);
  return commutator(m, l);
}

TensorMatrix casimir(int n) {
  TensorMatrix c = TensorMatrix::zero(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.data(i * n + j, j * n + i) = 1.0;
  return c;
}

CMatrix automorphism_power(const CMatrix& x, int k, int t) {
  CMatrix out = x;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) out(i, j) *= root_of_unity(t, ((k * (j - i)) % t + t) % t);
  return out;
}

bool omega_equivalent(cplx a, cplx b, int t, double tol) {
  for (int k = 0; k < t; ++k)
    if (std::abs(a - root_of_unity(t, k) * b) < tol) return true;
  return false;
}

RKernel rational_kernel(int n) {
  if (n < 1) throw Error("kernel: dimension must be positive");
  return {n, KernelFamily::Rational, 1, 1.0};
}

RKernel cyclotomic_kernel(int t) {
  if (t < 1) throw Error("kernel: order must be positive");
  return {t, KernelFamily::Cyclotomic, t, root_of_unity(t, 1)};
}

TensorMatrix RKernel::operator()(cplx lambda, cplx mu) const {
  const int t = family == KernelFamily::Rational ? 1 : order;
  TensorMatrix r = TensorMatrix::zero(n, 2);
  for (int k = 0; k < t; ++k) {
    cplx denom = mu - root_of_unity(t, -k) * lambda;
    if (std::abs(denom) < 1e-12) throw Error("kernel: coincident spectral points");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx phase = root_of_unity(t, ((k * (j - i)) % t + t) % t);
        r.data(i * n + j, j * n + i) += phase / denom;
      }
  }
  if (t > 1) r = (1.0 / static_cast<double>(t)) * r;
  return r;
}

TensorMatrix RKernel::swapped(cplx mu, cplx lambda) const { return flip((*this)(mu, lambda)); }

double cybe_residual(const RKernel& k, cplx lambda, cplx mu, cplx nu) {
  const int t = k.family == KernelFamily::Rational ? 1 : k.order;
  if (omega_equivalent(lambda, mu, t) || omega_equivalent(lambda, nu, t) ||
      omega_equivalent(mu, nu, t))
    throw Error("cybe_residual: spectral points must be pairwise inequivalent");
  TensorMatrix r12 = embed_pair(k(lambda, mu), 1, 2);
  TensorMatrix r13 = embed_pair(k(lambda, nu), 1, 3);
  TensorMatrix r23 = embed_pair(k(mu, nu), 2, 3);
  TensorMatrix r32 = embed_pair(k(nu, mu), 3, 2);
  return norm(commutator(r12, r13) + commutator(r12, r23) + commutator(r32, r13));
}

cplx omega_identity_residual(cplx z1, cplx z2, int l, int t) {
  int lm = ((l % t) + t) % t;
  cplx lhs = std::pow(z1, t - 1 - lm) * std::pow(z2, lm) / (std::pow(z1, t) - std::pow(z2, t));
  cplx rhs = 0.0;
  for (int k = 0; k < t; ++k)
    rhs += root_of_unity(t, ((-k * l) % t + t) % t) / (z1 - root_of_unity(t, k) * z2);
  return lhs - rhs / static_cast<double>(t);
}

}  // namespace lagmf
