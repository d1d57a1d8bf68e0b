#include "lagmf/matrixcore.hpp"

#include <cmath>

namespace lagmf {

double norm(const CMatrix& m) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) r = std::max(r, std::abs(m.data()[i]));
  return r;
}

double norm(const CVector& v) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) r = std::max(r, std::abs(v[i]));
  return r;
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) return false;
  }
  return true;
}

CMatrix unit(int n, int i, int j) {
  CMatrix e = CMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw Error("commutator: dimension mismatch");
  return a * b - b * a;
}

std::vector<cplx> power_traces(const CMatrix& l, int kmax) {
  if (kmax < 1) throw Error("power_traces: kmax must be at least 1");
  std::vector<cplx> out;
  out.reserve(kmax);
  CMatrix p = l;
  for (int k = 1; k <= kmax; ++k) {
    out.push_back(p.trace());
    if (k < kmax) p = p * l;
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

int ipow(int n, int k) {
  int r = 1;
  for (int i = 0; i < k; ++i) r *= n;
  return r;
}

void check_same(const TensorMatrix& a, const TensorMatrix& b) {
  if (a.n != b.n || a.legs != b.legs) throw Error("tensor: shape mismatch");
}

}  // namespace

TensorMatrix TensorMatrix::zero(int n, int legs) {
  int d = ipow(n, legs);
  return {n, legs, CMatrix::Zero(d, d)};
}

TensorMatrix TensorMatrix::identity(int n, int legs) {
  int d = ipow(n, legs);
  return {n, legs, CMatrix::Identity(d, d)};
}

TensorMatrix TensorMatrix::product(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw Error("tensor: factor dimension mismatch");
  return {static_cast<int>(a.rows()), 2, kron(a, b)};
}

TensorMatrix operator+(const TensorMatrix& a, const TensorMatrix& b) {
  check_same(a, b);
  return {a.n, a.legs, a.data + b.data};
}

TensorMatrix operator-(const TensorMatrix& a, const TensorMatrix& b) {
  check_same(a, b);
  return {a.n, a.legs, a.data - b.data};
}

TensorMatrix operator*(cplx s, const TensorMatrix& a) { return {a.n, a.legs, s * a.data}; }

TensorMatrix commutator(const TensorMatrix& a, const TensorMatrix& b) {
  check_same(a, b);
  return {a.n, a.legs, a.data * b.data - b.data * a.data};
}

double norm(const TensorMatrix& t) { return norm(t.data); }

CMatrix swap_operator(int n) {
  CMatrix p = CMatrix::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) p(a * n + b, b * n + a) = 1.0;
  return p;
}

TensorMatrix flip(const TensorMatrix& m) {
  if (m.legs != 2) throw Error("flip: two-leg operator required");
  CMatrix p = swap_operator(m.n);
  return {m.n, 2, p * m.data * p};
}

TensorMatrix embed_pair(const TensorMatrix& m, int i, int j) {
  if (m.legs != 2) throw Error("embed_pair: two-leg operator required");
  if (i < 1 || i > 3 || j < 1 || j > 3) throw Error("embed_pair: legs must be in {1,2,3}");
  if (i == j) throw Error("embed_pair: repeated legs");
  const int n = m.n;
  const int k = 6 - i - j;  // spectator leg
  TensorMatrix out = TensorMatrix::zero(n, 3);
  int r[4], c[4];
  for (r[1] = 0; r[1] < n; ++r[1])
    for (r[2] = 0; r[2] < n; ++r[2])
      for (r[3] = 0; r[3] < n; ++r[3])
        for (c[1] = 0; c[1] < n; ++c[1])
          for (c[2] = 0; c[2] < n; ++c[2])
            for (c[3] = 0; c[3] < n; ++c[3]) {
              if (r[k] != c[k]) continue;
              out.data((r[1] * n + r[2]) * n + r[3], (c[1] * n + c[2]) * n + c[3]) =
                  m.data(r[i] * n + r[j], c[i] * n + c[j]);
            }
  return out;
}

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

cplx Rng::complex_uniform(double radius) {
  double re = uniform(-radius, radius);
  double im = uniform(-radius, radius);
  return {re, im};
}

CMatrix Rng::matrix(int n, double radius) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = complex_uniform(radius);
  return m;
}

CMatrix Rng::traceless(int n, double radius) {
  CMatrix m = matrix(n, radius);
  cplx t = m.trace() / static_cast<double>(n);
  for (int i = 0; i < n; ++i) m(i, i) -= t;
  return m;
}

CVector Rng::vector(int n, double radius) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = complex_uniform(radius);
  return v;
}

cplx fd_partial(const ScalarFn& f, const CVector& x, int m, double h) {
  CVector xp = x, xm = x;
  xp[m] += h;
  xm[m] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

cplx fd_partial_imag(const ScalarFn& f, const CVector& x, int m, double h) {
  CVector xp = x, xm = x;
  xp[m] += cplx(0.0, h);
  xm[m] -= cplx(0.0, h);
  return (f(xp) - f(xm)) / (2.0 * h);
}

CVector fd_gradient(const ScalarFn& f, const CVector& x, double h) {
  CVector g(x.size());
  for (Eigen::Index m = 0; m < x.size(); ++m) g[m] = fd_partial(f, x, static_cast<int>(m), h);
  return g;
}

cplx fd_directional(const ScalarFn& f, const CVector& x, const CVector& v, double h) {
  return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
}

CMatrix fd_directional(const MatrixFn& f, const CVector& x, const CVector& v, double h) {
  return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
}

CMatrix fd_trace_gradient(const std::function<cplx(const CMatrix&)>& f, const CMatrix& x,
                          double h) {
  CMatrix g(x.cols(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      CMatrix xp = x, xm = x;
      xp(i, j) += h;
      xm(i, j) -= h;
      g(j, i) = (f(xp) - f(xm)) / (2.0 * h);
    }
  return g;
}

}  // namespace lagmf
