#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lagmf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx I_unit{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Max absolute entry; the residual norm used everywhere.
double norm(const CMatrix& m);
double norm(const CVector& v);
bool all_finite(const CMatrix& m);

// E_ij with 0-based indices.
CMatrix unit(int n, int i, int j);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

// (Tr L, Tr L^2, ..., Tr L^kmax) by repeated multiplication.
std::vector<cplx> power_traces(const CMatrix& l, int kmax);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Operator on (C^n)^{⊗legs}; leg 1 is the most significant index.
struct TensorMatrix {
  int n = 0;
  int legs = 0;
  CMatrix data;

  static TensorMatrix zero(int n, int legs);
  static TensorMatrix identity(int n, int legs);
  static TensorMatrix product(const CMatrix& a, const CMatrix& b);
};

TensorMatrix operator+(const TensorMatrix& a, const TensorMatrix& b);
TensorMatrix operator-(const TensorMatrix& a, const TensorMatrix& b);
TensorMatrix operator*(cplx s, const TensorMatrix& a);
TensorMatrix commutator(const TensorMatrix& a, const TensorMatrix& b);
double norm(const TensorMatrix& t);

// Swap the two legs of a two-leg operator: P M P.
TensorMatrix flip(const TensorMatrix& m);

// Place a two-leg operator on legs (i, j) of a three-leg space; the first
// factor goes to leg i. Legs are 1-based.
TensorMatrix embed_pair(const TensorMatrix& m, int i, int j);

// Permutation operator P on C^n ⊗ C^n.
CMatrix swap_operator(int n);

// Deterministic generator: SplitMix64 seeding into xoshiro256**.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  double uniform();                         // [0, 1)
  double uniform(double lo, double hi);
  cplx complex_uniform(double radius = 1.0);  // both parts in [-radius, radius)
  CMatrix matrix(int n, double radius = 1.0);
  CMatrix traceless(int n, double radius = 1.0);
  CVector vector(int n, double radius = 1.0);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

inline constexpr double kFdStep = 1e-6;

using ScalarFn = std::function<cplx(const CVector&)>;
using MatrixFn = std::function<CMatrix(const CVector&)>;

// Central difference of a holomorphic scalar along coordinate m. Complex
// coordinates are treated as real pairs; for holomorphic observables the
// real-direction quotient is the complex partial derivative.
cplx fd_partial(const ScalarFn& f, const CVector& x, int m, double h = kFdStep);

// Imaginary-direction partial, used to check holomorphy (equals i * fd_partial).
cplx fd_partial_imag(const ScalarFn& f, const CVector& x, int m, double h = kFdStep);

CVector fd_gradient(const ScalarFn& f, const CVector& x, double h = kFdStep);

cplx fd_directional(const ScalarFn& f, const CVector& x, const CVector& v, double h = kFdStep);
CMatrix fd_directional(const MatrixFn& f, const CVector& x, const CVector& v, double h = kFdStep);

// Gradient of a matrix-argument scalar under the trace pairing:
// F(X + eps Y) = F(X) + eps Tr(G Y) + O(eps^2), so G_ji = dF/dX_ij.
CMatrix fd_trace_gradient(const std::function<cplx(const CMatrix&)>& f, const CMatrix& x,
                          double h = kFdStep);

}  // namespace lagmf
