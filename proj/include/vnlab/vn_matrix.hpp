#pragma once

// Finite von Neumann dynamical systems: d x d matrices with the normalized
// trace and a shift given by conjugation with a unitary.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vnlab/combinatorics.hpp"

namespace vnlab::vn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct NotPSD : std::domain_error {
  using std::domain_error::domain_error;
};
struct PeriodUndetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kEigenFloor = -1e-9;
inline constexpr double kNotPsdFloor = -1e-6;
// Integral of (1-|h|)_+^2 (1-|2h|)_+ over the real line.
inline constexpr double kHasConstant = 17.0 / 48.0;

class MatrixSystem {
 public:
  // General unitary; checked to kUnitaryTolerance. A diagonal U is detected
  // and handled entrywise.
  static MatrixSystem from_unitary(Matrix U);
  // U = diag(phases), |phases| = 1.
  static MatrixSystem diagonal(Vector phases);
  // U = diag(e^{2 pi i num_j / den}); the period is known exactly.
  static MatrixSystem rational_phases(std::vector<std::int64_t> num, std::int64_t den);
  // alpha(B)(j,k) = e^{2 pi i (j-k)/d} B(j,k).
  static MatrixSystem negns(int d);

  int dim() const { return d_; }
  bool is_diagonal() const { return diagonal_; }
  const Matrix& unitary() const { return U_; }
  const Vector& phases() const { return phases_; }
  // Exact period of n -> alpha^n when the phases are rational.
  std::optional<std::int64_t> exact_period() const { return period_; }

  Matrix shift(const Matrix& B, std::int64_t n = 1) const;
  // Phases raised to the n-th power, exact for rational phases.
  Vector phase_power(std::int64_t n) const;

 private:
  int d_ = 0;
  bool diagonal_ = false;
  Matrix U_;
  Vector phases_;
  std::vector<std::int64_t> num_;
  std::int64_t den_ = 0;
  std::optional<std::int64_t> period_;
};

// (1/d) tr B.
Complex trace(const Matrix& B);
bool is_hermitian(const Matrix& B, double tol = kHermitianTolerance);
// Indices j with a nonzero entry in row j or column j.
std::vector<int> active_support(const Matrix& B);

struct PSDWitness {
  Matrix A;
  double eigen_floor = 0;
};

// A(j,k) = 1_E(j) 1_E(k) + 1_E(j) w^{-j} 1_E(k) w^{k}, w = e^{2 pi i/3}.
PSDWitness build_negav_matrix(const comb::CyclicSet& E);
// Smallest eigenvalue, computed on the active support.
double eigen_floor(const Matrix& A);

// (1 + w^r)^2 (1 + w^{-2r}).
Complex negav_summand(std::int64_t r);

// sum_{n,r} A(n,n+r) A(n+r,n+2r) A(n+2r,n) with indices mod d.
double restricted_third_moment(const Matrix& A);

// tau(a alpha^n(a) ... alpha^{(k-1)n}(a)).
Complex multi_trace(const MatrixSystem& sys, const Matrix& a, std::int64_t n, int k);

struct CesaroOptions {
  std::int64_t max_period = 1 << 16;
  bool allow_fallback = true;
  std::int64_t fallback_N = 2000;
};

struct CesaroResult {
  Complex value;
  std::int64_t period = 0;  // 0 when no period was found
  bool exact = false;
  std::int64_t samples = 0;  // number of n averaged
};

// Average of multi_trace over one exact period, which equals the symmetric
// Cesaro limit. Without a period the symmetric average over [-N, N] is
// returned (or PeriodUndetected thrown when fallback is disabled).
CesaroResult cesaro_limit(const MatrixSystem& sys, const Matrix& a, int k,
                          const CesaroOptions& opt = {});
std::optional<std::int64_t> detect_period(const MatrixSystem& sys, std::int64_t max_period,
                                          double tol = 1e-12);

// Average of alpha^n(a) over one exact period centred at 0.
Matrix shift_average(const MatrixSystem& sys, const Matrix& a);
Matrix diagonal_part(const Matrix& a);

// Hermitian square root of a PSD matrix, computed on the active support.
Matrix psd_factor(const Matrix& A);

// The trace of a alpha^n(a) alpha^{2n}(a), n != 0, in the crossed-product
// system built from b with f_j(x) = b(x, x+j) 1_{1 <= j <= N d}.
double has_sum(const Matrix& b, std::int64_t N);
// (17/48) (1/d) restricted_third_moment(A).
double tao_prediction(const Matrix& A);

struct ReversibleSplit {
  std::vector<Complex> eigenvalues;
  std::vector<Matrix> eigen_operators;  // tau-orthonormal
  double max_residual = 0;              // max ||alpha(v) - lambda v||
  double gram_deviation = 0;            // max |<v_i, v_j> - delta_ij|
  int stable_dimension = 0;             // d^2 minus the rank of the eigenbasis
};

ReversibleSplit reversible_split(const MatrixSystem& sys);

// (1/N) sum_{n=1}^N alpha^n(a) alpha^{2n}(b).
Matrix triple_average(const MatrixSystem& sys, const Matrix& a, const Matrix& b, std::int64_t N);

}  // namespace vnlab::vn
