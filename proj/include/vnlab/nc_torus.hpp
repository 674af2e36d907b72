#pragma once

// Truncated noncommutative torus: finite Laurent sums in unitaries e1, e2
// with e1 e2 = u e2 e1, u = e^{2 pi i/d}, so that
//   (e1^a e2^b)(e1^c e2^f) = u^{-bc} e1^{a+c} e2^{b+f}.
// The trace picks the constant coefficient and the shift multiplies the
// coefficient of e1^h e2^k by theta1^h theta2^k.

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace vnlab::torus {

using Complex = std::complex<double>;
using Exponent = std::pair<std::int64_t, std::int64_t>;

// u^e for u = e^{2 pi i/d}.
Complex twist_power(std::int64_t d, std::int64_t e);

class TorusElement {
 public:
  explicit TorusElement(std::int64_t d);
  static TorusElement monomial(std::int64_t d, std::int64_t h, std::int64_t k, Complex c = 1.0);

  std::int64_t d() const { return d_; }
  const std::map<Exponent, Complex>& coeffs() const { return coeffs_; }
  Complex coefficient(std::int64_t h, std::int64_t k) const;
  void add(std::int64_t h, std::int64_t k, Complex c);
  // Largest |h| and |k| in the support.
  std::int64_t radius() const;

  TorusElement& operator+=(const TorusElement& o);
  TorusElement scaled(Complex c) const;

 private:
  std::int64_t d_;
  std::map<Exponent, Complex> coeffs_;
};

TorusElement mul(const TorusElement& x, const TorusElement& y);
TorusElement adjoint(const TorusElement& x);
Complex trace(const TorusElement& x);
TorusElement shift(const TorusElement& x, Complex theta1, Complex theta2, std::int64_t n);
double max_abs_difference(const TorusElement& x, const TorusElement& y);

// g = sum_{k=1}^M sum_h c_h e1^h e2^k with c_h = b(h mod d) 1_{[1,M]}(h).
TorusElement build_g(std::span<const Complex> b, std::int64_t M);
// Coefficient of e1^h e2^k in g g*:
//   (M - |k|)_+ sum_l c_{l+h} conj(c_l) u^{kl}.
Complex dhk_coefficient(std::span<const Complex> b, std::int64_t M, std::int64_t h, std::int64_t k);
// a = g g* from the closed-form coefficients. When M <= verify_up_to the
// product g g* is also formed directly and compared (relative 1e-9).
TorusElement build_a(std::span<const Complex> b, std::int64_t M, std::int64_t verify_up_to = 12);

// sum_{h,k} c_{h,k}^2 c_{-2h,-2k} u^{3hk}.
Complex generic_limit(const TorusElement& a);

// (1/(2N+1)) sum_{n=-N}^{N} tau(a alpha^n(a) alpha^{2n}(a)). The n-sum is
// carried out in closed form per frequency (Dirichlet kernel), which is
// exact; the direct variant loops over n.
Complex empirical_cesaro(const TorusElement& a, Complex theta1, Complex theta2, std::int64_t N);
Complex empirical_cesaro_direct(const TorusElement& a, Complex theta1, Complex theta2,
                                std::int64_t N);

struct ErgodicityProbe {
  Complex average;
  bool resonant = false;  // theta1^h theta2^k == 1
  double distance = 0;    // |theta1^h theta2^k - 1|
};
ErgodicityProbe ergodicity_probe(Complex theta1, Complex theta2, std::int64_t h, std::int64_t k,
                                 std::int64_t N);

Complex generic_theta1();  // e^{2 pi i sqrt 2}
Complex generic_theta2();  // e^{2 pi i sqrt 3}

}  // namespace vnlab::torus
