#include "vnlab/nc_torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vnlab::torus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t wrap(std::int64_t a, std::int64_t d) {
  const std::int64_t r = a % d;
  return r < 0 ? r + d : r;
}

// Dense square grid of coefficients indexed by (h, k) in [-R, R]^2.
struct Grid {
  std::int64_t R;
  std::int64_t side;
  std::vector<Complex> c;

  explicit Grid(std::int64_t radius) : R(radius), side(2 * radius + 1), c(side * side) {}
  bool inside(std::int64_t h, std::int64_t k) const {
    return h >= -R && h <= R && k >= -R && k <= R;
  }
  Complex& at(std::int64_t h, std::int64_t k) { return c[(h + R) * side + (k + R)]; }
  Complex get(std::int64_t h, std::int64_t k) const {
    return inside(h, k) ? c[(h + R) * side + (k + R)] : Complex{};
  }
};

// (1/(2N+1)) sum_{n=-N}^{N} e^{i n phi}.
double dirichlet(double phi, std::int64_t N) {
  const double half = std::remainder(phi, kTwoPi) / 2.0;
  const double s = std::sin(half);
  const double len = static_cast<double>(2 * N + 1);
  if (std::abs(s) < 1e-9) {
    double total = 0;
    for (std::int64_t n = -N; n <= N; ++n) total += std::cos(static_cast<double>(n) * 2.0 * half);
    return total / len;
  }
  return std::sin(len * half) / (len * s);
}

struct Term {
  std::int64_t h, k;
  Complex c;
};

std::vector<Term> terms_of(const TorusElement& a) {
  std::vector<Term> out;
  for (const auto& [e, c] : a.coeffs()) out.push_back({e.first, e.second, c});
  return out;
}

}  // namespace

Complex twist_power(std::int64_t d, std::int64_t e) {
  const double t = kTwoPi * static_cast<double>(wrap(e, d)) / static_cast<double>(d);
  return {std::cos(t), std::sin(t)};
}

TorusElement::TorusElement(std::int64_t d) : d_(d) {
  if (d < 1 || d % 2 == 0) throw std::invalid_argument("d must be a positive odd integer");
}

TorusElement TorusElement::monomial(std::int64_t d, std::int64_t h, std::int64_t k, Complex c) {
  TorusElement x(d);
  x.add(h, k, c);
  return x;
}

Complex TorusElement::coefficient(std::int64_t h, std::int64_t k) const {
  auto it = coeffs_.find({h, k});
  return it == coeffs_.end() ? Complex{} : it->second;
}

void TorusElement::add(std::int64_t h, std::int64_t k, Complex c) {
  if (c == Complex{}) return;
  auto [it, fresh] = coeffs_.emplace(Exponent{h, k}, c);
  if (!fresh) {
    it->second += c;
    if (it->second == Complex{}) coeffs_.erase(it);
  }
}

std::int64_t TorusElement::radius() const {
  std::int64_t r = 0;
  for (const auto& [e, c] : coeffs_) r = std::max({r, std::abs(e.first), std::abs(e.second)});
  return r;
}

TorusElement& TorusElement::operator+=(const TorusElement& o) {
  if (o.d_ != d_) throw std::invalid_argument("twist mismatch");
  for (const auto& [e, c] : o.coeffs_) add(e.first, e.second, c);
  return *this;
}

TorusElement TorusElement::scaled(Complex c) const {
  TorusElement out(d_);
  for (const auto& [e, v] : coeffs_) out.add(e.first, e.second, v * c);
  return out;
}

TorusElement mul(const TorusElement& x, const TorusElement& y) {
  if (x.d() != y.d()) throw std::invalid_argument("twist mismatch");
  TorusElement out(x.d());
  for (const auto& [ex, cx] : x.coeffs())
    for (const auto& [ey, cy] : y.coeffs())
      out.add(ex.first + ey.first, ex.second + ey.second,
              cx * cy * twist_power(x.d(), -ex.second * ey.first));
  return out;
}

TorusElement adjoint(const TorusElement& x) {
  // (e1^h e2^k)* = e2^{-k} e1^{-h} = u^{-hk} e1^{-h} e2^{-k}.
  TorusElement out(x.d());
  for (const auto& [e, c] : x.coeffs())
    out.add(-e.first, -e.second, std::conj(c) * twist_power(x.d(), -e.first * e.second));
  return out;
}

Complex trace(const TorusElement& x) { return x.coefficient(0, 0); }

TorusElement shift(const TorusElement& x, Complex theta1, Complex theta2, std::int64_t n) {
  TorusElement out(x.d());
  const double a1 = std::arg(theta1), a2 = std::arg(theta2);
  for (const auto& [e, c] : x.coeffs()) {
    const double t = static_cast<double>(n) * (a1 * static_cast<double>(e.first) +
                                               a2 * static_cast<double>(e.second));
    out.add(e.first, e.second, c * Complex{std::cos(t), std::sin(t)});
  }
  return out;
}

double max_abs_difference(const TorusElement& x, const TorusElement& y) {
  double m = 0;
  for (const auto& [e, c] : x.coeffs()) m = std::max(m, std::abs(c - y.coefficient(e.first, e.second)));
  for (const auto& [e, c] : y.coeffs()) m = std::max(m, std::abs(c - x.coefficient(e.first, e.second)));
  return m;
}

TorusElement build_g(std::span<const Complex> b, std::int64_t M) {
  const std::int64_t d = static_cast<std::int64_t>(b.size());
  TorusElement g(d);
  for (std::int64_t k = 1; k <= M; ++k)
    for (std::int64_t h = 1; h <= M; ++h) g.add(h, k, b[wrap(h, d)]);
  return g;
}

Complex dhk_coefficient(std::span<const Complex> b, std::int64_t M, std::int64_t h, std::int64_t k) {
  const std::int64_t d = static_cast<std::int64_t>(b.size());
  const std::int64_t weight = M - std::abs(k);
  if (weight <= 0) return 0.0;
  Complex s{};
  for (std::int64_t l = std::max<std::int64_t>(1, 1 - h); l <= std::min(M, M - h); ++l)
    s += b[wrap(l + h, d)] * std::conj(b[wrap(l, d)]) * twist_power(d, k * l);
  return static_cast<double>(weight) * s;
}

TorusElement build_a(std::span<const Complex> b, std::int64_t M, std::int64_t verify_up_to) {
  if (M < 1) throw std::invalid_argument("M must be positive");
  const std::int64_t d = static_cast<std::int64_t>(b.size());
  TorusElement a(d);
  for (std::int64_t h = -(M - 1); h <= M - 1; ++h)
    for (std::int64_t k = -(M - 1); k <= M - 1; ++k) {
      const Complex c = dhk_coefficient(b, M, h, k);
      if (std::abs(c) > 1e-13 * static_cast<double>(M * M)) a.add(h, k, c);
    }
  if (M <= verify_up_to) {
    const TorusElement g = build_g(b, M);
    const TorusElement direct = mul(g, adjoint(g));
    double scale = 1.0;
    for (const auto& [e, c] : direct.coeffs()) scale = std::max(scale, std::abs(c));
    if (max_abs_difference(a, direct) > 1e-9 * scale)
      throw std::logic_error("closed-form coefficients disagree with g g*");
  }
  return a;
}

Complex generic_limit(const TorusElement& a) {
  Complex total{};
  for (const auto& [e, c] : a.coeffs()) {
    const Complex opp = a.coefficient(-2 * e.first, -2 * e.second);
    if (opp == Complex{}) continue;
    total += c * c * opp * twist_power(a.d(), 3 * e.first * e.second);
  }
  return total;
}

Complex empirical_cesaro(const TorusElement& a, Complex theta1, Complex theta2, std::int64_t N) {
  if (N < 0) throw std::invalid_argument("N must be non-negative");
  const std::int64_t d = a.d();
  const std::int64_t R = a.radius();
  Grid grid(R);
  for (const auto& [e, c] : a.coeffs()) grid.at(e.first, e.second) = c;
  const auto terms = terms_of(a);

  // Kernel for the frequency v = q + 2r of the middle and last factors.
  const double a1 = std::arg(theta1), a2 = std::arg(theta2);
  Grid kernel(3 * R);
  for (std::int64_t v1 = -3 * R; v1 <= 3 * R; ++v1)
    for (std::int64_t v2 = -3 * R; v2 <= 3 * R; ++v2)
      kernel.at(v1, v2) = dirichlet(a1 * static_cast<double>(v1) + a2 * static_cast<double>(v2), N);

  // tau(e^p e^q e^r) = u^{-p2 q1 - (p2 + q2) r1} when p + q + r = 0.
  Complex total{};
  for (const Term& q : terms)
    for (const Term& r : terms) {
      const std::int64_t p1 = -q.h - r.h, p2 = -q.k - r.k;
      const Complex cp = grid.get(p1, p2);
      if (cp == Complex{}) continue;
      const Complex tw = twist_power(d, -p2 * q.h - (p2 + q.k) * r.h);
      total += cp * q.c * r.c * tw * kernel.get(q.h + 2 * r.h, q.k + 2 * r.k);
    }
  return total;
}

Complex empirical_cesaro_direct(const TorusElement& a, Complex theta1, Complex theta2,
                                std::int64_t N) {
  Complex total{};
  for (std::int64_t n = -N; n <= N; ++n) {
    const TorusElement x = mul(mul(a, shift(a, theta1, theta2, n)), shift(a, theta1, theta2, 2 * n));
    total += trace(x);
  }
  return total / static_cast<double>(2 * N + 1);
}

ErgodicityProbe ergodicity_probe(Complex theta1, Complex theta2, std::int64_t h, std::int64_t k,
                                 std::int64_t N) {
  if (h == 0 && k == 0) throw std::invalid_argument("the constant monomial is excluded");
  if (N < 1) throw std::invalid_argument("N must be positive");
  const double t = std::arg(theta1) * static_cast<double>(h) + std::arg(theta2) * static_cast<double>(k);
  ErgodicityProbe out;
  const Complex z{std::cos(t), std::sin(t)};
  out.distance = std::abs(z - 1.0);
  out.resonant = out.distance < 1e-12;
  Complex s{};
  for (std::int64_t n = 1; n <= N; ++n) {
    const double tn = t * static_cast<double>(n);
    s += Complex{std::cos(tn), std::sin(tn)};
  }
  out.average = s / static_cast<double>(N);
  return out;
}

Complex generic_theta1() {
  const double t = kTwoPi * std::sqrt(2.0);
  return {std::cos(t), std::sin(t)};
}

Complex generic_theta2() {
  const double t = kTwoPi * std::sqrt(3.0);
  return {std::cos(t), std::sin(t)};
}

}  // namespace vnlab::torus
