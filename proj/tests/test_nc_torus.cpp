#include <numbers>
#include <random>

#include "doctest.h"
#include "vnlab/nc_torus.hpp"

using namespace vnlab::torus;

namespace {

TorusElement random_element(std::mt19937_64& rng, std::int64_t d, int terms, std::int64_t radius) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::int64_t> e(-radius, radius);
  TorusElement x(d);
  for (int t = 0; t < terms; ++t) x.add(e(rng), e(rng), Complex(g(rng), g(rng)));
  return x;
}

std::vector<Complex> random_b(std::mt19937_64& rng, std::int64_t d) {
  std::normal_distribution<double> g;
  std::vector<Complex> b(d);
  for (auto& v : b) v = Complex(g(rng), g(rng));
  return b;
}

TorusElement pow_e(std::int64_t d, std::int64_t h, std::int64_t k) { return TorusElement::monomial(d, h, k); }

// Products of single generators, built letter by letter.
TorusElement word(std::int64_t d, std::initializer_list<std::pair<int, std::int64_t>> letters) {
  TorusElement x = TorusElement::monomial(d, 0, 0);
  for (auto [gen, p] : letters) {
    const TorusElement g = gen == 1 ? pow_e(d, 1, 0) : pow_e(d, 0, 1);
    const TorusElement gi = adjoint(g);
    for (std::int64_t i = 0; i < std::abs(p); ++i) x = mul(x, p > 0 ? g : gi);
  }
  return x;
}

}  // namespace

TEST_CASE("commutation relation and trace") {
  const std::int64_t d = 7;
  const auto e1 = pow_e(d, 1, 0), e2 = pow_e(d, 0, 1);
  CHECK(max_abs_difference(mul(e1, e2), mul(e2, e1).scaled(twist_power(d, 1))) < 1e-15);
  CHECK(trace(TorusElement::monomial(d, 0, 0)) == Complex(1.0));
  for (std::int64_t h = -3; h <= 3; ++h)
    for (std::int64_t k = -3; k <= 3; ++k)
      if (h || k) CHECK(trace(pow_e(d, h, k)) == Complex(0.0));
  CHECK(max_abs_difference(mul(e1, adjoint(e1)), TorusElement::monomial(d, 0, 0)) < 1e-15);
  CHECK_THROWS_AS(TorusElement(8), std::invalid_argument);
  CHECK_THROWS_AS(mul(e1, pow_e(9, 0, 1)), std::invalid_argument);
}

TEST_CASE("monomial products agree with letter-by-letter expansion") {
  const std::int64_t d = 9;
  for (std::int64_t a = -3; a <= 3; ++a)
    for (std::int64_t b = -3; b <= 3; ++b)
      for (std::int64_t c = -2; c <= 2; ++c)
        for (std::int64_t f = -2; f <= 2; ++f) {
          const auto lhs = mul(pow_e(d, a, b), pow_e(d, c, f));
          const auto rhs = word(d, {{1, a}, {2, b}, {1, c}, {2, f}});
          CHECK(max_abs_difference(lhs, rhs) < 1e-12);
        }
}

TEST_CASE("hexagon trace identity") {
  for (std::int64_t d : {5, 9}) {
    for (std::int64_t h = -5; h <= 5; ++h)
      for (std::int64_t k = -5; k <= 5; ++k) {
        const auto x = mul(mul(pow_e(d, h, k), pow_e(d, -2 * h, -2 * k)), pow_e(d, h, k));
        CHECK(std::abs(trace(x) - twist_power(d, 3 * h * k)) < 1e-13);
        const auto y = word(d, {{1, h}, {2, k}, {1, -2 * h}, {2, -2 * k}, {1, h}, {2, k}});
        CHECK(std::abs(trace(y) - twist_power(d, 3 * h * k)) < 1e-12);
      }
  }
}

TEST_CASE("star-algebra laws on random elements") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 40; ++t) {
    const std::int64_t d = 2 * std::uniform_int_distribution<std::int64_t>(1, 5)(rng) + 1;
    const auto x = random_element(rng, d, 6, 3), y = random_element(rng, d, 6, 3), z = random_element(rng, d, 4, 2);
    CHECK(max_abs_difference(adjoint(adjoint(x)), x) < 1e-14);
    double norm2 = 0;
    for (const auto& [e, c] : x.coeffs()) norm2 += std::norm(c);
    const Complex txx = trace(mul(x, adjoint(x)));
    CHECK(std::abs(txx - norm2) < 1e-12 * (1 + norm2));
    CHECK(std::abs(trace(mul(x, y)) - trace(mul(y, x))) < 1e-12);
    CHECK(max_abs_difference(mul(mul(x, y), z), mul(x, mul(y, z))) < 1e-11);
    CHECK(max_abs_difference(adjoint(mul(x, y)), mul(adjoint(y), adjoint(x))) < 1e-12);
    const Complex th1 = generic_theta1(), th2 = generic_theta2();
    CHECK(max_abs_difference(shift(mul(x, y), th1, th2, 3), mul(shift(x, th1, th2, 3), shift(y, th1, th2, 3))) <
          1e-11);
    CHECK(std::abs(trace(shift(x, th1, th2, 5)) - trace(x)) < 1e-15);
  }
}

TEST_CASE("closed-form coefficients of g g*") {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 30; ++t) {
    const std::int64_t d = 2 * std::uniform_int_distribution<std::int64_t>(0, 4)(rng) + 1;
    const std::int64_t M = std::uniform_int_distribution<std::int64_t>(1, 8)(rng);
    const auto b = random_b(rng, d);
    const auto g = build_g(b, M);
    const auto direct = mul(g, adjoint(g));
    double scale = 1;
    for (const auto& [e, c] : direct.coeffs()) scale = std::max(scale, std::abs(c));
    for (std::int64_t h = -M; h <= M; ++h)
      for (std::int64_t k = -M; k <= M; ++k)
        CHECK(std::abs(dhk_coefficient(b, M, h, k) - direct.coefficient(h, k)) <= 1e-9 * scale);
    CHECK(max_abs_difference(build_a(b, M), direct) <= 1e-9 * scale);
  }
  const std::vector<Complex> zero(5);
  CHECK(build_a(zero, 4).coeffs().empty());
  std::vector<Complex> delta1(5);
  delta1[1] = 1.0;
  const auto a1 = build_a(delta1, 1);
  CHECK(max_abs_difference(a1, TorusElement::monomial(5, 0, 0)) < 1e-15);
  CHECK_THROWS_AS(build_a(delta1, 0), std::invalid_argument);
}

TEST_CASE("generic limit") {
  CHECK(generic_limit(TorusElement::monomial(7, 0, 0)) == Complex(1.0));
  CHECK(std::abs(generic_limit(TorusElement::monomial(7, 0, 0, 2.5)) - 15.625) < 1e-13);
  std::mt19937_64 rng(53);
  for (int t = 0; t < 10; ++t) {
    std::vector<Complex> b(9);
    for (auto& v : b) v = std::normal_distribution<double>()(rng);
    const auto a = build_a(b, 5);
    CHECK(std::abs(generic_limit(a).imag()) <= 1e-9 * (1 + std::abs(generic_limit(a))));
  }
}

TEST_CASE("empirical Cesaro averages") {
  std::mt19937_64 rng(54);
  const Complex th1 = generic_theta1(), th2 = generic_theta2();
  const auto one = TorusElement::monomial(5, 0, 0);
  for (std::int64_t N : {0, 3, 50}) CHECK(std::abs(empirical_cesaro(one, th1, th2, N) - 1.0) < 1e-14);
  std::vector<Complex> b(5);
  for (auto& v : b) v = std::normal_distribution<double>()(rng);
  const auto a = build_a(b, 3);
  CHECK(std::abs(empirical_cesaro(a, th1, th2, 0) - trace(mul(mul(a, a), a))) < 1e-9);
  for (std::int64_t N : {1, 7, 40}) {
    const Complex fast = empirical_cesaro(a, th1, th2, N);
    const Complex slow = empirical_cesaro_direct(a, th1, th2, N);
    CHECK(std::abs(fast - slow) <= 1e-9 * (1 + std::abs(slow)));
  }
  // Resonant phases: the kernel's degenerate branch.
  const Complex r1 = std::polar(1.0, 2 * std::numbers::pi / 3), r2 = std::polar(1.0, 2 * std::numbers::pi / 5);
  CHECK(std::abs(empirical_cesaro(a, r1, r2, 20) - empirical_cesaro_direct(a, r1, r2, 20)) < 1e-8);
  const auto lim = generic_limit(a);
  const Complex far = empirical_cesaro(a, th1, th2, 20000);
  CHECK(std::abs(far - lim) <= 5e-3 * (1 + std::abs(lim)));
  CHECK_THROWS_AS(empirical_cesaro(a, th1, th2, -1), std::invalid_argument);
}

TEST_CASE("ergodicity probe") {
  const Complex th1 = generic_theta1(), th2 = generic_theta2();
  const std::int64_t N = 10000;
  const auto p = ergodicity_probe(th1, th2, 1, 0, N);
  CHECK_FALSE(p.resonant);
  // |sum_{n=1}^N z^n| <= 2 / |z - 1|.
  CHECK(std::abs(p.average) <= 2.0 / (static_cast<double>(N) * p.distance) + 1e-12);
  CHECK(std::abs(ergodicity_probe(th1, th2, 1, 1, N).average) <= 1e-2);
  const Complex root = std::polar(1.0, 2 * std::numbers::pi / 4);
  const auto r = ergodicity_probe(root, th2, 4, 0, 100);
  CHECK(r.resonant);
  CHECK(std::abs(r.average - 1.0) < 1e-12);
  CHECK_THROWS_AS(ergodicity_probe(th1, th2, 0, 0, N), std::invalid_argument);
}
