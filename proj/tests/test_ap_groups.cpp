#include <random>

#include "doctest.h"
#include "oracles/word_problem.hpp"
#include "vnlab/ap_groups.hpp"

using namespace vnlab;
using square::GeneratorSymbol;

namespace {

const std::set<std::int64_t> kA{1, 3, 4, 7, 20};

// Explicit closure of all AP4 relators with n in [-w, w] and r in A.
square::ExplicitBase windowed_ap4(const ap::ProgressionBase& base, std::int64_t w) {
  std::vector<square::Quadruple> quads;
  for (std::int64_t n = -w; n <= w; ++n)
    for (auto r : kA) quads.push_back(base.relator(n, r));
  return square::validate_base(quads);
}

}  // namespace

TEST_CASE("progression oracle completes relators in both readings") {
  const auto base = ap::make_ap4(kA);
  const auto e = [&](int f, std::int64_t i) { return base.symbol(f, i); };
  CHECK(base.complete(e(0, 5), e(1, 8)) == square::SymbolPair{e(2, 11), e(3, 14)});
  CHECK(base.complete(e(3, 14), e(0, 5)) == square::SymbolPair{e(1, 8), e(2, 11)});
  CHECK(base.complete(e(2, 11), e(3, 14)) == square::SymbolPair{e(0, 5), e(1, 8)});
  CHECK_FALSE(base.complete(e(0, 5), e(1, 7)).has_value());  // r = 2 not in A
  CHECK_FALSE(base.complete(e(0, 5), e(2, 7)).has_value());  // not consecutive
  CHECK_FALSE(base.complete(e(0, 5), e(1, 8).inverse()).has_value());
  CHECK(base.complete(e(3, 14).inverse(), e(2, 11).inverse()) ==
        square::SymbolPair{e(1, 8).inverse(), e(0, 5).inverse()});
  // Odd spacing on the wrap-around pair: 0 - 3r must be divisible by 3.
  CHECK_FALSE(base.complete(e(3, 1), e(0, 0)).has_value());
}

TEST_CASE("progression oracle matches an explicit relator table") {
  const auto base = ap::make_ap4(kA);
  const auto table = windowed_ap4(base, 80);
  // Pairs whose completion stays inside the window.
  for (int f = 0; f < 4; ++f)
    for (int g = 0; g < 4; ++g)
      for (std::int64_t i = -10; i <= 10; ++i)
        for (std::int64_t j = -25; j <= 25; ++j)
          for (int signs = 0; signs < 4; ++signs) {
            auto x = base.symbol(f, i, signs & 1);
            auto y = base.symbol(g, j, signs & 2);
            CHECK(base.complete(x, y) == table.complete(x, y));
          }
}

TEST_CASE("relators are trivial and shifts commute with normal forms") {
  const auto base = ap::make_ap4(kA);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t n = std::uniform_int_distribution<std::int64_t>(-50, 50)(rng);
    const auto q = base.relator(n, 7);
    CHECK(square::normal_form(std::vector<GeneratorSymbol>(q.begin(), q.end()), base).is_identity());

    std::vector<GeneratorSymbol> w;
    const int len = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int i = 0; i < len; ++i)
      w.push_back(base.symbol(std::uniform_int_distribution<int>(0, 3)(rng),
                              std::uniform_int_distribution<std::int64_t>(-6, 6)(rng),
                              std::bernoulli_distribution(0.5)(rng)));
    const auto nf = square::normal_form(w, base);
    const std::int64_t k = std::uniform_int_distribution<std::int64_t>(-9, 9)(rng);
    CHECK(ap::shift(nf, k) == square::normal_form(ap::shift_word(w, k), base));
    CHECK(ap::shift(ap::shift(nf, k), -k) == nf);
    if (!nf.is_identity() && k != 0) CHECK(ap::shift(nf, k) != nf);
  }
}

TEST_CASE("short AP4 words agree with brute-force rewriting") {
  const auto base = ap::make_ap4({1, 2});
  std::vector<square::Quadruple> quads;
  for (std::int64_t n = -8; n <= 8; ++n)
    for (std::int64_t r : {1, 2}) quads.push_back(base.relator(n, r));
  const auto table = square::validate_base(quads);
  const auto closure = table.closure();
  std::mt19937_64 rng(4);
  int trivial = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GeneratorSymbol> w;
    if (trial % 2) {
      const auto q = base.relator(std::uniform_int_distribution<std::int64_t>(-2, 2)(rng),
                                  std::uniform_int_distribution<std::int64_t>(1, 2)(rng));
      const auto s = base.symbol(std::uniform_int_distribution<int>(0, 3)(rng),
                                 std::uniform_int_distribution<std::int64_t>(-2, 2)(rng));
      w = {s, q[0], q[1], q[2], q[3], s.inverse()};
      std::rotate(w.begin(), w.begin() + 1 + trial % 4, w.end());
    } else {
      for (int i = 0; i < 5; ++i)
        w.push_back(base.symbol(std::uniform_int_distribution<int>(0, 3)(rng),
                                std::uniform_int_distribution<std::int64_t>(-2, 2)(rng),
                                std::bernoulli_distribution(0.5)(rng)));
    }
    const bool by_nf = square::normal_form(w, base).is_identity();
    trivial += by_nf;
    CHECK(by_nf == oracle::bfs_trivial(w, closure, 10, w.size() + 4));
  }
  CHECK(trivial > 40);
}

TEST_CASE("slop word is trivial exactly for admissible spacings") {
  for (std::int64_t r = -25; r <= 25; ++r) {
    const auto res = ap::verify_slop(kA, r, 25);
    CHECK_MESSAGE(res.identity == (kA.count(r) > 0), "r = ", r);
  }
  CHECK_THROWS_AS(ap::verify_slop(kA, 26, 25), std::invalid_argument);
  CHECK_THROWS_AS(ap::verify_slop(kA, 1, 10), std::invalid_argument);
}

TEST_CASE("slop solutions in the 5-family product") {
  const auto sols = ap::classify_slop3(1);
  REQUIRE(sols.size() == 3);
  CHECK(sols[0] == ap::SlopTuple{0, 0, 0, 0, 0});
  CHECK(sols[1] == ap::SlopTuple{1, 2, 3, 4, 5});
  CHECK(sols[2] == ap::SlopTuple{10, 9, 8, 7, 6});
  CHECK(ap::tuple_to_string(sols[2]) == "(e4^-1, e3^-1, e2^-1, e1^-1, e0^-1)");
  CHECK(ap::tuple_is_trivial({1, 2, 3, 4, 5}, 2));
  CHECK_FALSE(ap::tuple_is_trivial({2, 1, 3, 4, 5}, 2));
  // Every solution is killed by all the integer-valued homomorphisms.
  for (const auto& t : sols)
    for (int i = 0; i < 5; ++i) {
      std::vector<GeneratorSymbol> w;
      for (int l = 0; l < 5; ++l)
        if (auto s = ap::factor_letter(t[l], l, 1, i)) w.push_back(*s);
      CHECK(ap::weighted_hom(w, i) == 0);
      for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k)
          if (j != i && k != i) CHECK(ap::signed_count_hom(w, j, k) == 0);
    }
}

TEST_CASE("homomorphisms to Z") {
  const auto f4 = ap::make_ap5_factor(4);
  const std::vector<GeneratorSymbol> w{f4.symbol(0, 5), f4.symbol(1, 7, true)};
  CHECK(ap::signed_count_hom(w, 0, 1) == 2);
  CHECK(ap::weighted_hom(w, 4) == -7);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    const auto base = ap::make_ap5_factor(i);
    for (int trial = 0; trial < 50; ++trial) {
      const auto q = base.relator(std::uniform_int_distribution<std::int64_t>(-100, 100)(rng),
                                  std::uniform_int_distribution<std::int64_t>(-100, 100)(rng));
      const std::vector<GeneratorSymbol> rel(q.begin(), q.end());
      CHECK(ap::weighted_hom(rel, i) == 0);
      for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k)
          if (j != i && k != i) CHECK(ap::signed_count_hom(rel, j, k) == 0);
    }
    const auto wts = ap::weighted_hom_weights(i);
    CHECK(wts[i] == 0);
  }
  CHECK_THROWS_AS(ap::weighted_hom(w, 0), std::invalid_argument);
}

TEST_CASE("homomorphisms agree on words with equal normal forms") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5; ++i) {
    const auto base = ap::make_ap5_factor(i);
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<GeneratorSymbol> w;
      for (int l = 0; l < 7; ++l)
        w.push_back(base.symbol(base.families()[std::uniform_int_distribution<int>(0, 3)(rng)],
                                std::uniform_int_distribution<std::int64_t>(-4, 4)(rng),
                                std::bernoulli_distribution(0.5)(rng)));
      const auto v = square::integrate(square::normal_form(w, base).connection());
      CHECK(ap::weighted_hom(w, i) == ap::weighted_hom(v, i));
      const int j = base.families()[0], k = base.families()[3];
      CHECK(ap::signed_count_hom(w, j, k) == ap::signed_count_hom(v, j, k));
    }
  }
}

TEST_CASE("shift has no fixed points on random normal forms") {
  std::mt19937_64 rng(6);
  const auto ap4 = ap::make_ap4(kA);
  const auto ap5 = ap::make_ap5_factor(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& base = trial % 2 ? static_cast<const ap::ProgressionBase&>(ap4) : ap5;
    std::vector<GeneratorSymbol> w;
    for (int i = 0; i < 6; ++i)
      w.push_back(base.symbol(base.families()[std::uniform_int_distribution<int>(0, 3)(rng)],
                              std::uniform_int_distribution<std::int64_t>(-5, 5)(rng),
                              std::bernoulli_distribution(0.5)(rng)));
    const auto nf = square::normal_form(w, base);
    if (nf.is_identity()) continue;
    for (std::int64_t k = -5; k <= 5; ++k)
      if (k != 0) CHECK(ap::shift(nf, k) != nf);
  }
}

TEST_CASE("base construction errors") {
  CHECK_THROWS_AS(ap::make_ap5_factor(5), std::invalid_argument);
  CHECK_THROWS_AS(ap::ProgressionBase({0, 0, 1, 2}, {0, 1, 2, 3}, std::nullopt), square::InvalidBase);
}
