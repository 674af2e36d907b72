// Acceptance run: one PASS/FAIL line per criterion, with the measured values
// behind each verdict. Exit status is nonzero if any criterion fails.

#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles/brute_force.hpp"
#include "oracles/random_structures.hpp"
#include "vnlab/ap_groups.hpp"
#include "vnlab/combinatorics.hpp"
#include "vnlab/group_algebra.hpp"
#include "vnlab/harness.hpp"
#include "vnlab/nc_torus.hpp"
#include "vnlab/square_group.hpp"
#include "vnlab/vn_matrix.hpp"

namespace ap = vnlab::ap;
namespace comb = vnlab::comb;
namespace galg = vnlab::galg;
namespace harness = vnlab::harness;
namespace square = vnlab::square;
namespace torus = vnlab::torus;
namespace vn = vnlab::vn;
using Complex = std::complex<double>;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  failures += !v.pass;
  char head[160];
  std::snprintf(head, sizeof head, "%s %2d %s (%.1f s)", v.pass ? "PASS" : "FAIL", id, name.c_str(), secs);
  std::cout << head << "\n";
  std::istringstream lines(v.detail);
  for (std::string line; std::getline(lines, line);) std::cout << "        " << line << "\n";
  std::cout.flush();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::set<std::int64_t> kA{1, 3, 4, 7, 20};

galg::SquareGroup ap4_group(const std::set<std::int64_t>& A) {
  return galg::SquareGroup(std::make_shared<ap::ProgressionBase>(ap::make_ap4(A)),
                           [](const square::NormalForm& nf, std::int64_t k) { return ap::shift(nf, k); });
}

std::vector<galg::GroupAlgebraElement> ap4_generators(const galg::SquareGroup& g) {
  const auto& base = static_cast<const ap::ProgressionBase&>(g.base());
  std::vector<galg::GroupAlgebraElement> e;
  for (int i = 0; i < 4; ++i) {
    const std::vector<square::GeneratorSymbol> w{base.symbol(i, 0)};
    e.push_back(galg::GroupAlgebraElement::delta(g.word(w)));
  }
  return e;
}

vn::Matrix random_unitary(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  vn::Matrix z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = Complex(g(rng), g(rng));
  return Eigen::HouseholderQR<vn::Matrix>(z).householderQ();
}

Verdict square_group_laws() {
  std::mt19937_64 rng(101);
  const int trials = 10000;
  std::int64_t bad = 0, folds = 0;
  for (int t = 0; t < trials; ++t) {
    const auto base = oracle::random_base(rng);
    const auto nf = square::normal_form(oracle::random_word(rng, 8), base);
    const auto x = oracle::random_letter(rng);
    bad += square::concatenate(square::concatenate(nf, x, base), x.inverse(), base) != nf;
    for (const auto& q : base.closure()) {
      square::NormalForm f = nf;
      for (const auto& s : q) f = square::concatenate(f, s, base);
      bad += f != nf;
      ++folds;
    }
  }
  return {bad == 0, std::to_string(trials) + " triples, " + std::to_string(folds) +
                        " quadruple folds, mismatches = " + std::to_string(bad)};
}

Verdict maxred_round_trip() {
  std::mt19937_64 rng(102);
  const int trials = 1000;
  std::int64_t bad = 0;
  for (int t = 0; t < trials; ++t) {
    const auto base = oracle::random_base(rng);
    const auto conn = oracle::random_maximal_reduced(rng, base);
    bad += square::normal_form(square::integrate(conn), base).connection() != conn;
  }
  return {bad == 0, std::to_string(trials) + " connections, mismatches = " + std::to_string(bad)};
}

Verdict k4_indicator() {
  const auto g = ap4_group(kA);
  const auto e = ap4_generators(g);
  const std::vector<std::int64_t> exps{0, 1, 2, 3};
  std::int64_t bad = 0;
  std::string ones;
  for (std::int64_t n = -30; n <= 30; ++n) {
    const Complex t = galg::k_fold_trace(g, e, exps, n);
    bad += t != Complex(kA.count(n) ? 1.0 : 0.0);
    if (t == Complex(1.0)) ones += " " + std::to_string(n);
  }
  return {bad == 0, "A = {1,3,4,7,20}; trace = 1 at n =" + ones + "; mismatches = " + std::to_string(bad)};
}

Verdict k4_perturbed() {
  const auto g = ap4_group(kA);
  const auto e = ap4_generators(g);
  const double eps = 0.01, eps4 = std::pow(eps, 4);
  auto a = galg::GroupAlgebraElement::delta(square::NormalForm{});
  for (const auto& ei : e) {
    a += ei.scaled(eps);
    a += galg::adjoint(g, ei).scaled(eps);
  }
  const std::vector<galg::GroupAlgebraElement> as(4, a);
  const std::vector<std::int64_t> exps{0, 1, 2, 3};
  double worst = 0;
  std::int64_t worst_n = 0, bad = 0, two_readings_bad = 0;
  std::ostringstream rows;
  for (std::int64_t n = -10; n <= 10; ++n) {
    const Complex t = galg::k_fold_trace(g, as, exps, n);
    const double stated = 1.0 + 2.0 * eps4 * (kA.count(n) ? 1.0 : 0.0);
    const double err = std::abs(t - stated);
    if (err > 1e-13) {
      ++bad;
      rows << "n = " << n << ": trace - 1 = " << fmt("%.6e", t.real() - 1.0) << ", stated "
           << fmt("%.1e", stated - 1.0) << "\n";
    }
    if (n != 0) two_readings_bad += std::abs(t - (1.0 + eps4 * (kA.count(n) + kA.count(-n)))) > 1e-13;
    if (err > worst) {
      worst = err;
      worst_n = n;
    }
  }
  std::ostringstream d;
  d << "stated: 1 + 2e-8 1_A(n) within 1e-13 for |n| <= 10; violations at " << bad << " of 21 n, worst "
    << fmt("%.3e", worst) << " at n = " << worst_n << "\n"
    << rows.str()
    << "measured law for n != 0: 1 + eps^4 (1_A(n) + 1_A(-n)), mismatches = " << two_readings_bad << "\n"
    << "the reversed-inverse reading e3^-1(0) e2^-1(n) e1^-1(2n) e0^-1(3n) is trivial iff -n in A,\n"
    << "so n in A gives 1 + 1e-8 (not 2e-8), -n in A gives 1 + 1e-8, and n = 0 collects lower-order words";
  return {bad == 0, d.str()};
}

Verdict slop3() {
  const ap::SlopTuple canonical{1, 2, 3, 4, 5};
  bool ok = true;
  std::ostringstream d;
  const auto fixture = harness::slop3_view(harness::load_fixture(
      harness::resolve_fixture("slop3_solutions", harness::default_fixture_dir())));
  for (std::int64_t r : {1, 2, 3}) {
    const auto sols = ap::classify_slop3(r);
    std::int64_t outside = 0;
    for (const auto& t : sols) {
      std::multiset<int> m(t.begin(), t.end());
      outside += !(m == std::multiset<int>{0, 0, 0, 0, 0} || m == std::multiset<int>{1, 2, 3, 4, 5} ||
                   m == std::multiset<int>{6, 7, 8, 9, 10});
    }
    const bool canon = std::find(sols.begin(), sols.end(), canonical) != sols.end();
    const bool matches = fixture.count(r) && fixture.at(r) == sols;
    ok &= outside == 0 && canon && matches;
    d << "r = " << r << ": " << sols.size() << " solutions, outside classes = " << outside
      << ", canonical present = " << canon << ", equals stored fixture = " << matches << "\n";
  }
  return {ok, d.str()};
}

Verdict summand() {
  double worst = 0;
  for (std::int64_t r = 0; r <= 2; ++r)
    worst = std::max(worst, std::abs(vn::negav_summand(r) - (r % 3 == 0 ? 8.0 : -1.0)));
  return {worst <= 1e-12, "max error " + fmt("%.3e", worst) + " (tol 1e-12)"};
}

struct NegavData {
  harness::NegavFixture fx;
  vn::PSDWitness w;
};

const NegavData& negav() {
  static const NegavData data = [] {
    NegavData n;
    n.fx = harness::negav_view(
        harness::load_fixture(harness::resolve_fixture("negav_E", harness::default_fixture_dir())));
    n.w = vn::build_negav_matrix(n.fx.E);
    return n;
  }();
  return data;
}

Verdict negns() {
  const auto& n = negav();
  const auto lim = vn::cesaro_limit(vn::MatrixSystem::negns(static_cast<int>(n.fx.d)), n.w.A, 3);
  const double scaled = vn::restricted_third_moment(n.w.A) / static_cast<double>(n.fx.d);
  const double rel = std::abs(lim.value - scaled) / std::abs(scaled);
  std::ostringstream d;
  d << "d = " << n.fx.d << ", |E| = " << n.fx.E.size() << ", good = " << n.fx.good << ", bad = " << n.fx.bad << "\n"
    << "cesaro_limit = " << fmt("%.10e", lim.value.real()) << " (exact period " << lim.period << ")\n"
    << "moment / d = " << fmt("%.10e", scaled) << ", relative difference " << fmt("%.2e", rel) << " (tol 1e-9)\n"
    << "PSD floor = " << fmt("%.3e", n.w.eigen_floor) << " (>= -1e-9)";
  return {lim.exact && lim.value.real() < -1e-6 && rel <= 1e-9 && n.w.eigen_floor >= -1e-9, d.str()};
}

Verdict negtrace() {
  const auto& n = negav();
  const vn::Matrix b = vn::psd_factor(n.w.A);
  const double pred = vn::tao_prediction(n.w.A);
  std::ostringstream d;
  bool ok = true;
  double prev = 0;
  for (std::int64_t N : {8, 16, 32}) {
    const double h = vn::has_sum(b, N);
    const double err = std::abs(h / std::pow(static_cast<double>(N), 4) - pred);
    d << "N = " << N << ": has_sum/N^4 = " << fmt("%.6e", h / std::pow(N, 4.0)) << ", error " << fmt("%.4e", err);
    if (prev > 0) {
      d << ", decay factor " << fmt("%.3f", prev / err) << " (>= 1.7)";
      ok &= prev / err >= 1.7;
    }
    d << "\n";
    prev = err;
  }
  d << "prediction (17/48)(1/d) sum = " << fmt("%.6e", pred) << "\n";
  std::int64_t nonneg = 0;
  double least = -1e300;
  for (std::int64_t N = n.fx.negative_from_N; N <= n.fx.scanned_up_to_N; ++N) {
    const double h = vn::has_sum(b, N);
    nonneg += !(h < 0);
    least = std::max(least, h);
  }
  ok &= nonneg == 0;
  d << "has_sum < 0 for every N in [" << n.fx.negative_from_N << ", " << n.fx.scanned_up_to_N
    << "]: violations = " << nonneg << ", largest value " << fmt("%.4e", least);
  return {ok, d.str()};
}

Verdict torus_algebra() {
  std::mt19937_64 rng(109);
  std::normal_distribution<double> g;
  double worst = 0;
  int cases = 0;
  for (std::int64_t d : {1, 3, 5, 7, 9})
    for (std::int64_t M = 1; M <= 8; ++M) {
      std::vector<Complex> b(d);
      for (auto& v : b) v = Complex(g(rng), g(rng));
      const auto gg = torus::build_g(b, M);
      const auto direct = torus::mul(gg, torus::adjoint(gg));
      double scale = 1;
      for (const auto& [e, c] : direct.coeffs()) scale = std::max(scale, std::abs(c));
      for (std::int64_t h = -M; h <= M; ++h)
        for (std::int64_t k = -M; k <= M; ++k)
          worst = std::max(worst, std::abs(torus::dhk_coefficient(b, M, h, k) - direct.coefficient(h, k)) / scale);
      ++cases;
    }
  double twist = 0;
  for (std::int64_t d : {3, 5, 7, 9})
    for (std::int64_t h = -5; h <= 5; ++h)
      for (std::int64_t k = -5; k <= 5; ++k) {
        const auto m = torus::TorusElement::monomial(d, h, k);
        const auto t = torus::trace(torus::mul(torus::mul(m, torus::TorusElement::monomial(d, -2 * h, -2 * k)), m));
        twist = std::max(twist, std::abs(t - torus::twist_power(d, 3 * h * k)));
      }
  std::ostringstream d;
  d << cases << " random b (d odd <= 9, M <= 8): max relative coefficient error " << fmt("%.3e", worst)
    << " (tol 1e-9)\n"
    << "trace identity u^{3hk} for |h|,|k| <= 5: max error " << fmt("%.3e", twist);
  return {worst <= 1e-9 && twist <= 1e-12, d.str()};
}

Verdict negav2() {
  const auto sv = harness::sign_view(
      harness::load_fixture(harness::resolve_fixture("sign_vector", harness::default_fixture_dir())));
  const auto bd = comb::sign_function(sv.eps);
  const std::vector<Complex> b(bd.begin(), bd.end());
  const Complex th1 = torus::generic_theta1(), th2 = torus::generic_theta2();
  const std::int64_t N = 20000;
  std::ostringstream d;
  d << "d = " << sv.F.modulus() << ", F = {";
  for (std::size_t i = 0; i < sv.F.size(); ++i) d << (i ? "," : "") << sv.F.members()[i];
  d << "}, X = " << sv.X << "\n";
  bool negative = true, stable = true, empirical = true;
  double prev = 0;
  torus::TorusElement first(sv.F.modulus());
  for (std::size_t i = 0; i < sv.M_values.size(); ++i) {
    const std::int64_t M = sv.M_values[i];
    const auto a = torus::build_a(b, M, 0);
    if (i == 0) first = a;
    const Complex lim = torus::generic_limit(a);
    const double scaled = lim.real() / std::pow(static_cast<double>(M), 8);
    const Complex emp = torus::empirical_cesaro(a, th1, th2, N);
    const double tol = 5e-3 * (1 + std::abs(lim));
    const double ratio = std::abs(emp - lim) / (1 + std::abs(lim));
    negative &= lim.real() < 0;
    empirical &= ratio <= 5e-3;
    d << "M = " << M << ": limit = " << fmt("%.6e", lim.real()) << ", limit/M^8 = " << fmt("%.4e", scaled);
    if (i > 0) {
      const double change = std::abs(scaled - prev) / std::abs(prev);
      stable &= change <= 0.2;
      d << " (change " << fmt("%.3f", change) << ")";
    }
    d << "\n        empirical(N=2e4) = " << fmt("%.6e", emp.real()) << ", |emp - lim| = " << fmt("%.4e", std::abs(emp - lim))
      << ", tol " << fmt("%.4e", tol) << ", ratio " << fmt("%.4f", ratio) << (ratio <= 5e-3 ? "" : "  <-- exceeds 5e-3")
      << "\n";
    prev = scaled;
  }
  // Convergence diagnostic in N at the smallest fixture M; not part of the verdict.
  const Complex lim0 = torus::generic_limit(first);
  d << "diagnostic at M = " << sv.M_values.front() << ":";
  for (std::int64_t n : {20000, 200000, 2000000})
    d << " N=" << n << " ratio " << fmt("%.2e", std::abs(torus::empirical_cesaro(first, th1, th2, n) - lim0) / (1 + std::abs(lim0)));
  d << "\nlimit < 0 at every M: " << negative << "; limit/M^8 stable within 0.2: " << stable
    << "; empirical within 5e-3(1+|limit|) at N=2e4: " << empirical;
  return {negative && stable && empirical, d.str()};
}

Verdict combinatorics() {
  std::mt19937_64 rng(111);
  std::int64_t hex_bad = 0, x_bad = 0;
  for (int t = 0; t < 50; ++t) {
    const std::int64_t d = std::uniform_int_distribution<std::int64_t>(5, 60)(rng);
    std::vector<std::int64_t> m;
    for (std::int64_t x = 0; x < d; ++x)
      if (std::bernoulli_distribution(0.3)(rng)) m.push_back(x);
    const comb::CyclicSet F(d, m);
    hex_bad += comb::count_hexagons(F) != oracle::brute_hexagons(F);
    comb::SignVector eps{d, {}};
    for (auto x : F.members()) eps.signs[x] = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
    const auto b = comb::sign_function(eps);
    x_bad += comb::hexagon_sum_X(b) != oracle::brute_X(b);
  }
  const auto F = comb::greedy_progression_free(45, 3);
  const auto exact = comb::exact_expectation_X(F);
  const auto st = comb::monte_carlo_X(F, 112, 100000);
  const double z = std::abs(st.mean - static_cast<double>(F.size())) / st.standard_error;
  std::ostringstream d;
  d << "50 random sets, d <= 60: hexagon mismatches = " << hex_bad << ", X mismatches = " << x_bad << "\n"
    << "greedy 3AP-free F in Z/45, |F| = " << F.size() << ": exact E[X] = " << exact << ", Monte Carlo mean "
    << fmt("%.3f", st.mean) << " +- " << fmt("%.3f", st.standard_error) << " (" << fmt("%.2f", z) << " SE, limit 3)";
  return {hex_bad == 0 && x_bad == 0 && exact == static_cast<std::int64_t>(F.size()) && z <= 3, d.str()};
}

Verdict mean_ergodic() {
  std::mt19937_64 rng(112);
  std::normal_distribution<double> g;
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 7;
    const auto sys = vn::MatrixSystem::negns(d);
    vn::Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    worst = std::max(worst, (vn::shift_average(sys, a) - vn::diagonal_part(a)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "20 random a, d in 2..8: max deviation " + fmt("%.3e", worst) + " (tol 1e-12)"};
}

Verdict decomposition() {
  std::mt19937_64 rng(113);
  bool ok = true;
  std::ostringstream d;
  for (int dim : {2, 3, 5, 8}) {
    const auto split = vn::reversible_split(vn::MatrixSystem::from_unitary(random_unitary(rng, dim)));
    const bool full = split.eigenvalues.size() == static_cast<std::size_t>(dim * dim) && split.stable_dimension == 0;
    ok &= full && split.gram_deviation <= 1e-9;
    d << "d = " << dim << ": " << split.eigenvalues.size() << " eigenoperators, Gram deviation "
      << fmt("%.3e", split.gram_deviation) << ", residual " << fmt("%.3e", split.max_residual)
      << ", stable dimension " << split.stable_dimension << "\n";
  }
  return {ok, d.str()};
}

Verdict fixed_point_free() {
  std::mt19937_64 rng(114);
  const auto ap4 = ap::make_ap4(kA);
  std::vector<ap::ProgressionBase> ap5;
  for (int i = 0; i < 5; ++i) ap5.push_back(ap::make_ap5_factor(i));
  int forms = 0;
  std::int64_t fixed = 0;
  while (forms < 1000) {
    const int pick = std::uniform_int_distribution<int>(0, 5)(rng);
    const ap::ProgressionBase& base = pick == 5 ? ap4 : ap5[pick];
    std::vector<square::GeneratorSymbol> w;
    const int len = std::uniform_int_distribution<int>(1, 7)(rng);
    for (int i = 0; i < len; ++i)
      w.push_back(base.symbol(base.families()[std::uniform_int_distribution<int>(0, 3)(rng)],
                              std::uniform_int_distribution<std::int64_t>(-6, 6)(rng),
                              std::bernoulli_distribution(0.5)(rng)));
    const auto nf = square::normal_form(w, base);
    if (nf.is_identity()) continue;
    ++forms;
    for (std::int64_t k = -5; k <= 5; ++k) fixed += k != 0 && ap::shift(nf, k) == nf;
  }
  return {fixed == 0, std::to_string(forms) + " nonidentity normal forms (AP4 and the five AP5 factors), fixed points = " +
                          std::to_string(fixed)};
}

}  // namespace

int main() {
  criterion(1, "square-group laws over 1e4 random triples", square_group_laws);
  criterion(2, "maximal reduced connections round trip", maxred_round_trip);
  criterion(3, "four-fold trace equals 1_A(n), |n| <= 30", k4_indicator);
  criterion(4, "perturbed four-fold trace equals 1 + 2e-8 1_A(n), |n| <= 10", k4_perturbed);
  criterion(5, "slop3 solutions for r = 1, 2, 3", slop3);
  criterion(6, "summand identity (1+w^r)^2 (1+w^-2r)", summand);
  criterion(7, "Cesaro limit on the negav fixture", negns);
  criterion(8, "has_sum scaling and sign on the negav fixture", negtrace);
  criterion(9, "torus coefficient law and trace identity", torus_algebra);
  criterion(10, "torus pipeline on the sign-vector fixture", negav2);
  criterion(11, "hexagon and X oracles, Monte Carlo mean", combinatorics);
  criterion(12, "mean ergodic average equals the diagonal part", mean_ergodic);
  criterion(13, "finite-dimensional decomposition has no stable part", decomposition);
  criterion(14, "shift has no fixed points", fixed_point_free);
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " of 14 criteria failed\n"
                         : std::string("acceptance: all 14 criteria passed\n"));
  return failures ? 1 : 0;
}
