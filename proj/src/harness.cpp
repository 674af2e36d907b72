#include "vnlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "vnlab/group_algebra.hpp"
#include "vnlab/nc_torus.hpp"
#include "vnlab/vn_matrix.hpp"

#ifndef VNLAB_DEFAULT_FIXTURE_DIR
#define VNLAB_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace vnlab::harness {

namespace fs = std::filesystem;
using Complex = std::complex<double>;

namespace {

const std::vector<std::int64_t> kDefaultA{1, 3, 4, 7, 20};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// ---------------------------------------------------------------------------
// Parameters

std::int64_t get_int(const json& p, const std::string& key, std::int64_t fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p.at(key);
  if (!v.is_number_integer()) throw ConfigError("parameter '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t require_int(const json& p, const std::string& key) {
  if (!p.contains(key)) throw ConfigError("missing parameter '" + key + "'");
  return get_int(p, key, 0);
}

double get_double(const json& p, const std::string& key, double fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p.at(key);
  if (!v.is_number()) throw ConfigError("parameter '" + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& p, const std::string& key, bool fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p.at(key);
  if (!v.is_boolean()) throw ConfigError("parameter '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& p, const std::string& key, const std::string& fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p.at(key);
  if (!v.is_string()) throw ConfigError("parameter '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::int64_t> get_list(const json& p, const std::string& key,
                                   std::vector<std::int64_t> fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p.at(key);
  if (!v.is_array()) throw ConfigError("parameter '" + key + "' must be a list of integers");
  std::vector<std::int64_t> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw ConfigError("parameter '" + key + "' must be a list of integers");
    out.push_back(x.get<std::int64_t>());
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

fs::path fixture_dir_of(const ExperimentConfig& c) {
  return c.fixture_dir.empty() ? default_fixture_dir() : c.fixture_dir;
}

// ---------------------------------------------------------------------------
// Group commands

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

void cmd_k4(const ExperimentConfig& c, Report& r) {
  const auto Alist = get_list(c.params, "A", kDefaultA);
  const std::int64_t nmax = get_int(c.params, "nmax", 30);
  const bool perturbed = get_bool(c.params, "perturbed", false);
  const double eps = get_double(c.params, "eps", 0.01);
  require(nmax >= 0, "nmax must be non-negative");
  const std::set<std::int64_t> A(Alist.begin(), Alist.end());
  const auto g = ap4_group(A);
  auto e = ap4_generators(g);
  std::vector<galg::GroupAlgebraElement> factors;
  if (perturbed) {
    auto a = galg::GroupAlgebraElement::delta(square::NormalForm{});
    for (const auto& ei : e) {
      a += ei.scaled(eps);
      a += galg::adjoint(g, ei).scaled(eps);
    }
    factors.assign(4, a);
  } else {
    factors = e;
  }
  const std::vector<std::int64_t> exps{0, 1, 2, 3};
  const std::size_t count = static_cast<std::size_t>(2 * nmax + 1);
  const auto traces = parallel_map<Complex>(count, c.jobs, [&](std::size_t i) {
    return galg::k_fold_trace(g, factors, exps, static_cast<std::int64_t>(i) - nmax);
  });
  const double eps4 = std::pow(eps, 4);
  std::int64_t mismatches = 0;
  double worst = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t n = static_cast<std::int64_t>(i) - nmax;
    const double ind = A.count(n) ? 1.0 : 0.0;
    json row{{"n", n}, {"trace", traces[i].real()}, {"trace_im", traces[i].imag()}};
    if (perturbed) {
      const double stated = 1.0 + 2.0 * eps4 * ind;
      row["stated_formula"] = stated;
      // Both progression readings contribute at order eps^4; lower orders vanish only for n != 0.
      row["two_readings"] = n == 0 ? json(nullptr) : json(1.0 + eps4 * (ind + (A.count(-n) ? 1.0 : 0.0)));
      worst = std::max(worst, std::abs(traces[i] - stated));
    } else {
      row["indicator"] = ind;
      mismatches += traces[i] != Complex(ind);
    }
    r.results.push_back(row);
  }
  if (perturbed) {
    r.check("trace equals 1 + 2 eps^4 1_A(n) for |n| <= nmax", 0.0, worst, 1e-13, worst <= 1e-13);
  } else {
    r.check("trace equals 1_A(n) exactly for |n| <= nmax", 0, mismatches, 0, mismatches == 0);
  }
}

void cmd_apgroup_verify(const ExperimentConfig& c, Report& r) {
  const auto Alist = get_list(c.params, "A", kDefaultA);
  const std::int64_t rmax = get_int(c.params, "rmax", 25);
  require(rmax >= 0, "rmax must be non-negative");
  std::int64_t window = rmax;
  for (auto a : Alist) window = std::max(window, a < 0 ? -a : a);
  const std::set<std::int64_t> A(Alist.begin(), Alist.end());
  const std::size_t count = static_cast<std::size_t>(2 * rmax + 1);
  const auto res = parallel_map<int>(count, c.jobs, [&](std::size_t i) {
    return ap::verify_slop(A, static_cast<std::int64_t>(i) - rmax, window).identity ? 1 : 0;
  });
  std::int64_t mismatches = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t s = static_cast<std::int64_t>(i) - rmax;
    const bool in_A = A.count(s) > 0;
    mismatches += (res[i] == 1) != in_A;
    r.results.push_back({{"r", s}, {"identity", res[i] == 1}, {"in_A", in_A}});
  }
  r.check("slop word is trivial exactly for r in A", 0, mismatches, 0, mismatches == 0);
}

bool slop_tuple_allowed(const ap::SlopTuple& t) {
  std::multiset<int> m(t.begin(), t.end());
  return m == std::multiset<int>{0, 0, 0, 0, 0} || m == std::multiset<int>{1, 2, 3, 4, 5} ||
         m == std::multiset<int>{6, 7, 8, 9, 10};
}

void cmd_apgroup_classify(const ExperimentConfig& c, Report& r) {
  const auto rs = get_list(c.params, "r", {1, 2, 3});
  for (auto v : rs) require(v != 0, "r must be non-zero");
  const auto sols = parallel_map<std::vector<ap::SlopTuple>>(
      rs.size(), c.jobs, [&](std::size_t i) { return ap::classify_slop3(rs[i]); });
  const ap::SlopTuple canonical{1, 2, 3, 4, 5};
  for (std::size_t i = 0; i < rs.size(); ++i) {
    json names = json::array();
    std::int64_t outside = 0;
    bool has_canonical = false;
    for (const auto& t : sols[i]) {
      names.push_back(ap::tuple_to_string(t));
      outside += !slop_tuple_allowed(t);
      has_canonical |= t == canonical;
    }
    r.results.push_back({{"r", rs[i]}, {"count", sols[i].size()}, {"solutions", names}});
    const std::string tag = " (r = " + std::to_string(rs[i]) + ")";
    r.check("solutions lie in identity or permutations of e0..e4 or their inverses" + tag, 0, outside,
            0, outside == 0);
    r.check("canonical tuple (e0, e1, e2, e3, e4) is a solution" + tag, true, has_canonical, 0,
            has_canonical);
  }
}

// ---------------------------------------------------------------------------
// Combinatorics commands

json set_json(const comb::CyclicSet& F) { return {{"d", F.modulus()}, {"F", F.members()}}; }

comb::CyclicSet read_set_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open set file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("set file is not JSON: " + std::string(e.what()));
  }
  // A {d, F} object, a report whose first result has d and F, or a fixture.
  const json* obj = &j;
  if (j.contains("payload")) {
    obj = &j.at("payload");
  } else if (j.contains("results") && j.at("results").is_array() && !j.at("results").empty()) {
    obj = &j.at("results").at(0);
  }
  if (!obj->contains("d") || !obj->contains("F")) throw ConfigError("set file needs fields d and F");
  const auto d = obj->at("d").get<std::int64_t>();
  const auto F = obj->at("F").get<std::vector<std::int64_t>>();
  require(d > 0, "d must be positive");
  return comb::CyclicSet(d, F);
}

void cmd_behrend_build(const ExperimentConfig& c, Report& r) {
  const std::int64_t d = require_int(c.params, "d");
  const std::int64_t R = require_int(c.params, "R");
  const std::int64_t dim = require_int(c.params, "dim");
  comb::CyclicSet F;
  try {
    F = comb::behrend_set(d, R, static_cast<int>(dim));
  } catch (const comb::InfeasibleParameters& e) {
    throw ConfigError(e.what());
  }
  const auto aps = comb::count_3aps(F);
  json row = set_json(F);
  row["R"] = R;
  row["dim"] = dim;
  row["size"] = F.size();
  row["three_aps"] = aps;
  r.results.push_back(row);
  r.check("3AP count equals |F| (trivial progressions only)", F.size(), aps, 0,
          aps == static_cast<std::int64_t>(F.size()));
  bool in_range = true;
  for (auto x : F.members()) in_range &= x >= 1 && x <= d / 10;
  r.check("F lies in [1, floor(d/10)]", true, in_range, 0, in_range);
}

void cmd_behrend_stats(const ExperimentConfig& c, Report& r) {
  const std::string path = get_string(c.params, "set", "");
  require(!path.empty(), "missing parameter 'set'");
  const auto F = read_set_file(path);
  json row = set_json(F);
  row["size"] = F.size();
  row["three_aps"] = comb::count_3aps(F);
  row["three_aps_div3"] = comb::count_3aps(F, comb::SpacingFilter::Div3);
  row["three_aps_nondiv3"] = comb::count_3aps(F, comb::SpacingFilter::NonDiv3);
  row["progression_free"] = comb::is_progression_free(F);
  row["hexagons"] = comb::count_hexagons(F);
  row["expected_X"] = comb::exact_expectation_X(F);
  r.results.push_back(row);
}

void cmd_negx_search(const ExperimentConfig& c, Report& r) {
  const std::int64_t d = require_int(c.params, "d");
  const std::int64_t max_draws = get_int(c.params, "max_draws", 1000);
  const bool local = get_bool(c.params, "local_search", true);
  require(d >= 3 && d % 2 == 1, "d must be odd and at least 3");
  require(max_draws >= 1, "max_draws must be positive");
  comb::CyclicSet F;
  if (c.params.contains("R")) {
    try {
      F = comb::behrend_set(d, require_int(c.params, "R"), static_cast<int>(get_int(c.params, "dim", 1)));
    } catch (const comb::InfeasibleParameters& e) {
      throw ConfigError(e.what());
    }
  } else {
    F = comb::greedy_progression_free(d, c.seed);
  }
  const auto res = comb::search_negative_X(F, c.seed, static_cast<std::uint64_t>(max_draws), local);
  json row = set_json(F);
  row["hexagons"] = comb::count_hexagons(F);
  row["draws_used"] = res.draws_used;
  if (res.witness) {
    std::vector<int> signs;
    for (auto x : F.members()) signs.push_back(res.witness->signs.at(x));
    row["signs"] = signs;
    row["X"] = res.X;
    const double X = comb::hexagon_sum_X(comb::sign_function(*res.witness)).real();
    r.check("hexagon_sum_X reproduces X", res.X, X, 0, X == static_cast<double>(res.X));
  } else {
    row["signs"] = nullptr;
    row["X"] = nullptr;
  }
  r.results.push_back(row);
  r.check("negative X found", "X < 0", res.witness ? json(res.X) : json(nullptr), 0,
          res.witness.has_value());
}

// ---------------------------------------------------------------------------
// Matrix commands

struct NegavSystem {
  NegavFixture fx;
  vn::PSDWitness w;
};

NegavSystem load_negav(const ExperimentConfig& c) {
  const auto path = resolve_fixture(get_string(c.params, "fixture", "negav_E"), fixture_dir_of(c));
  const auto f = load_fixture(path);
  if (f.kind != "negav_E") throw ConfigError("fixture " + path.string() + " is not of kind negav_E");
  NegavSystem s{negav_view(f), {}};
  if (c.params.contains("d") && get_int(c.params, "d", 0) != s.fx.d)
    throw ConfigError("d does not match the fixture (d = " + std::to_string(s.fx.d) + ")");
  s.w = vn::build_negav_matrix(s.fx.E);
  return s;
}

void cmd_negns(const ExperimentConfig& c, Report& r) {
  const auto s = load_negav(c);
  const auto sys = vn::MatrixSystem::negns(static_cast<int>(s.fx.d));
  const auto lim = vn::cesaro_limit(sys, s.w.A, 3);
  const double moment = vn::restricted_third_moment(s.w.A);
  const double scaled = moment / static_cast<double>(s.fx.d);
  r.results.push_back({{"d", s.fx.d},
                       {"E_size", s.fx.E.size()},
                       {"good", s.fx.good},
                       {"bad", s.fx.bad},
                       {"eigen_floor", s.w.eigen_floor},
                       {"restricted_moment", moment},
                       {"moment_over_d", scaled},
                       {"cesaro_limit_re", lim.value.real()},
                       {"cesaro_limit_im", lim.value.imag()},
                       {"period", lim.period}});
  r.check("cesaro_limit < -1e-6", "< -1e-6", lim.value.real(), 0, lim.value.real() < -1e-6);
  const double rel = std::abs(lim.value - scaled) / std::abs(scaled);
  r.check("cesaro_limit equals moment / d (relative)", scaled, lim.value.real(), 1e-9, rel <= 1e-9);
  r.check("PSD floor of A", ">= -1e-9", s.w.eigen_floor, 1e-9, s.w.eigen_floor >= vn::kEigenFloor);
}

void cmd_negtrace(const ExperimentConfig& c, Report& r) {
  const auto s = load_negav(c);
  const auto Ns = get_list(c.params, "N", {8, 16, 32});
  for (auto n : Ns) require(n >= 1, "N values must be positive");
  const vn::Matrix b = vn::psd_factor(s.w.A);
  const double pred = vn::tao_prediction(s.w.A);
  const auto has = parallel_map<double>(Ns.size(), c.jobs, [&](std::size_t i) { return vn::has_sum(b, Ns[i]); });
  std::vector<double> err(Ns.size());
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    const double n4 = std::pow(static_cast<double>(Ns[i]), 4);
    err[i] = std::abs(has[i] / n4 - pred);
    r.results.push_back({{"N", Ns[i]},
                         {"has_sum", has[i]},
                         {"has_over_N4", has[i] / n4},
                         {"tao_prediction", pred},
                         {"error", err[i]}});
  }
  for (std::size_t i = 0; i + 1 < Ns.size(); ++i) {
    if (Ns[i + 1] != 2 * Ns[i]) continue;
    const double factor = err[i] / err[i + 1];
    r.check("error decays by >= 1.7 from N=" + std::to_string(Ns[i]) + " to N=" + std::to_string(Ns[i + 1]),
            ">= 1.7", factor, 0, factor >= 1.7);
  }
  for (std::size_t i = 0; i < Ns.size(); ++i)
    if (Ns[i] >= s.fx.negative_from_N)
      r.check("has_sum < 0 at N=" + std::to_string(Ns[i]), "< 0", has[i], 0, has[i] < 0);
}

// ---------------------------------------------------------------------------
// Torus command

void cmd_nctorus(const ExperimentConfig& c, Report& r) {
  const auto path = resolve_fixture(get_string(c.params, "fixture", "sign_vector"), fixture_dir_of(c));
  const auto f = load_fixture(path);
  if (f.kind != "sign_vector") throw ConfigError("fixture " + path.string() + " is not of kind sign_vector");
  const auto sv = sign_view(f);
  if (c.params.contains("d") && get_int(c.params, "d", 0) != sv.F.modulus())
    throw ConfigError("d does not match the fixture (d = " + std::to_string(sv.F.modulus()) + ")");
  const auto Ms = get_list(c.params, "M", sv.M_values);
  const std::int64_t N = get_int(c.params, "N", 20000);
  for (auto m : Ms) require(m >= 1, "M values must be positive");
  require(N >= 0, "N must be non-negative");
  const auto bd = comb::sign_function(sv.eps);
  const std::vector<Complex> b(bd.begin(), bd.end());
  const Complex th1 = torus::generic_theta1(), th2 = torus::generic_theta2();
  struct Point {
    Complex limit, empirical;
  };
  const auto pts = parallel_map<Point>(Ms.size(), c.jobs, [&](std::size_t i) {
    const auto a = torus::build_a(b, Ms[i], 0);
    return Point{torus::generic_limit(a), torus::empirical_cesaro(a, th1, th2, N)};
  });
  std::vector<double> scaled(Ms.size());
  for (std::size_t i = 0; i < Ms.size(); ++i) {
    const double lim = pts[i].limit.real();
    scaled[i] = lim / std::pow(static_cast<double>(Ms[i]), 8);
    const double tol = 5e-3 * (1 + std::abs(pts[i].limit));
    const double diff = std::abs(pts[i].empirical - pts[i].limit);
    r.results.push_back({{"M", Ms[i]},
                         {"N", N},
                         {"X", sv.X},
                         {"generic_limit", lim},
                         {"generic_limit_im", pts[i].limit.imag()},
                         {"limit_over_M8", scaled[i]},
                         {"empirical_re", pts[i].empirical.real()},
                         {"empirical_im", pts[i].empirical.imag()},
                         {"empirical_error", diff},
                         {"tolerance", tol}});
    const std::string tag = " (M=" + std::to_string(Ms[i]) + ")";
    r.check("generic_limit < 0" + tag, "< 0", lim, 0, lim < 0);
    r.check("empirical Cesaro average matches generic_limit" + tag, lim, pts[i].empirical.real(), tol,
            diff <= tol);
  }
  for (std::size_t i = 0; i + 1 < Ms.size(); ++i) {
    const double change = std::abs(scaled[i + 1] - scaled[i]) / std::abs(scaled[i]);
    r.check("limit/M^8 relative change M=" + std::to_string(Ms[i]) + " to M=" + std::to_string(Ms[i + 1]),
            "<= 0.2", change, 0.2, change <= 0.2);
  }
}

// ---------------------------------------------------------------------------
// Fixture commands

void cmd_fixture_build(const ExperimentConfig& c, Report& r) {
  const std::string kind = get_string(c.params, "kind", "");
  Fixture f;
  if (kind == "negav_E") {
    const std::int64_t d = get_int(c.params, "d", 2400);
    require(d > 0 && d % 3 == 0 && d >= 30, "d must be a multiple of 3, at least 30");
    f = build_negav_fixture(d, c.seed, static_cast<int>(get_int(c.params, "iterations", 20000)),
                            static_cast<std::uint64_t>(get_int(c.params, "max_seeds", 1000000)),
                            get_int(c.params, "n_scan", 48));
  } else if (kind == "sign_vector") {
    const std::int64_t d = get_int(c.params, "d", 9);
    require(d >= 3 && d % 2 == 1, "d must be odd and at least 3");
    const auto F = get_list(c.params, "F", {});
    if (!F.empty()) require(comb::is_progression_free(comb::CyclicSet(d, F)), "F contains a progression");
    f = build_sign_vector_fixture(d, c.seed, static_cast<std::uint64_t>(get_int(c.params, "max_draws", 1000)),
                                  get_list(c.params, "M", {48, 64, 96, 128}), F);
  } else if (kind == "slop3_solutions") {
    f = build_slop3_fixture(get_list(c.params, "r", {1, 2, 3}));
  } else {
    throw ConfigError("unknown fixture kind '" + kind + "'");
  }
  r.results.push_back(f.to_json());
  bool ok = true;
  std::string error;
  try {
    verify_fixture(fixture_from_json(f.to_json()));
  } catch (const FixtureVerificationFailed& e) {
    ok = false;
    error = e.what();
  }
  r.check("fixture predicate holds after a round trip", true, ok ? json(true) : json(error), 0, ok);
  const std::string save = get_string(c.params, "save", "");
  if (ok && !save.empty()) save_fixture(f, save);
}

void cmd_fixture_verify(const ExperimentConfig& c, Report& r) {
  std::vector<fs::path> files;
  const std::string name = get_string(c.params, "path", "");
  if (!name.empty()) {
    files.push_back(resolve_fixture(name, fixture_dir_of(c)));
  } else {
    const fs::path dir = fixture_dir_of(c);
    if (!fs::is_directory(dir)) throw ConfigError("fixture directory " + dir.string() + " not found");
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  }
  for (const auto& p : files) {
    json row{{"file", p.filename().string()}};
    bool ok = true;
    try {
      const auto f = load_fixture(p);
      row["kind"] = f.kind;
      row["checksum"] = f.checksum;
    } catch (const std::exception& e) {
      ok = false;
      row["error"] = e.what();
    }
    row["ok"] = ok;
    r.results.push_back(row);
    r.check("fixture " + p.filename().string() + " verifies", true, ok, 0, ok);
  }
}

// ---------------------------------------------------------------------------
// Self test

void cmd_selftest(const ExperimentConfig& c, Report& r) {
  std::mt19937_64 rng(c.seed);
  const std::set<std::int64_t> A(kDefaultA.begin(), kDefaultA.end());
  const auto ap4 = ap::make_ap4(A);
  auto random_word = [&](const ap::ProgressionBase& base, int len) {
    std::vector<square::GeneratorSymbol> w;
    for (int i = 0; i < len; ++i)
      w.push_back(base.symbol(std::uniform_int_distribution<int>(0, 3)(rng),
                              std::uniform_int_distribution<std::int64_t>(-6, 6)(rng),
                              std::bernoulli_distribution(0.5)(rng)));
    return w;
  };

  {
    std::int64_t bad = 0;
    for (int t = 0; t < 200; ++t) {
      const auto nf = square::normal_form(random_word(ap4, 6), ap4);
      const auto x = random_word(ap4, 1)[0];
      bad += square::concatenate(square::concatenate(nf, x, ap4), x.inverse(), ap4) != nf;
      const auto q = ap4.relator(std::uniform_int_distribution<std::int64_t>(-9, 9)(rng), 7);
      square::NormalForm t4 = nf;
      for (const auto& s : q) t4 = square::concatenate(t4, s, ap4);
      bad += t4 != nf;
      bad += square::normal_form(square::integrate(nf.connection()), ap4) != nf;
    }
    r.check("group laws and round trip on AP4 normal forms", 0, bad, 0, bad == 0);
  }
  {
    std::int64_t fixed = 0;
    for (int t = 0; t < 100; ++t) {
      const auto nf = square::normal_form(random_word(ap4, 5), ap4);
      if (nf.is_identity()) continue;
      for (std::int64_t k = -5; k <= 5; ++k) fixed += k != 0 && ap::shift(nf, k) == nf;
    }
    r.check("shift has no fixed points", 0, fixed, 0, fixed == 0);
  }
  {
    const auto g = ap4_group(A);
    const auto e = ap4_generators(g);
    const std::vector<std::int64_t> exps{0, 1, 2, 3};
    std::int64_t bad = 0;
    for (std::int64_t n = -10; n <= 10; ++n)
      bad += galg::k_fold_trace(g, e, exps, n) != Complex(A.count(n) ? 1.0 : 0.0);
    r.check("four-fold trace equals 1_A(n) for |n| <= 10", 0, bad, 0, bad == 0);
  }
  {
    const auto sols = ap::classify_slop3(1);
    bool ok = std::find(sols.begin(), sols.end(), ap::SlopTuple{1, 2, 3, 4, 5}) != sols.end();
    for (const auto& t : sols) ok &= slop_tuple_allowed(t);
    r.check("slop classification at r = 1", true, ok, 0, ok);
  }
  {
    double worst = 0;
    for (std::int64_t s = 0; s < 3; ++s)
      worst = std::max(worst, std::abs(vn::negav_summand(s) - (s % 3 == 0 ? 8.0 : -1.0)));
    r.check("summand identity (1+w^r)^2 (1+w^-2r)", 0.0, worst, 1e-12, worst <= 1e-12);
  }
  {
    const auto F = comb::behrend_set(1000, 1, 2);
    const auto aps = comb::count_3aps(F);
    r.check("Behrend set is progression-free", F.size(), aps, 0, aps == static_cast<std::int64_t>(F.size()));
    const auto G = comb::greedy_progression_free(21, c.seed);
    const auto ex = comb::exact_expectation_X(G);
    r.check("exact E[X] equals |F| for progression-free F, d odd", G.size(), ex, 0,
            ex == static_cast<std::int64_t>(G.size()));
  }
  {
    const auto sys = vn::MatrixSystem::negns(6);
    double worst = 0;
    for (int t = 0; t < 5; ++t) {
      vn::Matrix a = vn::Matrix::Random(6, 6);
      worst = std::max(worst, (vn::shift_average(sys, a) - vn::diagonal_part(a)).cwiseAbs().maxCoeff());
    }
    r.check("period average of alpha^n(a) is the diagonal part", 0.0, worst, 1e-12, worst <= 1e-12);
    const auto split = vn::reversible_split(vn::MatrixSystem::from_unitary(vn::Matrix::Identity(3, 3)));
    r.check("reversible split Gram deviation", 0.0, split.gram_deviation, 1e-9, split.gram_deviation <= 1e-9);
  }
  {
    const vn::Matrix x = vn::Matrix::Random(3, 3);
    const vn::Matrix A3 = x * x.adjoint();
    const vn::Matrix b = vn::psd_factor(A3);
    const double recon = (b * b.adjoint() - A3).cwiseAbs().maxCoeff();
    r.check("PSD factor reconstruction", 0.0, recon, 1e-8, recon <= 1e-8);
  }
  {
    bool ok = true;
    try {
      std::vector<Complex> b(5);
      for (auto& v : b) v = Complex(std::normal_distribution<double>()(rng), 0.0);
      torus::build_a(b, 6, 6);
    } catch (const std::logic_error&) {
      ok = false;
    }
    r.check("closed-form coefficients of g g* match the direct product", true, ok, 1e-9, ok);
    double worst = 0;
    for (std::int64_t h = -3; h <= 3; ++h)
      for (std::int64_t k = -3; k <= 3; ++k) {
        const auto m = torus::TorusElement::monomial(9, h, k);
        const auto t = torus::trace(torus::mul(torus::mul(m, torus::TorusElement::monomial(9, -2 * h, -2 * k)), m));
        worst = std::max(worst, std::abs(t - torus::twist_power(9, 3 * h * k)));
      }
    r.check("torus trace identity u^{3hk}", 0.0, worst, 1e-12, worst <= 1e-12);
  }
}

using Handler = void (*)(const ExperimentConfig&, Report&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"apgroup.verify", cmd_apgroup_verify}, {"apgroup.classify", cmd_apgroup_classify},
      {"k4", cmd_k4},                         {"behrend.build", cmd_behrend_build},
      {"behrend.stats", cmd_behrend_stats},   {"negx.search", cmd_negx_search},
      {"negns", cmd_negns},                   {"negtrace", cmd_negtrace},
      {"nctorus", cmd_nctorus},               {"fixture.build", cmd_fixture_build},
      {"fixture.verify", cmd_fixture_verify}, {"selftest", cmd_selftest},
  };
  return table;
}

// ---------------------------------------------------------------------------
// Fixture predicates

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void fail(const std::string& msg) { throw FixtureVerificationFailed(msg); }

template <class T>
T field(const json& p, const std::string& key) {
  if (!p.contains(key)) fail("payload lacks field '" + key + "'");
  try {
    return p.at(key).get<T>();
  } catch (const json::exception& e) {
    fail("payload field '" + key + "' has the wrong type");
  }
  return T{};
}

void verify_negav(const json& p) {
  const auto fx = negav_view(Fixture{"negav_E", p, {}, {}});
  if (fx.d % 3 != 0) fail("d is not a multiple of 3");
  for (auto f : fx.F)
    if (f < 1 || f > fx.d / 10) fail("F leaves [1, floor(d/10)]");
  if (!comb::is_progression_free(comb::CyclicSet(fx.d, fx.F))) fail("F contains a progression");
  const auto re = comb::lemma_negav_E(fx.F, fx.d, fx.seed);
  if (re.E.members() != fx.E.members()) fail("E does not match lemma_negav_E(F, d, seed)");
  if (re.good != fx.good || re.bad != fx.bad) fail("recorded progression counts are stale");
  if (!(re.good > 8 * re.bad)) fail("good > 8 bad fails");
  const auto w = vn::build_negav_matrix(re.E);
  if (w.eigen_floor < vn::kEigenFloor) fail("A is not PSD");
  if (!(vn::restricted_third_moment(w.A) < 0)) fail("restricted third moment is not negative");
  if (fx.negative_from_N < 1 || fx.negative_from_N > fx.scanned_up_to_N) fail("bad negative_from_N");
  if (!(vn::has_sum(vn::psd_factor(w.A), fx.negative_from_N) < 0)) fail("has_sum is not negative at the threshold");
}

void verify_sign(const json& p) {
  const auto sv = sign_view(Fixture{"sign_vector", p, {}, {}});
  const std::int64_t d = sv.F.modulus();
  if (d < 3 || d % 2 == 0) fail("d must be odd");
  if (!comb::is_progression_free(sv.F)) fail("F contains a progression");
  const auto X = comb::hexagon_sum_signs(comb::hexagons(sv.F), sv.eps);
  if (X != sv.X) fail("recorded X does not match the hexagon sum");
  if (!(X < 0)) fail("X is not negative");
  if (sv.M_values.empty()) fail("no M values");
  for (std::size_t i = 0; i < sv.M_values.size(); ++i)
    if (sv.M_values[i] < 1 || (i && sv.M_values[i] <= sv.M_values[i - 1])) fail("M values must increase");
}

void verify_slop3(const json& p) {
  for (const auto& [r, sols] : slop3_view(Fixture{"slop3_solutions", p, {}, {}}))
    if (ap::classify_slop3(r) != sols) fail("solutions for r = " + std::to_string(r) + " changed");
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Report::check(std::string name, json expected, json got, double tol, bool pass) {
  checks.push_back(Check{std::move(name), std::move(expected), std::move(got), tol, pass});
}

json Report::to_json(bool with_timestamp) const {
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"expected", c.expected}, {"got", c.got}, {"tol", c.tol}, {"pass", c.pass}});
  json j{{"command", command}, {"params", params}, {"seed", seed}, {"results", results}, {"checks", cs},
         {"pass", passed()}};
  if (with_timestamp) j["timestamp"] = {{"utc", utc}, {"wall_seconds", wall_seconds}};
  return j;
}

std::string Report::to_csv() const {
  std::ostringstream os;
  if (results.empty() || !results.at(0).is_object()) return "";
  std::vector<std::string> cols;
  // Sweep keys lead; the rest follow in key order.
  for (const char* key : {"n", "r", "N", "M", "d"})
    if (results.at(0).contains(key)) cols.push_back(key);
  for (const auto& [k, v] : results.at(0).items())
    if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  auto cell = [](const json& v) {
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    if (v.is_array() || v.is_object()) {
      std::string s = v.dump(), q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    return v.is_null() ? std::string() : v.dump();
  };
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& row : results) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      os << (i ? "," : "") << (row.contains(cols[i]) ? cell(row.at(cols[i])) : std::string());
    os << '\n';
  }
  return os.str();
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, h] : handlers()) v.push_back(k);
    return v;
  }();
  return names;
}

Report run(const ExperimentConfig& config) {
  const auto it = handlers().find(config.command);
  if (it == handlers().end()) throw ConfigError("unknown command '" + config.command + "'");
  if (!config.params.is_object()) throw ConfigError("params must be an object");
  if (config.jobs < 1) throw ConfigError("jobs must be positive");
  Report r;
  r.command = config.command;
  r.params = config.params;
  r.seed = config.seed;
  r.utc = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  it->second(config, r);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// Fixtures

fs::path default_fixture_dir() {
  if (const char* env = std::getenv("VNLAB_FIXTURES"); env && *env) return env;
  return VNLAB_DEFAULT_FIXTURE_DIR;
}

fs::path resolve_fixture(const std::string& name, const fs::path& dir) {
  const fs::path p(name);
  if (fs::exists(p)) return p;
  if (fs::exists(dir / p)) return dir / p;
  if (!p.has_extension() && fs::exists(dir / (name + ".json"))) return dir / (name + ".json");
  throw ConfigError("fixture '" + name + "' not found (searched " + dir.string() + ")");
}

json Fixture::to_json() const {
  return {{"kind", kind}, {"payload", payload}, {"provenance", provenance}, {"checksum", checksum}};
}

std::string fixture_checksum(const std::string& kind, const json& payload) {
  const json j{{"kind", kind}, {"payload", payload}};
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(j.dump());
  return os.str();
}

Fixture make_fixture(std::string kind, json payload, json provenance) {
  Fixture f{std::move(kind), std::move(payload), std::move(provenance), {}};
  f.checksum = fixture_checksum(f.kind, f.payload);
  return f;
}

void verify_fixture(const Fixture& f) {
  if (fixture_checksum(f.kind, f.payload) != f.checksum) fail("checksum mismatch");
  try {
    if (f.kind == "negav_E") {
      verify_negav(f.payload);
    } else if (f.kind == "sign_vector") {
      verify_sign(f.payload);
    } else if (f.kind == "slop3_solutions") {
      verify_slop3(f.payload);
    } else {
      fail("unknown fixture kind '" + f.kind + "'");
    }
  } catch (const FixtureVerificationFailed&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("predicate raised: ") + e.what());
  }
}

Fixture fixture_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("payload") || !j.contains("checksum"))
    fail("fixture needs kind, payload and checksum");
  Fixture f;
  try {
    f.kind = j.at("kind").get<std::string>();
    f.payload = j.at("payload");
    f.provenance = j.value("provenance", json::object());
    f.checksum = j.at("checksum").get<std::string>();
  } catch (const json::exception& e) {
    fail(std::string("malformed fixture: ") + e.what());
  }
  verify_fixture(f);
  return f;
}

Fixture load_fixture(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open fixture " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("fixture " + path.string() + " is not JSON");
  }
  try {
    return fixture_from_json(j);
  } catch (const FixtureVerificationFailed& e) {
    fail(path.filename().string() + ": " + e.what());
  }
  return {};
}

void save_fixture(const Fixture& f, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << f.to_json().dump(2) << '\n';
}

NegavFixture negav_view(const Fixture& f) {
  const json& p = f.payload;
  NegavFixture v;
  v.d = field<std::int64_t>(p, "d");
  if (v.d <= 0) fail("d must be positive");
  v.F = field<std::vector<std::int64_t>>(p, "F");
  v.seed = field<std::uint64_t>(p, "seed");
  v.E = comb::CyclicSet(v.d, field<std::vector<std::int64_t>>(p, "E"));
  v.good = field<std::int64_t>(p, "good");
  v.bad = field<std::int64_t>(p, "bad");
  v.negative_from_N = field<std::int64_t>(p, "negative_from_N");
  v.scanned_up_to_N = field<std::int64_t>(p, "scanned_up_to_N");
  return v;
}

SignFixture sign_view(const Fixture& f) {
  const json& p = f.payload;
  SignFixture v;
  const auto d = field<std::int64_t>(p, "d");
  if (d <= 0) fail("d must be positive");
  const auto F = field<std::vector<std::int64_t>>(p, "F");
  const auto signs = field<std::vector<int>>(p, "signs");
  if (signs.size() != F.size()) fail("one sign per element of F is required");
  v.F = comb::CyclicSet(d, F);
  if (v.F.size() != F.size()) fail("F has repeated residues");
  v.eps.modulus = d;
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) fail("signs must be +1 or -1");
    v.eps.signs[comb::mod(F[i], d)] = signs[i];
  }
  v.X = field<std::int64_t>(p, "X");
  v.M_values = field<std::vector<std::int64_t>>(p, "M_values");
  return v;
}

std::map<std::int64_t, std::vector<ap::SlopTuple>> slop3_view(const Fixture& f) {
  std::map<std::int64_t, std::vector<ap::SlopTuple>> out;
  const auto sols = field<json>(f.payload, "solutions");
  if (!sols.is_array()) fail("solutions must be a list");
  for (const auto& entry : sols) {
    const auto r = field<std::int64_t>(entry, "r");
    out[r] = field<std::vector<ap::SlopTuple>>(entry, "tuples");
  }
  return out;
}

Fixture build_negav_fixture(std::int64_t d, std::uint64_t set_seed, int iterations,
                            std::uint64_t max_seeds, std::int64_t n_scan) {
  const auto opt = comb::optimize_negav_set(d, set_seed, iterations);
  const auto seed = comb::negav_seed_search(opt.F, d, 0, max_seeds);
  if (!seed) throw std::runtime_error("no E-seed with good > 8 bad; raise iterations or max_seeds");
  const auto E = comb::lemma_negav_E(opt.F, d, *seed);
  const vn::Matrix b = vn::psd_factor(vn::build_negav_matrix(E.E).A);
  std::int64_t threshold = 0;
  for (std::int64_t N = n_scan; N >= 1; --N) {
    if (!(vn::has_sum(b, N) < 0)) break;
    threshold = N;
  }
  if (threshold == 0) throw std::runtime_error("has_sum is not negative at N = n_scan");
  json payload{{"d", d},
               {"F", opt.F},
               {"seed", *seed},
               {"shifts", E.shifts},
               {"E", E.E.members()},
               {"good", E.good},
               {"bad", E.bad},
               {"negative_from_N", threshold},
               {"scanned_up_to_N", n_scan}};
  json prov{{"set_search", {{"method", "annealing of negav_set_score"}, {"seed", set_seed},
                            {"iterations", iterations}, {"score", opt.score}}},
            {"seed_search", {{"first_seed", 0}, {"max_seeds", max_seeds}}},
            {"threshold_scan", "smallest N with has_sum(N') < 0 for all N' in [N, scanned_up_to_N]"},
            {"discovered_utc", utc_now()}};
  return make_fixture("negav_E", std::move(payload), std::move(prov));
}

Fixture build_sign_vector_fixture(std::int64_t d, std::uint64_t seed, std::uint64_t max_draws,
                                  std::vector<std::int64_t> M_values, std::vector<std::int64_t> members) {
  const auto F = members.empty() ? comb::greedy_progression_free(d, seed) : comb::CyclicSet(d, members);
  const auto res = comb::search_negative_X(F, seed, max_draws, true);
  if (!res.witness) throw std::runtime_error("no sign vector with X < 0 found");
  std::vector<int> signs;
  for (auto x : F.members()) signs.push_back(res.witness->signs.at(x));
  json payload{{"d", d}, {"F", F.members()}, {"signs", signs}, {"X", res.X}, {"M_values", M_values}};
  const json f_prov = members.empty() ? json{{"method", "greedy_progression_free"}, {"seed", seed}}
                                      : json{{"method", "given"}};
  json prov{{"F", f_prov},
            {"signs", {{"method", "search_negative_X with local search"}, {"seed", seed},
                       {"max_draws", max_draws}, {"draws_used", res.draws_used}}},
            {"M_values", "chosen where limit/M^8 has settled to within 0.2 between neighbours"},
            {"discovered_utc", utc_now()}};
  return make_fixture("sign_vector", std::move(payload), std::move(prov));
}

Fixture build_slop3_fixture(std::vector<std::int64_t> rs) {
  json sols = json::array();
  for (auto r : rs) sols.push_back({{"r", r}, {"tuples", ap::classify_slop3(r)}});
  json prov{{"method", "exhaustive search over 11^5 letter tuples per r"}, {"discovered_utc", utc_now()}};
  return make_fixture("slop3_solutions", {{"solutions", sols}}, std::move(prov));
}

}  // namespace vnlab::harness
