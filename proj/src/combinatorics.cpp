#include "vnlab/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vnlab/counter_rng.hpp"

namespace vnlab::comb {

std::int64_t mod(std::int64_t a, std::int64_t d) {
  const std::int64_t r = a % d;
  return r < 0 ? r + d : r;
}

CyclicSet::CyclicSet(std::int64_t modulus, std::span<const std::int64_t> members)
    : d_(modulus), mask_(modulus > 0 ? modulus : 0, 0) {
  if (modulus <= 0) throw std::invalid_argument("modulus must be positive");
  for (auto x : members) mask_[mod(x, d_)] = 1;
  for (std::int64_t x = 0; x < d_; ++x)
    if (mask_[x]) members_.push_back(x);
}

bool CyclicSet::contains(std::int64_t x) const { return mask_[mod(x, d_)] != 0; }

namespace {

// Sequential view of a counter stream.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}
  std::uint64_t below(std::uint64_t n) { return rng_.below(next_++, n); }
  double uniform() { return rng_.uniform(next_++); }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > std::numeric_limits<std::int64_t>::max() / b) return -1;
    v *= b;
  }
  return v;
}

}  // namespace

CyclicSet behrend_set(std::int64_t d, std::int64_t R, int n_dim) {
  if (R < 1 || n_dim < 1) throw InfeasibleParameters("R and n_dim must be positive");
  const std::int64_t base = 10 * R;
  const std::int64_t span = ipow(base, n_dim);
  if (span < 0 || span > d) throw InfeasibleParameters("(10R)^n exceeds d");
  const std::int64_t side = 2 * R + 1;
  const std::int64_t total = ipow(side, n_dim);

  auto coords = [&](std::int64_t idx) {
    std::vector<std::int64_t> c(n_dim);
    for (int i = 0; i < n_dim; ++i) {
      c[i] = idx % side - R;
      idx /= side;
    }
    return c;
  };
  std::map<std::int64_t, std::int64_t> histogram;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t r = 0;
    for (auto v : coords(idx)) r += v * v;
    ++histogram[r];
  }
  std::int64_t best_r = 0, best_count = -1;
  for (auto [r, c] : histogram)
    if (c > best_count) best_r = r, best_count = c;

  std::vector<std::int64_t> members;
  const std::int64_t cap = d / 10;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    auto c = coords(idx);
    std::int64_t r = 0;
    for (auto v : c) r += v * v;
    if (r != best_r) continue;
    std::int64_t value = 0, place = 1;
    for (int i = 0; i < n_dim; ++i) {
      value += (c[i] + R) * place;
      place *= base;
    }
    if (value + 1 > cap) throw InfeasibleParameters("embedded sphere exceeds floor(d/10)");
    members.push_back(value + 1);
  }
  return CyclicSet(d, members);
}

std::int64_t count_3aps(const CyclicSet& F, SpacingFilter filter) {
  const std::int64_t d = F.modulus();
  std::int64_t count = 0;
  for (auto x : F.members()) {
    for (auto y : F.members()) {
      const std::int64_t r = mod(y - x, d);
      if (filter == SpacingFilter::Div3 && r % 3 != 0) continue;
      if (filter == SpacingFilter::NonDiv3 && r % 3 == 0) continue;
      if (F.contains(x + 2 * r)) ++count;
    }
  }
  return count;
}

bool is_progression_free(const CyclicSet& F) {
  return count_3aps(F) == static_cast<std::int64_t>(F.size());
}

std::vector<std::array<std::int64_t, 6>> hexagons(const CyclicSet& F) {
  const std::int64_t d = F.modulus();
  std::vector<std::array<std::int64_t, 6>> out;
  for (auto x : F.members())
    for (auto p : F.members())
      for (auto q : F.members()) {
        const std::int64_t h = p - x, k = q - x;
        const std::int64_t a = mod(x + k + 2 * h, d);
        if (!F.contains(a)) continue;
        const std::int64_t b = mod(x + 2 * k + h, d);
        if (!F.contains(b)) continue;
        const std::int64_t c = mod(x + 2 * k + 2 * h, d);
        if (!F.contains(c)) continue;
        out.push_back({x, p, q, a, b, c});
      }
  return out;
}

std::int64_t count_hexagons(const CyclicSet& F) {
  return static_cast<std::int64_t>(hexagons(F).size());
}

NegavSet lemma_negav_E(std::span<const std::int64_t> F, std::int64_t d, std::uint64_t seed) {
  if (d <= 0 || d % 3 != 0) throw std::invalid_argument("d must be a positive multiple of 3");
  for (auto f : F)
    if (f < 1 || f > d / 10) throw std::invalid_argument("F must lie in [1, floor(d/10)]");
  const CounterRng rng(seed, 0x6e65676176ULL);
  NegavSet out;
  std::vector<std::int64_t> e;
  for (int i = 0; i < 3; ++i) {
    out.shifts[i] = 1 + static_cast<std::int64_t>(rng.below(i, d / 3));
    for (auto f : F) e.push_back(3 * (f + out.shifts[i]) + i);
  }
  out.E = CyclicSet(d, e);
  out.good = count_3aps(out.E, SpacingFilter::NonDiv3);
  out.bad = count_3aps(out.E, SpacingFilter::Div3);
  return out;
}

std::optional<std::uint64_t> negav_seed_search(std::span<const std::int64_t> F, std::int64_t d,
                                               std::uint64_t first_seed, std::uint64_t max_seeds) {
  for (std::uint64_t s = first_seed; s - first_seed < max_seeds; ++s) {
    const auto res = lemma_negav_E(F, d, s);
    if (res.good > 8 * res.bad) return s;
  }
  return std::nullopt;
}

double negav_set_score(std::span<const std::int64_t> F, std::int64_t d) {
  // With shifts h_i, good = 2 (c[s0] + c[s1] + c[s2]) where c[s] counts
  // triples of F with f0 + f2 - 2 f1 = s mod d/3 and s0 + s1 + s2 = 0, while
  // bad = 3|F|. The score is the best such sum over the most populated
  // residues, divided by 12|F|.
  if (F.empty()) return 0;
  const std::int64_t m = d / 3;
  std::vector<std::int64_t> c(m, 0);
  for (auto a : F)
    for (auto b : F)
      for (auto e : F) ++c[mod(a + e - 2 * b, m)];
  std::vector<std::int64_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t top = std::min<std::size_t>(25, m);
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](std::int64_t x, std::int64_t y) { return c[x] > c[y] || (c[x] == c[y] && x < y); });
  std::int64_t best = 0;
  for (std::size_t i = 0; i < top; ++i)
    for (std::size_t j = 0; j < top; ++j) {
      const std::int64_t sa = order[i], sb = order[j];
      best = std::max(best, c[sa] + c[sb] + c[mod(-sa - sb, m)]);
    }
  return static_cast<double>(best) / (12.0 * static_cast<double>(F.size()));
}

namespace {

bool integer_progression_free_with(const std::vector<char>& in, std::int64_t x, std::int64_t L) {
  auto has = [&](std::int64_t v) { return v >= 1 && v <= L && in[v]; };
  for (std::int64_t y = 1; y <= L; ++y) {
    if (!in[y] || y == x) continue;
    if (has(2 * y - x) || has(2 * x - y)) return false;
    if ((x + y) % 2 == 0 && has((x + y) / 2)) return false;
  }
  return true;
}

std::vector<std::int64_t> members_of(const std::vector<char>& in) {
  std::vector<std::int64_t> v;
  for (std::size_t i = 1; i < in.size(); ++i)
    if (in[i]) v.push_back(static_cast<std::int64_t>(i));
  return v;
}

}  // namespace

NegavSetSearch optimize_negav_set(std::int64_t d, std::uint64_t seed, int iterations) {
  const std::int64_t L = d / 10;
  if (L < 1 || d % 3 != 0) throw std::invalid_argument("need 3 | d and d >= 10");
  Stream rng(seed, 0x616e6e65616cULL);
  std::vector<char> in(L + 1, 0);
  std::vector<std::int64_t> order(L);
  std::iota(order.begin(), order.end(), 1);
  for (std::int64_t i = L - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  for (auto x : order)
    if (integer_progression_free_with(in, x, L)) in[x] = 1;

  double cur = negav_set_score(members_of(in), d);
  NegavSetSearch best{members_of(in), cur};
  double T = 0.05;
  for (int it = 0; it < iterations; ++it, T *= 0.9997) {
    std::vector<char> next = in;
    const std::int64_t x = 1 + static_cast<std::int64_t>(rng.below(L));
    if (next[x]) {
      next[x] = 0;
    } else {
      // Add x and knock out one other point of each progression it closes.
      for (std::int64_t y = 1; y <= L; ++y) {
        if (!next[y] || y == x) continue;
        for (std::int64_t z : {2 * y - x, 2 * x - y, (x + y) % 2 == 0 ? (x + y) / 2 : -1}) {
          if (z < 1 || z > L || !next[z] || z == x || !next[y]) continue;
          next[rng.below(2) ? y : z] = 0;
        }
      }
      next[x] = 1;
      if (!integer_progression_free_with(next, x, L)) continue;
    }
    const auto members = members_of(next);
    if (members.empty()) continue;
    const double sc = negav_set_score(members, d);
    if (sc > cur || rng.uniform() < std::exp((sc - cur) / T)) {
      in = std::move(next);
      cur = sc;
      if (cur > best.score) best = {members, cur};
    }
  }
  return best;
}

CyclicSet greedy_progression_free(std::int64_t d, std::uint64_t seed) {
  Stream rng(seed, 0x677265656479ULL);
  std::vector<std::int64_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  for (std::int64_t i = d - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  std::vector<char> in(d, 0);
  std::vector<std::int64_t> chosen;
  for (auto x : order) {
    bool ok = true;
    for (auto y : chosen) {
      const std::int64_t a = mod(2 * y - x, d), b = mod(2 * x - y, d);
      if (in[a] || a == x || in[b] || b == x) {
        ok = false;
        break;
      }
      // x as the last point: y, z, x with 2z = x + y.
      for (std::int64_t z = 0; z < d && ok; ++z)
        if ((in[z] || z == x) && z != y && mod(2 * z - x - y, d) == 0) ok = false;
      if (!ok) break;
    }
    if (ok) {
      in[x] = 1;
      chosen.push_back(x);
    }
  }
  return CyclicSet(d, chosen);
}

std::vector<Complex> sign_function(const SignVector& eps) {
  std::vector<Complex> b(eps.modulus, 0.0);
  for (auto [x, s] : eps.signs) b[mod(x, eps.modulus)] = static_cast<double>(s);
  return b;
}

Complex hexagon_sum_X(std::span<const Complex> b) {
  const std::int64_t d = static_cast<std::int64_t>(b.size());
  std::vector<std::int64_t> support;
  for (std::int64_t x = 0; x < d; ++x)
    if (b[x] != Complex{}) support.push_back(x);
  Complex total{};
  for (auto x : support)
    for (auto p : support)
      for (auto q : support) {
        const std::int64_t h = p - x, k = q - x;
        const Complex ba = b[mod(x + k + 2 * h, d)];
        if (ba == Complex{}) continue;
        const Complex bb = b[mod(x + 2 * k + h, d)];
        if (bb == Complex{}) continue;
        const Complex bc = b[mod(x + 2 * k + 2 * h, d)];
        if (bc == Complex{}) continue;
        total += std::conj(b[x]) * b[p] * b[q] * std::conj(ba) * std::conj(bb) * bc;
      }
  return total;
}

std::int64_t hexagon_sum_signs(const std::vector<std::array<std::int64_t, 6>>& hex,
                               const SignVector& eps) {
  std::int64_t total = 0;
  for (const auto& h : hex) {
    int s = 1;
    for (auto x : h) s *= eps.signs.at(x);
    total += s;
  }
  return total;
}

std::int64_t exact_expectation_X(const CyclicSet& F) {
  std::int64_t total = 0;
  for (auto h : hexagons(F)) {
    std::sort(h.begin(), h.end());
    bool even = true;
    for (std::size_t i = 0; i < h.size();) {
      std::size_t j = i;
      while (j < h.size() && h[j] == h[i]) ++j;
      even &= (j - i) % 2 == 0;
      i = j;
    }
    total += even;
  }
  return total;
}

namespace {

// Hexagons re-expressed over indices into F.members().
std::vector<std::array<int, 6>> indexed_hexagons(const CyclicSet& F) {
  std::map<std::int64_t, int> index;
  for (std::size_t i = 0; i < F.size(); ++i) index[F.members()[i]] = static_cast<int>(i);
  std::vector<std::array<int, 6>> out;
  for (const auto& h : hexagons(F)) {
    std::array<int, 6> a{};
    for (int i = 0; i < 6; ++i) a[i] = index.at(h[i]);
    out.push_back(a);
  }
  return out;
}

std::int64_t signed_total(const std::vector<std::array<int, 6>>& hex, const std::vector<int>& s) {
  std::int64_t total = 0;
  for (const auto& h : hex) total += s[h[0]] * s[h[1]] * s[h[2]] * s[h[3]] * s[h[4]] * s[h[5]];
  return total;
}

}  // namespace

MonteCarloStats monte_carlo_X(const CyclicSet& F, std::uint64_t seed, std::uint64_t draws) {
  const auto hex = indexed_hexagons(F);
  const CounterRng rng(seed, 0x6d6f6e7465ULL);
  const std::size_t n = F.size();
  std::vector<int> s(n);
  double mean = 0, m2 = 0;
  for (std::uint64_t t = 0; t < draws; ++t) {
    for (std::size_t j = 0; j < n; ++j) s[j] = rng.sign(t * n + j);
    const double x = static_cast<double>(signed_total(hex, s));
    const double delta = x - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (x - mean);
  }
  MonteCarloStats st;
  st.mean = mean;
  st.draws = draws;
  st.standard_error = draws > 1 ? std::sqrt(m2 / static_cast<double>(draws - 1) / draws) : 0.0;
  return st;
}

NegativeXSearch search_negative_X(const CyclicSet& F, std::uint64_t seed, std::uint64_t max_draws,
                                  bool local_search) {
  if (F.modulus() % 2 == 0) throw std::invalid_argument("d must be odd");
  if (!is_progression_free(F)) throw std::invalid_argument("F must be progression-free");
  const auto hex = indexed_hexagons(F);
  const CounterRng rng(seed, 0x7369676e73ULL);
  const std::size_t n = F.size();
  NegativeXSearch out;
  std::vector<int> s(n);
  for (std::uint64_t t = 0; t < max_draws; ++t) {
    for (std::size_t j = 0; j < n; ++j) s[j] = rng.sign(t * n + j);
    std::int64_t x = signed_total(hex, s);
    while (local_search && x >= 0) {
      std::int64_t best = x;
      std::size_t best_j = n;
      for (std::size_t j = 0; j < n; ++j) {
        s[j] = -s[j];
        const std::int64_t y = signed_total(hex, s);
        s[j] = -s[j];
        if (y < best) best = y, best_j = j;
      }
      if (best_j == n) break;
      s[best_j] = -s[best_j];
      x = best;
    }
    out.draws_used = t + 1;
    out.X = x;
    if (x < 0) {
      SignVector eps{F.modulus(), {}};
      for (std::size_t j = 0; j < n; ++j) eps.signs[F.members()[j]] = s[j];
      out.witness = eps;
      return out;
    }
  }
  return out;
}

}  // namespace vnlab::comb
