#pragma once

// Progression-free sets, hexagon statistics and the randomized constructions
// feeding the negative multiple-average examples.

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace vnlab::comb {

using Complex = std::complex<double>;

struct InfeasibleParameters : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class CyclicSet {
 public:
  CyclicSet() = default;
  // Members are reduced mod d, sorted and deduplicated.
  CyclicSet(std::int64_t modulus, std::span<const std::int64_t> members);

  std::int64_t modulus() const { return d_; }
  const std::vector<std::int64_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(std::int64_t x) const;

 private:
  std::int64_t d_ = 1;
  std::vector<std::int64_t> members_;
  std::vector<char> mask_;
};

std::int64_t mod(std::int64_t a, std::int64_t d);

// Digit embedding of the most populated sphere of {-R..R}^n in base 10R,
// shifted into [1, floor(d/10)].
CyclicSet behrend_set(std::int64_t d, std::int64_t R, int n_dim);

enum class SpacingFilter { All, Div3, NonDiv3 };
// Pairs (x, r), r in [0, d), with x, x+r, x+2r all in F. The r = 0 pairs
// are the trivial progressions. Divisibility is tested on the representative
// r in [0, d).
std::int64_t count_3aps(const CyclicSet& F, SpacingFilter filter = SpacingFilter::All);
bool is_progression_free(const CyclicSet& F);

// Triples (x, h, k) with x, x+h, x+k, x+k+2h, x+2k+h, x+2k+2h all in F.
std::int64_t count_hexagons(const CyclicSet& F);
// The six points of every hexagon, in the order above.
std::vector<std::array<std::int64_t, 6>> hexagons(const CyclicSet& F);

struct NegavSet {
  CyclicSet E;
  std::array<std::int64_t, 3> shifts{};
  std::int64_t good = 0;  // progressions with spacing not divisible by 3
  std::int64_t bad = 0;   // spacing divisible by 3
};

// E = {3(f + h_i) + i : i in {0,1,2}, f in F} with h_i uniform in [1, d/3].
NegavSet lemma_negav_E(std::span<const std::int64_t> F, std::int64_t d, std::uint64_t seed);

// First seed in [first_seed, first_seed + max_seeds) with good > 8 bad.
std::optional<std::uint64_t> negav_seed_search(std::span<const std::int64_t> F, std::int64_t d,
                                               std::uint64_t first_seed, std::uint64_t max_seeds);

// Local search for a progression-free F in [1, floor(d/10)] that makes
// good > 8 bad reachable. The objective is the best achievable ratio
// good / (8 bad) over shift triples (values above 1 are needed).
struct NegavSetSearch {
  std::vector<std::int64_t> F;
  double score = 0;
};
NegavSetSearch optimize_negav_set(std::int64_t d, std::uint64_t seed, int iterations);
double negav_set_score(std::span<const std::int64_t> F, std::int64_t d);

// Random maximal progression-free subset of Z/dZ (greedy over a shuffled order).
CyclicSet greedy_progression_free(std::int64_t d, std::uint64_t seed);

struct SignVector {
  std::int64_t modulus = 1;
  std::map<std::int64_t, int> signs;  // residue -> +1 or -1
};

// b as a dense vector on Z/dZ: b(x) = eps_x on F, 0 elsewhere.
std::vector<Complex> sign_function(const SignVector& eps);

Complex hexagon_sum_X(std::span<const Complex> b);
std::int64_t hexagon_sum_signs(const std::vector<std::array<std::int64_t, 6>>& hex,
                               const SignVector& eps);

// Exact mean of X over uniform independent signs on F: the number of
// hexagons in which every point occurs an even number of times.
std::int64_t exact_expectation_X(const CyclicSet& F);

struct MonteCarloStats {
  double mean = 0;
  double standard_error = 0;
  std::uint64_t draws = 0;
};
MonteCarloStats monte_carlo_X(const CyclicSet& F, std::uint64_t seed, std::uint64_t draws);

struct NegativeXSearch {
  std::optional<SignVector> witness;
  std::int64_t X = 0;
  std::uint64_t draws_used = 0;
};
NegativeXSearch search_negative_X(const CyclicSet& F, std::uint64_t seed, std::uint64_t max_draws,
                                  bool local_search = true);

}  // namespace vnlab::comb
