#pragma once

// Square groups whose relators are arithmetic progressions of labels:
//   e_{p0, n} e_{p1, n + m1 r} e_{p2, n + m2 r} e_{p3, n + m3 r} = id
// where p0..p3 are the families in quadruple order, m_j their multipliers
// and r ranges over a set of admissible spacings (or all of Z).

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "vnlab/square_group.hpp"

namespace vnlab::ap {

using square::GeneratorSymbol;
using square::NormalForm;

class ProgressionBase : public square::SquareBase {
 public:
  // families in quadruple order; positions 0 and 2 are horizontal, 1 and 3
  // vertical. spacings == nullopt admits every integer spacing.
  ProgressionBase(std::array<int, 4> families, std::array<std::int64_t, 4> multipliers,
                  std::optional<std::set<std::int64_t>> spacings);

  std::optional<square::SymbolPair> complete(const GeneratorSymbol& first,
                                             const GeneratorSymbol& second) const override;

  GeneratorSymbol symbol(int family, std::int64_t index, bool inverted = false) const;
  square::Quadruple relator(std::int64_t n, std::int64_t r) const;
  const std::array<int, 4>& families() const { return families_; }

 private:
  std::optional<square::SymbolPair> forward(const GeneratorSymbol& a,
                                            const GeneratorSymbol& b) const;
  int position(const GeneratorSymbol& s) const;

  std::array<int, 4> families_;
  std::array<std::int64_t, 4> multipliers_;
  std::optional<std::set<std::int64_t>> spacings_;
};

// Families 0..3 with multipliers 0..3 and spacings restricted to A.
ProgressionBase make_ap4(std::set<std::int64_t> spacings);
// The i-th factor of the 5-family group: the four families other than i,
// multiplier equal to the family number, every spacing allowed.
ProgressionBase make_ap5_factor(int omitted);

// Adds k to every label index. This is an automorphism of every
// progression base.
NormalForm shift(const NormalForm& nf, std::int64_t k);
std::vector<GeneratorSymbol> shift_word(std::span<const GeneratorSymbol> word, std::int64_t k);

struct SlopResult {
  bool identity = false;
  NormalForm normal_form;
  std::vector<GeneratorSymbol> word;
};

// Checks that e_{0,0} e_{1,r} e_{2,2r} e_{3,3r} is trivial in the group
// built on A. Requires |r| <= window and A inside [-window, window].
SlopResult verify_slop(const std::set<std::int64_t>& spacings, std::int64_t r,
                       std::int64_t window);

// Letter codes for the 5-family product: 0 is the identity, 1..5 are
// e_0..e_4 and 6..10 their inverses.
using SlopTuple = std::array<int, 5>;
constexpr int kLetterCount = 11;

std::vector<SlopTuple> classify_slop3(std::int64_t r);
// Component of the letter code at slot l in factor i, or nothing for the
// identity.
std::optional<GeneratorSymbol> factor_letter(int code, int slot, std::int64_t r, int factor);
bool tuple_is_trivial(const SlopTuple& t, std::int64_t r);
std::string tuple_to_string(const SlopTuple& t);

// Homomorphisms to Z on factor words. signed_count_hom sends e_j to 1, e_k to
// -1 and other families to 0; weighted_hom sends e_{j,n} to w_j n with
// weights killing every relator of the factor.
std::int64_t signed_count_hom(std::span<const GeneratorSymbol> word, int j, int k);
std::int64_t weighted_hom(std::span<const GeneratorSymbol> word, int factor);
std::array<std::int64_t, 5> weighted_hom_weights(int factor);

}  // namespace vnlab::ap
