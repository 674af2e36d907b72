#include "vnlab/ap_groups.hpp"

#include <sstream>
#include <stdexcept>

namespace vnlab::ap {

using square::Orientation;

ProgressionBase::ProgressionBase(std::array<int, 4> families,
                                 std::array<std::int64_t, 4> multipliers,
                                 std::optional<std::set<std::int64_t>> spacings)
    : families_(families), multipliers_(multipliers), spacings_(std::move(spacings)) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (families_[i] == families_[j]) throw square::InvalidBase("repeated family");
      if (multipliers_[i] == multipliers_[j]) throw square::InvalidBase("repeated multiplier");
    }
}

int ProgressionBase::position(const GeneratorSymbol& s) const {
  for (int p = 0; p < 4; ++p) {
    if (families_[p] != s.family) continue;
    const auto want = p % 2 == 0 ? Orientation::Horizontal : Orientation::Vertical;
    return s.orientation == want ? p : -1;
  }
  return -1;
}

GeneratorSymbol ProgressionBase::symbol(int family, std::int64_t index, bool inverted) const {
  for (int p = 0; p < 4; ++p)
    if (families_[p] == family)
      return GeneratorSymbol{family, index,
                             p % 2 == 0 ? Orientation::Horizontal : Orientation::Vertical,
                             inverted};
  throw std::invalid_argument("family " + std::to_string(family) + " not in this base");
}

square::Quadruple ProgressionBase::relator(std::int64_t n, std::int64_t r) const {
  square::Quadruple q;
  for (int p = 0; p < 4; ++p) q[p] = symbol(families_[p], n + multipliers_[p] * r);
  return q;
}

std::optional<square::SymbolPair> ProgressionBase::forward(const GeneratorSymbol& a,
                                                           const GeneratorSymbol& b) const {
  const int p = position(a);
  const int q = position(b);
  if (p < 0 || q < 0 || q != (p + 1) % 4) return std::nullopt;
  const std::int64_t dm = multipliers_[q] - multipliers_[p];
  const std::int64_t dt = b.index - a.index;
  if (dt % dm != 0) return std::nullopt;
  const std::int64_t r = dt / dm;
  if (spacings_ && !spacings_->count(r)) return std::nullopt;
  const std::int64_t n = a.index - multipliers_[p] * r;
  const int p2 = (p + 2) % 4, p3 = (p + 3) % 4;
  return square::SymbolPair{symbol(families_[p2], n + multipliers_[p2] * r),
                            symbol(families_[p3], n + multipliers_[p3] * r)};
}

std::optional<square::SymbolPair> ProgressionBase::complete(const GeneratorSymbol& first,
                                                            const GeneratorSymbol& second) const {
  if (!first.inverted && !second.inverted) return forward(first, second);
  if (first.inverted && second.inverted) {
    // Reversed reading: (w^-1, z^-1) continues to (y^-1, x^-1) iff x y z w = id.
    auto f = forward(second.inverse(), first.inverse());
    if (!f) return std::nullopt;
    return square::SymbolPair{f->second.inverse(), f->first.inverse()};
  }
  return std::nullopt;
}

ProgressionBase make_ap4(std::set<std::int64_t> spacings) {
  return ProgressionBase({0, 1, 2, 3}, {0, 1, 2, 3}, std::move(spacings));
}

ProgressionBase make_ap5_factor(int omitted) {
  if (omitted < 0 || omitted > 4) throw std::invalid_argument("factor must be in 0..4");
  std::array<int, 4> fam{};
  std::array<std::int64_t, 4> mult{};
  int k = 0;
  for (int j = 0; j < 5; ++j) {
    if (j == omitted) continue;
    fam[k] = j;
    mult[k] = j;
    ++k;
  }
  return ProgressionBase(fam, mult, std::nullopt);
}

std::vector<GeneratorSymbol> shift_word(std::span<const GeneratorSymbol> word, std::int64_t k) {
  std::vector<GeneratorSymbol> out(word.begin(), word.end());
  for (auto& s : out) s.index += k;
  return out;
}

NormalForm shift(const NormalForm& nf, std::int64_t k) {
  if (k == 0) return nf;
  return nf.relabel([k](const GeneratorSymbol& s) {
    GeneratorSymbol t = s;
    t.index += k;
    return t;
  });
}

SlopResult verify_slop(const std::set<std::int64_t>& spacings, std::int64_t r,
                       std::int64_t window) {
  if (r > window || r < -window) throw std::invalid_argument("spacing outside the window");
  for (auto a : spacings)
    if (a > window || a < -window) throw std::invalid_argument("spacing set outside the window");
  const auto base = make_ap4(spacings);
  SlopResult res;
  res.word = {base.symbol(0, 0), base.symbol(1, r), base.symbol(2, 2 * r), base.symbol(3, 3 * r)};
  res.normal_form = square::normal_form(res.word, base);
  res.identity = res.normal_form.is_identity();
  return res;
}

std::optional<GeneratorSymbol> factor_letter(int code, int slot, std::int64_t r, int factor) {
  if (code == 0) return std::nullopt;
  const int j = (code - 1) % 5;
  if (j == factor) return std::nullopt;
  const bool inv = code > 5;
  // Positions of the surviving families alternate H, V, H, V.
  int pos = j < factor ? j : j - 1;
  return GeneratorSymbol{j, static_cast<std::int64_t>(slot) * r,
                         pos % 2 == 0 ? Orientation::Horizontal : Orientation::Vertical, inv};
}

namespace {

struct SlopSearch {
  std::int64_t r;
  std::vector<ProgressionBase> bases;
  std::vector<SlopTuple> found;
  SlopTuple cur{};

  void recurse(int slot, const std::array<NormalForm, 5>& nfs) {
    if (slot == 5) {
      for (const auto& nf : nfs)
        if (!nf.is_identity()) return;
      found.push_back(cur);
      return;
    }
    for (int code = 0; code < kLetterCount; ++code) {
      cur[slot] = code;
      std::array<NormalForm, 5> next = nfs;
      for (int i = 0; i < 5; ++i)
        if (auto s = factor_letter(code, slot, r, i))
          next[i] = square::concatenate(nfs[i], *s, bases[i]);
      recurse(slot + 1, next);
    }
  }
};

}  // namespace

std::vector<SlopTuple> classify_slop3(std::int64_t r) {
  SlopSearch s{r, {}, {}, {}};
  for (int i = 0; i < 5; ++i) s.bases.push_back(make_ap5_factor(i));
  s.recurse(0, {});
  return s.found;
}

bool tuple_is_trivial(const SlopTuple& t, std::int64_t r) {
  for (int i = 0; i < 5; ++i) {
    const auto base = make_ap5_factor(i);
    std::vector<GeneratorSymbol> w;
    for (int l = 0; l < 5; ++l)
      if (auto s = factor_letter(t[l], l, r, i)) w.push_back(*s);
    if (!square::normal_form(w, base).is_identity()) return false;
  }
  return true;
}

std::string tuple_to_string(const SlopTuple& t) {
  std::ostringstream os;
  os << '(';
  for (int l = 0; l < 5; ++l) {
    if (l) os << ", ";
    if (t[l] == 0) {
      os << "id";
    } else {
      os << 'e' << (t[l] - 1) % 5 << (t[l] > 5 ? "^-1" : "");
    }
  }
  os << ')';
  return os.str();
}

std::int64_t signed_count_hom(std::span<const GeneratorSymbol> word, int j, int k) {
  std::int64_t v = 0;
  for (const auto& s : word) {
    const int sign = s.inverted ? -1 : 1;
    if (s.family == j) v += sign;
    if (s.family == k) v -= sign;
  }
  return v;
}

std::array<std::int64_t, 5> weighted_hom_weights(int factor) {
  // Each weight vector w on the four surviving families satisfies
  // sum w_j = 0 and sum j w_j = 0, so every relator evaluates to zero.
  switch (factor) {
    case 0: return {0, 1, -2, 1, 0};
    case 1: return {0, 0, 1, -2, 1};
    case 2: return {1, -1, 0, -1, 1};
    case 3: return {1, -2, 1, 0, 0};
    case 4: return {0, 1, -2, 1, 0};
  }
  throw std::invalid_argument("factor must be in 0..4");
}

std::int64_t weighted_hom(std::span<const GeneratorSymbol> word, int factor) {
  const auto w = weighted_hom_weights(factor);
  std::int64_t v = 0;
  for (const auto& s : word) {
    if (s.family < 0 || s.family > 4 || s.family == factor)
      throw std::invalid_argument("letter outside the factor");
    v += (s.inverted ? -1 : 1) * w[s.family] * s.index;
  }
  return v;
}

}  // namespace vnlab::ap
