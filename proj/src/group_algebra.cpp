#include "vnlab/group_algebra.hpp"

#include <stdexcept>

namespace vnlab::galg {

NormalForm SquareGroup::shift(const NormalForm& a, std::int64_t k) const {
  if (!shift_) throw std::logic_error("group has no shift automorphism");
  return shift_(a, k);
}

GroupAlgebraElement GroupAlgebraElement::delta(const NormalForm& g, Complex c) {
  GroupAlgebraElement e;
  e.add_term(g, c);
  return e;
}

Complex GroupAlgebraElement::coefficient(const NormalForm& g) const {
  auto it = terms_.find(g);
  return it == terms_.end() ? Complex{} : it->second;
}

void GroupAlgebraElement::add_term(const NormalForm& g, Complex c) {
  auto [it, fresh] = terms_.emplace(g, c);
  if (!fresh) it->second += c;
  if (std::abs(it->second) < kPruneTolerance) terms_.erase(it);
}

GroupAlgebraElement& GroupAlgebraElement::operator+=(const GroupAlgebraElement& other) {
  for (const auto& [g, c] : other.terms_) add_term(g, c);
  return *this;
}

GroupAlgebraElement GroupAlgebraElement::scaled(Complex c) const {
  GroupAlgebraElement out = *this;
  for (auto& [g, v] : out.terms_) v *= c;
  out.prune();
  return out;
}

void GroupAlgebraElement::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kPruneTolerance; });
}

GroupAlgebraElement mul(const SquareGroup& g, const GroupAlgebraElement& x,
                        const GroupAlgebraElement& y) {
  GroupAlgebraElement out;
  for (const auto& [a, ca] : x.terms())
    for (const auto& [b, cb] : y.terms()) out.add_term(g.multiply(a, b), ca * cb);
  return out;
}

GroupAlgebraElement adjoint(const SquareGroup& g, const GroupAlgebraElement& x) {
  GroupAlgebraElement out;
  for (const auto& [a, c] : x.terms()) out.add_term(g.inverse(a), std::conj(c));
  return out;
}

Complex trace(const GroupAlgebraElement& x) { return x.coefficient(NormalForm{}); }

GroupAlgebraElement shift(const SquareGroup& g, const GroupAlgebraElement& x, std::int64_t k) {
  GroupAlgebraElement out;
  for (const auto& [a, c] : x.terms()) out.add_term(g.shift(a, k), c);
  return out;
}

GroupAlgebraElement positive_element(const SquareGroup& g,
                                     std::span<const std::vector<GeneratorSymbol>> words,
                                     std::span<const Complex> coefficients) {
  if (words.size() != coefficients.size())
    throw std::invalid_argument("words and coefficients differ in length");
  GroupAlgebraElement b;
  for (std::size_t i = 0; i < words.size(); ++i) b.add_term(g.word(words[i]), coefficients[i]);
  return mul(g, b, adjoint(g, b));
}

Complex k_fold_trace(const SquareGroup& g, std::span<const GroupAlgebraElement> elements,
                     std::span<const std::int64_t> exponents, std::int64_t n) {
  if (elements.size() != exponents.size() || elements.empty())
    throw std::invalid_argument("need one exponent per element");
  GroupAlgebraElement acc = shift(g, elements[0], exponents[0] * n);
  for (std::size_t i = 1; i < elements.size(); ++i)
    acc = mul(g, acc, shift(g, elements[i], exponents[i] * n));
  return trace(acc);
}

}  // namespace vnlab::galg
