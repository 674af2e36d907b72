#pragma once

// Finitely supported complex functions on a square group, with convolution,
// involution and the canonical trace (coefficient of the identity).

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "vnlab/square_group.hpp"

namespace vnlab::galg {

using Complex = std::complex<double>;
using square::GeneratorSymbol;
using square::NormalForm;

// Coefficients with modulus below this are dropped after every operation.
inline constexpr double kPruneTolerance = 1e-12;

class SquareGroup {
 public:
  using ShiftFn = std::function<NormalForm(const NormalForm&, std::int64_t)>;

  SquareGroup(std::shared_ptr<const square::SquareBase> base, ShiftFn shift = {})
      : base_(std::move(base)), shift_(std::move(shift)) {}

  const square::SquareBase& base() const { return *base_; }
  NormalForm word(std::span<const GeneratorSymbol> w) const { return square::normal_form(w, *base_); }
  NormalForm multiply(const NormalForm& a, const NormalForm& b) const {
    return square::multiply(a, b, *base_);
  }
  NormalForm inverse(const NormalForm& a) const { return square::inverse(a, *base_); }
  bool has_shift() const { return static_cast<bool>(shift_); }
  NormalForm shift(const NormalForm& a, std::int64_t k) const;

 private:
  std::shared_ptr<const square::SquareBase> base_;
  ShiftFn shift_;
};

class GroupAlgebraElement {
 public:
  GroupAlgebraElement() = default;
  static GroupAlgebraElement delta(const NormalForm& g, Complex c = 1.0);

  const std::map<NormalForm, Complex>& terms() const { return terms_; }
  std::size_t support_size() const { return terms_.size(); }
  Complex coefficient(const NormalForm& g) const;
  void add_term(const NormalForm& g, Complex c);

  GroupAlgebraElement& operator+=(const GroupAlgebraElement& other);
  friend GroupAlgebraElement operator+(GroupAlgebraElement a, const GroupAlgebraElement& b) {
    return a += b;
  }
  GroupAlgebraElement scaled(Complex c) const;

 private:
  void prune();
  std::map<NormalForm, Complex> terms_;
};

GroupAlgebraElement mul(const SquareGroup& g, const GroupAlgebraElement& x,
                        const GroupAlgebraElement& y);
GroupAlgebraElement adjoint(const SquareGroup& g, const GroupAlgebraElement& x);
Complex trace(const GroupAlgebraElement& x);
GroupAlgebraElement shift(const SquareGroup& g, const GroupAlgebraElement& x, std::int64_t k);

// b b* for b = sum_i lambda_i w_i.
GroupAlgebraElement positive_element(const SquareGroup& g,
                                     std::span<const std::vector<GeneratorSymbol>> words,
                                     std::span<const Complex> coefficients);

// tau(prod_i shift(x_i, c_i n)), the product taken left to right.
Complex k_fold_trace(const SquareGroup& g, std::span<const GroupAlgebraElement> elements,
                     std::span<const std::int64_t> exponents, std::int64_t n);

}  // namespace vnlab::galg
