#pragma once

#include "biquant/poly.hpp"

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace biquant {

// One symbolic term f1..fm ↦ c · Δ^{(n)}(∏ ∂^{D_i} f_i) · (M_1 ⊗ … ⊗ M_n).
struct SymKey {
  std::vector<Monomial> derivs;  // D_i, one per input slot
  std::vector<Monomial> uppers;  // M_j, one per output slot

  friend auto operator<=>(const SymKey&, const SymKey&) = default;
};

// Canonical symbolic form: distinct keys, no zero coefficients. Two operators are equal
// iff their canonical forms are equal.
using SymbolicForm = std::map<SymKey, Rational>;

// Polydifferential operator A^{⊗m} → A^{⊗n}, held symbolically when possible and
// always evaluable on monomial tuples.
class Cochain {
 public:
  using Evaluator = std::function<TensorPoly(std::span<const Monomial>)>;

  // Maximal derivative order per input slot and maximal total coefficient degree.
  struct Bounds {
    int order = 0;
    int coeff_degree = 0;
  };

  Cochain() = default;
  static Cochain symbolic(int m, int n, int dim, SymbolicForm terms);
  static Cochain extensional(int m, int n, int dim, Bounds bounds, Evaluator eval);

  static Cochain zero(int m, int n, int dim);
  static Cochain identity(int dim);
  static Cochain product(int dim);    // f⊗g ↦ fg
  static Cochain coproduct(int dim);  // f ↦ Δf
  static Cochain iterated_product(int k, int dim);    // f1⊗…⊗fk ↦ f1⋯fk
  static Cochain iterated_coproduct(int k, int dim);  // f ↦ Δ^{(k)} f

  int m() const { return m_; }
  int n() const { return n_; }
  int dim() const { return dim_; }
  Bounds bounds() const { return bounds_; }
  bool is_symbolic() const { return static_cast<bool>(terms_); }
  const SymbolicForm& terms() const;  // throws if not symbolic

  TensorPoly apply(std::span<const Monomial> inputs) const;
  TensorPoly apply(const TensorPoly& input) const;
  TensorPoly apply(std::span<const Poly> inputs) const;

  Cochain& operator+=(const Cochain& o);
  Cochain& operator-=(const Cochain& o);
  Cochain& operator*=(const Rational& c);
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
  friend Cochain operator*(Cochain a, const Rational& c) { return a *= c; }

 private:
  int m_ = 0;
  int n_ = 0;
  int dim_ = 0;
  Bounds bounds_;
  std::shared_ptr<const SymbolicForm> terms_;
  std::shared_ptr<const Evaluator> eval_;
};

void add_term(SymbolicForm& form, SymKey key, const Rational& c);
Cochain::Bounds bounds_of(const SymbolicForm& form);

// Evaluation of a symbolic form on a monomial tuple.
TensorPoly apply_symbolic(const SymbolicForm& form, int n, int dim, std::span<const Monomial> inputs);

// Extensional equality on all monomial tuples with per-slot degree <= order + coeff_degree + 1,
// taking the larger bounds of the two operands.
bool cochain_eq(const Cochain& a, const Cochain& b);
// Same, with an explicit per-slot degree bound.
bool cochain_eq(const Cochain& a, const Cochain& b, int slot_degree);
// First monomial tuple (per-slot degree <= bound) on which c is non-zero; empty if none.
std::vector<Monomial> find_nonzero_input(const Cochain& c, int slot_degree);

// Exact symbolic form of an operator known to lie in the span of the symbolic terms with
// derivative order <= bounds().order per slot. Recovered by evaluating on x^D for D in
// increasing total degree and peeling off the terms already found; throws ValidationError
// when the result disagrees with c on tuples of per-slot degree <= order + 1.
Cochain symbolize(const Cochain& c);

// Calls f on every m-tuple of monomials of per-slot degree <= bound.
void for_each_monomial_tuple(int m, int dim, int slot_degree,
                             const std::function<void(std::span<const Monomial>)>& f);

// Text form of a symbolic cochain: header "cochain m n dim d", then
// "num/den : D_1 | … | D_m ; M_1 | … | M_n" per term.
std::string to_text(const Cochain& c);
Cochain parse_cochain(std::string_view text);

}  // namespace biquant
