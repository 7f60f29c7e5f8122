#pragma once

#include "biquant/rational.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace biquant {

inline constexpr int kMaxDim = 8;

// Exponent vector x^e of fixed ambient dimension.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int dim);
  Monomial(int dim, std::span<const int> exps);
  static Monomial variable(int dim, int i);  // i is 0-based

  int dim() const { return dim_; }
  int operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
  void set(int i, int v);
  int degree() const;
  bool is_one() const { return degree() == 0; }
  bool divides(const Monomial& other) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  // Graded-lex: total degree first, then exponent sequence lexicographically.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) = default;

 private:
  std::array<std::uint16_t, kMaxDim> e_{};
  std::uint8_t dim_ = 0;
};

// All monomials of total degree <= max_degree, in graded-lex order.
std::vector<Monomial> monomials_up_to(int dim, int max_degree);

class TensorPoly;

class Poly {
 public:
  using Terms = std::map<Monomial, Rational>;

  Poly() = default;
  explicit Poly(int dim) : dim_(dim) {}
  static Poly constant(int dim, const Rational& c);
  static Poly variable(int dim, int i);  // i is 0-based
  static Poly monomial(const Monomial& m, const Rational& c = 1);

  int dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // -1 for zero

  void add_term(const Monomial& m, const Rational& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) = default;

 private:
  Terms terms_;
  int dim_ = 0;
};

// Element of A^{⊗k}: finite sum of coefficient times a k-tuple of monomials.
class TensorPoly {
 public:
  using Key = std::vector<Monomial>;
  using Terms = std::map<Key, Rational>;

  TensorPoly() = default;
  TensorPoly(int arity, int dim) : arity_(arity), dim_(dim) {}
  static TensorPoly from_poly(const Poly& p);
  static TensorPoly unit(int arity, int dim);  // 1⊗…⊗1
  static TensorPoly pure(std::span<const Monomial> slots, const Rational& c = 1);

  int arity() const { return arity_; }
  int dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Key& k, const Rational& c);
  void add_term(Key&& k, const Rational& c);
  void add_scaled(const TensorPoly& o, const Rational& c);

  Poly to_poly() const;  // arity 1 only

  TensorPoly& operator+=(const TensorPoly& o);
  TensorPoly& operator-=(const TensorPoly& o);
  TensorPoly& operator*=(const Rational& c);
  friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) { return a += b; }
  friend TensorPoly operator-(TensorPoly a, const TensorPoly& b) { return a -= b; }
  friend TensorPoly operator*(TensorPoly a, const Rational& c) { return a *= c; }
  friend bool operator==(const TensorPoly& a, const TensorPoly& b) = default;

 private:
  Terms terms_;
  int arity_ = 0;
  int dim_ = 0;
};

Poly mul(const Poly& a, const Poly& b);
Poly partial(const Poly& f, int i);  // i is 0-based
// ∂^D applied to x^e: returns the coefficient and writes the result monomial; 0 if it vanishes.
Rational partial_monomial(const Monomial& e, const Monomial& D, Monomial& out);

TensorPoly tensor_mul(const TensorPoly& a, const TensorPoly& b);
// Concatenation a⊗b of arities k and l into arity k+l.
TensorPoly outer(const TensorPoly& a, const TensorPoly& b);

TensorPoly coproduct(const Poly& f);
TensorPoly iterated_coproduct(const Poly& f, int n);
// Δ^{(n)}(x^e) as a list of (slots, coefficient); cached per thread.
const std::vector<std::pair<TensorPoly::Key, Rational>>& iterated_coproduct_monomial(const Monomial& e,
                                                                                      int n);
// Applies Δ to slot i (0-based), raising the arity by one.
TensorPoly coproduct_at(const TensorPoly& t, int i);

std::string to_text(const Poly& p);
std::string to_text(const TensorPoly& t);
// dim < 0 infers the dimension from the first term (then an empty input is an error).
Poly parse_poly(std::string_view text, int dim = -1);
TensorPoly parse_tensor_poly(std::string_view text, int arity = -1, int dim = -1);

// Human-readable form such as "3/2*x1^2*x2 - x2 + 1".
std::string to_expr(const Poly& p);
Poly parse_poly_expr(std::string_view text, int dim);

}  // namespace biquant
