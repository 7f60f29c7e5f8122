#pragma once

#include "biquant/poly.hpp"

#include <random>
#include <vector>

namespace biquant::testing {

inline Poly random_poly(int dim, int max_degree, std::mt19937_64& rng, int range = 4) {
  std::uniform_int_distribution<int> coef(-range, range);
  Poly p(dim);
  for (const auto& m : monomials_up_to(dim, max_degree)) p.add_term(m, coef(rng));
  return p;
}

inline std::vector<Rational> random_point(int dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-7, 7), den(1, 5);
  std::vector<Rational> v;
  for (int i = 0; i < dim; ++i) {
    Rational q(num(rng), den(rng));
    q.canonicalize();
    v.push_back(q);
  }
  return v;
}

inline Rational eval_monomial(const Monomial& m, const std::vector<Rational>& x) {
  Rational r = 1;
  for (int i = 0; i < m.dim(); ++i)
    for (int k = 0; k < m[i]; ++k) r *= x[static_cast<std::size_t>(i)];
  return r;
}

inline Rational eval(const Poly& p, const std::vector<Rational>& x) {
  Rational r = 0;
  for (const auto& [m, c] : p.terms()) r += c * eval_monomial(m, x);
  return r;
}

// Value of a tensor at one point per slot.
inline Rational eval(const TensorPoly& t, const std::vector<std::vector<Rational>>& pts) {
  Rational r = 0;
  for (const auto& [k, c] : t.terms()) {
    Rational term = c;
    for (std::size_t j = 0; j < k.size(); ++j) term *= eval_monomial(k[j], pts[j]);
    r += term;
  }
  return r;
}

inline Poly x(int dim, int i) { return Poly::variable(dim, i - 1); }

}  // namespace biquant::testing

#include "biquant/cochain.hpp"

namespace biquant::testing {

// Random symbolic cochain with derivative orders and upper degrees at most max_deg.
inline Cochain random_cochain(int m, int n, int dim, std::mt19937_64& rng, int terms = 4, int max_deg = 1) {
  const auto pool = monomials_up_to(dim, max_deg);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> coef(-3, 3);
  SymbolicForm f;
  for (int t = 0; t < terms; ++t) {
    SymKey k;
    for (int i = 0; i < m; ++i) k.derivs.push_back(pool[pick(rng)]);
    for (int j = 0; j < n; ++j) k.uppers.push_back(pool[pick(rng)]);
    add_term(f, std::move(k), coef(rng));
  }
  return Cochain::symbolic(m, n, dim, std::move(f));
}

}  // namespace biquant::testing
