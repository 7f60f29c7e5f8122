#include "biquant/errors.hpp"
#include "biquant/graph_ops.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace biquant;
using biquant::testing::random_poly;

namespace {

// Σ c_ij^k x_k ∂_i f1 ∂_j f2, computed with plain polynomial arithmetic.
Poly bracket_oracle(const StructTensor& c, const Poly& f1, const Poly& f2) {
  const int d = c.dim();
  Poly r(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const int ins[] = {i, j}, out[] = {k};
        const Rational& v = c.at(ins, out);
        if (v == 0) continue;
        r += mul(mul(partial(f1, i), partial(f2, j)), Poly::variable(d, k)) * v;
      }
  return r;
}

// Σ d_i^{jk} Δ(∂_i f)·(x_j ⊗ x_k).
TensorPoly cobracket_oracle(const StructTensor& delta, const Poly& f) {
  const int d = delta.dim();
  TensorPoly r(2, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const int in[] = {i}, outs[] = {j, k};
        const Rational& v = delta.at(in, outs);
        if (v == 0) continue;
        const Monomial xs[] = {Monomial::variable(d, j), Monomial::variable(d, k)};
        r.add_scaled(tensor_mul(coproduct(partial(f, i)), TensorPoly::pure(xs)), v);
      }
  return r;
}

// Sign of π times the graded-commutative Koszul sign, both by inversion counting.
int koszul_oracle(const std::vector<int>& perm, const std::vector<int>& deg) {
  int inversions = 0, odd_inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) {
        ++inversions;
        if (deg[static_cast<std::size_t>(perm[i])] % 2 && deg[static_cast<std::size_t>(perm[j])] % 2) ++odd_inversions;
      }
  return (inversions + odd_inversions) % 2 ? -1 : 1;
}

}  // namespace

TEST_CASE("edgeless graph compiles to the product") {
  for (int d = 1; d <= 3; ++d) {
    const Cochain phi = compile(edgeless(2, 1), {}, d);
    CHECK(cochain_eq(phi, Cochain::product(d)));
    std::mt19937_64 rng(static_cast<unsigned>(d));
    const Poly f[] = {random_poly(d, 3, rng), random_poly(d, 3, rng)};
    CHECK(phi.apply(f).to_poly() == mul(f[0], f[1]));
  }
  CHECK(cochain_eq(compile(edgeless(1, 2), {}, 2), Cochain::coproduct(2)));
}

TEST_CASE("corolla (2,1) compiles to the linear Poisson bracket") {
  std::mt19937_64 rng(17);
  for (int d = 2; d <= 3; ++d)
    for (int trial = 0; trial < 4; ++trial) {
      const StructTensor c = random_struct_tensor(2, 1, d, rng);
      const StructTensor gammas[] = {c};
      const Cochain phi = compile(corolla(2, 1), gammas, d);
      const Poly f[] = {random_poly(d, 3, rng), random_poly(d, 3, rng)};
      CHECK(phi.apply(f).to_poly() == bracket_oracle(c, f[0], f[1]));
    }
}

TEST_CASE("corolla (1,2) compiles to the cobracket operator") {
  std::mt19937_64 rng(23);
  for (int d = 2; d <= 3; ++d)
    for (int trial = 0; trial < 4; ++trial) {
      const StructTensor delta = random_struct_tensor(1, 2, d, rng);
      const StructTensor gammas[] = {delta};
      const Cochain phi = compile(corolla(1, 2), gammas, d);
      const Poly f[] = {random_poly(d, 4, rng)};
      CHECK(phi.apply(f) == cobracket_oracle(delta, f[0]));
    }
}

TEST_CASE("label order fixes the sign") {
  const StructTensor gammas[] = {example_bracket_2d()};
  AdmissibleGraph g = corolla(2, 1);
  const Cochain a = compile(g, gammas, 2);
  g.star[0] = {1, 0};
  const Cochain b = compile(g, gammas, 2);
  CHECK_FALSE(cochain_eq(a, b));
  CHECK(cochain_eq(a, b * Rational(-1)));
}

TEST_CASE("shape mismatch gives zero, bad input throws") {
  StructTensor t(1, 1, 2);
  const int i[] = {0}, j[] = {1};
  t.set_antisym(i, j, 1);
  const StructTensor gammas[] = {t};
  const Cochain z = compile(corolla(2, 1), gammas, 2);
  CHECK(z.terms().empty());
  CHECK_THROWS_AS(compile(corolla(2, 1), {}, 2), ValidationError);
  CHECK_THROWS_AS(compile(corolla(2, 1), gammas, 3), ValidationError);
}

TEST_CASE("degree audit") {
  const StructTensor c[] = {example_bracket_2d()};
  CHECK(degree_audit(corolla(2, 1), c).ok);
  CHECK(degree_audit(edgeless(2, 1), {}).ok);
  const StructTensor wrong[] = {StructTensor(1, 1, 2)};
  CHECK_FALSE(degree_audit(corolla(2, 1), wrong).ok);
}

TEST_CASE("Koszul sign matches inversion counting") {
  const std::vector<std::vector<int>> degree_sets = {{0, 0, 0}, {1, 1, 1}, {1, 0, 2}, {1, 1, 0, 3}};
  for (const auto& deg : degree_sets) {
    std::vector<int> p(deg.size());
    std::iota(p.begin(), p.end(), 0);
    do {
      CHECK(koszul_sign(p, deg) == koszul_oracle(p, deg));
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

TEST_CASE("alternated compile") {
  std::mt19937_64 rng(29);
  // s = 1: nothing to alternate.
  const StructTensor c[] = {random_struct_tensor(2, 1, 2, rng)};
  CHECK(cochain_eq(alternated_compile(corolla(2, 1), c, 2), compile(corolla(2, 1), c, 2)));

  // i1 has shape (2,0), i2 has shape (1,2); the swapped order compiles to zero.
  AdmissibleGraph g;
  g.s = 2;
  g.m = 2;
  g.n = 1;
  g.edges = {{inner(0), inner(1)}, {inner(0), lower(0)}, {inner(1), lower(1)}, {upper(0), inner(1)}};
  g.assign_default_labels();
  REQUIRE(validate(g).ok);
  StructTensor u(2, 0, 2);
  const int ij[] = {0, 1};
  u.set_antisym(ij, {}, 1);
  const StructTensor pair[] = {u, random_struct_tensor(1, 2, 2, rng)};
  const Cochain direct = compile(g, pair, 2);
  CHECK_FALSE(direct.terms().empty());
  CHECK(cochain_eq(alternated_compile(g, pair, 2), direct * Rational(1, 2)));

  // Chain u1→i1→i2→d1 with two (1,1) vertices of even degree.
  AdmissibleGraph h;
  h.s = 2;
  h.m = 1;
  h.n = 1;
  h.edges = {{inner(0), inner(1)}, {inner(1), lower(0)}, {upper(0), inner(0)}};
  h.assign_default_labels();
  REQUIRE(validate(h).ok);
  const StructTensor a = random_struct_tensor(1, 1, 3, rng), b = random_struct_tensor(1, 1, 3, rng);
  const StructTensor same[] = {a, a};
  CHECK(alternated_compile(h, same, 3).terms().empty());
  const StructTensor ab[] = {a, b}, ba[] = {b, a};
  const int chi = koszul_oracle({1, 0}, {a.degree(), b.degree()});
  CHECK(chi == -1);
  const Cochain want = (compile(h, ab, 3) + compile(h, ba, 3) * Rational(chi)) * Rational(1, 2);
  CHECK(cochain_eq(alternated_compile(h, ab, 3), want));
}
