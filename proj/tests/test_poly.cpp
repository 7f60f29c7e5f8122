#include "biquant/errors.hpp"
#include "biquant/poly.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace biquant;
using biquant::testing::eval;
using biquant::testing::random_point;
using biquant::testing::random_poly;
using biquant::testing::x;

TEST_CASE("monomial products and units") {
  CHECK(mul(x(2, 1), x(2, 1)) == Poly::monomial(Monomial(2, std::vector<int>{2, 0})));
  const Poly f = x(2, 1) * Rational(3) + x(2, 2) * x(2, 2);
  CHECK(mul(f, Poly::constant(2, 1)) == f);
  CHECK(mul(x(2, 1) + x(2, 2), x(2, 1) - x(2, 2)) == mul(x(2, 1), x(2, 1)) - mul(x(2, 2), x(2, 2)));
  CHECK_THROWS_AS(mul(x(2, 1), x(3, 1)), std::invalid_argument);
}

TEST_CASE("graded-lex order and monomial enumeration") {
  const auto ms = monomials_up_to(2, 2);
  REQUIRE(ms.size() == 6);
  CHECK(ms[0].degree() == 0);
  CHECK(ms[1] == Monomial(2, std::vector<int>{0, 1}));
  CHECK(ms[2] == Monomial(2, std::vector<int>{1, 0}));
  CHECK(ms[5] == Monomial(2, std::vector<int>{2, 0}));
}

TEST_CASE("slotwise tensor product") {
  const Monomial one(2), x1 = Monomial::variable(2, 0), x2 = Monomial::variable(2, 1);
  const Monomial a[] = {x1, one}, b[] = {one, x2}, ab[] = {x1, x2};
  CHECK(tensor_mul(TensorPoly::pure(a), TensorPoly::pure(b)) == TensorPoly::pure(ab));
  const TensorPoly t = coproduct(x(2, 1) * Rational(5) + x(2, 2));
  CHECK(tensor_mul(t, TensorPoly::unit(2, 2)) == t);

  // Δ(x¹)·Δ(x²) = x¹x²⊗1 + x¹⊗x² + x²⊗x¹ + 1⊗x¹x², expanded by hand.
  const Monomial x12 = x1 * x2;
  TensorPoly want(2, 2);
  want.add_term({x12, one}, 1);
  want.add_term({x1, x2}, 1);
  want.add_term({x2, x1}, 1);
  want.add_term({one, x12}, 1);
  CHECK(tensor_mul(coproduct(x(2, 1)), coproduct(x(2, 2))) == want);
  CHECK_THROWS_AS(tensor_mul(TensorPoly::unit(2, 2), TensorPoly::unit(3, 2)), std::invalid_argument);
}

TEST_CASE("coproduct examples") {
  const Monomial one(1), x1(1, std::vector<int>{1}), x1sq(1, std::vector<int>{2});
  TensorPoly prim(2, 1);
  prim.add_term({x1, one}, 1);
  prim.add_term({one, x1}, 1);
  CHECK(coproduct(Poly::monomial(x1)) == prim);
  CHECK(coproduct(Poly::constant(1, 1)) == TensorPoly::unit(2, 1));
  TensorPoly sq(2, 1);
  sq.add_term({x1sq, one}, 1);
  sq.add_term({x1, x1}, 2);
  sq.add_term({one, x1sq}, 1);
  CHECK(coproduct(Poly::monomial(x1sq)) == sq);
}

TEST_CASE("coproduct is translation: Δf(u,v) = f(u+v)") {
  std::mt19937_64 rng(11);
  for (int dim = 1; dim <= 3; ++dim)
    for (int trial = 0; trial < 10; ++trial) {
      const Poly f = random_poly(dim, 5, rng);
      const auto u = random_point(dim, rng), v = random_point(dim, rng);
      std::vector<Rational> w(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] + v[i];
      CHECK(eval(coproduct(f), {u, v}) == eval(f, w));
      const auto z = random_point(dim, rng);
      std::vector<Rational> w3(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) w3[i] = u[i] + v[i] + z[i];
      CHECK(eval(iterated_coproduct(f, 3), {u, v, z}) == eval(f, w3));
    }
}

TEST_CASE("iterated coproduct conventions") {
  const Poly f = x(2, 1) * x(2, 2) + Poly::constant(2, 3);
  CHECK(iterated_coproduct(f, 1) == TensorPoly::from_poly(f));
  CHECK(iterated_coproduct(f, 2) == coproduct(f));
  CHECK_THROWS_AS(iterated_coproduct(f, 0), std::invalid_argument);

  const Monomial one(1), x1(1, std::vector<int>{1});
  TensorPoly want(3, 1);
  want.add_term({x1, one, one}, 1);
  want.add_term({one, x1, one}, 1);
  want.add_term({one, one, x1}, 1);
  CHECK(iterated_coproduct(Poly::monomial(x1), 3) == want);
}

TEST_CASE("coassociativity and bialgebra compatibility on random inputs") {
  std::mt19937_64 rng(5);
  for (int dim = 1; dim <= 3; ++dim)
    for (int trial = 0; trial < 6; ++trial) {
      const Poly f = random_poly(dim, dim == 3 ? 4 : 6, rng);
      const Poly g = random_poly(dim, 3, rng);
      const TensorPoly df = coproduct(f);
      CHECK(coproduct_at(df, 0) == coproduct_at(df, 1));
      CHECK(coproduct_at(df, 0) == iterated_coproduct(f, 3));
      CHECK(coproduct_at(coproduct_at(df, 1), 0) == iterated_coproduct(f, 4));
      CHECK(coproduct_at(coproduct_at(df, 0), 2) == iterated_coproduct(f, 4));
      CHECK(coproduct(mul(f, g)) == tensor_mul(coproduct(f), coproduct(g)));
      const Poly h = random_poly(dim, 2, rng);
      CHECK(mul(mul(f, g), h) == mul(f, mul(g, h)));
      CHECK(mul(f, g) == mul(g, f));
    }
}

TEST_CASE("partial derivatives") {
  const Poly x1sq = mul(x(2, 1), x(2, 1));
  CHECK(partial(x1sq, 0) == x(2, 1) * Rational(2));
  CHECK(partial(x(2, 1), 1).is_zero());
  CHECK(partial(partial(mul(x(2, 1), x(2, 2)), 0), 1) == Poly::constant(2, 1));
  CHECK_THROWS_AS(partial(x1sq, 2), std::out_of_range);

  Monomial out;
  const Monomial e(2, std::vector<int>{3, 1}), D(2, std::vector<int>{2, 1});
  CHECK(partial_monomial(e, D, out) == 6);
  CHECK(out == Monomial(2, std::vector<int>{1, 0}));
  CHECK(partial_monomial(D, e, out) == 0);
}

TEST_CASE("text round trip") {
  std::mt19937_64 rng(3);
  const Poly f = random_poly(3, 3, rng) * Rational(1, 3);
  CHECK(parse_poly(to_text(f)) == f);
  const TensorPoly t = iterated_coproduct(f, 3);
  CHECK(parse_tensor_poly(to_text(t)) == t);
  CHECK(to_text(Poly::constant(2, Rational(-3, 2))) == "-3/2 : 0 0\n");
  CHECK(parse_tensor_poly("", 2, 2).is_zero());
  CHECK_THROWS_AS(parse_poly("1/2 : 1 x\n"), IoError);
  CHECK_THROWS_AS(parse_poly("1/0 : 1 0\n"), IoError);
  CHECK_THROWS_AS(parse_tensor_poly("1/2 : 1 0 | 1\n"), IoError);
  CHECK_THROWS_AS(parse_poly(""), IoError);
}

TEST_CASE("expression parser") {
  const Poly p = parse_poly_expr("3/2*x1^2*x2 - x2 + 1", 2);
  Poly want(2);
  want.add_term(Monomial(2, std::vector<int>{2, 1}), Rational(3, 2));
  want.add_term(Monomial(2, std::vector<int>{0, 1}), -1);
  want.add_term(Monomial(2), 1);
  CHECK(p == want);
  CHECK(parse_poly_expr(to_expr(p), 2) == p);
  CHECK(parse_poly_expr("x1*x1", 2) == mul(x(2, 1), x(2, 1)));
  CHECK_THROWS_AS(parse_poly_expr("x3", 2), IoError);
  CHECK_THROWS_AS(parse_poly_expr("x1 x2", 2), IoError);
  CHECK_THROWS_AS(parse_poly_expr("", 2), IoError);
}
