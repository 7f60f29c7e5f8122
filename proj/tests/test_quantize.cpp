#include "biquant/big_bracket.hpp"
#include "biquant/errors.hpp"
#include "biquant/quantize.hpp"
#include "biquant/weight_table.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace biquant;

namespace {

const Cochain& only_term(const StarSeries& s, Order o) {
  const auto& t = s.at(o);
  REQUIRE(t.size() == 1);
  return t.begin()->second;
}

}  // namespace

TEST_CASE("order zero terms are the product and the coproduct") {
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  const auto S = build_star(a, b, {1, 1}), C = build_costar(a, b, {1, 1});
  REQUIRE(S.at({0, 0}).count(""));
  CHECK(cochain_eq(S.at({0, 0}).at(""), Cochain::product(2)));
  CHECK(cochain_eq(C.at({0, 0}).at(""), Cochain::coproduct(2)));
  CHECK(S.at({3, 0}).empty());
}

TEST_CASE("first-order terms reproduce the classical bracket and cobracket") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 3; ++rep) {
    const auto a = random_struct_tensor(2, 1, 3, rng), b = random_struct_tensor(1, 2, 3, rng);
    const auto S = build_star(a, b, {1, 0}), C = build_costar(a, b, {0, 1});
    // The corolla weights are 1/2 (checked by sampling elsewhere); with them the series is classical.
    CHECK(cochain_eq(only_term(S, {1, 0}) * Rational(1, 2), oracle::poisson(a), 3));
    CHECK(cochain_eq(only_term(C, {0, 1}) * Rational(1, 2), oracle::cobracket(b), 3));
    CHECK(S.at({0, 1}).empty());  // a product has no cobracket-only graph at first order
    CHECK(C.at({1, 0}).empty());
  }
}

TEST_CASE("abelian data gives the undeformed bialgebra") {
  const StructTensor a(2, 1, 2), b(1, 2, 2);
  const auto S = build_star(a, b, {2, 0}), C = build_costar(a, b, {0, 2});
  for (const auto& [o, t] : S.terms) CHECK((o == Order{0, 0} || t.empty()));
  for (const auto& [o, t] : C.terms) CHECK((o == Order{0, 0} || t.empty()));
  CHECK(S.weight_keys().empty());
}

TEST_CASE("series validation") {
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  CHECK_THROWS_AS(build_star(b, a, {1, 0}), ValidationError);
  CHECK_THROWS_AS(build_star(a, random_struct_tensor(1, 2, 3, *std::make_unique<std::mt19937_64>(1)), {1, 0}),
                  ValidationError);
}

TEST_CASE("first-order axioms hold identically") {
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  const auto S = build_star(a, b, {1, 1}), C = build_costar(a, b, {1, 1});
  for (Axiom ax : {Axiom::Associativity, Axiom::Coassociativity, Axiom::Compatibility})
    for (Order o : {Order{1, 0}, Order{0, 1}}) {
      const Defect d = axiom_defect(ax, S, C, o, 3);
      CAPTURE(to_string(ax));
      CAPTURE(o.first);
      CHECK(d.value.empty());
    }
}

TEST_CASE("order (1,1) compatibility sees the cocycle condition") {
  // [e1,e2] = e2, [e1,e3] = e3. Products of the two first-order weights cancel exactly when
  // δ is a 1-cocycle for the bracket and survive when it is not.
  StructTensor a(2, 1, 3);
  const int i12[] = {0, 1}, i13[] = {0, 2}, o2[] = {1}, o3[] = {2};
  a.set_antisym(i12, o2, 1);
  a.set_antisym(i13, o3, 1);
  auto cobracket = [](int k, int p, int q) {
    StructTensor b(1, 2, 3);
    const int in[] = {k}, out[] = {p, q};
    b.set_antisym(in, out, 1);
    return b;
  };
  auto products = [&](const StructTensor& b) {
    const auto S = build_star(a, b, {1, 1}), C = build_costar(a, b, {1, 1});
    int n = 0;
    for (const auto& [mono, comps] : axiom_defect(Axiom::Compatibility, S, C, {1, 1}, 2).value)
      if (mono.size() == 2) ++n;
    return n;
  };
  const auto good = cobracket(0, 1, 2), bad = cobracket(0, 0, 1);  // δ(e1) = e2∧e3 or e1∧e2
  REQUIRE(is_lie_bialgebra(a, good).passes());
  REQUIRE_FALSE(is_lie_bialgebra(a, bad).cocycle.classical_zero);
  CHECK(products(good) == 0);
  CHECK(products(bad) > 0);
}

TEST_CASE("defect computation does not depend on the worker count") {
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  const auto S = build_star(a, b, {2, 0}), C = build_costar(a, b, {2, 0});
  const Defect d1 = axiom_defect(Axiom::Associativity, S, C, {2, 0}, 2, 1);
  const Defect d3 = axiom_defect(Axiom::Associativity, S, C, {2, 0}, 2, 3);
  CHECK_FALSE(d1.value.empty());
  CHECK(d1.value == d3.value);
}

TEST_CASE("verdicts") {
  const Component c1{0, {Monomial(2)}}, c2{1, {Monomial(2)}};
  Defect d;
  CHECK(evaluate(d, {}).verdict == Verdict::ExactZero);

  d.value[{"a"}][c1] = 1;
  d.value[{"b"}][c1] = -1;
  d.value[{"a", "b"}][c2] = 1;
  d.value[{"a", "a"}][c2] = -1;
  auto r = evaluate(d, {{"a", {1.0, 0.1}}, {"b", {1.05, 0.1}}});
  CHECK(r.verdict == Verdict::ZeroWithin3Sigma);
  CHECK(r.components == 2);
  CHECK(r.residual == doctest::Approx(std::hypot(0.05, 0.05)));
  // d/da = 1 at c1, b - 2a = -0.95 at c2; d/db = -1 at c1, a = 1 at c2.
  CHECK(r.sigma == doctest::Approx(std::sqrt(0.01 * (1 + 1) + 0.01 * (0.95 * 0.95 + 1))));

  r = evaluate(d, {{"a", {1.0, 0.01}}, {"b", {2.0, 0.01}}});
  CHECK(r.verdict == Verdict::Violation);
  CHECK(r.max_z > 3);

  // A weight-free component has no error bar: any non-zero value is a violation.
  Defect e = d;
  e.value[{}][Component{2, {Monomial(2)}}] = Rational(1, 1000);
  r = evaluate(e, {{"a", {1.0, 10.0}}, {"b", {1.0, 10.0}}});
  CHECK(r.verdict == Verdict::Violation);

  CHECK(to_string(Verdict::ZeroWithin3Sigma) == "zero-within-3sigma");
  CHECK(to_string(Axiom::Coassociativity) == "coassoc");
}

TEST_CASE("rescaling a single order") {
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  const auto S = build_star(a, b, {2, 0});
  const auto T = rescaled(S, {2, 0}, 3);
  for (const auto& [k, c] : S.at({2, 0})) CHECK(cochain_eq(T.at({2, 0}).at(k), c * Rational(3)));
  CHECK(cochain_eq(only_term(T, {1, 0}), only_term(S, {1, 0})));

  SeriesOptions opt;
  opt.rescale[{1, 0}] = Rational(1, 2);
  const auto U = build_star(a, b, {1, 0}, opt);
  CHECK(cochain_eq(only_term(U, {1, 0}) * Rational(2), only_term(S, {1, 0})));
}

TEST_CASE("global orientation flips only the two-vertex terms relative to one vertex") {
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  SeriesOptions first, last;
  first.orientation = Orientation::OrbitFirst;
  last.orientation = Orientation::OrbitLast;
  const auto S = build_star(a, b, {2, 0}), F = build_star(a, b, {2, 0}, first), L = build_star(a, b, {2, 0}, last);
  // (-1)^{m+n} = -1 on every order of the product series.
  CHECK(cochain_eq(only_term(F, {1, 0}), only_term(S, {1, 0}) * Rational(-1)));
  CHECK(cochain_eq(only_term(L, {1, 0}), only_term(S, {1, 0}) * Rational(-1)));
  for (const auto& [k, c] : S.at({2, 0})) {
    CHECK(cochain_eq(F.at({2, 0}).at(k), c * Rational(-1)));
    CHECK(cochain_eq(L.at({2, 0}).at(k), c));
  }
}

TEST_CASE("weights are looked up per key") {
  WeightTable t("fam", 1);
  t.add({"k1", 0.5, 0.01, 100, 0.1});
  const auto w = weights_at(t, 0.1, {"k1"});
  CHECK(w.at("k1").value == 0.5);
  CHECK_THROWS_AS(weights_at(t, 0.1, {"k1", "k2"}), ValidationError);
  CHECK_THROWS_AS(weights_at(t, 0.05, {"k1"}), ValidationError);
}

TEST_CASE("weight table text round trip") {
  WeightTable t("eye-v1(test)", 7);
  t.add({"1,2,1;i1>d1,i1>d2,u1>i1;S1:1.2;E1:3", 0.49999871234, 1.25e-4, 200000, 0.1});
  t.add({"1,2,1;i1>d1,i1>d2,u1>i1;S1:1.2;E1:3", 0.5000012, 3.1e-4, 600000, 0.0});
  const std::string text = to_text(t);
  const WeightTable u = parse_weight_table(text);
  CHECK(to_text(u) == text);
  CHECK(u.family() == "eye-v1(test)");
  CHECK(u.seed() == 7);
  CHECK(u.eps_values() == std::vector<double>{0.0, 0.1});

  CHECK_THROWS_AS(parse_weight_table("k 1 2 3 4\n"), IoError);
  CHECK_THROWS_AS(parse_weight_table("# weight-table/1\n# family f\n# seed 1\nk 1 x 3 4\n"), IoError);
  CHECK_THROWS_AS(parse_weight_table("# weight-table/1\n# family f\n# seed 1\nk 1 1 3 0.1\nk 2 1 3 0.1\n"), IoError);

  WeightTable other("another", 7);
  CHECK_THROWS_AS(t.merge(other), ValidationError);
  WeightTable same("eye-v1(test)", 9);
  same.add({"x", 1, 0, 0, 0.1});
  t.merge(same);
  CHECK(t.find("x", 0.1) != nullptr);
}

TEST_CASE("weight cache returns the same numbers") {
  const auto dir = std::filesystem::temp_directory_path() / "biquant-cache-test";
  std::filesystem::remove_all(dir);
  const WeightCache cache(dir);
  const AdmissibleGraph g = corolla(2, 1);
  PropagatorParams prm;
  McOptions mc;
  mc.samples = 20'000;
  const double sched[] = {0.1, 0.05};
  const WeightTable fresh = compute_weight_table(std::span(&g, 1), prm, mc, sched, &cache);
  const WeightTable cached = compute_weight_table(std::span(&g, 1), prm, mc, sched, &cache);
  const WeightTable plain = compute_weight_table(std::span(&g, 1), prm, mc, sched, nullptr);
  CHECK(to_text(fresh) == to_text(cached));
  CHECK(to_text(fresh) == to_text(plain));
  CHECK(fresh.entries().size() == 3);  // two ε values and the extrapolation
  // A schedule that shares one ε reuses that entry.
  const double sched2[] = {0.05, 0.025};
  const WeightTable t2 = compute_weight_table(std::span(&g, 1), prm, mc, sched2, &cache);
  const std::string key = shape_key(g);
  CHECK(t2.find(key, 0.05)->value == fresh.find(key, 0.05)->value);
  std::filesystem::remove_all(dir);
}

TEST_CASE("first-order axioms from sampled weights") {
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  const auto S = build_star(a, b, {1, 1}), C = build_costar(a, b, {1, 1});
  auto graphs = S.weight_graphs();
  for (auto& g : C.weight_graphs()) graphs.push_back(g);
  McOptions mc;
  mc.samples = 20'000;
  const double sched[] = {0.1};
  const auto table = compute_weight_table(graphs, PropagatorParams{}, mc, sched, nullptr);
  auto keys = S.weight_keys();
  for (auto& k : C.weight_keys()) keys.push_back(k);
  const auto w = weights_at(table, 0.1, keys);
  for (Order cap : {Order{1, 0}, Order{0, 1}}) {
    const auto results = check_axioms(S, C, cap, w);
    REQUIRE(results.size() == 3);
    for (const auto& r : results) CHECK(r.verdict == Verdict::ExactZero);
  }
}
