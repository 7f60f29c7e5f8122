#include "biquant/errors.hpp"
#include "biquant/graph.hpp"

#include <doctest.h>
#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <map>
#include <set>

using namespace biquant;

namespace {

mpz_class factorial(std::size_t k) {
  mpz_class f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<unsigned long>(i);
  return f;
}

// Independent count: every subset of external edges and every inner multiplicity vector of
// the right weight, times the number of distinct labelings. Relabeling parallel edges acts
// freely on label data, so each multiset contributes Π|Star|!|End|! / Π μ!.
mpz_class brute_force_count(int m, int n, int s, int budget) {
  if (3 * s + m + n < 3) return 0;
  std::vector<Edge> ext;
  for (int k = 0; k < s; ++k) {
    for (int j = 0; j < m; ++j) ext.push_back({inner(k), lower(j)});
    for (int j = 0; j < n; ++j) ext.push_back({upper(j), inner(k)});
  }
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b)
      if (a != b) pairs.emplace_back(a, b);

  mpz_class total = 0;
  for (unsigned mask = 0; mask < (1u << ext.size()); ++mask) {
    const int next = std::popcount(mask);
    if (next > budget || (budget - next) % 2) continue;
    const int inner_edges = (budget - next) / 2;
    std::vector<int> mu(pairs.size(), 0);
    auto rec = [&](auto& self, std::size_t idx, int left) -> void {
      if (idx == pairs.size()) {
        if (left) return;
        std::vector<std::size_t> out(static_cast<std::size_t>(s), 0), in(static_cast<std::size_t>(s), 0);
        for (std::size_t e = 0; e < ext.size(); ++e)
          if (mask & (1u << e)) {
            if (ext[e].src.kind == VertexKind::Inner) ++out[static_cast<std::size_t>(ext[e].src.index)];
            else ++in[static_cast<std::size_t>(ext[e].dst.index)];
          }
        mpz_class denom = 1;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          out[static_cast<std::size_t>(pairs[p].first)] += static_cast<std::size_t>(mu[p]);
          in[static_cast<std::size_t>(pairs[p].second)] += static_cast<std::size_t>(mu[p]);
          denom *= factorial(static_cast<std::size_t>(mu[p]));
        }
        mpz_class num = 1;
        for (int k = 0; k < s; ++k) num *= factorial(out[static_cast<std::size_t>(k)]) * factorial(in[static_cast<std::size_t>(k)]);
        total += num / denom;
        return;
      }
      for (int c = 0; c <= left; ++c) {
        mu[idx] = c;
        self(self, idx + 1, left - c);
      }
      mu[idx] = 0;
    };
    rec(rec, 0, inner_edges);
  }
  return total;
}

AdmissibleGraph one_vertex(std::vector<Edge> edges, int m, int n) {
  AdmissibleGraph g;
  g.s = 1;
  g.m = m;
  g.n = n;
  g.edges = std::move(edges);
  g.assign_default_labels();
  return g;
}

}  // namespace

TEST_CASE("validate") {
  CHECK(validate(edgeless(2, 1)).ok);
  CHECK(validate(corolla(2, 1)).ok);

  AdmissibleGraph bad = edgeless(1, 1);
  bad.s = 1;
  bad.star.resize(1);
  bad.end.resize(1);
  bad.edges.push_back({lower(0), upper(0)});
  auto r = validate(bad);
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "second-type-edge");

  auto dup = one_vertex({{upper(0), inner(0)}, {upper(0), inner(0)}}, 0, 1);
  r = validate(dup);
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "multiple-external-edge");

  auto backwards = one_vertex({{inner(0), upper(0)}}, 0, 1);
  CHECK(validate(backwards).clause == "orientation");
  auto into_lower = one_vertex({{lower(0), inner(0)}}, 1, 0);
  CHECK(validate(into_lower).clause == "orientation");

  AdmissibleGraph loop;
  loop.s = 1;
  loop.edges = {{inner(0), inner(0)}};
  loop.assign_default_labels();
  CHECK(validate(loop).clause == "loop");

  CHECK(validate(edgeless(1, 1)).clause == "vertex-count");

  auto labels = corolla(2, 1);
  labels.star[0] = {0, 0};
  CHECK(validate(labels).clause == "labels");

  AdmissibleGraph multi;
  multi.s = 2;
  multi.edges = {{inner(0), inner(1)}, {inner(0), inner(1)}};
  multi.assign_default_labels();
  CHECK(validate(multi).ok);
}

TEST_CASE("edge budget") {
  CHECK(edge_budget(2, 1, 1) == 3);
  CHECK(edge_budget(1, 2, 1) == 3);
  CHECK(edge_budget(2, 2, 2) == 7);
}

TEST_CASE("enumerate small cases") {
  const auto g211 = enumerate(2, 1, 1, 3);
  REQUIRE(g211.size() == 2);
  std::set<std::vector<Edge>> shapes;
  for (const auto& g : g211) {
    auto c = canonicalize(g);
    shapes.insert(c.edges);
  }
  CHECK(shapes.size() == 1);
  CHECK(canonical_key(g211[0]) != canonical_key(g211[1]));

  const auto g210 = enumerate(2, 1, 0, 0);
  REQUIRE(g210.size() == 1);
  CHECK(g210[0] == edgeless(2, 1));

  CHECK(enumerate(1, 1, 0, 5).empty());
  CHECK(enumerate(1, 1, 0, 0).empty());
}

TEST_CASE("enumeration agrees with brute force and is valid") {
  for (int s = 0; s <= 3; ++s)
    for (int m = 0; m <= 2; ++m)
      for (int n = 0; n <= 2; ++n)
        for (int budget = 0; budget <= 6; ++budget) {
          if (s == 3 && budget > 5) continue;
          const auto gs = enumerate(m, n, s, budget);
          CAPTURE(s);
          CAPTURE(m);
          CAPTURE(n);
          CAPTURE(budget);
          CHECK(mpz_class(static_cast<unsigned long>(gs.size())) == brute_force_count(m, n, s, budget));
          std::set<std::string> keys;
          std::string prev;
          for (const auto& g : gs) {
            CHECK(validate(g).ok);
            CHECK(g.weighted_edge_count() == budget);
            const auto k = canonical_key(g);
            CHECK(keys.insert(k).second);
            CHECK(prev < k);
            prev = k;
          }
        }
}

TEST_CASE("canonical key is invariant under edge reordering and serialization") {
  for (const auto& g : enumerate(2, 2, 2, 5)) {
    CHECK(canonical_key(g) == canonical_key(g));
    CHECK(canonical_key(parse_graph(to_text(g))) == canonical_key(g));

    // Reverse the edge list and carry the labels along.
    AdmissibleGraph r = g;
    const int E = static_cast<int>(g.edges.size());
    std::reverse(r.edges.begin(), r.edges.end());
    for (auto* lab : {&r.star, &r.end})
      for (auto& l : *lab)
        for (int& e : l) e = E - 1 - e;
    CHECK(canonical_key(r) == canonical_key(g));
  }
}

TEST_CASE("parallel inner edges: swapping parallel labels gives the same key") {
  AdmissibleGraph g;
  g.s = 2;
  g.m = 1;
  g.edges = {{inner(0), inner(1)}, {inner(0), inner(1)}, {inner(1), lower(0)}};
  g.assign_default_labels();
  AdmissibleGraph h = g;
  h.star[0] = {1, 0};
  h.end[1] = {1, 0};
  CHECK(canonical_key(g) == canonical_key(h));
  AdmissibleGraph k = g;
  k.star[0] = {1, 0};
  CHECK(canonical_key(g) != canonical_key(k));
}

TEST_CASE("graph text format") {
  const auto g = parse_graph("# corolla\n1 2 1\ni1 d1\ni1 d2\nu1 i1\nstar i1: e2 e1\n");
  CHECK(g.star[0] == std::vector<int>{1, 0});
  CHECK(g.end[0] == std::vector<int>{2});
  CHECK(parse_graph(to_text(g)) == g);
  const auto many = parse_graphs(to_text(g) + "---\n" + to_text(edgeless(2, 1)));
  CHECK(many.size() == 2);
  CHECK_THROWS_AS(parse_graph("1 2\n"), IoError);
  CHECK_THROWS_AS(parse_graph("1 1 1\ni1 x1\n"), IoError);
  CHECK_THROWS_AS(parse_graph("1 1 1\nd1 u1\n"), ValidationError);
  CHECK_THROWS_AS(parse_graph("0 1 1\n"), ValidationError);
}
