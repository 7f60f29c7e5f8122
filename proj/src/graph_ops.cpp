#include "biquant/graph_ops.hpp"

#include "biquant/errors.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace biquant {

namespace {

bool shapes_match(const AdmissibleGraph& g, std::span<const StructTensor> gammas) {
  for (int k = 0; k < g.s; ++k) {
    const auto& gk = gammas[static_cast<std::size_t>(k)];
    if (gk.a() != static_cast<int>(g.star[static_cast<std::size_t>(k)].size()) ||
        gk.b() != static_cast<int>(g.end[static_cast<std::size_t>(k)].size()))
      return false;
  }
  return true;
}

void check_inputs(const AdmissibleGraph& g, std::span<const StructTensor> gammas, int dim) {
  if (static_cast<int>(gammas.size()) != g.s)
    throw ValidationError("compile: expected " + std::to_string(g.s) + " structure tensors, got " + std::to_string(gammas.size()));
  for (const auto& gk : gammas)
    if (gk.dim() != dim) throw ValidationError("compile: structure tensor dimension differs from d");
  const auto report = validate(g);
  if (!report.ok) throw ValidationError("compile: " + report.clause + ": " + report.detail);
}

}  // namespace

Cochain compile(const AdmissibleGraph& g, std::span<const StructTensor> gammas, int dim) {
  check_inputs(g, gammas, dim);
  if (!shapes_match(g, gammas)) return Cochain::zero(g.m, g.n, dim);

  std::vector<std::vector<StructTensor::Entry>> entries;
  for (const auto& gk : gammas) entries.push_back(gk.nonzero());

  const std::size_t E = g.edges.size();
  std::vector<int> color(E, -1);
  SymbolicForm form;

  auto emit = [&](const Rational& coef) {
    SymKey key{std::vector<Monomial>(static_cast<std::size_t>(g.m), Monomial(dim)),
               std::vector<Monomial>(static_cast<std::size_t>(g.n), Monomial(dim))};
    for (std::size_t e = 0; e < E; ++e) {
      const Edge& ed = g.edges[e];
      const Monomial x = Monomial::variable(dim, color[e]);
      if (ed.dst.kind == VertexKind::Lower) key.derivs[static_cast<std::size_t>(ed.dst.index)] = key.derivs[static_cast<std::size_t>(ed.dst.index)] * x;
      if (ed.src.kind == VertexKind::Upper) key.uppers[static_cast<std::size_t>(ed.src.index)] = key.uppers[static_cast<std::size_t>(ed.src.index)] * x;
    }
    add_term(form, std::move(key), coef);
  };

  auto rec = [&](auto& self, int k, const Rational& coef) -> void {
    if (k == g.s) {
      emit(coef);
      return;
    }
    const auto& star = g.star[static_cast<std::size_t>(k)];
    const auto& end = g.end[static_cast<std::size_t>(k)];
    for (const auto& entry : entries[static_cast<std::size_t>(k)]) {
      bool ok = true;
      std::vector<int> fixed;
      auto assign = [&](int e, int c) {
        auto& slot = color[static_cast<std::size_t>(e)];
        if (slot >= 0 && slot != c) return false;
        if (slot < 0) {
          slot = c;
          fixed.push_back(e);
        }
        return true;
      };
      for (std::size_t p = 0; ok && p < star.size(); ++p) ok = assign(star[p], entry.ins[p]);
      for (std::size_t p = 0; ok && p < end.size(); ++p) ok = assign(end[p], entry.outs[p]);
      if (ok) self(self, k + 1, coef * entry.value);
      for (int e : fixed) color[static_cast<std::size_t>(e)] = -1;
    }
  };
  rec(rec, 0, Rational(1));
  return Cochain::symbolic(g.m, g.n, dim, std::move(form));
}

DegreeAudit degree_audit(const AdmissibleGraph& g, std::span<const StructTensor> gammas) {
  if (static_cast<int>(gammas.size()) != g.s)
    return {false, "expected " + std::to_string(g.s) + " tensors, got " + std::to_string(gammas.size())};
  int total = 0;
  for (int k = 0; k < g.s; ++k) {
    const auto& gk = gammas[static_cast<std::size_t>(k)];
    const int a = static_cast<int>(g.star[static_cast<std::size_t>(k)].size());
    const int b = static_cast<int>(g.end[static_cast<std::size_t>(k)].size());
    if (gk.a() != a || gk.b() != b)
      return {false, "vertex i" + std::to_string(k + 1) + " has (out,in) = (" + std::to_string(a) + "," + std::to_string(b) +
                         ") but its tensor has shape (" + std::to_string(gk.a()) + "," + std::to_string(gk.b()) + ")"};
    total += gk.degree();
  }
  const int want = g.weighted_edge_count() - 2 * g.s;
  if (total != want)
    return {false, "sum of tensor degrees " + std::to_string(total) + " != 2#inner + #external - 2s = " + std::to_string(want)};
  return {};
}

int koszul_sign(std::span<const int> perm, std::span<const int> degrees) {
  // Bubble the sequence back to identity order; each adjacent swap of (x,y)
  // contributes -(-1)^{|x||y|}.
  std::vector<int> p(perm.begin(), perm.end());
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j + 1 < p.size() - i; ++j)
      if (p[j] > p[j + 1]) {
        const int dx = degrees[static_cast<std::size_t>(p[j])], dy = degrees[static_cast<std::size_t>(p[j + 1])];
        if ((dx * dy) % 2 == 0) sign = -sign;
        std::swap(p[j], p[j + 1]);
      }
  return sign;
}

Cochain alternated_compile(const AdmissibleGraph& g, std::span<const StructTensor> gammas, int dim) {
  check_inputs(g, gammas, dim);
  std::vector<int> perm(static_cast<std::size_t>(g.s));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> degrees;
  for (const auto& gk : gammas) degrees.push_back(gk.degree());
  Cochain sum = Cochain::zero(g.m, g.n, dim);
  mpz_class fact = 1;
  for (int k = 2; k <= g.s; ++k) fact *= k;
  do {
    std::vector<StructTensor> permuted;
    for (int i : perm) permuted.push_back(gammas[static_cast<std::size_t>(i)]);
    if (!shapes_match(g, permuted)) continue;
    sum += compile(g, permuted, dim) * Rational(koszul_sign(perm, degrees));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum * Rational(mpz_class(1), fact);
}

}  // namespace biquant
