#include "biquant/gs_complex.hpp"

#include "biquant/errors.hpp"
#include "biquant/graph.hpp"
#include "biquant/graph_ops.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace biquant {

namespace {

int alt(int k) { return k % 2 == 0 ? 1 : -1; }

// All β <= D with binomial weight ∏ C(D_i, β_i).
template <class F>
void for_each_split(const Monomial& D, F&& f) {
  Monomial beta(D.dim());
  auto rec = [&](auto& self, int var, mpz_class w) -> void {
    if (var == D.dim()) {
      Monomial rest(D.dim());
      for (int i = 0; i < D.dim(); ++i) rest.set(i, D[i] - beta[i]);
      f(beta, rest, Rational(w));
      return;
    }
    for (int k = 0; k <= D[var]; ++k) {
      beta.set(var, k);
      mpz_class c;
      mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(D[var]), static_cast<unsigned long>(k));
      self(self, var + 1, w * c);
    }
    beta.set(var, 0);
  };
  rec(rec, 0, mpz_class(1));
}

Cochain::Bounds d_bounds(const Cochain& psi) { return psi.bounds(); }

}  // namespace

int gs_twist(int m) { return alt(m); }

Cochain d_gs1(const Cochain& psi, GsSigns signs) {
  if (!psi.is_symbolic()) return d_gs1_literal(psi, signs);
  const int m = psi.m(), n = psi.n(), dim = psi.dim();
  SymbolicForm out;
  const Monomial one(dim);
  for (const auto& [k, c] : psi.terms()) {
    {
      SymKey t{{one}, k.uppers};
      t.derivs.insert(t.derivs.end(), k.derivs.begin(), k.derivs.end());
      add_term(out, std::move(t), c * signs.d1_first);
    }
    for (int i = 0; i < m; ++i) {
      // Slot i of Ψ receives a_i a_{i+1}; Leibniz splits ∂^{D_i} over the two new slots.
      for_each_split(k.derivs[static_cast<std::size_t>(i)], [&](const Monomial& b, const Monomial& r, const Rational& w) {
        SymKey t{{}, k.uppers};
        for (int j = 0; j < m; ++j) {
          if (j == i) {
            t.derivs.push_back(b);
            t.derivs.push_back(r);
          } else {
            t.derivs.push_back(k.derivs[static_cast<std::size_t>(j)]);
          }
        }
        add_term(out, std::move(t), c * w * alt(i + 1));
      });
    }
    {
      SymKey t{k.derivs, k.uppers};
      t.derivs.push_back(one);
      add_term(out, std::move(t), c * (signs.d1_last * alt(m + 1)));
    }
  }
  return Cochain::symbolic(m + 1, n, dim, std::move(out));
}

Cochain d_gs2(const Cochain& psi, GsSigns signs) {
  if (!psi.is_symbolic()) return d_gs2_literal(psi, signs);
  const int m = psi.m(), n = psi.n(), dim = psi.dim();
  SymbolicForm out;
  const Monomial one(dim);
  for (const auto& [k, c] : psi.terms()) {
    {
      SymKey t{k.derivs, {one}};
      t.uppers.insert(t.uppers.end(), k.uppers.begin(), k.uppers.end());
      add_term(out, std::move(t), c * signs.d2_first);
    }
    for (int i = 1; i <= n; ++i) {
      for (const auto& [split, w] : iterated_coproduct_monomial(k.uppers[static_cast<std::size_t>(i - 1)], 2)) {
        SymKey t{k.derivs, {}};
        for (int j = 1; j <= n; ++j) {
          if (j == i) {
            t.uppers.push_back(split[0]);
            t.uppers.push_back(split[1]);
          } else {
            t.uppers.push_back(k.uppers[static_cast<std::size_t>(j - 1)]);
          }
        }
        add_term(out, std::move(t), c * w * alt(i));
      }
    }
    {
      SymKey t{k.derivs, k.uppers};
      t.uppers.push_back(one);
      add_term(out, std::move(t), c * (signs.d2_last * alt(n + 1)));
    }
  }
  return Cochain::symbolic(m, n + 1, dim, std::move(out));
}

Cochain d_gs1_literal(const Cochain& psi, GsSigns signs) {
  const int m = psi.m(), n = psi.n(), dim = psi.dim();
  return Cochain::extensional(m + 1, n, dim, d_bounds(psi), [psi, signs, m, n, dim](std::span<const Monomial> a) {
    TensorPoly out(n, dim);
    const Poly a0 = Poly::monomial(a[0]);
    const Poly am = Poly::monomial(a[static_cast<std::size_t>(m)]);
    out.add_scaled(tensor_mul(iterated_coproduct(a0, n), psi.apply(a.subspan(1))), signs.d1_first);
    for (int i = 0; i < m; ++i) {
      std::vector<Monomial> merged;
      for (int j = 0; j <= m; ++j) {
        if (j == i + 1) continue;
        merged.push_back(j == i ? a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i + 1)] : a[static_cast<std::size_t>(j)]);
      }
      out.add_scaled(psi.apply(std::span<const Monomial>(merged)), alt(i + 1));
    }
    out.add_scaled(tensor_mul(psi.apply(a.first(static_cast<std::size_t>(m))), iterated_coproduct(am, n)),
                   signs.d1_last * alt(m + 1));
    return out;
  });
}

Cochain d_gs2_literal(const Cochain& psi, GsSigns signs) {
  const int m = psi.m(), n = psi.n(), dim = psi.dim();
  return Cochain::extensional(m, n + 1, dim, d_bounds(psi), [psi, signs, m, n, dim](std::span<const Monomial> a) {
    TensorPoly out(n + 1, dim);
    // Σ over Sweedler components of every a_i: split[i] = (a'_i, a''_i).
    std::vector<const std::vector<std::pair<TensorPoly::Key, Rational>>*> splits;
    for (const auto& ai : a) splits.push_back(&iterated_coproduct_monomial(ai, 2));
    std::vector<Monomial> firsts(static_cast<std::size_t>(m)), seconds(static_cast<std::size_t>(m));
    auto rec = [&](auto& self, int i, const Rational& w) -> void {
      if (i == m) {
        Monomial p1(dim), p2(dim);
        for (int j = 0; j < m; ++j) {
          p1 = p1 * firsts[static_cast<std::size_t>(j)];
          p2 = p2 * seconds[static_cast<std::size_t>(j)];
        }
        const TensorPoly left = TensorPoly::pure(std::span<const Monomial>(&p1, 1));
        const TensorPoly right = TensorPoly::pure(std::span<const Monomial>(&p2, 1));
        out.add_scaled(outer(left, psi.apply(std::span<const Monomial>(seconds))), w * signs.d2_first);
        out.add_scaled(outer(psi.apply(std::span<const Monomial>(firsts)), right), w * (signs.d2_last * alt(n + 1)));
        return;
      }
      for (const auto& [k, c] : *splits[static_cast<std::size_t>(i)]) {
        firsts[static_cast<std::size_t>(i)] = k[0];
        seconds[static_cast<std::size_t>(i)] = k[1];
        self(self, i + 1, w * c);
      }
    };
    rec(rec, 0, Rational(1));
    const TensorPoly value = psi.apply(a);
    for (int i = 1; i <= n; ++i) out.add_scaled(coproduct_at(value, i - 1), alt(i));
    return out;
  });
}

std::pair<Cochain, Cochain> d_gs(const Cochain& psi, GsSigns signs) {
  return {d_gs1(psi, signs), d_gs2(psi, signs) * Rational(gs_twist(psi.m()))};
}

GsChain d_gs(const GsChain& x, GsSigns signs) {
  GsChain out;
  auto add = [&](std::pair<int, int> key, const Cochain& c) {
    auto it = out.find(key);
    if (it == out.end()) out.emplace(key, c);
    else it->second += c;
  };
  for (const auto& [mn, psi] : x) {
    auto [a, b] = d_gs(psi, signs);
    add({mn.first + 1, mn.second}, a);
    add({mn.first, mn.second + 1}, b);
  }
  return out;
}

bool is_zero(const GsChain& x) {
  return std::all_of(x.begin(), x.end(), [](const auto& kv) { return kv.second.terms().empty(); });
}

Cochain fraction(std::span<const Cochain> psis, std::span<const Cochain> thetas) {
  const int l2 = static_cast<int>(psis.size());
  const int l1 = static_cast<int>(thetas.size());
  if (l1 < 1 || l2 < 1) throw ValidationError("fraction needs at least one numerator and one denominator");
  const int dim = psis.front().dim();
  int m = 0, n = 0;
  Cochain::Bounds bd{0, 0};
  int max_psi_order = 0, max_theta_order = 0;
  for (const auto& p : psis) {
    if (p.m() != l1) throw ValidationError("fraction: every numerator must take ℓ1 = " + std::to_string(l1) + " inputs");
    if (p.dim() != dim) throw ValidationError("fraction: dimension mismatch");
    n += p.n();
    max_psi_order = std::max(max_psi_order, p.bounds().order);
    bd.coeff_degree += p.bounds().coeff_degree;
  }
  for (const auto& t : thetas) {
    if (t.n() != l2) throw ValidationError("fraction: every denominator must produce ℓ2 = " + std::to_string(l2) + " outputs");
    if (t.dim() != dim) throw ValidationError("fraction: dimension mismatch");
    m += t.m();
    max_theta_order = std::max(max_theta_order, t.bounds().order);
    bd.coeff_degree += t.bounds().coeff_degree;
  }
  bd.order = max_psi_order + max_theta_order;
  std::vector<Cochain> P(psis.begin(), psis.end()), T(thetas.begin(), thetas.end());
  return Cochain::extensional(m, n, dim, bd, [P, T, l1, l2, n, dim](std::span<const Monomial> v) {
    TensorPoly F;
    std::size_t pos = 0;
    for (int j = 0; j < l1; ++j) {
      const auto& th = T[static_cast<std::size_t>(j)];
      TensorPoly part = th.apply(v.subspan(pos, static_cast<std::size_t>(th.m())));
      pos += static_cast<std::size_t>(th.m());
      F = j == 0 ? std::move(part) : outer(F, part);
    }
    TensorPoly out(n, dim);
    std::vector<Monomial> args(static_cast<std::size_t>(l1));
    for (const auto& [key, c] : F.terms()) {
      TensorPoly g;
      for (int i = 0; i < l2; ++i) {
        for (int j = 0; j < l1; ++j) args[static_cast<std::size_t>(j)] = key[static_cast<std::size_t>(j * l2 + i)];
        TensorPoly part = P[static_cast<std::size_t>(i)].apply(std::span<const Monomial>(args));
        g = i == 0 ? std::move(part) : outer(g, part);
        if (g.is_zero()) break;
      }
      out.add_scaled(g, c);
    }
    return out;
  });
}

Cochain fraction_codim1(const Cochain& psi, const Cochain& theta, int psi_pos, int theta_pos) {
  const int l1 = psi.m();    // m1 + 1
  const int l2 = theta.n();  // n1 + 1
  if (psi_pos < 0 || psi_pos >= l2 || theta_pos < 0 || theta_pos >= l1)
    throw ValidationError("fraction_codim1: position out of range");
  std::vector<Cochain> psis(static_cast<std::size_t>(l2), Cochain::iterated_product(l1, psi.dim()));
  std::vector<Cochain> thetas(static_cast<std::size_t>(l1), Cochain::iterated_coproduct(l2, psi.dim()));
  psis[static_cast<std::size_t>(psi_pos)] = psi;
  thetas[static_cast<std::size_t>(theta_pos)] = theta;
  return fraction(psis, thetas);
}

Cochain strata_bracket(const Cochain& psi, const Cochain& theta) {
  if (psi.m() != 2 || psi.n() != 1 || theta.m() != 1 || theta.n() != 2)
    throw ValidationError("strata_bracket needs Ψ of arity (2,1) and Θ of arity (1,2)");
  Cochain out = fraction(std::span(&theta, 1), std::span(&psi, 1));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out -= fraction_codim1(psi, theta, i, j);
  return psi.is_symbolic() && theta.is_symbolic() ? symbolize(out) : out;
}

int fraction_degree_defect(int m1, int n1, int m0, int n0) {
  auto deg = [](int m, int n) { return m + n - 2; };
  // Numerators: Ψ ∈ (m1+1, n0) and n1 products (m1+1, 1); denominators: Θ ∈ (m0, n1+1) and m1 coproducts (1, n1+1).
  int sum = deg(m1 + 1, n0) + n1 * deg(m1 + 1, 1) + deg(m0, n1 + 1) + m1 * deg(1, n1 + 1);
  const int a = sum - m1 - n1;
  const int b = m0 + m1 + n0 + n1 - 2;
  return a - b;
}

Cochain hkr(const StructTensor& gamma) {
  const StructTensor gs[] = {gamma};
  return compile(corolla(gamma.a(), gamma.b()), gs, gamma.dim());
}

SpanReport solve_in_span(const GsChain& target, const std::vector<GsChain>& generators) {
  using Coord = std::pair<std::pair<int, int>, SymKey>;
  std::map<Coord, int> index;
  auto vec_of = [&](const GsChain& x) {
    std::map<int, Rational> v;
    for (const auto& [mn, c] : x)
      for (const auto& [k, q] : c.terms()) {
        auto [it, inserted] = index.try_emplace(Coord{mn, k}, static_cast<int>(index.size()));
        v[it->second] += q;
      }
    std::erase_if(v, [](const auto& kv) { return kv.second == 0; });
    return v;
  };
  const std::size_t G = generators.size();
  struct Row {
    std::map<int, Rational> v;
    std::vector<Rational> combo;  // expresses v in terms of the generators
  };
  std::vector<Row> basis;  // pivot = first key of v
  auto reduce = [&](Row& r) {
    for (const auto& b : basis) {
      const int piv = b.v.begin()->first;
      auto it = r.v.find(piv);
      if (it == r.v.end()) continue;
      const Rational f = it->second / b.v.begin()->second;
      for (const auto& [k, q] : b.v) {
        auto& slot = r.v[k];
        slot -= f * q;
        if (slot == 0) r.v.erase(k);
      }
      for (std::size_t g = 0; g < G; ++g) r.combo[g] -= f * b.combo[g];
    }
  };
  for (std::size_t g = 0; g < G; ++g) {
    Row r{vec_of(generators[g]), std::vector<Rational>(G, Rational(0))};
    r.combo[g] = 1;
    reduce(r);
    if (r.v.empty()) continue;
    // Keep basis in pivot order so that earlier pivots never reappear.
    const int piv = r.v.begin()->first;
    for (auto& b : basis) {
      auto it = b.v.find(piv);
      if (it == b.v.end()) continue;
      const Rational f = it->second / r.v.begin()->second;
      for (const auto& [k, q] : r.v) {
        auto& slot = b.v[k];
        slot -= f * q;
        if (slot == 0) b.v.erase(k);
      }
      for (std::size_t h = 0; h < G; ++h) b.combo[h] -= f * r.combo[h];
    }
    basis.push_back(std::move(r));
  }
  Row t{vec_of(target), std::vector<Rational>(G, Rational(0))};
  reduce(t);
  SpanReport rep;
  rep.rank = static_cast<int>(basis.size());
  rep.residual_terms = static_cast<int>(t.v.size());
  rep.in_span = t.v.empty();
  if (rep.in_span) {
    rep.coefficients.resize(G);
    for (std::size_t g = 0; g < G; ++g) rep.coefficients[g] = -t.combo[g];
  }
  return rep;
}

std::vector<Cochain> symbolic_basis(int m, int n, int dim, int max_order, int shift) {
  std::vector<Cochain> out;
  std::vector<Monomial> small;
  for (const auto& mono : monomials_up_to(dim, max_order)) small.push_back(mono);
  std::vector<Monomial> derivs(static_cast<std::size_t>(m), Monomial(dim));
  auto rec_d = [&](auto& self, int i, int total) -> void {
    if (i == m) {
      const int deg = total + shift;
      if (deg < 0) return;
      const auto pool = monomials_up_to(dim, deg);
      std::vector<Monomial> uppers(static_cast<std::size_t>(n), Monomial(dim));
      auto rec_m = [&](auto& me, int j, int left) -> void {
        if (j == n) {
          if (left != 0) return;
          SymbolicForm f;
          add_term(f, SymKey{derivs, uppers}, 1);
          out.push_back(Cochain::symbolic(m, n, dim, std::move(f)));
          return;
        }
        for (const auto& mono : pool) {
          if (mono.degree() > left) continue;
          uppers[static_cast<std::size_t>(j)] = mono;
          me(me, j + 1, left - mono.degree());
        }
      };
      rec_m(rec_m, 0, deg);
      return;
    }
    for (const auto& mono : small) {
      derivs[static_cast<std::size_t>(i)] = mono;
      self(self, i + 1, total + mono.degree());
    }
  };
  rec_d(rec_d, 0, 0);
  return out;
}

}  // namespace biquant
