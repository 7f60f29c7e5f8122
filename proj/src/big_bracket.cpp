#include "biquant/big_bracket.hpp"

#include "biquant/errors.hpp"

#include <bit>
#include <stdexcept>

namespace biquant {

// ---------------------------------------------------------------- G1Element

G1Element::G1Element(const StructTensor& t) : dim_(t.dim()) { add(t); }

StructTensor G1Element::component(int m, int n) const {
  auto it = comps_.find({m, n});
  return it == comps_.end() ? StructTensor(m, n, dim_) : it->second;
}

void G1Element::add(const StructTensor& t) {
  if (dim_ == 0) dim_ = t.dim();
  if (t.dim() != dim_) throw std::invalid_argument("G1Element: dimension mismatch");
  auto [it, inserted] = comps_.try_emplace({t.a(), t.b()}, t);
  if (!inserted) it->second += t;
  if (it->second.is_zero()) comps_.erase(it);
}

bool G1Element::is_zero() const {
  for (const auto& [k, t] : comps_)
    if (!t.is_zero()) return false;
  return true;
}

G1Element& G1Element::operator+=(const G1Element& o) {
  for (const auto& [k, t] : o.comps_) add(t);
  return *this;
}

G1Element& G1Element::operator*=(const Rational& c) {
  if (c == 0) comps_.clear();
  for (auto& [k, t] : comps_) t *= c;
  return *this;
}

bool operator==(const G1Element& a, const G1Element& b) {
  G1Element diff = a + b * Rational(-1);
  return diff.is_zero();
}

// ---------------------------------------------------------------- Grassmann algebra

namespace {

using Mask = std::uint32_t;
using Grassmann = std::map<Mask, Rational>;

// Sign of m1·m2 relative to the increasing-generator order of m1|m2.
int product_sign(Mask a, Mask b) {
  int swaps = 0;
  for (Mask bb = b; bb; bb &= bb - 1) {
    const int g = std::countr_zero(bb);
    swaps += std::popcount(a >> (g + 1));  // generators of a that must pass g
  }
  return swaps % 2 ? -1 : 1;
}

void add_to(Grassmann& x, Mask m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = x.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) x.erase(it);
  }
}

Grassmann mul(const Grassmann& x, const Grassmann& y) {
  Grassmann r;
  for (const auto& [a, ca] : x)
    for (const auto& [b, cb] : y)
      if (!(a & b)) add_to(r, a | b, ca * cb * product_sign(a, b));
  return r;
}

Grassmann left_derivative(const Grassmann& x, int g) {
  Grassmann r;
  const Mask bit = Mask{1} << g;
  for (const auto& [m, c] : x)
    if (m & bit) add_to(r, m & ~bit, std::popcount(m & (bit - 1)) % 2 ? -c : c);
  return r;
}

Grassmann right_derivative(const Grassmann& x, int g) {
  Grassmann r;
  const Mask bit = Mask{1} << g;
  for (const auto& [m, c] : x)
    if (m & bit) add_to(r, m & ~bit, std::popcount(m >> (g + 1)) % 2 ? -c : c);
  return r;
}

// θ^i is generator i, ξ_j is generator dim + j.
Grassmann to_grassmann(const G1Element& x) {
  Grassmann r;
  const int d = x.dim();
  for (const auto& [shape, t] : x.components())
    for (const auto& e : t.generators()) {
      Mask m = 0;
      for (int i : e.ins) m |= Mask{1} << i;
      for (int j : e.outs) m |= Mask{1} << (d + j);
      add_to(r, m, e.value);
    }
  return r;
}

G1Element from_grassmann(const Grassmann& x, int d) {
  G1Element r(d);
  for (const auto& [m, c] : x) {
    std::vector<int> ins, outs;
    for (int i = 0; i < d; ++i)
      if (m & (Mask{1} << i)) ins.push_back(i);
    for (int j = 0; j < d; ++j)
      if (m & (Mask{1} << (d + j))) outs.push_back(j);
    StructTensor t(static_cast<int>(ins.size()), static_cast<int>(outs.size()), d);
    t.set_antisym(ins, outs, c);
    r.add(t);
  }
  return r;
}

// Overall factor fixed by {α,α} = 2·Jacobiator.
const Rational kBracketScale = 1;

}  // namespace

G1Element bracket(const G1Element& x, const G1Element& y) {
  const int d = x.dim() ? x.dim() : y.dim();
  if (x.dim() && y.dim() && x.dim() != y.dim()) throw std::invalid_argument("bracket: dimension mismatch");
  if (d == 0) return G1Element();
  if (2 * d > 31) throw std::invalid_argument("bracket: dimension too large");
  const Grassmann P = to_grassmann(x), Q = to_grassmann(y);
  Grassmann r;
  for (int i = 0; i < d; ++i) {
    for (const auto& [m, c] : mul(right_derivative(P, i), left_derivative(Q, d + i))) add_to(r, m, c);
    for (const auto& [m, c] : mul(right_derivative(P, d + i), left_derivative(Q, i))) add_to(r, m, c);
  }
  G1Element out = from_grassmann(r, d);
  return out * kBracketScale;
}

// ---------------------------------------------------------------- classical axioms

StructTensor jacobiator(const StructTensor& c) {
  if (c.a() != 2 || c.b() != 1) throw std::invalid_argument("jacobiator needs a (2,1) tensor");
  const int d = c.dim();
  StructTensor J(3, 1, d);
  auto C = [&](int a, int b, int k) {
    const int ins[] = {a, b}, out[] = {k};
    return c.at(ins, out);
  };
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      for (int e = b + 1; e < d; ++e)
        for (int l = 0; l < d; ++l) {
          Rational v = 0;
          for (int k = 0; k < d; ++k) v += C(a, b, k) * C(k, e, l) + C(b, e, k) * C(k, a, l) + C(e, a, k) * C(k, b, l);
          const int ins[] = {a, b, e}, out[] = {l};
          J.set_antisym(ins, out, v);
        }
  return J;
}

StructTensor cojacobiator(const StructTensor& delta) {
  if (delta.a() != 1 || delta.b() != 2) throw std::invalid_argument("cojacobiator needs a (1,2) tensor");
  const int d = delta.dim();
  StructTensor J(1, 3, d);
  auto D = [&](int i, int j, int k) {
    const int in[] = {i}, outs[] = {j, k};
    return delta.at(in, outs);
  };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k)
        for (int l = k + 1; l < d; ++l) {
          Rational v = 0;
          for (int m = 0; m < d; ++m) v += D(i, l, m) * D(m, j, k) + D(i, j, m) * D(m, k, l) + D(i, k, m) * D(m, l, j);
          const int in[] = {i}, outs[] = {j, k, l};
          J.set_antisym(in, outs, v);
        }
  return J;
}

StructTensor cocycle_defect(const StructTensor& c, const StructTensor& delta) {
  if (c.a() != 2 || c.b() != 1 || delta.a() != 1 || delta.b() != 2 || c.dim() != delta.dim())
    throw std::invalid_argument("cocycle_defect needs (2,1) and (1,2) tensors of equal dimension");
  const int d = c.dim();
  auto C = [&](int a, int b, int k) {
    const int ins[] = {a, b}, out[] = {k};
    return c.at(ins, out);
  };
  auto D = [&](int i, int j, int k) {
    const int in[] = {i}, outs[] = {j, k};
    return delta.at(in, outs);
  };
  // δ([e_a,e_b]) − ad_{e_a} δ(e_b) + ad_{e_b} δ(e_a), coefficient of e_j ⊗ e_l.
  StructTensor T(2, 2, d);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      for (int j = 0; j < d; ++j)
        for (int l = j + 1; l < d; ++l) {
          Rational v = 0;
          for (int k = 0; k < d; ++k) {
            v += C(a, b, k) * D(k, j, l);
            v -= D(b, k, l) * C(a, k, j) + D(b, j, k) * C(a, k, l);
            v += D(a, k, l) * C(b, k, j) + D(a, j, k) * C(b, k, l);
          }
          const int ins[] = {a, b}, outs[] = {j, l};
          T.set_antisym(ins, outs, v);
        }
  return T;
}

namespace {

AxiomResidual residual(std::string name, const StructTensor& from_bracket, const StructTensor& classical) {
  AxiomResidual r;
  r.name = std::move(name);
  r.bracket_entries = from_bracket.generators();
  r.classical_entries = classical.generators();
  r.bracket_zero = r.bracket_entries.empty();
  r.classical_zero = r.classical_entries.empty();
  return r;
}

}  // namespace

bool BialgebraReport::passes() const {
  for (const auto* r : {&jacobi, &cojacobi, &cocycle})
    if (!r->bracket_zero || !r->classical_zero) return false;
  return true;
}

bool BialgebraReport::consistent() const {
  for (const auto* r : {&jacobi, &cojacobi, &cocycle})
    if (r->bracket_zero != r->classical_zero) return false;
  return true;
}

BialgebraReport is_lie_bialgebra(const StructTensor& alpha, const StructTensor& beta) {
  if (alpha.a() != 2 || alpha.b() != 1 || beta.a() != 1 || beta.b() != 2 || alpha.dim() != beta.dim())
    throw ValidationError("bialgebra check needs α of shape (2,1) and β of shape (1,2) in the same dimension");
  if (!alpha.is_antisymmetric() || !beta.is_antisymmetric()) throw ValidationError("structure tensors must be antisymmetric");
  const G1Element a(alpha), b(beta);
  BialgebraReport rep;
  rep.jacobi = residual("jacobi", bracket(a, a).component(3, 1), jacobiator(alpha));
  rep.cojacobi = residual("cojacobi", bracket(b, b).component(1, 3), cojacobiator(beta));
  rep.cocycle = residual("cocycle", bracket(a, b).component(2, 2), cocycle_defect(alpha, beta));
  return rep;
}

}  // namespace biquant
