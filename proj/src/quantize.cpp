#include "biquant/quantize.hpp"

#include "biquant/errors.hpp"
#include "biquant/graph_ops.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace biquant {

const std::map<std::string, Cochain>& StarSeries::at(Order o) const {
  static const std::map<std::string, Cochain> none;
  const auto it = terms.find(o);
  return it == terms.end() ? none : it->second;
}

std::vector<std::string> StarSeries::weight_keys() const {
  std::vector<std::string> keys;
  for (const auto& [o, t] : terms)
    for (const auto& [k, c] : t)
      if (!k.empty()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

std::vector<AdmissibleGraph> StarSeries::weight_graphs() const {
  std::vector<AdmissibleGraph> out;
  for (const auto& [k, g] : shapes) out.push_back(g);
  return out;
}

std::vector<AdmissibleGraph> series_graphs(int m, int n, Order order) {
  const int s = order.first + order.second;
  return enumerate(m, n, s, 3 * s);
}

StarSeries build_series(int m, int n, const StructTensor& alpha, const StructTensor& beta, Order caps,
                        const SeriesOptions& opt) {
  if (!((m == 2 && n == 1) || (m == 1 && n == 2))) throw ValidationError("series: only (2,1) and (1,2) are supported");
  if (alpha.a() != 2 || alpha.b() != 1 || beta.a() != 1 || beta.b() != 2)
    throw ValidationError("series: need a bracket in Hom(∧²V,V) and a cobracket in Hom(V,∧²V)");
  if (alpha.dim() != beta.dim()) throw ValidationError("series: dimension mismatch");
  if (caps.first < 0 || caps.second < 0) throw ValidationError("series: negative cap");
  const int dim = alpha.dim();

  StarSeries out;
  out.m = m;
  out.n = n;
  out.dim = dim;
  out.caps = caps;
  out.options = opt;
  out.terms[{0, 0}].emplace("", m == 2 ? Cochain::product(dim) : Cochain::coproduct(dim));

  for (int l1 = 0; l1 <= caps.first; ++l1)
    for (int l2 = 0; l2 <= caps.second; ++l2) {
      const int s = l1 + l2;
      if (s == 0) continue;
      std::vector<StructTensor> gammas(static_cast<std::size_t>(l1), alpha);
      gammas.insert(gammas.end(), static_cast<std::size_t>(l2), beta);
      mpz_class fact = 1;
      for (int k = 2; k <= l1; ++k) fact *= k;
      for (int k = 2; k <= l2; ++k) fact *= k;
      Rational scale(mpz_class(orientation_sign(opt.orientation, m, n, s)), fact);
      if (const auto it = opt.rescale.find({l1, l2}); it != opt.rescale.end()) scale *= it->second;

      std::map<std::string, Cochain> acc;
      std::map<std::string, AdmissibleGraph> shapes;
      for (const auto& g : series_graphs(m, n, {l1, l2})) {
        if (!has_top_form(g)) continue;
        Cochain op = alternated_compile(g, gammas, dim);
        if (op.is_symbolic() && op.terms().empty()) continue;
        op *= scale * Rational(label_sign(g));
        const std::string key = shape_key(g);
        shapes.emplace(key, shape_of(g));
        if (auto it = acc.find(key); it == acc.end()) acc.emplace(key, std::move(op));
        else it->second += op;
      }
      auto& slot = out.terms[{l1, l2}];
      for (auto& [k, c] : acc)
        if (!(c.is_symbolic() && c.terms().empty())) {
          out.shapes.emplace(k, shapes.at(k));
          slot.emplace(k, std::move(c));
        }
    }
  return out;
}

StarSeries rescaled(const StarSeries& s, Order o, const Rational& c) {
  StarSeries out = s;
  if (auto it = out.terms.find(o); it != out.terms.end())
    for (auto& [k, op] : it->second) op *= c;
  return out;
}

std::string to_string(Axiom a) {
  switch (a) {
    case Axiom::Associativity: return "assoc";
    case Axiom::Coassociativity: return "coassoc";
    case Axiom::Compatibility: return "compat";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ExactZero: return "exact-zero";
    case Verdict::ZeroWithin3Sigma: return "zero-within-3sigma";
    case Verdict::Violation: return "violation";
  }
  return "?";
}

namespace {

// Tensor-valued polynomial in weight symbols.
using WTensor = std::map<WeightMonomial, TensorPoly>;

WeightMonomial merged(const WeightMonomial& a, const WeightMonomial& b, const std::string& extra = {}) {
  WeightMonomial out = a;
  out.insert(out.end(), b.begin(), b.end());
  if (!extra.empty()) out.push_back(extra);
  std::sort(out.begin(), out.end());
  return out;
}

void accumulate(WTensor& out, const WeightMonomial& w, const TensorPoly& t, const Rational& c) {
  if (t.is_zero() || c == 0) return;
  auto it = out.find(w);
  if (it == out.end()) it = out.emplace(w, TensorPoly(t.arity(), t.dim())).first;
  it->second.add_scaled(t, c);
  if (it->second.is_zero()) out.erase(it);
}

std::vector<Order> splits(Order total) {
  std::vector<Order> out;
  for (int a = 0; a <= total.first; ++a)
    for (int b = 0; b <= total.second; ++b) out.push_back({a, b});
  return out;
}

Order minus(Order a, Order b) { return {a.first - b.first, a.second - b.second}; }

// Per-worker evaluator with memoized operator values on monomials.
class Evaluator {
 public:
  Evaluator(const StarSeries& star, const StarSeries& costar) : star_(star), costar_(costar) {}

  // S_o(x, y) on single monomials, keyed by weight symbol.
  const std::map<std::string, TensorPoly>& star_mono(Order o, const Monomial& x, const Monomial& y) {
    auto key = std::make_tuple(o, x, y);
    if (auto it = star_cache_.find(key); it != star_cache_.end()) return it->second;
    std::map<std::string, TensorPoly> val;
    const std::array<Monomial, 2> in{x, y};
    for (const auto& [k, op] : star_.at(o)) {
      TensorPoly t = op.apply(std::span<const Monomial>(in));
      if (!t.is_zero()) val.emplace(k, std::move(t));
    }
    return star_cache_.emplace(key, std::move(val)).first->second;
  }

  const std::map<std::string, TensorPoly>& costar_mono(Order o, const Monomial& x) {
    auto key = std::make_pair(o, x);
    if (auto it = costar_cache_.find(key); it != costar_cache_.end()) return it->second;
    std::map<std::string, TensorPoly> val;
    const std::array<Monomial, 1> in{x};
    for (const auto& [k, op] : costar_.at(o)) {
      TensorPoly t = op.apply(std::span<const Monomial>(in));
      if (!t.is_zero()) val.emplace(k, std::move(t));
    }
    return costar_cache_.emplace(key, std::move(val)).first->second;
  }

  // S_o(X, Y) for arity-1 X, Y.
  WTensor star(Order o, const WTensor& X, const WTensor& Y) {
    WTensor out;
    for (const auto& [wx, tx] : X)
      for (const auto& [kx, cx] : tx.terms())
        for (const auto& [wy, ty] : Y)
          for (const auto& [ky, cy] : ty.terms())
            for (const auto& [k, t] : star_mono(o, kx[0], ky[0])) accumulate(out, merged(wx, wy, k), t, cx * cy);
    return out;
  }

  // C_o(X) for arity-1 X.
  WTensor costar(Order o, const WTensor& X) {
    WTensor out;
    for (const auto& [wx, tx] : X)
      for (const auto& [kx, cx] : tx.terms())
        for (const auto& [k, t] : costar_mono(o, kx[0])) accumulate(out, merged(wx, {}, k), t, cx);
    return out;
  }

  // C_o applied to slot `slot` of an arity-2 X.
  WTensor costar_at(Order o, const WTensor& X, int slot) {
    WTensor out;
    for (const auto& [wx, tx] : X)
      for (const auto& [kx, cx] : tx.terms()) {
        const TensorPoly other = TensorPoly::pure(std::span<const Monomial>(&kx[static_cast<std::size_t>(1 - slot)], 1));
        for (const auto& [k, t] : costar_mono(o, kx[static_cast<std::size_t>(slot)]))
          accumulate(out, merged(wx, {}, k), slot == 0 ? outer(t, other) : outer(other, t), cx);
      }
    return out;
  }

  // Σ_{a+b=o} (S_a ⊗ S_b)(X, Y) for arity-2 X, Y.
  WTensor star2(Order o, const WTensor& X, const WTensor& Y) {
    WTensor out;
    for (const Order& a : splits(o)) {
      const Order b = minus(o, a);
      for (const auto& [wx, tx] : X)
        for (const auto& [kx, cx] : tx.terms())
          for (const auto& [wy, ty] : Y)
            for (const auto& [ky, cy] : ty.terms()) {
              const auto& left = star_mono(a, kx[0], ky[0]);
              if (left.empty()) continue;
              const auto& right = star_mono(b, kx[1], ky[1]);
              const WeightMonomial w = merged(wx, wy);
              for (const auto& [k1, t1] : left)
                for (const auto& [k2, t2] : right) {
                  WeightMonomial ww = merged(w, {}, k1);
                  if (!k2.empty()) ww = merged(ww, {}, k2);
                  accumulate(out, ww, outer(t1, t2), cx * cy);
                }
            }
    }
    return out;
  }

  WTensor defect(Axiom a, Order order, std::span<const Monomial> in) {
    auto lift = [&](const Monomial& x) {
      WTensor w;
      w.emplace(WeightMonomial{}, TensorPoly::pure(std::span<const Monomial>(&x, 1)));
      return w;
    };
    WTensor out;
    auto add = [&](const WTensor& t, int sign) {
      for (const auto& [w, v] : t) accumulate(out, w, v, Rational(sign));
    };
    switch (a) {
      case Axiom::Associativity: {
        const WTensor f = lift(in[0]), g = lift(in[1]), h = lift(in[2]);
        for (const Order& o2 : splits(order)) {
          const Order o1 = minus(order, o2);
          add(star(o1, star(o2, f, g), h), 1);
          add(star(o1, f, star(o2, g, h)), -1);
        }
        break;
      }
      case Axiom::Coassociativity: {
        const WTensor f = lift(in[0]);
        for (const Order& o2 : splits(order)) {
          const Order o1 = minus(order, o2);
          const WTensor c = costar(o2, f);
          add(costar_at(o1, c, 0), 1);
          add(costar_at(o1, c, 1), -1);
        }
        break;
      }
      case Axiom::Compatibility: {
        const WTensor f = lift(in[0]), g = lift(in[1]);
        for (const Order& o2 : splits(order)) add(costar(minus(order, o2), star(o2, f, g)), 1);
        for (const Order& o12 : splits(order)) {
          const Order o3 = minus(order, o12);
          for (const Order& o1 : splits(o12)) {
            const Order o2 = minus(o12, o1);
            add(star2(o3, costar(o1, f), costar(o2, g)), -1);
          }
        }
        break;
      }
    }
    return out;
  }

 private:
  const StarSeries& star_;
  const StarSeries& costar_;
  std::map<std::tuple<Order, Monomial, Monomial>, std::map<std::string, TensorPoly>> star_cache_;
  std::map<std::pair<Order, Monomial>, std::map<std::string, TensorPoly>> costar_cache_;
};

int arity_of(Axiom a) { return a == Axiom::Associativity ? 3 : a == Axiom::Coassociativity ? 1 : 2; }

}  // namespace

Defect axiom_defect(Axiom a, const StarSeries& star, const StarSeries& costar, Order order, int slot_degree, int workers) {
  if (star.m != 2 || costar.m != 1 || star.dim != costar.dim) throw ValidationError("axiom_defect: need a product and a coproduct series");
  if (order.first > std::min(star.caps.first, costar.caps.first) || order.second > std::min(star.caps.second, costar.caps.second))
    throw ValidationError("axiom_defect: bidegree beyond the series caps");

  std::vector<std::vector<Monomial>> tuples;
  for_each_monomial_tuple(arity_of(a), star.dim, slot_degree,
                          [&](std::span<const Monomial> t) { tuples.emplace_back(t.begin(), t.end()); });

  std::vector<WTensor> per(tuples.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    Evaluator ev(star, costar);
    for (std::size_t i; (i = next.fetch_add(1)) < tuples.size();) per[i] = ev.defect(a, order, tuples[i]);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  Defect d{a, order, {}};
  for (std::size_t i = 0; i < per.size(); ++i)
    for (const auto& [w, t] : per[i]) {
      auto& comps = d.value[w];
      for (const auto& [k, c] : t.terms()) comps.emplace(Component{static_cast<int>(i), k}, c);
    }
  return d;
}

WeightValues weights_at(const WeightTable& t, double eps, const std::vector<std::string>& keys) {
  WeightValues out;
  for (const auto& k : keys) {
    const WeightEntry* e = t.find(k, eps);
    if (!e) throw ValidationError("missing weight for graph " + k);
    out[k] = {e->value, e->std_err};
  }
  return out;
}

namespace {

struct Evaluated {
  double value = 0;
  double scale = 0;                    // Σ |term|, for the round-off test
  std::map<std::string, double> grad;  // ∂ value / ∂ w_k
};

std::map<Component, Evaluated> evaluate_all(const SymbolicDefect& d, const WeightValues& w) {
  std::map<Component, Evaluated> out;
  for (const auto& [mono, comps] : d) {
    std::vector<double> vals;
    for (const auto& k : mono) {
      const auto it = w.find(k);
      if (it == w.end()) throw ValidationError("missing weight for graph " + k);
      vals.push_back(it->second.value);
    }
    double prod = 1;
    for (double v : vals) prod *= v;
    // Derivative of the product with respect to each distinct symbol (with multiplicity).
    std::map<std::string, double> dprod;
    for (std::size_t i = 0; i < mono.size(); ++i) {
      double p = 1;
      for (std::size_t j = 0; j < mono.size(); ++j)
        if (j != i) p *= vals[j];
      dprod[mono[i]] += p;
    }
    for (const auto& [c, q] : comps) {
      const double cq = q.get_d();
      auto& e = out[c];
      e.value += cq * prod;
      e.scale += std::abs(cq * prod);
      for (const auto& [k, dp] : dprod) e.grad[k] += cq * dp;
    }
  }
  return out;
}

}  // namespace

std::map<Component, double> evaluate_components(const SymbolicDefect& d, const WeightValues& w) {
  std::map<Component, double> out;
  for (const auto& [c, e] : evaluate_all(d, w)) out[c] = e.value;
  return out;
}

AxiomResult evaluate(const Defect& d, const WeightValues& w) {
  AxiomResult r;
  r.axiom = d.axiom;
  r.order = d.order;
  if (d.value.empty()) return r;  // exact zero, whatever the weights
  bool hard = false;
  double res2 = 0, var = 0;
  for (const auto& [c, e] : evaluate_all(d.value, w)) {
    double v = 0;
    for (const auto& [k, g] : e.grad) {
      const double s = w.at(k).std_err;
      v += g * g * s * s;
    }
    res2 += e.value * e.value;
    var += v;
    ++r.components;
    if (v > 0) r.max_z = std::max(r.max_z, std::abs(e.value) / std::sqrt(v));
    else if (std::abs(e.value) > 1e-9 * std::max(1.0, e.scale)) hard = true;
  }
  r.residual = std::sqrt(res2);
  r.sigma = std::sqrt(var);
  const bool zero = !hard && r.residual <= 3 * r.sigma;
  r.verdict = zero ? Verdict::ZeroWithin3Sigma : Verdict::Violation;
  if (hard) r.max_z = INFINITY;
  return r;
}

std::vector<AxiomResult> check_axioms(const StarSeries& star, const StarSeries& costar, Order cap, const WeightValues& w,
                                      const AxiomCheckOptions& opt) {
  std::vector<AxiomResult> out;
  for (const Axiom a : {Axiom::Associativity, Axiom::Coassociativity, Axiom::Compatibility})
    for (int l1 = 0; l1 <= cap.first; ++l1)
      for (int l2 = 0; l2 <= cap.second; ++l2) {
        if (l1 + l2 == 0) continue;
        out.push_back(evaluate(axiom_defect(a, star, costar, {l1, l2}, opt.slot_degree, opt.workers), w));
      }
  return out;
}

}  // namespace biquant
