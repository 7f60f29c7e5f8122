#include "biquant/cochain.hpp"

#include "biquant/errors.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace biquant {

void add_term(SymbolicForm& form, SymKey key, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = form.try_emplace(std::move(key), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) form.erase(it);
  }
}

Cochain::Bounds bounds_of(const SymbolicForm& form) {
  Cochain::Bounds b;
  for (const auto& [k, c] : form) {
    for (const auto& D : k.derivs) b.order = std::max(b.order, D.degree());
    int deg = 0;
    for (const auto& M : k.uppers) deg += M.degree();
    b.coeff_degree = std::max(b.coeff_degree, deg);
  }
  return b;
}

TensorPoly apply_symbolic(const SymbolicForm& form, int n, int dim, std::span<const Monomial> inputs) {
  TensorPoly out(n, dim);
  TensorPoly::Key key(static_cast<std::size_t>(n));
  Monomial tmp;
  for (const auto& [k, c] : form) {
    Rational coef = c;
    Monomial prod(dim);
    bool vanish = false;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const Rational f = partial_monomial(inputs[i], k.derivs[i], tmp);
      if (f == 0) {
        vanish = true;
        break;
      }
      coef *= f;
      prod = prod * tmp;
    }
    if (vanish) continue;
    for (const auto& [split, w] : iterated_coproduct_monomial(prod, n)) {
      for (std::size_t j = 0; j < key.size(); ++j) key[j] = split[j] * k.uppers[j];
      out.add_term(key, coef * w);
    }
  }
  return out;
}

Cochain Cochain::symbolic(int m, int n, int dim, SymbolicForm terms) {
  if (m < 0 || n < 1) throw std::invalid_argument("cochain arity must satisfy m >= 0, n >= 1");
  for (const auto& [k, c] : terms)
    if (static_cast<int>(k.derivs.size()) != m || static_cast<int>(k.uppers.size()) != n)
      throw std::invalid_argument("symbolic term arity mismatch");
  Cochain ch;
  ch.m_ = m;
  ch.n_ = n;
  ch.dim_ = dim;
  ch.bounds_ = bounds_of(terms);
  ch.terms_ = std::make_shared<const SymbolicForm>(std::move(terms));
  return ch;
}

Cochain Cochain::extensional(int m, int n, int dim, Bounds bounds, Evaluator eval) {
  if (m < 0 || n < 1) throw std::invalid_argument("cochain arity must satisfy m >= 0, n >= 1");
  Cochain ch;
  ch.m_ = m;
  ch.n_ = n;
  ch.dim_ = dim;
  ch.bounds_ = bounds;
  ch.eval_ = std::make_shared<const Evaluator>(std::move(eval));
  return ch;
}

Cochain Cochain::zero(int m, int n, int dim) { return symbolic(m, n, dim, {}); }

namespace {

Cochain single_term(int m, int n, int dim) {
  SymbolicForm f;
  add_term(f, SymKey{std::vector<Monomial>(static_cast<std::size_t>(m), Monomial(dim)),
                     std::vector<Monomial>(static_cast<std::size_t>(n), Monomial(dim))},
           1);
  return Cochain::symbolic(m, n, dim, std::move(f));
}

}  // namespace

Cochain Cochain::identity(int dim) { return single_term(1, 1, dim); }
Cochain Cochain::product(int dim) { return single_term(2, 1, dim); }
Cochain Cochain::coproduct(int dim) { return single_term(1, 2, dim); }
Cochain Cochain::iterated_product(int k, int dim) { return single_term(k, 1, dim); }
Cochain Cochain::iterated_coproduct(int k, int dim) { return single_term(1, k, dim); }

const SymbolicForm& Cochain::terms() const {
  if (!terms_) throw std::logic_error("cochain has no symbolic form");
  return *terms_;
}

TensorPoly Cochain::apply(std::span<const Monomial> inputs) const {
  if (static_cast<int>(inputs.size()) != m_) throw std::invalid_argument("cochain input arity mismatch");
  if (terms_) return apply_symbolic(*terms_, n_, dim_, inputs);
  if (eval_) return (*eval_)(inputs);
  return TensorPoly(n_, dim_);
}

TensorPoly Cochain::apply(const TensorPoly& input) const {
  if (input.arity() != m_) throw std::invalid_argument("cochain input arity mismatch");
  TensorPoly out(n_, dim_);
  for (const auto& [k, c] : input.terms()) out.add_scaled(apply(std::span<const Monomial>(k)), c);
  return out;
}

TensorPoly Cochain::apply(std::span<const Poly> inputs) const {
  if (static_cast<int>(inputs.size()) != m_) throw std::invalid_argument("cochain input arity mismatch");
  if (m_ == 0) return apply(std::span<const Monomial>());
  TensorPoly t = TensorPoly::from_poly(inputs[0]);
  for (std::size_t i = 1; i < inputs.size(); ++i) t = outer(t, TensorPoly::from_poly(inputs[i]));
  return apply(t);
}

namespace {

void require_same_shape(const Cochain& a, const Cochain& b) {
  if (a.m() != b.m() || a.n() != b.n() || a.dim() != b.dim()) throw std::invalid_argument("cochain shape mismatch");
}

Cochain::Bounds max_bounds(Cochain::Bounds a, Cochain::Bounds b) {
  return {std::max(a.order, b.order), std::max(a.coeff_degree, b.coeff_degree)};
}

}  // namespace

Cochain& Cochain::operator+=(const Cochain& o) {
  require_same_shape(*this, o);
  if (terms_ && o.terms_) {
    SymbolicForm f = *terms_;
    for (const auto& [k, c] : *o.terms_) add_term(f, k, c);
    *this = symbolic(m_, n_, dim_, std::move(f));
    return *this;
  }
  Cochain a = *this, b = o;
  *this = extensional(m_, n_, dim_, max_bounds(bounds_, o.bounds_), [a, b](std::span<const Monomial> in) {
    TensorPoly r = a.apply(in);
    r += b.apply(in);
    return r;
  });
  return *this;
}

Cochain& Cochain::operator-=(const Cochain& o) { return *this += o * Rational(-1); }

Cochain& Cochain::operator*=(const Rational& c) {
  if (terms_) {
    SymbolicForm f;
    if (c != 0)
      for (const auto& [k, v] : *terms_) f.emplace(k, v * c);
    *this = symbolic(m_, n_, dim_, std::move(f));
    return *this;
  }
  Cochain a = *this;
  *this = extensional(m_, n_, dim_, bounds_, [a, c](std::span<const Monomial> in) { return a.apply(in) * c; });
  return *this;
}

void for_each_monomial_tuple(int m, int dim, int slot_degree,
                             const std::function<void(std::span<const Monomial>)>& f) {
  const auto basis = monomials_up_to(dim, slot_degree);
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  std::vector<Monomial> tuple(static_cast<std::size_t>(m), basis.front());
  while (true) {
    for (std::size_t i = 0; i < idx.size(); ++i) tuple[i] = basis[idx[i]];
    f(tuple);
    int p = m - 1;
    while (p >= 0 && ++idx[static_cast<std::size_t>(p)] == basis.size()) idx[static_cast<std::size_t>(p--)] = 0;
    if (p < 0) return;
  }
}

bool cochain_eq(const Cochain& a, const Cochain& b, int slot_degree) {
  require_same_shape(a, b);
  bool equal = true;
  for_each_monomial_tuple(a.m(), a.dim(), slot_degree, [&](std::span<const Monomial> in) {
    if (equal && a.apply(in) != b.apply(in)) equal = false;
  });
  return equal;
}

bool cochain_eq(const Cochain& a, const Cochain& b) {
  const auto bd = max_bounds(a.bounds(), b.bounds());
  return cochain_eq(a, b, bd.order + bd.coeff_degree + 1);
}

std::vector<Monomial> find_nonzero_input(const Cochain& c, int slot_degree) {
  std::vector<Monomial> hit;
  for_each_monomial_tuple(c.m(), c.dim(), slot_degree, [&](std::span<const Monomial> in) {
    if (hit.empty() && !c.apply(in).is_zero()) hit.assign(in.begin(), in.end());
  });
  return hit;
}

Cochain symbolize(const Cochain& c) {
  if (c.is_symbolic()) return c;
  const int m = c.m(), n = c.n(), dim = c.dim(), r = c.bounds().order;
  std::vector<std::vector<Monomial>> tuples;
  for_each_monomial_tuple(m, dim, r, [&](std::span<const Monomial> in) { tuples.emplace_back(in.begin(), in.end()); });
  auto total = [](const std::vector<Monomial>& t) {
    int s = 0;
    for (const auto& e : t) s += e.degree();
    return s;
  };
  std::stable_sort(tuples.begin(), tuples.end(), [&](const auto& a, const auto& b) { return total(a) < total(b); });

  SymbolicForm form;
  for (const auto& D : tuples) {
    TensorPoly rest = c.apply(D);
    rest -= apply_symbolic(form, n, dim, D);
    if (rest.is_zero()) continue;
    // Only keys with derivative tuple exactly D survive: Δ^{(n)}(1)·M scaled by D!.
    mpz_class fact = 1;
    for (const auto& e : D)
      for (int i = 0; i < dim; ++i)
        for (int k = 2; k <= e[i]; ++k) fact *= k;
    for (const auto& [M, q] : rest.terms()) add_term(form, SymKey{D, M}, q / fact);
  }
  Cochain out = Cochain::symbolic(m, n, dim, std::move(form));
  if (!cochain_eq(out, c, r + 1)) throw ValidationError("symbolize: operator is not of the expected polydifferential form");
  return out;
}

std::string to_text(const Cochain& c) {
  std::string t = "cochain " + std::to_string(c.m()) + " " + std::to_string(c.n()) + " dim " + std::to_string(c.dim()) + "\n";
  auto block = [](const std::vector<Monomial>& v) {
    std::string s;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j) s += " |";
      for (int i = 0; i < v[j].dim(); ++i) s += " " + std::to_string(v[j][i]);
    }
    return s;
  };
  for (const auto& [k, v] : c.terms()) t += to_text(v) + " :" + block(k.derivs) + " ;" + block(k.uppers) + "\n";
  return t;
}

Cochain parse_cochain(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int m = -1, n = -1, dim = -1;
  SymbolicForm form;
  auto parse_block = [&](const std::string& s, int count) {
    std::vector<Monomial> out;
    std::string part;
    std::istringstream ps(s);
    while (std::getline(ps, part, '|')) {
      std::istringstream es(part);
      std::vector<int> e;
      int x;
      while (es >> x) {
        if (x < 0) throw IoError("negative exponent in cochain text");
        e.push_back(x);
      }
      if (!es.eof()) throw IoError("malformed exponent in cochain text");
      if (count == 0 && e.empty()) continue;
      if (static_cast<int>(e.size()) != dim) throw IoError("exponent vector of wrong length in cochain text");
      out.emplace_back(dim, e);
    }
    if (static_cast<int>(out.size()) != count) throw IoError("wrong number of slots in cochain term");
    return out;
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (m < 0) {
      std::istringstream hs(line);
      std::string w1, w2;
      if (!(hs >> w1 >> m >> n >> w2 >> dim) || w1 != "cochain" || w2 != "dim" || m < 0 || n < 1 || dim < 1 || dim > kMaxDim)
        throw IoError("cochain header must be 'cochain m n dim d'");
      continue;
    }
    const auto colon = line.find(':');
    const auto semi = line.find(';');
    if (colon == std::string::npos || semi == std::string::npos || semi < colon) throw IoError("cochain term must be 'c : D.. ; M..'");
    const Rational c = parse_rational(line.substr(0, colon));
    SymKey key{parse_block(line.substr(colon + 1, semi - colon - 1), m), parse_block(line.substr(semi + 1), n)};
    add_term(form, std::move(key), c);
  }
  if (m < 0) throw IoError("missing cochain header");
  return Cochain::symbolic(m, n, dim, std::move(form));
}

}  // namespace biquant
