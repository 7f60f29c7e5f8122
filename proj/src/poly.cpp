#include "biquant/poly.hpp"

#include "biquant/errors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace biquant {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("dimension " + std::to_string(dim) + " out of range 1.." +
                                std::to_string(kMaxDim));
}

void require_same_dim(int a, int b) {
  if (a != b) throw std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(int dim) : dim_(static_cast<std::uint8_t>(dim)) { check_dim(dim); }

Monomial::Monomial(int dim, std::span<const int> exps) : Monomial(dim) {
  if (static_cast<int>(exps.size()) != dim) throw std::invalid_argument("exponent vector length != dimension");
  for (int i = 0; i < dim; ++i) set(i, exps[static_cast<std::size_t>(i)]);
}

Monomial Monomial::variable(int dim, int i) {
  Monomial m(dim);
  m.set(i, 1);
  return m;
}

void Monomial::set(int i, int v) {
  if (i < 0 || i >= dim_) throw std::out_of_range("variable index out of range");
  if (v < 0 || v > 0xffff) throw std::invalid_argument("exponent out of range");
  e_[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(v);
}

int Monomial::degree() const {
  int d = 0;
  for (int i = 0; i < dim_; ++i) d += e_[static_cast<std::size_t>(i)];
  return d;
}

bool Monomial::divides(const Monomial& other) const {
  for (int i = 0; i < dim_; ++i)
    if (e_[static_cast<std::size_t>(i)] > other.e_[static_cast<std::size_t>(i)]) return false;
  return true;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  require_same_dim(a.dim_, b.dim_);
  Monomial r(a);
  for (int i = 0; i < a.dim_; ++i) r.set(i, a[i] + b[i]);
  return r;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  for (int i = 0; i < a.dim_; ++i)
    if (auto c = a[i] <=> b[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::vector<Monomial> monomials_up_to(int dim, int max_degree) {
  std::vector<Monomial> out;
  Monomial cur(dim);
  // Depth-first over exponent vectors with bounded total degree.
  auto rec = [&](auto& self, int var, int left) -> void {
    if (var == dim) {
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur.set(var, k);
      self(self, var + 1, left - k);
    }
    cur.set(var, 0);
  };
  rec(rec, 0, max_degree);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- Poly

Poly Poly::constant(int dim, const Rational& c) {
  Poly p(dim);
  p.add_term(Monomial(dim), c);
  return p;
}

Poly Poly::variable(int dim, int i) { return monomial(Monomial::variable(dim, i)); }

Poly Poly::monomial(const Monomial& m, const Rational& c) {
  Poly p(m.dim());
  p.add_term(m, c);
  return p;
}

int Poly::degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  require_same_dim(dim_, m.dim());
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (dim_ == 0 && terms_.empty()) dim_ = o.dim_;
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (dim_ == 0 && terms_.empty()) dim_ = o.dim_;
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) { return mul(a, b); }

Poly mul(const Poly& a, const Poly& b) {
  require_same_dim(a.dim(), b.dim());
  Poly r(a.dim());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) r.add_term(ma * mb, ca * cb);
  return r;
}

Poly partial(const Poly& f, int i) {
  if (i < 0 || i >= f.dim()) throw std::out_of_range("partial: variable index out of range");
  Poly r(f.dim());
  for (const auto& [m, c] : f.terms()) {
    if (m[i] == 0) continue;
    Monomial d = m;
    d.set(i, m[i] - 1);
    r.add_term(d, c * m[i]);
  }
  return r;
}

Rational partial_monomial(const Monomial& e, const Monomial& D, Monomial& out) {
  if (!D.divides(e)) return 0;
  out = e;
  mpz_class coef = 1;
  for (int i = 0; i < e.dim(); ++i) {
    const int k = D[i];
    for (int j = 0; j < k; ++j) coef *= (e[i] - j);
    out.set(i, e[i] - k);
  }
  return Rational(coef);
}

// ---------------------------------------------------------------- TensorPoly

TensorPoly TensorPoly::from_poly(const Poly& p) {
  TensorPoly t(1, p.dim());
  for (const auto& [m, c] : p.terms()) t.terms_.emplace(Key{m}, c);
  return t;
}

TensorPoly TensorPoly::unit(int arity, int dim) {
  TensorPoly t(arity, dim);
  t.add_term(Key(static_cast<std::size_t>(arity), Monomial(dim)), 1);
  return t;
}

TensorPoly TensorPoly::pure(std::span<const Monomial> slots, const Rational& c) {
  if (slots.empty()) throw std::invalid_argument("pure tensor needs at least one slot");
  TensorPoly t(static_cast<int>(slots.size()), slots.front().dim());
  t.add_term(Key(slots.begin(), slots.end()), c);
  return t;
}

void TensorPoly::add_term(const Key& k, const Rational& c) {
  if (c == 0) return;
  if (static_cast<int>(k.size()) != arity_) throw std::invalid_argument("tensor term arity mismatch");
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void TensorPoly::add_term(Key&& k, const Rational& c) {
  if (c == 0) return;
  if (static_cast<int>(k.size()) != arity_) throw std::invalid_argument("tensor term arity mismatch");
  auto [it, inserted] = terms_.try_emplace(std::move(k), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void TensorPoly::add_scaled(const TensorPoly& o, const Rational& c) {
  if (c == 0 || o.is_zero()) return;
  if (arity_ != o.arity_) throw std::invalid_argument("tensor arity mismatch");
  if (dim_ == 0) dim_ = o.dim_;
  for (const auto& [k, v] : o.terms_) add_term(k, v * c);
}

Poly TensorPoly::to_poly() const {
  if (arity_ != 1) throw std::invalid_argument("to_poly needs arity 1");
  Poly p(dim_);
  for (const auto& [k, c] : terms_) p.add_term(k.front(), c);
  return p;
}

TensorPoly& TensorPoly::operator+=(const TensorPoly& o) {
  add_scaled(o, 1);
  return *this;
}

TensorPoly& TensorPoly::operator-=(const TensorPoly& o) {
  add_scaled(o, -1);
  return *this;
}

TensorPoly& TensorPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

TensorPoly tensor_mul(const TensorPoly& a, const TensorPoly& b) {
  if (a.arity() != b.arity()) throw std::invalid_argument("tensor_mul: arity mismatch");
  TensorPoly r(a.arity(), a.dim() ? a.dim() : b.dim());
  TensorPoly::Key k(static_cast<std::size_t>(a.arity()));
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = ka[i] * kb[i];
      r.add_term(k, ca * cb);
    }
  return r;
}

TensorPoly outer(const TensorPoly& a, const TensorPoly& b) {
  TensorPoly r(a.arity() + b.arity(), a.dim() ? a.dim() : b.dim());
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      TensorPoly::Key k;
      k.reserve(ka.size() + kb.size());
      k.insert(k.end(), ka.begin(), ka.end());
      k.insert(k.end(), kb.begin(), kb.end());
      r.add_term(std::move(k), ca * cb);
    }
  return r;
}

namespace {

struct CoproductCacheKey {
  Monomial e;
  int n;
  bool operator==(const CoproductCacheKey&) const = default;
};

struct CoproductCacheHash {
  std::size_t operator()(const CoproductCacheKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.n) * 1000003u + static_cast<std::size_t>(k.e.dim());
    for (int i = 0; i < k.e.dim(); ++i) h = h * 131u + static_cast<std::size_t>(k.e[i]);
    return h;
  }
};

std::vector<std::pair<TensorPoly::Key, Rational>> expand_iterated(const Monomial& e, int n) {
  // Distribute each exponent e_i over n slots with multinomial weights.
  std::vector<std::pair<TensorPoly::Key, Rational>> out;
  TensorPoly::Key slots(static_cast<std::size_t>(n), Monomial(e.dim()));
  std::vector<mpz_class> fact(static_cast<std::size_t>(e.degree() + 1));
  fact[0] = 1;
  for (std::size_t k = 1; k < fact.size(); ++k) fact[k] = fact[k - 1] * static_cast<unsigned long>(k);
  auto rec = [&](auto& self, int var, int slot, int left, mpz_class denom) -> void {
    if (var == e.dim()) {
      mpz_class num = 1;
      for (int i = 0; i < e.dim(); ++i) num *= fact[static_cast<std::size_t>(e[i])];
      out.emplace_back(slots, Rational(num, denom));
      out.back().second.canonicalize();
      return;
    }
    if (slot == n - 1) {
      slots[static_cast<std::size_t>(slot)].set(var, left);
      self(self, var + 1, 0, var + 1 < e.dim() ? e[var + 1] : 0, denom * fact[static_cast<std::size_t>(left)]);
      slots[static_cast<std::size_t>(slot)].set(var, 0);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      slots[static_cast<std::size_t>(slot)].set(var, k);
      self(self, var, slot + 1, left - k, denom * fact[static_cast<std::size_t>(k)]);
    }
    slots[static_cast<std::size_t>(slot)].set(var, 0);
  };
  rec(rec, 0, 0, e[0], mpz_class(1));
  return out;
}

}  // namespace

const std::vector<std::pair<TensorPoly::Key, Rational>>& iterated_coproduct_monomial(const Monomial& e, int n) {
  if (n < 1) throw std::invalid_argument("iterated coproduct needs n >= 1");
  thread_local std::unordered_map<CoproductCacheKey, std::vector<std::pair<TensorPoly::Key, Rational>>,
                                  CoproductCacheHash>
      cache;
  CoproductCacheKey key{e, n};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, expand_iterated(e, n)).first;
  return it->second;
}

TensorPoly iterated_coproduct(const Poly& f, int n) {
  if (n < 1) throw std::invalid_argument("iterated coproduct needs n >= 1");
  TensorPoly r(n, f.dim());
  for (const auto& [m, c] : f.terms())
    for (const auto& [k, w] : iterated_coproduct_monomial(m, n)) r.add_term(k, c * w);
  return r;
}

TensorPoly coproduct(const Poly& f) { return iterated_coproduct(f, 2); }

TensorPoly coproduct_at(const TensorPoly& t, int i) {
  if (i < 0 || i >= t.arity()) throw std::out_of_range("coproduct_at: slot out of range");
  TensorPoly r(t.arity() + 1, t.dim());
  for (const auto& [k, c] : t.terms())
    for (const auto& [split, w] : iterated_coproduct_monomial(k[static_cast<std::size_t>(i)], 2)) {
      TensorPoly::Key nk;
      nk.reserve(k.size() + 1);
      nk.insert(nk.end(), k.begin(), k.begin() + i);
      nk.push_back(split[0]);
      nk.push_back(split[1]);
      nk.insert(nk.end(), k.begin() + i + 1, k.end());
      r.add_term(std::move(nk), c * w);
    }
  return r;
}

// ---------------------------------------------------------------- text

namespace {

std::string slots_text(const TensorPoly::Key& k) {
  std::string s;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (j) s += " |";
    for (int i = 0; i < k[j].dim(); ++i) s += " " + std::to_string(k[j][i]);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

std::vector<int> parse_ints(std::string_view s) {
  std::vector<int> v;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw IoError("malformed exponent '" + tok + "'");
    }
    if (used != tok.size() || x < 0) throw IoError("malformed exponent '" + tok + "'");
    v.push_back(x);
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_text(const Poly& p) {
  std::string s;
  for (const auto& [m, c] : p.terms()) s += to_text(c) + " :" + slots_text({m}) + "\n";
  return s;
}

std::string to_text(const TensorPoly& t) {
  std::string s;
  for (const auto& [k, c] : t.terms()) s += to_text(c) + " :" + slots_text(k) + "\n";
  return s;
}

TensorPoly parse_tensor_poly(std::string_view text, int arity, int dim) {
  TensorPoly out;
  bool started = false;
  for (auto raw : split(text, '\n')) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw IoError("tensor term without ':' in '" + std::string(line) + "'");
    const Rational c = parse_rational(line.substr(0, colon));
    TensorPoly::Key key;
    for (auto slot : split(line.substr(colon + 1), '|')) {
      auto e = parse_ints(slot);
      if (dim < 0) dim = static_cast<int>(e.size());
      if (static_cast<int>(e.size()) != dim || dim < 1 || dim > kMaxDim)
        throw IoError("exponent vector of wrong length in '" + std::string(line) + "'");
      key.emplace_back(dim, e);
    }
    if (arity < 0) arity = static_cast<int>(key.size());
    if (static_cast<int>(key.size()) != arity) throw IoError("term of wrong arity in '" + std::string(line) + "'");
    if (!started) {
      out = TensorPoly(arity, dim);
      started = true;
    }
    out.add_term(std::move(key), c);
  }
  if (!started) {
    if (arity < 1 || dim < 1) throw IoError("empty tensor text with unknown arity/dimension");
    out = TensorPoly(arity, dim);
  }
  return out;
}

Poly parse_poly(std::string_view text, int dim) {
  if (dim < 0) {
    bool any = false;
    for (auto raw : split(text, '\n')) {
      auto l = trim(raw);
      if (!l.empty() && l.front() != '#') any = true;
    }
    if (!any) throw IoError("empty polynomial text with unknown dimension");
  }
  return parse_tensor_poly(text, 1, dim).to_poly();
}

std::string to_expr(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = abs(c);
    if (first) {
      if (c < 0) s += "-";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (int i = 0; i < m.dim(); ++i) {
      if (m[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (m[i] > 1) mono += "^" + std::to_string(m[i]);
    }
    if (mono.empty()) {
      s += a.get_str();
    } else {
      if (a != 1) s += a.get_str() + "*";
      s += mono;
    }
  }
  return s;
}

Poly parse_poly_expr(std::string_view text, int dim) {
  check_dim(dim);
  Poly out(dim);
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const std::string& why) -> IoError {
    return IoError("polynomial expression '" + std::string(text) + "': " + why);
  };
  auto read_uint = [&]() -> std::string {
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) throw fail("expected a number");
    std::string r(text.substr(i, j - i));
    i = j;
    return r;
  };
  skip();
  if (i == text.size()) throw fail("empty");
  bool first = true;
  while (true) {
    skip();
    if (i == text.size()) break;
    int sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
      skip();
    } else if (!first) {
      throw fail("expected '+' or '-'");
    }
    first = false;
    Rational coef = sign;
    Monomial m(dim);
    bool any_factor = false;
    while (true) {
      skip();
      if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        std::string num = read_uint();
        std::string den = "1";
        if (i < text.size() && text[i] == '/') {
          ++i;
          den = read_uint();
        }
        coef *= parse_rational(num + "/" + den);
      } else if (i < text.size() && text[i] == 'x') {
        ++i;
        const int var = std::stoi(read_uint());
        if (var < 1 || var > dim) throw fail("variable index out of range");
        int power = 1;
        skip();
        if (i < text.size() && text[i] == '^') {
          ++i;
          skip();
          power = std::stoi(read_uint());
        }
        m.set(var - 1, m[var - 1] + power);
      } else {
        throw fail("expected a coefficient or variable");
      }
      any_factor = true;
      skip();
      if (i < text.size() && text[i] == '*') {
        ++i;
        continue;
      }
      break;
    }
    if (!any_factor) throw fail("empty term");
    out.add_term(m, coef);
  }
  return out;
}

}  // namespace biquant
