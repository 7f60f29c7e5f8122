#include "biquant/struct_tensor.hpp"

#include "biquant/errors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace biquant {

StructTensor::StructTensor(int a, int b, int dim) : a_(a), b_(b), dim_(dim) {
  if (a < 0 || b < 0 || dim < 1 || a + b > 8) throw std::invalid_argument("StructTensor: bad shape");
  std::size_t size = 1;
  for (int i = 0; i < a + b; ++i) size *= static_cast<std::size_t>(dim);
  comps_.assign(size, Rational(0));
}

std::size_t StructTensor::offset(std::span<const int> ins, std::span<const int> outs) const {
  if (static_cast<int>(ins.size()) != a_ || static_cast<int>(outs.size()) != b_)
    throw std::invalid_argument("StructTensor: index block length mismatch");
  std::size_t off = 0;
  auto push = [&](int i) {
    if (i < 0 || i >= dim_) throw std::out_of_range("StructTensor: index out of range");
    off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  };
  for (int i : ins) push(i);
  for (int j : outs) push(j);
  return off;
}

const Rational& StructTensor::at(std::span<const int> ins, std::span<const int> outs) const {
  return comps_[offset(ins, outs)];
}

int sort_sign(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

void StructTensor::set_antisym(std::span<const int> ins, std::span<const int> outs, const Rational& v) {
  std::vector<int> si(ins.begin(), ins.end()), so(outs.begin(), outs.end());
  offset(ins, outs);  // range check
  const int s1 = sort_sign(si), s2 = sort_sign(so);
  if (s1 == 0 || s2 == 0) {
    if (v != 0) throw ValidationError("antisymmetric tensor component with a repeated index must be zero");
    return;
  }
  const Rational base = v * (s1 * s2);  // value at the sorted index
  std::vector<int> pi = si, po = so;
  do {
    std::vector<int> ti = pi;
    const int sa = sort_sign(ti);
    po = so;
    do {
      std::vector<int> to = po;
      const int sb = sort_sign(to);
      comps_[offset(pi, po)] = base * (sa * sb);
    } while (std::next_permutation(po.begin(), po.end()));
  } while (std::next_permutation(pi.begin(), pi.end()));
}

bool StructTensor::is_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const Rational& q) { return q == 0; });
}

namespace {

// Calls f(ins, outs) for every index tuple.
template <class F>
void for_each_index(int a, int b, int dim, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(a + b), 0);
  while (true) {
    f(std::span<const int>(idx.data(), static_cast<std::size_t>(a)),
      std::span<const int>(idx.data() + a, static_cast<std::size_t>(b)));
    int p = a + b - 1;
    while (p >= 0 && ++idx[static_cast<std::size_t>(p)] == dim) idx[static_cast<std::size_t>(p--)] = 0;
    if (p < 0) return;
  }
}

}  // namespace

bool StructTensor::is_antisymmetric() const {
  bool ok = true;
  for_each_index(a_, b_, dim_, [&](std::span<const int> ins, std::span<const int> outs) {
    if (!ok) return;
    std::vector<int> si(ins.begin(), ins.end()), so(outs.begin(), outs.end());
    const int sign = sort_sign(si) * sort_sign(so);
    const Rational& v = at(ins, outs);
    if (sign == 0) {
      ok = v == 0;
    } else {
      ok = v == at(si, so) * sign;
    }
  });
  return ok;
}

std::vector<StructTensor::Entry> StructTensor::nonzero() const {
  std::vector<Entry> out;
  for_each_index(a_, b_, dim_, [&](std::span<const int> ins, std::span<const int> outs) {
    const Rational& v = at(ins, outs);
    if (v != 0) out.push_back({{ins.begin(), ins.end()}, {outs.begin(), outs.end()}, v});
  });
  return out;
}

std::vector<StructTensor::Entry> StructTensor::generators() const {
  auto all = nonzero();
  std::vector<Entry> out;
  for (auto& e : all)
    if (std::is_sorted(e.ins.begin(), e.ins.end()) && std::is_sorted(e.outs.begin(), e.outs.end())) out.push_back(std::move(e));
  return out;
}

StructTensor& StructTensor::operator+=(const StructTensor& o) {
  if (a_ != o.a_ || b_ != o.b_ || dim_ != o.dim_) throw std::invalid_argument("StructTensor: shape mismatch");
  for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
  return *this;
}

StructTensor& StructTensor::operator*=(const Rational& c) {
  for (auto& q : comps_) q *= c;
  return *this;
}

StructTensor random_struct_tensor(int a, int b, int dim, std::mt19937_64& rng, int range, double density) {
  StructTensor t(a, b, dim);
  std::uniform_int_distribution<int> val(-range, range);
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  for_each_index(a, b, dim, [&](std::span<const int> ins, std::span<const int> outs) {
    if (!std::is_sorted(ins.begin(), ins.end()) || !std::is_sorted(outs.begin(), outs.end())) return;
    if (std::adjacent_find(ins.begin(), ins.end()) != ins.end()) return;
    if (std::adjacent_find(outs.begin(), outs.end()) != outs.end()) return;
    const double u = keep(rng);
    const int v = val(rng);
    if (u < density) t.set_antisym(ins, outs, v);
  });
  return t;
}

TensorSet parse_tensors(std::string_view text, int dim) {
  TensorSet set;
  StructTensor* cur = nullptr;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto ints = [&](const std::string& s) {
    std::istringstream ws(s);
    std::vector<int> v;
    std::string tok;
    while (ws >> tok) {
      int x = 0;
      try {
        std::size_t used = 0;
        x = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw IoError("line " + std::to_string(lineno) + ": bad index '" + tok + "'");
      }
      if (x < 1 || x > dim) throw ValidationError("line " + std::to_string(lineno) + ": index out of range 1.." + std::to_string(dim));
      v.push_back(x - 1);
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ws(line);
    std::string first;
    if (!(ws >> first)) continue;
    if (first == "gamma") {
      int k = 0, a = 0, b = 0;
      char colon = 0;
      if (!(ws >> k >> colon >> a >> b) || colon != ':' || k < 1 || a < 0 || b < 0)
        throw IoError("line " + std::to_string(lineno) + ": expected 'gamma k : a b'");
      auto [it, inserted] = set.try_emplace(k, a, b, dim);
      if (!inserted) throw ValidationError("line " + std::to_string(lineno) + ": gamma " + std::to_string(k) + " defined twice");
      cur = &it->second;
      continue;
    }
    if (!cur) throw IoError("line " + std::to_string(lineno) + ": entry before any 'gamma' header");
    const auto semi = line.find(';');
    const auto eq = line.find('=');
    if (semi == std::string::npos || eq == std::string::npos || eq < semi)
      throw IoError("line " + std::to_string(lineno) + ": expected 'i1..ia ; j1..jb = num/den'");
    auto ins = ints(line.substr(0, semi));
    auto outs = ints(line.substr(semi + 1, eq - semi - 1));
    if (static_cast<int>(ins.size()) != cur->a() || static_cast<int>(outs.size()) != cur->b())
      throw ValidationError("line " + std::to_string(lineno) + ": entry arity does not match the header");
    const Rational v = parse_rational(line.substr(eq + 1));
    const Rational& old = cur->at(ins, outs);
    if (old != 0 && old != v) throw ValidationError("line " + std::to_string(lineno) + ": entry conflicts with antisymmetry of an earlier entry");
    cur->set_antisym(ins, outs, v);
  }
  return set;
}

std::string to_text(const TensorSet& set) {
  std::string t;
  for (const auto& [k, g] : set) {
    t += "gamma " + std::to_string(k) + " : " + std::to_string(g.a()) + " " + std::to_string(g.b()) + "\n";
    for (const auto& e : g.generators()) {
      for (int i : e.ins) t += std::to_string(i + 1) + " ";
      t += ";";
      for (int j : e.outs) t += " " + std::to_string(j + 1);
      t += " = " + to_text(e.value) + "\n";
    }
  }
  return t;
}

StructTensor example_bracket_2d() {
  StructTensor c(2, 1, 2);
  const int ins[] = {0, 1}, out[] = {1};
  c.set_antisym(ins, out, 1);
  return c;
}

StructTensor example_cobracket_2d() {
  StructTensor d(1, 2, 2);
  const int in[] = {1}, outs[] = {0, 1};
  d.set_antisym(in, outs, 1);
  return d;
}

}  // namespace biquant
