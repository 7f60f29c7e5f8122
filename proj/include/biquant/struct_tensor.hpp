#pragma once

#include "biquant/rational.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace biquant {

// Components γ_{i1..ia}^{j1..jb} of γ ∈ Hom(∧^a V, ∧^b V), stored densely,
// antisymmetric in the input block and in the output block separately.
class StructTensor {
 public:
  struct Entry {
    std::vector<int> ins;
    std::vector<int> outs;
    Rational value;
  };

  StructTensor() = default;
  StructTensor(int a, int b, int dim);

  int a() const { return a_; }
  int b() const { return b_; }
  int dim() const { return dim_; }
  int degree() const { return a_ + b_ - 2; }

  const Rational& at(std::span<const int> ins, std::span<const int> outs) const;
  // Sets the component and every permuted component with the antisymmetry sign.
  // Repeated indices force zero; a non-zero value there is rejected.
  void set_antisym(std::span<const int> ins, std::span<const int> outs, const Rational& v);

  bool is_zero() const;
  bool is_antisymmetric() const;
  // All non-zero components, in index order.
  std::vector<Entry> nonzero() const;
  // Non-zero components with strictly increasing index blocks.
  std::vector<Entry> generators() const;

  StructTensor& operator+=(const StructTensor& o);
  StructTensor& operator*=(const Rational& c);
  friend StructTensor operator+(StructTensor x, const StructTensor& y) { return x += y; }
  friend StructTensor operator*(StructTensor x, const Rational& c) { return x *= c; }
  friend bool operator==(const StructTensor&, const StructTensor&) = default;

 private:
  std::size_t offset(std::span<const int> ins, std::span<const int> outs) const;

  int a_ = 0;
  int b_ = 0;
  int dim_ = 0;
  std::vector<Rational> comps_;
};

// Sign of the permutation sorting idx, 0 if an index repeats.
int sort_sign(std::vector<int>& idx);

// Random antisymmetric tensor with integer generators in [-range, range]; density in [0,1].
StructTensor random_struct_tensor(int a, int b, int dim, std::mt19937_64& rng, int range = 3,
                                  double density = 1.0);

// Structure tensors keyed by vertex number (1-based, as in the file).
using TensorSet = std::map<int, StructTensor>;
TensorSet parse_tensors(std::string_view text, int dim);
std::string to_text(const TensorSet& set);

// The 2-dimensional bialgebra [e1,e2]=e2, δ(e2)=e1∧e2, δ(e1)=0.
StructTensor example_bracket_2d();
StructTensor example_cobracket_2d();

}  // namespace biquant
