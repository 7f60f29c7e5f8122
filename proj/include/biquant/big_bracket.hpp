#pragma once

#include "biquant/struct_tensor.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace biquant {

// Homogeneous components of ⊕ Hom(∧^m V, ∧^n V), keyed by (m, n).
class G1Element {
 public:
  G1Element() = default;
  explicit G1Element(int dim) : dim_(dim) {}
  G1Element(const StructTensor& t);  // single component

  int dim() const { return dim_; }
  const std::map<std::pair<int, int>, StructTensor>& components() const { return comps_; }
  // Component of shape (m,n); the zero tensor if absent.
  StructTensor component(int m, int n) const;
  void add(const StructTensor& t);
  bool is_zero() const;

  G1Element& operator+=(const G1Element& o);
  G1Element& operator*=(const Rational& c);
  friend G1Element operator+(G1Element a, const G1Element& b) { return a += b; }
  friend G1Element operator*(G1Element a, const Rational& c) { return a *= c; }
  friend bool operator==(const G1Element& a, const G1Element& b);

 private:
  int dim_ = 0;
  std::map<std::pair<int, int>, StructTensor> comps_;
};

// Contraction bracket: one output of one argument is fed into one input of the other,
// summed both ways. Computed in the Grassmann algebra on θ^1..θ^d (inputs) and
// ξ_1..ξ_d (outputs) as P·(∂⃖/∂θ^i ∂⃗/∂ξ_i + ∂⃖/∂ξ_i ∂⃗/∂θ^i)·Q, scaled so that
// {α,α} is twice the Jacobiator of a bracket α.
G1Element bracket(const G1Element& x, const G1Element& y);

// Classical tensors, each antisymmetric in both index blocks.
StructTensor jacobiator(const StructTensor& alpha);          // (3,1)
StructTensor cojacobiator(const StructTensor& beta);         // (1,3), cyclic sum of (1⊗δ)δ
StructTensor cocycle_defect(const StructTensor& alpha, const StructTensor& beta);  // (2,2)

struct AxiomResidual {
  std::string name;
  bool bracket_zero = false;    // from the big bracket
  bool classical_zero = false;  // from the direct index formula
  std::vector<StructTensor::Entry> bracket_entries;    // non-zero generators
  std::vector<StructTensor::Entry> classical_entries;  // non-zero generators
};

struct BialgebraReport {
  AxiomResidual jacobi;    // {α,α} and Jacobi identity
  AxiomResidual cojacobi;  // {β,β} and co-Jacobi identity
  AxiomResidual cocycle;   // {α,β} and the 1-cocycle condition
  bool passes() const;     // all six zero
  bool consistent() const; // each bracket verdict agrees with its classical verdict
};

BialgebraReport is_lie_bialgebra(const StructTensor& alpha, const StructTensor& beta);

}  // namespace biquant
