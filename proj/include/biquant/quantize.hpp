#pragma once

#include "biquant/cochain.hpp"
#include "biquant/graph.hpp"
#include "biquant/struct_tensor.hpp"
#include "biquant/weight.hpp"
#include "biquant/weight_table.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace biquant {

using Order = std::pair<int, int>;  // (ℓ₁, ℓ₂): copies of the bracket and of the cobracket

struct SeriesOptions {
  Orientation orientation = Orientation::Chart;
  // Extra rational factor per order on top of 1/ℓ₁!ℓ₂!; missing orders use 1.
  std::map<Order, Rational> rescale;
};

// Product (m, n) = (2, 1) or coproduct (1, 2) series. terms[(ℓ₁,ℓ₂)] maps a shape key to the
// operator multiplying that shape's weight; the key "" holds the weight-free order-(0,0)
// term. Shapes whose operators cancel are absent, so they need no weight.
struct StarSeries {
  int m = 2;
  int n = 1;
  int dim = 0;
  Order caps{0, 0};
  SeriesOptions options;
  std::map<Order, std::map<std::string, Cochain>> terms;
  std::map<std::string, AdmissibleGraph> shapes;  // representative of every weight key

  std::vector<AdmissibleGraph> weight_graphs() const;

  const std::map<std::string, Cochain>& at(Order o) const;  // empty map when absent
  std::vector<std::string> weight_keys() const;           // sorted, without ""
};

// Labeled graphs of Γ_{m,n;s}, budget 3s, paired with γ-lists (ℓ₁ brackets, ℓ₂ cobrackets).
std::vector<AdmissibleGraph> series_graphs(int m, int n, Order order);

StarSeries build_series(int m, int n, const StructTensor& alpha, const StructTensor& beta, Order caps,
                        const SeriesOptions& opt = {});
inline StarSeries build_star(const StructTensor& alpha, const StructTensor& beta, Order caps, const SeriesOptions& opt = {}) {
  return build_series(2, 1, alpha, beta, caps, opt);
}
inline StarSeries build_costar(const StructTensor& alpha, const StructTensor& beta, Order caps,
                               const SeriesOptions& opt = {}) {
  return build_series(1, 2, alpha, beta, caps, opt);
}

// Copy with the order-o terms multiplied by c.
StarSeries rescaled(const StarSeries& s, Order o, const Rational& c);

// Polynomial in weight symbols with exact coefficients: for each sorted multiset of
// shape keys, a sparse vector indexed by (test tuple, tensor key).
using WeightMonomial = std::vector<std::string>;
using Component = std::pair<int, TensorPoly::Key>;
using SymbolicDefect = std::map<WeightMonomial, std::map<Component, Rational>>;

enum class Axiom { Associativity, Coassociativity, Compatibility };
std::string to_string(Axiom a);

struct Defect {
  Axiom axiom = Axiom::Associativity;
  Order order{0, 0};
  SymbolicDefect value;  // empty iff exactly zero
};

// Defects of the three axioms at one bidegree on all monomial tuples of per-slot degree
// <= slot_degree (one tuple per axiom arity: f,g,h for (i); f for (ii); f,g for (iii)).
// Tuples are evaluated in parallel and merged in tuple order.
Defect axiom_defect(Axiom a, const StarSeries& star, const StarSeries& costar, Order order, int slot_degree, int workers = 1);

enum class Verdict { ExactZero, ZeroWithin3Sigma, Violation };
std::string to_string(Verdict v);

struct WeightValue {
  double value = 0;
  double std_err = 0;
};
using WeightValues = std::map<std::string, WeightValue>;

// Values at one ε of the table; throws ValidationError when a key is missing.
WeightValues weights_at(const WeightTable& t, double eps, const std::vector<std::string>& keys);

struct AxiomResult {
  Axiom axiom = Axiom::Associativity;
  Order order{0, 0};
  Verdict verdict = Verdict::ExactZero;
  double residual = 0;  // Euclidean norm of the evaluated defect vector
  double sigma = 0;     // root of the summed first-order variances of its components
  double max_z = 0;     // largest |component| / its sigma
  int components = 0;
};

// First-order error propagation with independent weights. Violation when the residual
// exceeds 3σ, or a component with zero variance is non-zero beyond round-off.
AxiomResult evaluate(const Defect& d, const WeightValues& w);

struct AxiomCheckOptions {
  int slot_degree = 3;
  int workers = 1;
};

// Every axiom at every bidegree ≤ cap (componentwise, total ≥ 1), in (axiom, ℓ₁, ℓ₂) order.
std::vector<AxiomResult> check_axioms(const StarSeries& star, const StarSeries& costar, Order cap, const WeightValues& w,
                                      const AxiomCheckOptions& opt = {});

// Value of the defect at the given weights: component → number.
std::map<Component, double> evaluate_components(const SymbolicDefect& d, const WeightValues& w);

}  // namespace biquant
