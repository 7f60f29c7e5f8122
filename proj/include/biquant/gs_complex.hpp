#pragma once

#include "biquant/cochain.hpp"
#include "biquant/struct_tensor.hpp"

#include <map>
#include <span>
#include <utility>
#include <vector>

namespace biquant {

// Signs of the two boundary terms of each differential, relative to
//   d1: +Δ^{(n)}(a_0)·Ψ(a_1..a_m)  ...  (-1)^{m+1} Ψ(a_0..a_{m-1})·Δ^{(n)}(a_m)
//   d2: +(a'_1⋯a'_m)⊗Ψ(a''_1..a''_m) ... (-1)^{n+1} Ψ(a'_1..a'_m)⊗(a''_1⋯a''_m)
// Interior terms always carry (-1)^{i+1} resp. (-1)^i. The default is all +1.
struct GsSigns {
  int d1_first = 1;
  int d1_last = 1;
  int d2_first = 1;
  int d2_last = 1;

  friend bool operator==(const GsSigns&, const GsSigns&) = default;
};

// Algebra-side differential Cochain(m,n) → Cochain(m+1,n). Symbolic in, symbolic out;
// extensional input falls back to d_gs1_literal.
Cochain d_gs1(const Cochain& psi, GsSigns signs = {});
// Coalgebra-side differential Cochain(m,n) → Cochain(m,n+1).
Cochain d_gs2(const Cochain& psi, GsSigns signs = {});

// Term-by-term evaluation of the defining formulas with explicit Sweedler sums.
Cochain d_gs1_literal(const Cochain& psi, GsSigns signs = {});
Cochain d_gs2_literal(const Cochain& psi, GsSigns signs = {});

// Total differential: (d_gs1 Ψ, (-1)^m d_gs2 Ψ). The twist makes the two halves anticommute.
std::pair<Cochain, Cochain> d_gs(const Cochain& psi, GsSigns signs = {});
int gs_twist(int m);

// Bicomplex element: components keyed by (m,n).
using GsChain = std::map<std::pair<int, int>, Cochain>;
GsChain d_gs(const GsChain& x, GsSigns signs = {});
// True iff every component is symbolically zero.
bool is_zero(const GsChain& x);

// G∘F with F = Θ_1(v_1..v_{M_1}) ⊗ … ⊗ Θ_{ℓ1}(…) ∈ A^{⊗ℓ1ℓ2} and
// G = Ψ_1(w_1, w_{ℓ2+1}, …) ⊗ Ψ_2(w_2, w_{ℓ2+2}, …) ⊗ … ⊗ Ψ_{ℓ2}(…).
Cochain fraction(std::span<const Cochain> psis, std::span<const Cochain> thetas);

// Fraction with ℓ1 = m1+1, ℓ2 = n1+1 where Ψ sits at psi_pos, Θ at theta_pos and
// all other slots are filled with the (m1+1)-fold product resp. (n1+1)-fold coproduct.
Cochain fraction_codim1(const Cochain& psi, const Cochain& theta, int psi_pos, int theta_pos);

// Sum over the codim-1 strata joining Ψ ∈ C(2,1) and Θ ∈ C(1,2) into C(2,2):
// Θ∘Ψ minus the four (m1,n1) = (1,1) fractions with Ψ in row i and Θ in column j.
// Symbolic whenever both inputs are. On HKR images this is the HKR image of the big bracket.
Cochain strata_bracket(const Cochain& psi, const Cochain& theta);

// Degree defect of the codim-1 fraction: Σ deg of constituents − m1 − n1 minus the
// degree m0+m1+n0+n1−2 of an L∞ operation, with deg Hom(A^{⊗m},A^{⊗n}) = m+n−2.
int fraction_degree_defect(int m1, int n1, int m0, int n0);

// Corolla operator of γ ∈ Hom(∧^a V, ∧^b V).
Cochain hkr(const StructTensor& gamma);

// Outcome of testing whether a cochain lies in the span of given cochains
// (used for equality modulo d_gs-exact terms).
struct SpanReport {
  bool in_span = false;
  int rank = 0;             // rank of the spanning set
  int residual_terms = 0;   // non-zero coordinates left after reduction
  std::vector<Rational> coefficients;  // a solution when in_span
};

// Coordinates are the symbolic terms of each (m,n) component; all inputs must be symbolic.
SpanReport solve_in_span(const GsChain& target, const std::vector<GsChain>& generators);

// Symbolic basis of Cochain(m,n) terms with Σ|M_j| − Σ|D_i| = shift, |D_i| <= max_order.
std::vector<Cochain> symbolic_basis(int m, int n, int dim, int max_order, int shift);

}  // namespace biquant
