#pragma once

#include "biquant/cochain.hpp"
#include "biquant/graph.hpp"
#include "biquant/struct_tensor.hpp"

#include <span>
#include <string>
#include <vector>

namespace biquant {

// Φ_Γ: sum over edge colorings I: E → {1..d} of ∏ γ-components · Δ^{(n)}(∏ ∂ f) · (⊗ x-monomials).
// The component of inner vertex k reads its input indices from Star(k) and its output
// indices from End(k), both in label order. Zero unless every γ_k has shape (#Star, #End).
Cochain compile(const AdmissibleGraph& g, std::span<const StructTensor> gammas, int dim);

struct DegreeAudit {
  bool ok = true;
  std::string detail;
};

DegreeAudit degree_audit(const AdmissibleGraph& g, std::span<const StructTensor> gammas);

// Sign χ(π) with γ_{π(1)}∧…∧γ_{π(s)} = χ(π) γ_1∧…∧γ_s in the graded exterior algebra,
// where γ_k has degree a_k + b_k - 2. perm[i] = π(i), 0-based.
int koszul_sign(std::span<const int> perm, std::span<const int> degrees);

// (1/s!) Σ_π χ(π) Φ_Γ(γ_{π(1)}, …, γ_{π(s)}).
Cochain alternated_compile(const AdmissibleGraph& g, std::span<const StructTensor> gammas, int dim);

}  // namespace biquant
