#pragma once

#include "biquant/configuration.hpp"
#include "biquant/graph.hpp"
#include "biquant/propagator.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace biquant {

// External edges in the order their 1-forms enter the wedge: inner vertices by index, each
// contributing its Star list then its End list in label order. Inner-edge 2-forms are even
// and their position is irrelevant.
std::vector<Edge> external_wedge_order(const AdmissibleGraph& g);

// The unlabeled shape: sorted edges with default labels. Its weight is the reference one.
AdmissibleGraph shape_of(const AdmissibleGraph& g);
std::string shape_key(const AdmissibleGraph& g);

// Sign relating the weight of g to the weight of shape_of(g): the parity of the label orders
// of all Star and End lists (inner edges included) against the shape's increasing order.
int label_sign(const AdmissibleGraph& g);

// Coefficient of Ω_Γ against dp₁…dp_m dq₁…dq_n dt₂…dt_s (each dt = dx dy dλ) after moving
// t₁ to (0,0,1); root selects which interior point is fixed instead of t₁ (the coefficient is
// then against the chart with t_root omitted). Zero when the
// weighted edge count differs from the chart dimension. For s = 0 the only top form is the
// constant 1 on a point (m + n = 3, no edges).
double omega_gamma(const AdmissibleGraph& g, const Config& cfg, const PropagatorParams& prm, int root = 0);

// Orientation of a labeled graph from its half-edges: all half-edges are odd, listed vertex
// by vertex (Star then End, label order); every inner 2-form stands for its adjacent
// (source, target) pair. The sign is that of moving the pairs to the front. With it, a vertex
// of valence 3 is an even block (3 coordinates + 3 half-edges), so relabeling vertices leaves
// weights unchanged.
int half_edge_sign(const AdmissibleGraph& g);

// False when the weight vanishes for structural reasons: wrong form degree, or a vertex
// not connected to the rest (then some coordinate never enters the form), or a repeated
// inner edge.
bool has_top_form(const AdmissibleGraph& g);

struct McOptions {
  long long samples = 1'000'000;
  std::uint64_t seed = 1;
  int workers = 1;
  int block = 4096;  // samples per independently seeded block
  int root = 0;      // interior point held at (0,0,1); the result is reported in the t₁ chart orientation
};

// Orientation of the quotient by the 3-dimensional group relative to the t₁ chart.
// Chart: dp dq dt₂…dt_s as is. OrbitFirst: the group orbit directions precede the slice,
// which multiplies by (-1)^(m+n). OrbitLast: orbit directions follow the slice,
// (-1)^(m+n+s-1). Weights in tables are always in the Chart orientation; the quantization
// series applies the chosen convention.
enum class Orientation { Chart, OrbitFirst, OrbitLast };
int orientation_sign(Orientation o, int m, int n, int s);
std::string to_string(Orientation o);
Orientation parse_orientation(std::string_view text);

struct WeightEstimate {
  double value = 0;
  double std_err = 0;
  long long samples = 0;
  std::uint64_t seed = 0;
  long long nonfinite = 0;  // samples whose density was not finite (dropped)
  bool exact = false;       // value known without sampling (degree, connectivity, s = 0)
};

// ∫ Ω_Γ over the gauge-fixed chart, times half_edge_sign of the shape and the label sign of g. Importance sampling
// along a spanning tree of Γ rooted at the fixed point: every vertex is drawn relative to its
// tree parent from a proposal covering the support of the connecting edge form (uniform
// offsets for boundary edges, ball + box + strip mixture for interior edges, logistic
// proposals for unconstrained coordinates). Blocks are combined in block order, so the
// result does not depend on the worker count.
WeightEstimate weight(const AdmissibleGraph& g, const PropagatorParams& prm, const McOptions& mc);

struct EpsWeight {
  double eps = 0;
  WeightEstimate est;
};

struct WeightSchedule {
  std::vector<EpsWeight> per_eps;
  double extrapolated = 0;  // polynomial extrapolation to ε = 0 through all schedule points
  double extrapolated_err = 0;
};

// Independent seeds per schedule point, derived from mc.seed.
WeightSchedule weight_schedule(const AdmissibleGraph& g, PropagatorParams prm, const McOptions& mc,
                               std::span<const double> eps_schedule);

// Lagrange coefficients of the value at 0 for the given nodes.
std::vector<double> extrapolation_coefficients(std::span<const double> nodes);

// Seed of schedule point i.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace biquant
