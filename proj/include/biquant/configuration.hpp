#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace biquant {

// Interior point (x, y, λ) of the upper half-space ℝ² × ℝ₊.
using InnerPoint = std::array<double, 3>;

// Relative coordinates of an ordered pair after moving its source to (0, 0, 1).
using EyePoint = std::array<double, 3>;

// Points p on the lower line, q on the upper line, t in the interior.
struct Config {
  std::vector<double> p;
  std::vector<double> q;
  std::vector<InnerPoint> t;

  int m() const { return static_cast<int>(p.size()); }
  int n() const { return static_cast<int>(q.size()); }
  int s() const { return static_cast<int>(t.size()); }
};

// Strict orderings, λ > 0, distinct interior points and m + n + 3s >= 3.
bool is_valid(const Config& cfg);

// Element (a, b, μ) of the 3-dimensional group acting by
// p ↦ μp + a, q ↦ q/μ + b, (x, y, λ) ↦ (μx + a, y/μ + b, λμ).
struct GaugeElement {
  double a = 0;
  double b = 0;
  double mu = 1;

  double on_lower(double p) const { return mu * p + a; }
  double on_upper(double q) const { return q / mu + b; }
  InnerPoint on_inner(const InnerPoint& t) const { return {mu * t[0] + a, t[1] / mu + b, t[2] * mu}; }
  Config apply(const Config& cfg) const;
  GaugeElement inverse() const { return {-a / mu, -b * mu, 1 / mu}; }
};

// The group element moving t to (0, 0, 1).
GaugeElement gauge_to_unit(const InnerPoint& t);

// ((x_d - x_s)/λ_s, (y_d - y_s)λ_s, λ_d/λ_s). Throws ValidationError on coincident points or λ <= 0.
EyePoint gauge_fix_pair(const InnerPoint& src, const InnerPoint& dst);

// Invariant of four boundary points chosen by index from cfg. lowers and uppers are
// increasing index lists with 4 entries in total, split (2,2), (1,3) or (3,1).
// (2,2): (p₂ - p₁)(q₂ - q₁). (1,3)/(3,1): gap ratio (z₃ - z₂)/(z₂ - z₁) of the triple on the
// line with three points; the single point on the other line does not enter.
double four_point_ratio(const Config& cfg, std::span<const int> lowers, std::span<const int> uppers);

enum class Stratum { Interior, S11, S12, S2, Ambiguous };
std::string to_string(Stratum s);

struct StratumThresholds {
  double close = 1e-6;  // relative collision scale
  double far = 1e6;     // escape scale
};

// S1.1: interior points collide at finite λ. S1.2: one interior point escapes in exactly one of
// x, y. S2: boundary points collide or a point falls onto a boundary line. Diagnostics only.
Stratum stratum_classify(const Config& cfg, StratumThresholds th = {});

// Dimension of the configuration space modulo the group: m + n + 3s - 3.
int config_space_dimension(int m, int n, int s);
// Number of free coordinates in the gauge-fixed chart used for integration:
// for s >= 1, t₁ = (0,0,1) leaves m + n + 3(s - 1); for s = 0, p₁ = 0, q₁ = 0 and either
// p₂ = 1 (m >= 2) or q₂ = 1 leave m + n - 3.
int chart_dimension(int m, int n, int s);

}  // namespace biquant
