#include "biquant/configuration.hpp"

#include "biquant/errors.hpp"

#include <algorithm>
#include <cmath>

namespace biquant {

bool is_valid(const Config& cfg) {
  if (cfg.m() + cfg.n() + 3 * cfg.s() < 3) return false;
  for (std::size_t i = 1; i < cfg.p.size(); ++i)
    if (!(cfg.p[i - 1] < cfg.p[i])) return false;
  for (std::size_t i = 1; i < cfg.q.size(); ++i)
    if (!(cfg.q[i - 1] < cfg.q[i])) return false;
  for (std::size_t i = 0; i < cfg.t.size(); ++i) {
    if (!(cfg.t[i][2] > 0)) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (cfg.t[i] == cfg.t[j]) return false;
  }
  return true;
}

Config GaugeElement::apply(const Config& cfg) const {
  Config out;
  for (double p : cfg.p) out.p.push_back(on_lower(p));
  for (double q : cfg.q) out.q.push_back(on_upper(q));
  for (const auto& t : cfg.t) out.t.push_back(on_inner(t));
  return out;
}

GaugeElement gauge_to_unit(const InnerPoint& t) {
  if (!(t[2] > 0)) throw ValidationError("interior point needs lambda > 0");
  const double mu = 1 / t[2];
  return {-mu * t[0], -t[1] / mu, mu};
}

EyePoint gauge_fix_pair(const InnerPoint& src, const InnerPoint& dst) {
  if (!(src[2] > 0) || !(dst[2] > 0)) throw ValidationError("gauge_fix_pair: lambda must be positive");
  if (src == dst) throw ValidationError("gauge_fix_pair: coincident points");
  return {(dst[0] - src[0]) / src[2], (dst[1] - src[1]) * src[2], dst[2] / src[2]};
}

double four_point_ratio(const Config& cfg, std::span<const int> lowers, std::span<const int> uppers) {
  auto pick = [](const std::vector<double>& line, std::span<const int> idx) {
    std::vector<double> z;
    for (int i : idx) {
      if (i < 0 || i >= static_cast<int>(line.size())) throw ValidationError("four_point_ratio: index out of range");
      z.push_back(line[static_cast<std::size_t>(i)]);
    }
    for (std::size_t i = 1; i < z.size(); ++i)
      if (!(z[i - 1] < z[i])) throw ValidationError("four_point_ratio: sample must be increasing");
    return z;
  };
  if (lowers.size() + uppers.size() != 4) throw ValidationError("four_point_ratio: need four points");
  const auto p = pick(cfg.p, lowers), q = pick(cfg.q, uppers);
  if (p.size() == 2) return (p[1] - p[0]) * (q[1] - q[0]);
  const auto& z = p.size() == 3 ? p : q;
  if (z.size() != 3) throw ValidationError("four_point_ratio: sample must be (2,2), (1,3) or (3,1)");
  return (z[2] - z[1]) / (z[1] - z[0]);
}

std::string to_string(Stratum s) {
  switch (s) {
    case Stratum::Interior: return "interior";
    case Stratum::S11: return "S1.1";
    case Stratum::S12: return "S1.2";
    case Stratum::S2: return "S2";
    case Stratum::Ambiguous: return "ambiguous";
  }
  return "?";
}

Stratum stratum_classify(const Config& cfg, StratumThresholds th) {
  // Work in the gauge t₁ = (0,0,1) when there are interior points, so scales are intrinsic.
  Config c = cfg.s() > 0 ? gauge_to_unit(cfg.t[0]).apply(cfg) : cfg;
  bool s11 = false, s12 = false, s2 = false;

  for (std::size_t i = 0; i < c.t.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const EyePoint e = gauge_fix_pair(c.t[j], c.t[i]);
      const double d = std::hypot(e[0], e[1], e[2] - 1);
      if (d < th.close) s11 = true;
    }
    const auto& t = c.t[i];
    const bool fx = std::abs(t[0]) > th.far, fy = std::abs(t[1]) > th.far;
    if (fx != fy) s12 = true;
    if (t[2] < th.close || t[2] > th.far || (fx && fy)) s2 = true;
  }
  auto collide = [&](const std::vector<double>& z) {
    for (std::size_t i = 1; i < z.size(); ++i)
      if (z[i] - z[i - 1] < th.close * std::max(1.0, std::abs(z[i]))) return true;
    return false;
  };
  if (collide(c.p) || collide(c.q)) s2 = true;

  const int hits = int(s11) + int(s12) + int(s2);
  if (hits == 0) return Stratum::Interior;
  if (hits > 1) return Stratum::Ambiguous;
  return s11 ? Stratum::S11 : s12 ? Stratum::S12 : Stratum::S2;
}

int config_space_dimension(int m, int n, int s) { return m + n + 3 * s - 3; }

int chart_dimension(int m, int n, int s) {
  if (s >= 1) return m + n + 3 * (s - 1);
  if (m < 1 || n < 1 || m + n < 3) throw ValidationError("chart_dimension: no gauge for this boundary configuration");
  return m + n - 3;
}

}  // namespace biquant
