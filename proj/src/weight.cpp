#include "biquant/weight.hpp"

#include "biquant/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <thread>

namespace biquant {

std::vector<Edge> external_wedge_order(const AdmissibleGraph& g) {
  std::vector<Edge> out;
  for (int k = 0; k < g.s; ++k)
    for (const auto* lab : {&g.star[static_cast<std::size_t>(k)], &g.end[static_cast<std::size_t>(k)]})
      for (int e : *lab) {
        const Edge& ed = g.edges[static_cast<std::size_t>(e)];
        if (!ed.is_inner()) out.push_back(ed);
      }
  return out;
}

AdmissibleGraph shape_of(const AdmissibleGraph& g) {
  AdmissibleGraph h = g;
  std::sort(h.edges.begin(), h.edges.end());
  h.assign_default_labels();
  return h;
}

std::string shape_key(const AdmissibleGraph& g) { return canonical_key(shape_of(g)); }

int label_sign(const AdmissibleGraph& g) {
  // The shape lists every Star and End in increasing edge order, so the sign is the parity
  // of sorting each list of g. Inner edges count like external ones: the operator is
  // antisymmetric in all label slots, and this keeps W_Γ·Φ_Γ independent of the labeling.
  int sign = 1;
  auto parity = [&](const std::vector<int>& lab) {
    for (std::size_t i = 0; i < lab.size(); ++i)
      for (std::size_t j = i + 1; j < lab.size(); ++j)
        if (g.edges[static_cast<std::size_t>(lab[j])] < g.edges[static_cast<std::size_t>(lab[i])]) sign = -sign;
  };
  for (int k = 0; k < g.s; ++k) {
    parity(g.star[static_cast<std::size_t>(k)]);
    parity(g.end[static_cast<std::size_t>(k)]);
  }
  return sign;
}

int half_edge_sign(const AdmissibleGraph& g) {
  // Half-edges in vertex order (Star then End labels); each inner edge is one entry in the
  // Star list of its source and one in the End list of its target.
  std::vector<std::pair<int, int>> seq;  // (edge, 0 = source half / 1 = target half)
  for (int k = 0; k < g.s; ++k) {
    for (int e : g.star[static_cast<std::size_t>(k)]) seq.push_back({e, 0});
    for (int e : g.end[static_cast<std::size_t>(k)]) seq.push_back({e, g.edges[static_cast<std::size_t>(e)].is_inner() ? 1 : 0});
  }
  // Target order: inner edges by index as (source, target) pairs, then external ones as they came.
  auto rank = [&](std::pair<int, int> h) {
    const int E = static_cast<int>(g.edges.size());
    if (g.edges[static_cast<std::size_t>(h.first)].is_inner()) return 2 * h.first + h.second;
    return 2 * E + static_cast<int>(std::find(seq.begin(), seq.end(), h) - seq.begin());
  };
  int sign = 1;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (rank(seq[j]) < rank(seq[i])) sign = -sign;
  return sign;
}

namespace {

// Positions of the chart coordinates p, q and the free interior points.
struct Layout {
  int m = 0, n = 0, s = 0, root = 0;

  int size() const { return m + n + 3 * (s - 1); }
  int p(int j) const { return j; }
  int q(int j) const { return m + j; }
  int t(int k) const { return k == root ? -1 : m + n + 3 * (k < root ? k : k - 1); }
};

double determinant(std::vector<double>& a, int n) {
  double det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r * n + c)]) > std::abs(a[static_cast<std::size_t>(piv * n + c)])) piv = r;
    const double pv = a[static_cast<std::size_t>(piv * n + c)];
    if (pv == 0) return 0;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[static_cast<std::size_t>(piv * n + k)], a[static_cast<std::size_t>(c * n + k)]);
      det = -det;
    }
    det *= pv;
    for (int r = c + 1; r < n; ++r) {
      const double f = a[static_cast<std::size_t>(r * n + c)] / pv;
      if (f == 0) continue;
      for (int k = c; k < n; ++k) a[static_cast<std::size_t>(r * n + k)] -= f * a[static_cast<std::size_t>(c * n + k)];
    }
  }
  return det;
}

// Evaluates the top-form coefficient of Ω_Γ at a point of the chart.
class FormEvaluator {
 public:
  FormEvaluator(const AdmissibleGraph& g, const PropagatorParams& prm, int root)
      : prm_(prm), lay_{g.m, g.n, g.s, root}, ext_(external_wedge_order(g)) {
    for (const auto& e : g.edges)
      if (e.is_inner()) inner_.push_back(e);
    rows_.resize(static_cast<std::size_t>(lay_.size() * lay_.size()));
  }

  int dimension() const { return lay_.size(); }
  const Layout& layout() const { return lay_; }

  // p, q, t hold the full configuration; t[root] must be (0,0,1).
  double density(std::span<const double> p, std::span<const double> q, std::span<const InnerPoint> t) {
    const int N = lay_.size();
    std::fill(rows_.begin(), rows_.end(), 0.0);
    double fprod = 1;
    int r = 0;
    auto put = [&](int row, int col, double v) {
      if (col >= 0) rows_[static_cast<std::size_t>(row * N + col)] += v;
    };
    auto put_point = [&](int row, int k, double dx, double dy, double dl) {
      const int b = lay_.t(k);
      if (b < 0) return;
      put(row, b, dx);
      put(row, b + 1, dy);
      put(row, b + 2, dl);
    };
    for (const Edge& e : ext_) {
      if (e.dst.kind == VertexKind::Lower) {
        const int a = e.src.index, j = e.dst.index;
        const InnerPoint& ta = t[static_cast<std::size_t>(a)];
        const double X = (p[static_cast<std::size_t>(j)] - ta[0]) / ta[2];
        const double f = propagator1(X);
        if (f == 0) return 0;
        fprod *= f;
        put(r, lay_.p(j), 1 / ta[2]);
        put_point(r, a, -1 / ta[2], 0, -X / ta[2]);
      } else {
        const int a = e.dst.index, j = e.src.index;
        const InnerPoint& ta = t[static_cast<std::size_t>(a)];
        const double Y = (q[static_cast<std::size_t>(j)] - ta[1]) * ta[2];
        const double f = propagator1(Y);
        if (f == 0) return 0;
        fprod *= f;
        put(r, lay_.q(j), ta[2]);
        put_point(r, a, 0, -ta[2], Y / ta[2]);
      }
      ++r;
    }
    for (const Edge& e : inner_) {
      const int a = e.src.index, b = e.dst.index;
      const InnerPoint& ta = t[static_cast<std::size_t>(a)];
      const InnerPoint& tb = t[static_cast<std::size_t>(b)];
      const EyePoint E = gauge_fix_pair(ta, tb);
      const EyeChart ch = eye_chart(E, prm_);
      const double la = ta[2];
      for (const Dual3* w : {&ch.u, &ch.v}) {
        const auto& d = w->d;
        // ∂E/∂t_a and ∂E/∂t_b from X = Δx/λ_a, Y = Δy·λ_a, Λ = λ_b/λ_a.
        put_point(r, a, -d[0] / la, -d[1] * la, -d[0] * E[0] / la + d[1] * E[1] / la - d[2] * E[2] / la);
        put_point(r, b, d[0] / la, d[1] * la, d[2] / la);
        ++r;
      }
      if (d_is_zero(ch)) return 0;
    }
    if (r != N) throw ValidationError("omega_gamma: edge budget differs from the chart dimension");
    return fprod * determinant(rows_, N);
  }

 private:
  static bool d_is_zero(const EyeChart& ch) {
    return std::all_of(ch.u.d.begin(), ch.u.d.end(), [](double x) { return x == 0; }) ||
           std::all_of(ch.v.d.begin(), ch.v.d.end(), [](double x) { return x == 0; });
  }

  PropagatorParams prm_;
  Layout lay_;
  std::vector<Edge> ext_;
  std::vector<Edge> inner_;
  std::vector<double> rows_;
};

bool top_degree(const AdmissibleGraph& g) {
  return g.s >= 1 && g.weighted_edge_count() == config_space_dimension(g.m, g.n, g.s);
}

}  // namespace

double omega_gamma(const AdmissibleGraph& g, const Config& cfg, const PropagatorParams& prm, int root) {
  if (cfg.m() != g.m || cfg.n() != g.n || cfg.s() != g.s) throw ValidationError("omega_gamma: configuration does not match the graph");
  if (!is_valid(cfg)) throw ValidationError("omega_gamma: invalid configuration");
  if (g.s == 0) return g.edges.empty() && g.m + g.n == 3 ? 1.0 : 0.0;
  if (!top_degree(g)) return 0;
  if (root < 0 || root >= g.s) throw ValidationError("omega_gamma: root out of range");
  const Config c = gauge_to_unit(cfg.t[static_cast<std::size_t>(root)]).apply(cfg);
  std::vector<InnerPoint> t = c.t;
  t[static_cast<std::size_t>(root)] = {0, 0, 1};
  FormEvaluator ev(g, prm, root);
  return ev.density(c.p, c.q, t);
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) {
  // SplitMix64 finalizer.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// How each vertex is drawn from its spanning-tree parent.
enum class StepKind { LowerFromInner, UpperFromInner, InnerForward, InnerBackward, InnerFromLower, InnerFromUpper };

struct Step {
  StepKind kind;
  int child;   // vertex index within its kind
  int parent;  // vertex index within its kind
};

// Breadth-first spanning tree over inner and boundary vertices; empty optional when some
// vertex is unreachable.
bool spanning_plan(const AdmissibleGraph& g, int root, std::vector<Step>& plan) {
  const int V = g.s + g.m + g.n;
  auto node = [&](Vertex v) {
    switch (v.kind) {
      case VertexKind::Inner: return v.index;
      case VertexKind::Lower: return g.s + v.index;
      case VertexKind::Upper: return g.s + g.m + v.index;
    }
    return -1;
  };
  std::vector<bool> seen(static_cast<std::size_t>(V), false);
  std::queue<int> todo;
  seen[static_cast<std::size_t>(root)] = true;
  todo.push(root);
  int reached = 1;
  while (!todo.empty()) {
    const int u = todo.front();
    todo.pop();
    for (const Edge& e : g.edges) {
      const int a = node(e.src), b = node(e.dst);
      if (a != u && b != u) continue;
      const int w = a == u ? b : a;
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      ++reached;
      todo.push(w);
      const Vertex child = a == u ? e.dst : e.src;
      const Vertex par = a == u ? e.src : e.dst;
      StepKind k;
      if (child.kind == VertexKind::Lower) k = StepKind::LowerFromInner;
      else if (child.kind == VertexKind::Upper) k = StepKind::UpperFromInner;
      else if (par.kind == VertexKind::Inner) k = child == e.dst ? StepKind::InnerForward : StepKind::InnerBackward;
      else if (par.kind == VertexKind::Lower) k = StepKind::InnerFromLower;
      else k = StepKind::InnerFromUpper;
      plan.push_back({k, child.index, par.index});
    }
  }
  return reached == V;
}

struct BlockSum {
  double sum = 0;
  double sumsq = 0;
  long long nonfinite = 0;
};

double uniform01(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53; }

// Logistic variate with scale sc and its density.
double logistic_draw(std::mt19937_64& rng, double sc) {
  const double u = uniform01(rng);
  return sc * std::log(u / (1 - u));
}
double logistic_density(double z, double sc) {
  const double e = std::exp(-std::abs(z) / sc);
  return e / (sc * (1 + e) * (1 + e));
}

// Mixture proposal for the relative coordinates of an interior edge: a ball around the
// collision point with uniform radius (density ∝ 1/r², matching the angular singularity), a
// box over the azimuth blend zone, and the channel strip.
class EyeProposal {
 public:
  explicit EyeProposal(const PropagatorParams& prm) : rb_(prm.r1), half_(prm.r1), eps_(prm.eps) {}

  EyePoint draw(std::mt19937_64& rng) const {
    const double c = uniform01(rng);
    if (c < kBall) {
      const double r = rb_ * uniform01(rng), z = 2 * uniform01(rng) - 1, ph = 2 * std::numbers::pi * uniform01(rng);
      const double sxy = std::sqrt(std::max(0.0, 1 - z * z));
      return {r * z, r * sxy * std::cos(ph), 1 + r * sxy * std::sin(ph)};
    }
    if (c < kBall + kBox)
      return {2 * uniform01(rng) - 1, half_ * (2 * uniform01(rng) - 1), 1 + half_ * (2 * uniform01(rng) - 1)};
    return {2 * uniform01(rng) - 1, eps_ * (2 * uniform01(rng) - 1), uniform01(rng)};
  }

  double density(const EyePoint& e) const {
    double d = 0;
    const double r2 = e[0] * e[0] + e[1] * e[1] + (e[2] - 1) * (e[2] - 1);
    if (r2 < rb_ * rb_) d += kBall / (4 * std::numbers::pi * r2 * rb_);
    const bool in_x = std::abs(e[0]) < 1;
    if (in_x && std::abs(e[1]) < half_ && std::abs(e[2] - 1) < half_) d += kBox / (8 * half_ * half_);
    if (in_x && std::abs(e[1]) < eps_ && e[2] < 1) d += kStrip / (4 * eps_);
    return d;
  }

 private:
  static constexpr double kBall = 0.4, kBox = 0.3, kStrip = 0.3;
  double rb_, half_, eps_;
};

constexpr double kLogScaleLambda = 1.0;
constexpr double kScaleXY = 1.0;

class Sampler {
 public:
  Sampler(const AdmissibleGraph& shape, const PropagatorParams& prm, int root, std::vector<Step> plan)
      : g_(shape), form_(shape, prm, root), eye_(prm), plan_(std::move(plan)), root_(root) {}

  BlockSum run_block(std::uint64_t seed, long long count) {
    std::mt19937_64 rng(seed);
    BlockSum bs;
    std::vector<double> p(static_cast<std::size_t>(g_.m)), q(static_cast<std::size_t>(g_.n));
    std::vector<InnerPoint> t(static_cast<std::size_t>(g_.s));
    for (long long i = 0; i < count; ++i) {
      const double v = one_sample(rng, p, q, t);
      if (!std::isfinite(v)) {
        ++bs.nonfinite;
        continue;
      }
      bs.sum += v;
      bs.sumsq += v * v;
    }
    return bs;
  }

 private:
  double one_sample(std::mt19937_64& rng, std::vector<double>& p, std::vector<double>& q, std::vector<InnerPoint>& t) {
    t[static_cast<std::size_t>(root_)] = {0, 0, 1};
    double dens = 1;
    // Draw every vertex even after an early rejection so the stream stays aligned per sample.
    for (const Step& st : plan_) {
      switch (st.kind) {
        case StepKind::LowerFromInner: {
          const InnerPoint& a = t[static_cast<std::size_t>(st.parent)];
          p[static_cast<std::size_t>(st.child)] = a[0] + a[2] * (2 * uniform01(rng) - 1);
          dens *= 0.5 / a[2];
          break;
        }
        case StepKind::UpperFromInner: {
          const InnerPoint& a = t[static_cast<std::size_t>(st.parent)];
          q[static_cast<std::size_t>(st.child)] = a[1] + (2 * uniform01(rng) - 1) / a[2];
          dens *= 0.5 * a[2];
          break;
        }
        case StepKind::InnerForward: {
          const InnerPoint& v = t[static_cast<std::size_t>(st.parent)];
          const EyePoint e = eye_.draw(rng);
          t[static_cast<std::size_t>(st.child)] = {v[0] + v[2] * e[0], v[1] + e[1] / v[2], v[2] * e[2]};
          dens *= eye_.density(e) / v[2];
          break;
        }
        case StepKind::InnerBackward: {
          const InnerPoint& v = t[static_cast<std::size_t>(st.parent)];
          const EyePoint e = eye_.draw(rng);
          const double lw = v[2] / e[2];
          t[static_cast<std::size_t>(st.child)] = {v[0] - lw * e[0], v[1] - e[1] / lw, lw};
          dens *= eye_.density(e) * e[2] * e[2] / v[2];
          break;
        }
        case StepKind::InnerFromLower: {
          const double ll = logistic_draw(rng, kLogScaleLambda), y = logistic_draw(rng, kScaleXY);
          const double lw = std::exp(ll), X = 2 * uniform01(rng) - 1;
          t[static_cast<std::size_t>(st.child)] = {p[static_cast<std::size_t>(st.parent)] - lw * X, y, lw};
          dens *= logistic_density(ll, kLogScaleLambda) * logistic_density(y, kScaleXY) / (2 * lw * lw);
          break;
        }
        case StepKind::InnerFromUpper: {
          const double ll = logistic_draw(rng, kLogScaleLambda), x = logistic_draw(rng, kScaleXY);
          const double lw = std::exp(ll), Y = 2 * uniform01(rng) - 1;
          t[static_cast<std::size_t>(st.child)] = {x, q[static_cast<std::size_t>(st.parent)] - Y / lw, lw};
          dens *= logistic_density(ll, kLogScaleLambda) * logistic_density(x, kScaleXY) / 2;
          break;
        }
      }
    }
    for (std::size_t i = 1; i < p.size(); ++i)
      if (!(p[i - 1] < p[i])) return 0;
    for (std::size_t i = 1; i < q.size(); ++i)
      if (!(q[i - 1] < q[i])) return 0;
    if (!(dens > 0)) return 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (t[i] == t[j]) return std::nan("");
    return form_.density(p, q, t) / dens;
  }

  const AdmissibleGraph& g_;
  FormEvaluator form_;
  EyeProposal eye_;
  std::vector<Step> plan_;
  int root_;
};

}  // namespace

bool has_top_form(const AdmissibleGraph& g) {
  if (g.s == 0) return g.edges.empty() && g.m + g.n == 3;
  // A repeated inner edge wedges its 2-form with itself.
  std::vector<Edge> inner;
  for (const Edge& e : g.edges)
    if (e.is_inner()) inner.push_back(e);
  std::sort(inner.begin(), inner.end());
  if (std::adjacent_find(inner.begin(), inner.end()) != inner.end()) return false;
  std::vector<Step> plan;
  return top_degree(g) && spanning_plan(g, 0, plan);
}

WeightEstimate weight(const AdmissibleGraph& g, const PropagatorParams& prm, const McOptions& mc) {
  prm.validate();
  if (!validate(g).ok) throw ValidationError("weight: graph is not admissible");
  WeightEstimate est;
  est.seed = mc.seed;
  est.exact = true;
  if (g.s == 0) {
    est.value = g.edges.empty() && g.m + g.n == 3 ? 1.0 : 0.0;
    return est;
  }
  if (!top_degree(g)) return est;
  if (mc.root < 0 || mc.root >= g.s) throw ValidationError("weight: root out of range");
  const AdmissibleGraph shape = shape_of(g);
  std::vector<Step> plan;
  if (!spanning_plan(shape, mc.root, plan)) return est;  // the form has no top-degree part

  est.exact = false;
  const long long block = std::max(1, mc.block);
  const long long nblocks = (mc.samples + block - 1) / block;
  std::vector<BlockSum> sums(static_cast<std::size_t>(nblocks));
  std::atomic<long long> next{0};
  auto work = [&] {
    Sampler sampler(shape, prm, mc.root, plan);
    for (long long b; (b = next.fetch_add(1)) < nblocks;) {
      const long long count = std::min(block, mc.samples - b * block);
      sums[static_cast<std::size_t>(b)] = sampler.run_block(derived_seed(mc.seed, static_cast<std::uint64_t>(b)), count);
    }
  };
  const int workers = std::max(1, mc.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  BlockSum tot;
  for (const auto& b : sums) {
    tot.sum += b.sum;
    tot.sumsq += b.sumsq;
    tot.nonfinite += b.nonfinite;
  }
  const double n = static_cast<double>(mc.samples);
  const double mean = tot.sum / n;
  const double var = std::max(0.0, tot.sumsq / n - mean * mean);
  // Changing the fixed point permutes the chart coordinates; (-1)^root restores the t₁ orientation.
  const int sign = label_sign(g) * half_edge_sign(shape) * (mc.root % 2 ? -1 : 1);
  est.value = sign * mean;
  est.std_err = std::sqrt(var / std::max(1.0, n - 1));
  est.samples = mc.samples;
  est.nonfinite = tot.nonfinite;
  return est;
}

int orientation_sign(Orientation o, int m, int n, int s) {
  if (s == 0) return 1;
  switch (o) {
    case Orientation::Chart: return 1;
    case Orientation::OrbitFirst: return (m + n) % 2 ? -1 : 1;
    case Orientation::OrbitLast: return (m + n + s - 1) % 2 ? -1 : 1;
  }
  return 1;
}

std::string to_string(Orientation o) {
  switch (o) {
    case Orientation::Chart: return "chart";
    case Orientation::OrbitFirst: return "orbit-first";
    case Orientation::OrbitLast: return "orbit-last";
  }
  return "?";
}

Orientation parse_orientation(std::string_view text) {
  if (text == "chart") return Orientation::Chart;
  if (text == "orbit-first") return Orientation::OrbitFirst;
  if (text == "orbit-last") return Orientation::OrbitLast;
  throw ValidationError("unknown orientation: " + std::string(text));
}

std::vector<double> extrapolation_coefficients(std::span<const double> nodes) {
  std::vector<double> c(nodes.size(), 1.0);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (i != j) c[i] *= -nodes[j] / (nodes[i] - nodes[j]);
  return c;
}

WeightSchedule weight_schedule(const AdmissibleGraph& g, PropagatorParams prm, const McOptions& mc,
                               std::span<const double> eps_schedule) {
  if (eps_schedule.empty()) throw ValidationError("weight_schedule: empty schedule");
  WeightSchedule out;
  const auto coef = extrapolation_coefficients(eps_schedule);
  double var = 0;
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    prm.eps = eps_schedule[i];
    McOptions o = mc;
    o.seed = derived_seed(mc.seed, 0x100000000ULL + i);
    const WeightEstimate w = weight(g, prm, o);
    out.per_eps.push_back({prm.eps, w});
    out.extrapolated += coef[i] * w.value;
    var += coef[i] * coef[i] * w.std_err * w.std_err;
  }
  out.extrapolated_err = std::sqrt(var);
  return out;
}

}  // namespace biquant
