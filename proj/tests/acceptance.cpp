// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
// Exit status is non-zero when any criterion fails.
#include "biquant/big_bracket.hpp"
#include "biquant/graph_ops.hpp"
#include "biquant/gs_complex.hpp"
#include "biquant/propagator.hpp"
#include "biquant/quantize.hpp"
#include "biquant/weight_table.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace biquant;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.details.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("criterion %2d %s  %s  [%.1f s of %.0f s]\n", id, pass ? "PASS" : "FAIL", title, secs, budget_s);
  if (!in_time) std::printf("    over the runtime budget\n");
  for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
  std::fflush(stdout);
}

// ------------------------------------------------------------------ 1

Outcome operator_fidelity() {
  Outcome o{true, {}};
  std::mt19937_64 rng(101);
  int checks = 0;
  for (int d = 2; d <= 3; ++d) {
    auto check = [&](const char* what, const Cochain& got, const Cochain& want) {
      ++checks;
      if (!cochain_eq(got, want, 4)) {
        o.pass = false;
        o.details.push_back(fmt("d=%d %s differs", d, what));
      }
    };
    check("product", compile(edgeless(2, 1), {}, d), oracle::product(d));
    check("coproduct", compile(edgeless(1, 2), {}, d), oracle::coproduct(d));
    for (int t = 0; t < 3; ++t) {
      const StructTensor a = random_struct_tensor(2, 1, d, rng), b = random_struct_tensor(1, 2, d, rng);
      check("linear Poisson bracket", compile(corolla(2, 1), std::span(&a, 1), d), oracle::poisson(a));
      check("cobracket", compile(corolla(1, 2), std::span(&b, 1), d), oracle::cobracket(b));
    }
  }
  o.details.push_back(fmt("%d operator comparisons on all monomial tuples of degree <= 4, d = 2,3", checks));
  return o;
}

// ------------------------------------------------------------------ 2

Outcome gs_square() {
  Outcome o{true, {}};
  std::mt19937_64 rng(202);
  const int d = 2;
  int n_cochains = 0, nonzero = 0;
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; m + n <= 4; ++n)
      for (int s = 0; s <= 1; ++s)
        for (int b = 0; b <= m + n; ++b)
          for (const auto& g : enumerate(m, n, s, b)) {
            std::vector<StructTensor> ts;
            for (int k = 0; k < s; ++k)
              ts.push_back(random_struct_tensor(static_cast<int>(g.star[0].size()), static_cast<int>(g.end[0].size()), d, rng));
            const Cochain psi = compile(g, ts, d);
            const GsChain x{{{m, n}, psi}};
            ++n_cochains;
            nonzero += !is_zero(d_gs(d_gs(x)));
          }
  o.pass = nonzero == 0;
  o.details.push_back(fmt("%d graph-compiled cochains (m+n <= 4, s <= 1), d^2 != 0 on %d", n_cochains, nonzero));
  return o;
}

// ------------------------------------------------------------------ 3

Outcome fraction_compat() {
  Outcome o{true, {}};
  for (int d = 2; d <= 3; ++d) {
    const Cochain ps[] = {Cochain::product(d), Cochain::product(d)};
    const Cochain th[] = {Cochain::coproduct(d), Cochain::coproduct(d)};
    const bool eq = cochain_eq(fraction(ps, th), oracle::coproduct_of_product(d), 4);
    o.pass = o.pass && eq;
    o.details.push_back(fmt("d=%d: fraction([mul,mul],[coprod,coprod]) %s coprod(f g) on degree <= 4", d, eq ? "==" : "!="));
  }
  return o;
}

// ------------------------------------------------------------------ 4

Outcome big_bracket_equivalences() {
  Outcome o{true, {}};
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> den(1, 4), coin(0, 3);
  // counts[axiom][holds]
  int counts[3][2] = {};
  int mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const int d = 2 + t % 2;
    StructTensor a, b;
    if (coin(rng) == 0) {
      // A genuine bialgebra, rescaled: [e1,e2] = e2, δ(e2) = e1∧e2 (plus an inert e3 in d = 3).
      a = StructTensor(2, 1, d);
      b = StructTensor(1, 2, d);
      const int i12[] = {0, 1}, o2[] = {1}, i2[] = {1};
      a.set_antisym(i12, o2, Rational(1, den(rng)));
      b.set_antisym(i2, i12, Rational(1, den(rng)));
    } else {
      a = random_struct_tensor(2, 1, d, rng, 2, 0.35) * Rational(1, den(rng));
      b = random_struct_tensor(1, 2, d, rng, 2, 0.35) * Rational(1, den(rng));
    }
    const auto r = is_lie_bialgebra(a, b);
    const bool want[3] = {oracle::jacobi(a), oracle::cojacobi(b), oracle::cocycle(a, b)};
    const bool got[3] = {r.jacobi.bracket_zero, r.cojacobi.bracket_zero, r.cocycle.bracket_zero};
    for (int k = 0; k < 3; ++k) {
      ++counts[k][want[k]];
      if (want[k] != got[k]) ++mismatches;
    }
  }
  const auto r = is_lie_bialgebra(example_bracket_2d(), example_cobracket_2d());
  const bool example = r.jacobi.bracket_zero && r.cojacobi.bracket_zero && r.cocycle.bracket_zero;
  // Each equivalence must have been exercised on both sides.
  bool both = true;
  for (auto& c : counts) both = both && c[0] > 0 && c[1] > 0;
  o.pass = mismatches == 0 && example && both;
  o.details.push_back(fmt("100 random rational pairs, d = 2,3: %d disagreements with the index-formula oracles", mismatches));
  o.details.push_back(fmt("holds/fails seen: jacobi %d/%d, co-jacobi %d/%d, cocycle %d/%d", counts[0][1], counts[0][0],
                          counts[1][1], counts[1][0], counts[2][1], counts[2][0]));
  o.details.push_back(std::string("2-dim example passes all three: ") + (example ? "yes" : "no"));
  return o;
}

// ------------------------------------------------------------------ 5

Outcome degree_defect() {
  Outcome o{true, {}};
  std::string zeros;
  for (int m1 = 0; m1 <= 4; ++m1)
    for (int n1 = 0; n1 <= 4; ++n1) {
      const int D = fraction_degree_defect(m1, n1, 1, 1);
      if (D != 2 * m1 * n1 - m1 - n1) o.pass = false;
      if (D == 0) zeros += fmt(" (%d,%d)", m1, n1);
    }
  o.pass = o.pass && zeros == " (0,0) (1,1)";
  o.details.push_back("defect zero exactly at" + zeros + " on the grid m1,n1 <= 4");
  return o;
}

// ------------------------------------------------------------------ 6

Outcome propagator_certificate() {
  Outcome o{true, {}};
  const PropagatorParams base;
  for (double eps : {0.1, 0.05, 0.025}) {
    PropagatorParams p = base;
    p.eps = eps;
    const auto c = certify(p, 1e-3, 2000);  // dense enough to sample the narrow channels
    const bool mass = std::abs(c.sphere_mass - 1) <= 1e-3, face = c.face_max <= 1e-6, profile = c.channel_profile_err <= 0.02;
    const bool closed = c.closedness_max <= 1e-4;
    const bool certified = eps == base.eps;  // closedness is certified at the profile's own ε
    o.pass = o.pass && mass && face && profile && (closed || !certified);
    o.details.push_back(fmt("eps %.3g: sphere mass %.6f, faces %.1e, closedness %.1e%s, channel profile err %.2e%%", eps,
                            c.sphere_mass, c.face_max, c.closedness_max,
                            closed ? "" : (certified ? " (FAIL)" : " (informational, stencil truncation)"),
                            100 * c.channel_profile_err));
  }
  return o;
}

// ------------------------------------------------------------------ 7

bool has_low_valence(const AdmissibleGraph& g) {
  for (int k = 0; k < g.s; ++k)
    if (g.valence(k) <= 2) return true;
  return false;
}

Outcome low_valence_vanishing() {
  Outcome o{true, {}};
  const PropagatorParams prm;
  std::set<std::string> seen;
  int graphs = 0, nonvanishing = 0, structural = 0;
  double worst_z = 0;
  std::string worst;
  for (const auto [m, n, s] : {std::tuple{2, 1, 1}, {1, 2, 1}, {2, 1, 2}}) {
    int here = 0;
    for (const auto& g : enumerate(m, n, s, edge_budget(m, n, s))) {
      if (!has_low_valence(g)) continue;
      ++graphs;
      ++here;
      const std::string key = shape_key(g);
      if (!seen.insert(key).second) continue;  // relabelings share the weight up to sign
      if (!has_top_form(shape_of(g))) {
        ++structural;
        continue;
      }
      bool bad = false;
      std::string line = "shape " + key + ":";
      for (std::uint64_t seed : {11u, 12u}) {
        McOptions mc;
        mc.samples = 1'000'000;
        mc.seed = seed;
        const auto w = weight(shape_of(g), prm, mc);
        const double z = w.std_err > 0 ? std::abs(w.value) / w.std_err : (w.value == 0 ? 0 : INFINITY);
        line += fmt(" seed %d %.5f +- %.5f (%.1f sigma)", static_cast<int>(seed), w.value, w.std_err, z);
        if (z > 3) bad = true;
        if (z > worst_z) {
          worst_z = z;
          worst = key;
        }
      }
      nonvanishing += bad;
      if (bad) o.details.push_back(line);
    }
    o.details.push_back(fmt("(m,n,s) = (%d,%d,%d): %d labeled graphs with an interior vertex of valence <= 2", m, n, s, here));
  }
  o.pass = nonvanishing == 0;
  o.details.push_back(fmt("%d graphs, %zu shapes, %d structurally zero, %d shapes with |w| > 3 stderr (largest %.1f sigma)",
                          graphs, seen.size(), structural, nonvanishing, worst_z));
  if (!o.pass)
    o.details.push_back("the valence-2 vanishing argument uses round-sphere forms on C_n(R^d); on the half-space with the"
                        " boundary-adapted propagator these weights are non-zero, and order-(2,0) associativity needs them");
  return o;
}

// ------------------------------------------------------------------ 8

Outcome first_order_exact() {
  Outcome o{true, {}};
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  const auto S = build_star(a, b, {1, 1}), C = build_costar(a, b, {1, 1});
  for (Axiom ax : {Axiom::Associativity, Axiom::Coassociativity, Axiom::Compatibility})
    for (Order ord : {Order{1, 0}, Order{0, 1}}) {
      const Defect d = axiom_defect(ax, S, C, ord, 3);
      o.pass = o.pass && d.value.empty();
      o.details.push_back(fmt("%s (%d,%d): %s", to_string(ax).c_str(), ord.first, ord.second,
                              d.value.empty() ? "symbolically zero" : "NON-ZERO"));
    }
  return o;
}

// ------------------------------------------------------------------ 9

Outcome compat_11() {
  Outcome o{true, {}};
  const auto a = example_bracket_2d(), b = example_cobracket_2d();
  const auto S = build_star(a, b, {1, 1}), C = build_costar(a, b, {1, 1});
  const Defect d = axiom_defect(Axiom::Compatibility, S, C, {1, 1}, 2);
  std::set<std::string> keyset;
  bool homogeneous = true;
  for (const auto& [mono, comps] : d.value) {
    homogeneous = homogeneous && mono.size() == 1;
    for (const auto& k : mono) keyset.insert(k);
  }
  std::vector<AdmissibleGraph> graphs;
  for (const auto* s : {&S, &C})
    for (const auto& [k, g] : s->shapes)
      if (keyset.count(k)) graphs.push_back(g);

  McOptions mc;
  mc.samples = 1'000'000;
  mc.seed = 9;
  const std::vector<double> sched{0.1, 0.05, 0.025};
  const auto table = compute_weight_table(graphs, PropagatorParams{}, mc, sched, nullptr);
  const std::vector<std::string> keys(keyset.begin(), keyset.end());

  o.details.push_back(fmt("%zu weight symbols, defect on all monomial pairs of degree <= 2", keys.size()));
  std::vector<double> residuals;
  double finest_z = 0;
  bool finest_ok = false;
  for (double eps : {0.1, 0.05, 0.025, 0.0}) {
    const auto r = evaluate(d, weights_at(table, eps, keys));
    const double z = r.sigma > 0 ? r.residual / r.sigma : 0;
    o.details.push_back(fmt("eps %-12s residual %.4g  sigma %.4g  residual/sigma %.2f  max |z| %.2f  %s",
                            eps == 0 ? "extrapolated" : fmt("%.3g", eps).c_str(), r.residual, r.sigma, z, r.max_z,
                            to_string(r.verdict).c_str()));
    if (eps > 0) residuals.push_back(r.residual);
    if (eps == 0.025) {
      finest_z = z;
      finest_ok = r.verdict != Verdict::Violation;
    }
  }
  const bool monotone = residuals[0] >= residuals[1] && residuals[1] >= residuals[2];
  o.details.push_back(std::string("per-eps residual trend ") + (monotone ? "monotone toward zero" : "not monotone"));
  if (finest_z > 5) o.details.push_back("violation beyond 5 sigma at the finest eps");
  o.details.push_back(std::string("defect homogeneous of degree 1 in the order-(1,1) weights: ") + (homogeneous ? "yes" : "no") +
                      (homogeneous ? "; a rescaling c of order (1,1) multiplies it by c, so no rescaling is singled out and"
                                     " the literal 1/(l1! l2!) is kept"
                                   : ""));
  o.pass = finest_ok && monotone;
  return o;
}

// ------------------------------------------------------------------ 10

std::string slurp(const fs::path& p) { return read_text_file(p); }

Outcome cli_determinism(const std::string& cli) {
  Outcome o{true, {}};
  const fs::path dir = fs::temp_directory_path() / "biquant-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ::unsetenv("BIQUANT_CACHE_DIR");
  write_text_file(dir / "t.txt", "gamma 1 : 2 1\n1 2 ; 2 = 1\ngamma 2 : 1 2\n2 ; 1 2 = 1\n");
  write_text_file(dir / "one.txt", to_text(corolla(2, 1)));
  write_text_file(dir / "two.txt", to_text(corolla(2, 1)) + "---\n" + to_text(corolla(2, 2)));
  const std::string t = (dir / "t.txt").string(), g = (dir / "one.txt").string(), g2 = (dir / "two.txt").string();

  struct Case {
    std::string name, a, b;  // two command lines whose outputs must agree
  };
  const std::vector<Case> cases = {
      {"graphs enumerate", "graphs enumerate --m 2 --n 1 --s 2 --budget 6", "graphs enumerate --m 2 --n 1 --s 2 --budget 6"},
      {"op compile", "op compile --graph " + g + " --tensors " + t + " --dim 2",
       "op compile --graph " + g + " --tensors " + t + " --dim 2"},
      {"gs d2check", "gs d2check --arity 2 1 --samples 3 --seed 5", "gs d2check --arity 2 1 --samples 3 --seed 5"},
      {"bialg check", "bialg check --tensors " + t + " --dim 2", "bialg check --tensors " + t + " --dim 2"},
      {"weight (workers 1 vs 3)", "weight --graph " + g2 + " --samples 30000 --seed 4 --workers 1",
       "weight --graph " + g2 + " --samples 30000 --seed 4 --workers 3"},
      {"quantize (workers 1 vs 3)", "quantize --tensors " + t + " --dim 2 --caps 1 1 --samples 20000 --seed 4 --workers 1",
       "quantize --tensors " + t + " --dim 2 --caps 1 1 --samples 20000 --seed 4 --workers 3"},
      {"verify-propagator", "verify-propagator --eps-schedule 0.1", "verify-propagator --eps-schedule 0.1"},
  };
  int i = 0;
  for (const auto& c : cases) {
    std::string outs[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / fmt("out-%d-%d.txt", i, k);
      const std::string cmd = "\"" + cli + "\" " + (k ? c.b : c.a) + " > \"" + out.string() + "\" 2>&1";
      codes[k] = std::system(cmd.c_str());
      outs[k] = slurp(out);
    }
    const bool same = outs[0] == outs[1] && !outs[0].empty();
    o.pass = o.pass && same && codes[0] == 0 && codes[1] == 0;
    o.details.push_back(fmt("%-26s %s, %zu bytes, exit %d", c.name.c_str(), same ? "identical" : "DIFFERENT", outs[0].size(),
                            codes[0]));
    ++i;
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path to biquant>\n");
    return 2;
  }
  const std::string cli = argv[1];
  run(1, "graph operators reproduce product, coproduct, bracket, cobracket", 10, operator_fidelity);
  run(2, "GS differential squares to zero on compiled cochains", 120, gs_square);
  run(3, "fraction of products and coproducts is the coproduct of a product", 60, fraction_compat);
  run(4, "big bracket equivalences", 60, big_bracket_equivalences);
  run(5, "degree defect table", 1, degree_defect);
  run(6, "propagator certificate", 300, propagator_certificate);
  run(7, "weights of graphs with an interior vertex of valence <= 2 vanish", 1800, low_valence_vanishing);
  run(8, "first-order axioms hold symbolically", 60, first_order_exact);
  run(9, "order-(1,1) compatibility within 3 sigma", 7200, compat_11);
  run(10, "CLI artifacts are byte-identical across reruns and worker counts", 600, [&] { return cli_determinism(cli); });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
