#include "biquant/graph.hpp"

#include "biquant/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace biquant {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

int parse_index(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw IoError("bad token '" + std::string(whole) + "'");
  int v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw IoError("bad token '" + std::string(whole) + "'");
    v = v * 10 + (c - '0');
    if (v > 1000000) throw IoError("index too large in '" + std::string(whole) + "'");
  }
  if (v < 1) throw IoError("indices are 1-based in '" + std::string(whole) + "'");
  return v - 1;
}

}  // namespace

std::string to_token(Vertex v) {
  const char c = v.kind == VertexKind::Inner ? 'i' : v.kind == VertexKind::Lower ? 'd' : 'u';
  return c + std::to_string(v.index + 1);
}

Vertex parse_vertex(std::string_view token) {
  if (token.empty()) throw IoError("empty vertex token");
  VertexKind kind;
  switch (token.front()) {
    case 'i': kind = VertexKind::Inner; break;
    case 'd': kind = VertexKind::Lower; break;
    case 'u': kind = VertexKind::Upper; break;
    default: throw IoError("unknown vertex token '" + std::string(token) + "'");
  }
  return {kind, parse_index(token.substr(1), token)};
}

int AdmissibleGraph::inner_edge_count() const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.is_inner(); }));
}

int AdmissibleGraph::external_edge_count() const {
  return static_cast<int>(edges.size()) - inner_edge_count();
}

void AdmissibleGraph::assign_default_labels() {
  star.assign(static_cast<std::size_t>(s), {});
  end.assign(static_cast<std::size_t>(s), {});
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const Edge& ed = edges[static_cast<std::size_t>(e)];
    if (ed.src.kind == VertexKind::Inner && ed.src.index < s) star[static_cast<std::size_t>(ed.src.index)].push_back(e);
    if (ed.dst.kind == VertexKind::Inner && ed.dst.index < s) end[static_cast<std::size_t>(ed.dst.index)].push_back(e);
  }
}

ValidationReport validate(const AdmissibleGraph& g) {
  auto fail = [](std::string clause, std::string detail) { return ValidationReport{false, std::move(clause), std::move(detail)}; };
  if (g.s < 0 || g.m < 0 || g.n < 0) return fail("vertex-count", "negative vertex count");
  if (3 * g.s + g.m + g.n < 3) return fail("vertex-count", "3s+m+n < 3");
  auto in_range = [&](Vertex v) {
    const int lim = v.kind == VertexKind::Inner ? g.s : v.kind == VertexKind::Lower ? g.m : g.n;
    return v.index >= 0 && v.index < lim;
  };
  std::set<Edge> external;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& ed = g.edges[e];
    const std::string name = "edge " + std::to_string(e + 1) + " (" + to_token(ed.src) + " " + to_token(ed.dst) + ")";
    if (!in_range(ed.src) || !in_range(ed.dst)) return fail("vertex-range", name + " uses a missing vertex");
    if (ed.src.kind != VertexKind::Inner && ed.dst.kind != VertexKind::Inner)
      return fail("second-type-edge", name + " joins two boundary vertices");
    if (ed.src.kind == VertexKind::Lower || ed.dst.kind == VertexKind::Upper)
      return fail("orientation", name + " must start at an inner or upper vertex and end at an inner or lower vertex");
    if (ed.src == ed.dst) return fail("loop", name + " is a loop");
    if (!ed.is_inner() && !external.insert(ed).second)
      return fail("multiple-external-edge", name + " repeats an external edge");
  }
  if (static_cast<int>(g.star.size()) != g.s || static_cast<int>(g.end.size()) != g.s)
    return fail("labels", "label blocks do not match the inner vertex count");
  for (int k = 0; k < g.s; ++k) {
    std::vector<int> want_star, want_end;
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
      if (g.edges[static_cast<std::size_t>(e)].src == inner(k)) want_star.push_back(e);
      if (g.edges[static_cast<std::size_t>(e)].dst == inner(k)) want_end.push_back(e);
    }
    auto sorted = [](std::vector<int> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    if (sorted(g.star[static_cast<std::size_t>(k)]) != want_star)
      return fail("labels", "star labels of i" + std::to_string(k + 1) + " are not a permutation of its outgoing edges");
    if (sorted(g.end[static_cast<std::size_t>(k)]) != want_end)
      return fail("labels", "end labels of i" + std::to_string(k + 1) + " are not a permutation of its incoming edges");
  }
  return {};
}

int edge_budget(int m, int n, int s) {
  if (3 * s + m + n < 3) throw ValidationError("edge_budget needs 3s+m+n >= 3");
  return m + n + 3 * s - 3;
}

namespace {

std::string key_of_sorted(const AdmissibleGraph& g) {
  std::string k = std::to_string(g.s) + "," + std::to_string(g.m) + "," + std::to_string(g.n) + ";";
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (e) k += ",";
    k += to_token(g.edges[e].src) + ">" + to_token(g.edges[e].dst);
  }
  auto list = [](const std::vector<int>& v) {
    std::string r;
    for (std::size_t i = 0; i < v.size(); ++i) r += (i ? "." : "") + std::to_string(v[i] + 1);
    return r;
  };
  for (int v = 0; v < g.s; ++v) k += ";S" + std::to_string(v + 1) + ":" + list(g.star[static_cast<std::size_t>(v)]);
  for (int v = 0; v < g.s; ++v) k += ";E" + std::to_string(v + 1) + ":" + list(g.end[static_cast<std::size_t>(v)]);
  return k;
}

}  // namespace

AdmissibleGraph canonicalize(const AdmissibleGraph& g) {
  const auto report = validate(g);
  if (!report.ok) throw ValidationError("canonicalize: " + report.clause + ": " + report.detail);
  const std::size_t E = g.edges.size();
  std::vector<int> order(E);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g.edges[static_cast<std::size_t>(a)] < g.edges[static_cast<std::size_t>(b)]; });
  // pos[old] = new index; parallel groups may be permuted among themselves.
  std::vector<int> pos(E);
  for (std::size_t i = 0; i < E; ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  AdmissibleGraph c;
  c.s = g.s;
  c.m = g.m;
  c.n = g.n;
  for (int o : order) c.edges.push_back(g.edges[static_cast<std::size_t>(o)]);

  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end) in new order
  for (std::size_t i = 0; i < E;) {
    std::size_t j = i + 1;
    while (j < E && c.edges[j] == c.edges[i]) ++j;
    if (j - i > 1) groups.emplace_back(i, j);
    i = j;
  }
  std::vector<int> perm(E);
  std::iota(perm.begin(), perm.end(), 0);  // perm applied to new indices within groups
  std::string best;
  AdmissibleGraph best_graph;
  auto emit = [&] {
    AdmissibleGraph t = c;
    t.star.assign(static_cast<std::size_t>(g.s), {});
    t.end.assign(static_cast<std::size_t>(g.s), {});
    for (int v = 0; v < g.s; ++v) {
      for (int e : g.star[static_cast<std::size_t>(v)]) t.star[static_cast<std::size_t>(v)].push_back(perm[static_cast<std::size_t>(pos[static_cast<std::size_t>(e)])]);
      for (int e : g.end[static_cast<std::size_t>(v)]) t.end[static_cast<std::size_t>(v)].push_back(perm[static_cast<std::size_t>(pos[static_cast<std::size_t>(e)])]);
    }
    std::string k = key_of_sorted(t);
    if (best.empty() || k < best) {
      best = std::move(k);
      best_graph = std::move(t);
    }
  };
  auto rec = [&](auto& self, std::size_t gi) -> void {
    if (gi == groups.size()) {
      emit();
      return;
    }
    auto [b, e] = groups[gi];
    std::sort(perm.begin() + static_cast<std::ptrdiff_t>(b), perm.begin() + static_cast<std::ptrdiff_t>(e));
    do {
      self(self, gi + 1);
    } while (std::next_permutation(perm.begin() + static_cast<std::ptrdiff_t>(b), perm.begin() + static_cast<std::ptrdiff_t>(e)));
  };
  rec(rec, 0);
  return best_graph;
}

std::string canonical_key(const AdmissibleGraph& g) { return key_of_sorted(canonicalize(g)); }

std::vector<AdmissibleGraph> enumerate(int m, int n, int s, int budget) {
  std::vector<AdmissibleGraph> out;
  if (m < 0 || n < 0 || s < 0 || budget < 0 || 3 * s + m + n < 3) return out;
  std::vector<Edge> ext;
  for (int k = 0; k < s; ++k) {
    for (int j = 0; j < m; ++j) ext.push_back({inner(k), lower(j)});
    for (int j = 0; j < n; ++j) ext.push_back({upper(j), inner(k)});
  }
  std::vector<Edge> inn;
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l)
      if (k != l) inn.push_back({inner(k), inner(l)});

  std::map<std::string, AdmissibleGraph> found;
  std::vector<Edge> chosen;
  auto label_all = [&] {
    AdmissibleGraph g;
    g.s = s;
    g.m = m;
    g.n = n;
    g.edges = chosen;
    std::sort(g.edges.begin(), g.edges.end());
    g.assign_default_labels();
    // Iterate over all star/end orderings of every inner vertex.
    std::vector<std::vector<int>*> blocks;
    for (int k = 0; k < s; ++k) {
      blocks.push_back(&g.star[static_cast<std::size_t>(k)]);
      blocks.push_back(&g.end[static_cast<std::size_t>(k)]);
    }
    auto rec = [&](auto& self, std::size_t bi) -> void {
      if (bi == blocks.size()) {
        AdmissibleGraph c = canonicalize(g);
        found.emplace(key_of_sorted(c), std::move(c));
        return;
      }
      auto& blk = *blocks[bi];
      std::sort(blk.begin(), blk.end());
      do {
        self(self, bi + 1);
      } while (std::next_permutation(blk.begin(), blk.end()));
    };
    rec(rec, 0);
  };
  auto choose_inner = [&](auto& self, std::size_t i, int left) -> void {
    if (i == inn.size()) {
      if (left == 0) label_all();
      return;
    }
    for (int mult = 0; 2 * mult <= left; ++mult) {
      for (int r = 0; r < mult; ++r) chosen.push_back(inn[i]);
      self(self, i + 1, left - 2 * mult);
      for (int r = 0; r < mult; ++r) chosen.pop_back();
    }
  };
  auto choose_ext = [&](auto& self, std::size_t i, int left) -> void {
    if (left < 0) return;
    if (i == ext.size()) {
      choose_inner(choose_inner, 0, left);
      return;
    }
    self(self, i + 1, left);
    chosen.push_back(ext[i]);
    self(self, i + 1, left - 1);
    chosen.pop_back();
  };
  choose_ext(choose_ext, 0, budget);
  out.reserve(found.size());
  for (auto& [k, g] : found) out.push_back(std::move(g));
  return out;
}

std::string to_text(const AdmissibleGraph& g) {
  std::string t = std::to_string(g.s) + " " + std::to_string(g.m) + " " + std::to_string(g.n) + "\n";
  for (const auto& e : g.edges) t += to_token(e.src) + " " + to_token(e.dst) + "\n";
  auto block = [&](const char* name, const std::vector<std::vector<int>>& lab) {
    for (std::size_t k = 0; k < lab.size(); ++k) {
      t += std::string(name) + " i" + std::to_string(k + 1) + ":";
      for (int e : lab[k]) t += " e" + std::to_string(e + 1);
      t += "\n";
    }
  };
  block("star", g.star);
  block("end", g.end);
  return t;
}

namespace {

AdmissibleGraph parse_one(const std::vector<std::string_view>& lines) {
  AdmissibleGraph g;
  auto head = words(lines.front());
  if (head.size() != 3) throw IoError("graph header must be 's m n'");
  try {
    g.s = std::stoi(head[0]);
    g.m = std::stoi(head[1]);
    g.n = std::stoi(head[2]);
  } catch (const std::exception&) {
    throw IoError("graph header must be three integers");
  }
  if (g.s < 0 || g.m < 0 || g.n < 0 || g.s > 64 || g.m > 64 || g.n > 64) throw IoError("graph header out of range");
  std::vector<std::pair<std::string, std::string>> label_lines;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto w = words(lines[i]);
    if (w.empty()) continue;
    if (w[0] == "star" || w[0] == "end") {
      const auto colon = lines[i].find(':');
      if (colon == std::string_view::npos) throw IoError("label line without ':'");
      label_lines.emplace_back(std::string(trim(lines[i].substr(0, colon))), std::string(lines[i].substr(colon + 1)));
      continue;
    }
    if (w.size() != 2) throw IoError("edge line must be 'src dst': '" + std::string(lines[i]) + "'");
    g.edges.push_back({parse_vertex(w[0]), parse_vertex(w[1])});
  }
  g.assign_default_labels();
  for (const auto& [head_part, rest] : label_lines) {
    auto hw = words(head_part);
    if (hw.size() != 2) throw IoError("label line must be 'star i<k>: ...'");
    const Vertex v = parse_vertex(hw[1]);
    if (v.kind != VertexKind::Inner || v.index >= g.s) throw ValidationError("label block for missing inner vertex " + hw[1]);
    std::vector<int> lab;
    for (const auto& tok : words(rest)) {
      if (tok.size() < 2 || tok[0] != 'e') throw IoError("edge reference must be e<k>: '" + tok + "'");
      lab.push_back(parse_index(std::string_view(tok).substr(1), tok));
    }
    (hw[0] == "star" ? g.star : g.end)[static_cast<std::size_t>(v.index)] = std::move(lab);
  }
  const auto report = validate(g);
  if (!report.ok) throw ValidationError(report.clause + ": " + report.detail);
  return g;
}

}  // namespace

std::vector<AdmissibleGraph> parse_graphs(std::string_view text) {
  std::vector<AdmissibleGraph> out;
  std::vector<std::string_view> cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(parse_one(cur));
    cur.clear();
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != '\n') continue;
    auto line = trim(text.substr(start, i - start));
    start = i + 1;
    if (!line.empty() && line.front() == '#') continue;
    if (line == "---") {
      flush();
      continue;
    }
    if (line.empty()) continue;
    cur.push_back(line);
  }
  flush();
  return out;
}

AdmissibleGraph parse_graph(std::string_view text) {
  auto gs = parse_graphs(text);
  if (gs.size() != 1) throw IoError("expected exactly one graph, found " + std::to_string(gs.size()));
  return gs.front();
}

AdmissibleGraph corolla(int a, int b) {
  AdmissibleGraph g;
  g.s = 1;
  g.m = a;
  g.n = b;
  for (int j = 0; j < a; ++j) g.edges.push_back({inner(0), lower(j)});
  for (int j = 0; j < b; ++j) g.edges.push_back({upper(j), inner(0)});
  g.assign_default_labels();
  return g;
}

AdmissibleGraph edgeless(int m, int n) {
  AdmissibleGraph g;
  g.m = m;
  g.n = n;
  return g;
}

}  // namespace biquant
