#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace biquant {

enum class VertexKind : std::uint8_t { Inner, Lower, Upper };

// Vertex of an admissible graph; index is 0-based within its kind.
struct Vertex {
  VertexKind kind = VertexKind::Inner;
  int index = 0;

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline Vertex inner(int k) { return {VertexKind::Inner, k}; }
inline Vertex lower(int k) { return {VertexKind::Lower, k}; }
inline Vertex upper(int k) { return {VertexKind::Upper, k}; }

std::string to_token(Vertex v);  // i1, d2, u1 (1-based)
Vertex parse_vertex(std::string_view token);

struct Edge {
  Vertex src;
  Vertex dst;

  bool is_inner() const { return src.kind == VertexKind::Inner && dst.kind == VertexKind::Inner; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Oriented graph with s inner vertices, m lower and n upper boundary vertices.
// star[k] / end[k] list the indices of edges leaving / entering inner vertex k in label order.
struct AdmissibleGraph {
  int s = 0;
  int m = 0;
  int n = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> star;
  std::vector<std::vector<int>> end;

  int inner_edge_count() const;
  int external_edge_count() const;
  int weighted_edge_count() const { return 2 * inner_edge_count() + external_edge_count(); }
  int valence(int k) const { return static_cast<int>(star[k].size() + end[k].size()); }

  // Labels in increasing edge order for every inner vertex.
  void assign_default_labels();

  friend bool operator==(const AdmissibleGraph&, const AdmissibleGraph&) = default;
};

struct ValidationReport {
  bool ok = true;
  std::string clause;  // empty when ok
  std::string detail;
};

ValidationReport validate(const AdmissibleGraph& g);

// Weighted edge count 2#inner + #external of a top-degree form on the configuration space.
int edge_budget(int m, int n, int s);

// Sorted edges with labels re-expressed; among relabelings of parallel inner edges the
// lexicographically smallest label data is chosen.
AdmissibleGraph canonicalize(const AdmissibleGraph& g);
std::string canonical_key(const AdmissibleGraph& g);

// All labeled admissible graphs with the given weighted edge count, sorted by canonical key.
std::vector<AdmissibleGraph> enumerate(int m, int n, int s, int budget);

std::string to_text(const AdmissibleGraph& g);
// Graphs separated by lines "---". Throws IoError on syntax, ValidationError on invalid graphs.
std::vector<AdmissibleGraph> parse_graphs(std::string_view text);
AdmissibleGraph parse_graph(std::string_view text);

// Corolla: one inner vertex with edges to lowers 1..a and from uppers 1..b.
AdmissibleGraph corolla(int a, int b);
// Edgeless graph with s = 0.
AdmissibleGraph edgeless(int m, int n);

}  // namespace biquant
