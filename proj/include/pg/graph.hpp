#pragma once

#include "pg/exact.hpp"

#include <string>
#include <vector>

namespace pg {

// Edge from (from, 0) to (to, shift) with a positive integer weight.
struct LabeledEdge {
  int from = 0;
  int to = 0;
  IVec shift;
  int weight = 1;

  bool operator==(const LabeledEdge& o) const {
    return from == o.from && to == o.to && shift == o.shift && weight == o.weight;
  }
};

struct Vertex {
  int cls = 0;
  IVec offset;
};

struct PeriodicGraph {
  std::string name;
  int dim = 0;
  int classes = 0;
  bool undirected = false;
  std::vector<LabeledEdge> edges;
  std::vector<RatVec> pos;

  // Out-edge ids per class.
  std::vector<std::vector<int>> out_edges() const;
  int max_weight() const;
  RatVec realize(const Vertex& x) const { return pos[static_cast<std::size_t>(x.cls)] + to_rat(x.offset); }
};

bool operator==(const PeriodicGraph& a, const PeriodicGraph& b);

// Canonical structured document (see README for the schema).
PeriodicGraph parse_graph(const std::string& document);
// Assignment style: dim=..., c=..., edges=[[(j,(s1,s2)),...],...], pos=[...].
PeriodicGraph parse_assignment_graph(const std::string& document);
// Dispatches on the first non-blank character.
PeriodicGraph load_graph(const std::string& path);
std::string render_graph(const PeriodicGraph& g);

// Closes the edge multiset under reversal; idempotent.
PeriodicGraph symmetrize(const PeriodicGraph& g);

bool quotient_strongly_connected(const PeriodicGraph& g);

// Index of the lattice generated by the translation parts of closed walks;
// 1 means every lattice translate of a vertex is reachable as a group element.
BigInt cycle_lattice_index(const PeriodicGraph& g);

struct ValidationReport {
  bool quotient_strongly_connected = false;
  bool zero_in_interior = false;
  BigInt cycle_lattice_index = 0;
  int max_weight = 0;
  std::vector<std::string> warnings;

  bool accepted() const { return quotient_strongly_connected && zero_in_interior && cycle_lattice_index == 1; }
};

ValidationReport validate_graph(const PeriodicGraph& g);

}  // namespace pg
