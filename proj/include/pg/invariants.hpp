#pragma once

#include "pg/cycles.hpp"
#include "pg/geometry.hpp"
#include "pg/lattice.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pg {

// Everything derived from the quotient cycles that the invariants need.
struct CycleGeometry {
  NuTable table;
  GrowthPolytope P;  // P.points[i] == table.entries[i].point
  std::vector<FacetTriangulation> tri;
};

CycleGeometry build_cycle_geometry(const PeriodicGraph& g, std::size_t cycle_cap = 10'000'000);

// Per facet and triangulation vertex v.
struct VertexInvariants {
  int facet = 0;
  RatVec v;
  std::vector<std::vector<int>> family;  // minimal half-space sets through v
  std::vector<int> support_set;          // union of the family
  int cpx = 1;
  std::map<int, int> m;  // point index -> m(u)
};

VertexInvariants compute_vertex_invariants(const CycleGeometry& geo, int facet, const RatVec& v);

// Smallest D >= 1 such that D c_u is a multiple of every d in Len(u) for all
// independent G within the support set with v = sum c_u u, c >= 0.
int compute_cpx(const CycleGeometry& geo, const RatVec& v, const std::vector<int>& support_set);
// ceil(cpx * max c_u) over the same decompositions containing u; 1 if none.
int compute_m(const CycleGeometry& geo, const RatVec& v, const std::vector<int>& support_set, int u, int cpx);
// Sum over u in F and d in Len(u) of m(u) + d (num(u, d) - 1).
int compute_sF(const CycleGeometry& geo, const std::vector<int>& F, const std::map<int, int>& m);

Rat compute_C1(const PeriodicGraph& g, int start, const GrowthPolytope& P, const LatticeOptions& opt = {});

struct C2Result {
  Rat value;
  int targets = 0;
  int max_walk = 0;
};
// Walks through every class to the lattice points of the half-open region
// spanned by d_v v over the vertex triangulations.
C2Result compute_C2_prime(const PeriodicGraph& g, int start, const CycleGeometry& geo, std::size_t state_cap = 400'000'000);

// One record per (facet, simplex, vertex, F).
struct HalfspaceRecord {
  std::vector<int> F;
  int s = 0;
  SupportCoefficients support;
  Rat alpha, alpha_prime;
};

struct SimplexVertexInvariants {
  int facet = 0;
  int simplex = 0;
  int vpos = 0;
  RatVec v;
  int cpx = 1;
  std::vector<HalfspaceRecord> records;
  Rat alpha, alpha_prime, beta, beta_prime;
};

struct SimplexInvariants {
  int facet = 0;
  int simplex = 0;
  Rat beta;  // sum of beta over the simplex vertices
};

struct InvariantReport {
  std::string name;
  int start = 0;
  int classes = 0;
  int W = 1;
  Rat epsilon;
  Rat C1, C2p;
  std::vector<VertexInvariants> vertices;
  std::vector<SimplexVertexInvariants> entries;
  std::vector<SimplexInvariants> simplices;
  Rat beta;
  std::int64_t cpx_gamma = 1;
  LcmResult R;
  int gamma = 0;
  std::optional<Rat> C2_exact;
  bool C2_exact_lower_bound = false;
  std::vector<std::string> notes;

  int R_degree() const { return R.cover.degree(); }
};

// alpha'^F = a/(1-a) (C1/h + C2' + (1-h)/h (s + W (c-1))); alpha^F uses s = 0.
Rat alpha_bound(const Rat& a, const Rat& h, const Rat& C1, const Rat& C2p, int s, int W, int classes);

InvariantReport assemble_report(const PeriodicGraph& g, int start, const CycleGeometry& geo, const Rat& epsilon,
                                const Rat& C1, const Rat& C2p);

// max (d - gauge) over vertices whose displacement lies in some cone(simplex)
// with every coordinate at most beta'; exact when the radius fits in memory.
void compute_C2_exact(const PeriodicGraph& g, const CycleGeometry& geo, InvariantReport& report,
                      const LatticeOptions& opt = {}, int radius_cap = 4000);

std::string render_report(const InvariantReport& r, const CycleGeometry& geo);
std::string report_json(const InvariantReport& r, const CycleGeometry& geo);

}  // namespace pg
