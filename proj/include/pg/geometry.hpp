#pragma once

#include "pg/exact.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pg {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Facet {x : <normal, x> = 1} of a polytope contained in {<normal, x> <= 1}.
struct Facet {
  RatVec normal;
  // Im(nu) on the facet, as indices into GrowthPolytope::points. In dimension 2
  // they are ordered along the edge from vertices[0] to vertices[1].
  std::vector<int> points;
  // V(facet); in dimension 3 in cyclic order.
  std::vector<int> vertices;
};

struct GrowthPolytope {
  int dim = 0;
  std::vector<RatVec> points;
  std::vector<int> vertices;
  std::vector<Facet> facets;

  Rat gauge(const RatVec& y) const;
  bool contains(const RatVec& y) const { return gauge(y) <= 1; }
};

// Hull of points and the origin. Throws GeometryError unless the origin is interior.
GrowthPolytope build_growth_polytope(const std::vector<RatVec>& points, int dim);
bool origin_interior(const std::vector<RatVec>& points, int dim);

// Exact affine chart of the facet hyperplane: drops the coordinate with the
// largest |normal component| (lowest index on ties).
struct FacetChart {
  RatVec normal;
  int drop = 0;

  RatVec to_chart(const RatVec& x) const;
  RatVec lift(const RatVec& y) const;
};
FacetChart facet_chart(const RatVec& normal);

// Triangulation of one facet; vertices may lie off Im(nu) but are rational.
struct FacetTriangulation {
  int facet = 0;
  std::vector<RatVec> verts;
  std::vector<std::vector<int>> simplices;
};

// Triangulations whose simplices are compatible with conv(F) for every
// F subset of Im(nu) on the facet.
std::vector<FacetTriangulation> triangulate_facets(const GrowthPolytope& P);
// Triangulations using only the facet vertices.
std::vector<FacetTriangulation> vertex_triangulations(const GrowthPolytope& P);

// User-supplied simplices for a facet, matched by exact normal equality.
struct TriangulationOverride {
  RatVec normal;
  std::vector<std::vector<RatVec>> simplices;
};
std::vector<TriangulationOverride> parse_triangulation_overrides(const std::string& document);
void apply_overrides(const GrowthPolytope& P, std::vector<FacetTriangulation>& tri,
                     const std::vector<TriangulationOverride>& overrides);

// Throws GeometryError naming the offending simplex (and subset) when the
// triangulation is not a face-to-face cover of the facet or violates
// compatibility with some conv(F).
void verify_triangulation(const GrowthPolytope& P, const FacetTriangulation& T);

// Minimal sets Im(nu) ∩ H over closed half-spaces H of the facet hyperplane with
// v on the boundary. Each member is a sorted list of point indices.
std::vector<std::vector<int>> halfspace_family(const GrowthPolytope& P, int facet, const RatVec& v);
// Every choice of one point per member has v in its convex hull.
bool verify_choice_property(const GrowthPolytope& P, int facet, const RatVec& v,
                            const std::vector<std::vector<int>>& family);

// Half-space H = {x : <functional, x> <= 1} through a(v') v' for v' in V(simplex).
struct SupportCoefficients {
  std::vector<Rat> a;  // aligned with the simplex vertex order
  Rat h;
  RatVec functional;
  std::vector<RatVec> line;  // points spanning the separating set inside the facet
};

// Scores a candidate (a(v), h); the smallest score wins among valid separators.
using SupportCost = std::function<Rat(const Rat& a, const Rat& h)>;

SupportCoefficients support_coefficients(const GrowthPolytope& P, const FacetTriangulation& T, int simplex,
                                         int vpos, const std::vector<int>& F, const Rat& epsilon,
                                         const SupportCost& cost);

// Independent re-check of the three defining conditions; throws on failure.
void verify_support(const GrowthPolytope& P, const FacetTriangulation& T, int simplex, int vpos,
                    const std::vector<int>& F, const SupportCoefficients& sc);

// Coordinates of z in the basis V(simplex).
RatVec simplex_coordinates(const FacetTriangulation& T, int simplex, const RatVec& z);

}  // namespace pg
