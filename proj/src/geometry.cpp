#include "pg/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>

namespace pg {

namespace {

using Pts = std::vector<RatVec>;

RatVec vec2(const Rat& x, const Rat& y) {
  RatVec r(2);
  r << x, y;
  return r;
}

Rat cross(const RatVec& a, const RatVec& b) { return a(0) * b(1) - a(1) * b(0); }
Rat cross3(const RatVec& o, const RatVec& a, const RatVec& b) { return cross(a - o, b - o); }

bool lex_less(const RatVec& a, const RatVec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (b(i) < a(i)) return false;
  }
  return false;
}

// Strict convex hull in the plane, counter-clockwise, no repeated or collinear
// points. Degenerate inputs give one point or the two ends of a segment.
Pts strict_hull2(Pts pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  Pts h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross3(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross3(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  if (h.size() == 2 && h[0] == h[1]) h.resize(1);
  return h;
}

// Extreme points of a convex set given by a point list, in chart dimension 0, 1 or 2.
Pts extreme_points(const Pts& pts) {
  if (pts.empty()) return {};
  const auto k = pts[0].size();
  if (k == 0) return {pts[0]};
  if (k == 1) {
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const RatVec& a, const RatVec& b) { return a(0) < b(0); });
    if (*lo == *hi) return {*lo};
    return {*lo, *hi};
  }
  return strict_hull2(pts);
}

bool on_segment(const RatVec& p, const RatVec& a, const RatVec& b) {
  if (cross3(a, b, p) != 0) return false;
  for (int i = 0; i < 2; ++i)
    if (p(i) < std::min(a(i), b(i)) || p(i) > std::max(a(i), b(i))) return false;
  return true;
}

// Clip a convex point set (as a closed polygon) by {x : cross(b - a, x - a) >= 0}.
Pts clip(const Pts& poly, const RatVec& a, const RatVec& b) {
  Pts out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const RatVec& p = poly[i];
    const RatVec& q = poly[(i + 1) % m];
    Rat sp = cross3(a, b, p), sq = cross3(a, b, q);
    if (sp >= 0) out.push_back(p);
    if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
  }
  return out;
}

// Extreme points of conv(A) ∩ conv(B) in a chart of dimension 1 or 2.
Pts intersect_convex(const Pts& A, const Pts& B) {
  if (A.empty() || B.empty()) return {};
  const auto k = A[0].size();
  if (k == 0) return {A[0]};
  if (k == 1) {
    Pts ea = extreme_points(A), eb = extreme_points(B);
    Rat lo = std::max(ea.front()(0), eb.front()(0));
    Rat hi = std::min(ea.back()(0), eb.back()(0));
    if (lo > hi) return {};
    RatVec l(1), h(1);
    l(0) = lo;
    h(0) = hi;
    return extreme_points({l, h});
  }
  Pts ha = strict_hull2(A), hb = strict_hull2(B);
  if (ha.size() < hb.size()) std::swap(ha, hb);
  if (ha.size() >= 3) {
    Pts cur = hb;
    for (std::size_t i = 0; i < ha.size() && !cur.empty(); ++i) cur = clip(cur, ha[i], ha[(i + 1) % ha.size()]);
    return extreme_points(cur);
  }
  // Both are points or segments.
  if (hb.size() == 1) {
    const RatVec& p = hb[0];
    bool inside = ha.size() == 1 ? p == ha[0] : on_segment(p, ha[0], ha[1]);
    return inside ? Pts{p} : Pts{};
  }
  const RatVec &a = ha[0], &b = ha[1], &c = hb[0], &d = hb[1];
  Rat den = cross(b - a, d - c);
  if (den == 0) {
    if (cross3(a, b, c) != 0) return {};
    Pts hits;
    for (const RatVec* p : {&a, &b})
      if (on_segment(*p, c, d)) hits.push_back(*p);
    for (const RatVec* p : {&c, &d})
      if (on_segment(*p, a, b)) hits.push_back(*p);
    return extreme_points(hits);
  }
  Rat t = cross(c - a, d - c) / den;
  Rat u = cross(c - a, b - a) / den;
  if (t < 0 || t > 1 || u < 0 || u > 1) return {};
  return {RatVec(a + (b - a) * t)};
}

bool point_in_hull(const RatVec& p, const Pts& pts) {
  Pts e = intersect_convex({p}, pts);
  return !e.empty();
}

Rat measure(const Pts& simplex) {
  const auto k = simplex[0].size();
  if (k == 0) return 1;
  if (k == 1) return abs(simplex[1](0) - simplex[0](0));
  return abs(cross3(simplex[0], simplex[1], simplex[2])) / 2;
}

Rat polygon_measure(const Pts& verts) {
  const auto k = verts[0].size();
  if (k == 0) return 1;
  Pts e = extreme_points(verts);
  if (k == 1) return e.size() == 2 ? Rat(e[1](0) - e[0](0)) : Rat(0);
  Rat twice = 0;
  for (std::size_t i = 0; i < e.size(); ++i) twice += cross(e[i], e[(i + 1) % e.size()]);
  return abs(twice) / 2;
}

// Integer-scaled copies of rational points for the hull search.
struct Scaled {
  std::vector<std::array<std::int64_t, 3>> x;
};

Scaled scale_points(const Pts& pts, int dim) {
  BigInt D = 1;
  for (const auto& p : pts)
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      BigInt q = denominator(p(k));
      D = D / gcd(D, q) * q;
    }
  Scaled s;
  for (const auto& p : pts) {
    std::array<std::int64_t, 3> a{0, 0, 0};
    for (int k = 0; k < dim; ++k) {
      BigInt v = numerator(p(k) * Rat(D));
      if (abs(v) > BigInt(std::int64_t{1} << 40)) throw GeometryError("geometry: coordinates too large for the hull search");
      a[static_cast<std::size_t>(k)] = v.convert_to<std::int64_t>();
    }
    s.x.push_back(a);
  }
  return s;
}

using I128 = __int128;

std::array<I128, 3> icross(const std::array<std::int64_t, 3>& o, const std::array<std::int64_t, 3>& a,
                           const std::array<std::int64_t, 3>& b) {
  I128 ax = a[0] - o[0], ay = a[1] - o[1], az = a[2] - o[2];
  I128 bx = b[0] - o[0], by = b[1] - o[1], bz = b[2] - o[2];
  return {ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx};
}

I128 idot(const std::array<I128, 3>& n, const std::array<std::int64_t, 3>& x) {
  return n[0] * x[0] + n[1] * x[1] + n[2] * x[2];
}

I128 igcd(I128 a, I128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    I128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rat i128_rat(I128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  BigInt r = 0;
  BigInt base = 1;
  while (u != 0) {
    r += base * BigInt(static_cast<unsigned long long>(u % 1000000000u));
    base *= 1000000000;
    u /= 1000000000u;
  }
  return Rat(neg ? BigInt(-r) : r);
}

std::vector<int> facet_points(const GrowthPolytope& P, const RatVec& normal) {
  std::vector<int> out;
  for (std::size_t i = 0; i < P.points.size(); ++i)
    if (P.points[i].dot(normal) == 1) out.push_back(static_cast<int>(i));
  return out;
}

void build_1d(GrowthPolytope& P) {
  int lo = 0, hi = 0;
  for (std::size_t i = 0; i < P.points.size(); ++i) {
    if (P.points[i](0) < P.points[static_cast<std::size_t>(lo)](0)) lo = static_cast<int>(i);
    if (P.points[i](0) > P.points[static_cast<std::size_t>(hi)](0)) hi = static_cast<int>(i);
  }
  if (!(P.points[static_cast<std::size_t>(lo)](0) < 0 && P.points[static_cast<std::size_t>(hi)](0) > 0))
    throw GeometryError("geometry: origin is not interior to the growth polytope");
  for (int id : {hi, lo}) {
    Facet f;
    f.normal = RatVec(1);
    f.normal(0) = Rat(1) / P.points[static_cast<std::size_t>(id)](0);
    f.points = {id};
    f.vertices = {id};
    P.facets.push_back(std::move(f));
  }
}

void build_2d(GrowthPolytope& P) {
  Pts all = P.points;
  all.push_back(RatVec::Zero(2));
  Pts hull = strict_hull2(all);
  if (hull.size() < 3) throw GeometryError("geometry: origin is not interior to the growth polytope");
  RatVec zero = RatVec::Zero(2);
  for (std::size_t i = 0; i < hull.size(); ++i)
    if (cross3(hull[i], hull[(i + 1) % hull.size()], zero) <= 0)
      throw GeometryError("geometry: origin is not interior to the growth polytope");
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const RatVec& a = hull[i];
    const RatVec& b = hull[(i + 1) % hull.size()];
    RatVec n = vec2(b(1) - a(1), a(0) - b(0));
    Rat off = n.dot(a);
    Facet f;
    f.normal = n / off;
    f.points = facet_points(P, f.normal);
    RatVec d = b - a;
    std::sort(f.points.begin(), f.points.end(), [&](int x, int y) {
      return (P.points[static_cast<std::size_t>(x)] - a).dot(d) < (P.points[static_cast<std::size_t>(y)] - a).dot(d);
    });
    f.vertices = {f.points.front(), f.points.back()};
    P.facets.push_back(std::move(f));
  }
}

void build_3d(GrowthPolytope& P) {
  const std::size_t N = P.points.size();
  Scaled s = scale_points(P.points, 3);
  s.x.push_back({0, 0, 0});
  const std::size_t M = s.x.size();
  std::set<std::array<I128, 4>> seen;
  std::vector<std::array<I128, 4>> planes;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = i + 1; j < M; ++j)
      for (std::size_t k = j + 1; k < M; ++k) {
        auto n = icross(s.x[i], s.x[j], s.x[k]);
        if (n[0] == 0 && n[1] == 0 && n[2] == 0) continue;
        I128 b = idot(n, s.x[i]);
        I128 g = igcd(igcd(n[0], n[1]), igcd(n[2], b));
        std::array<I128, 4> key{n[0] / g, n[1] / g, n[2] / g, b / g};
        std::array<I128, 4> neg{-key[0], -key[1], -key[2], -key[3]};
        if (seen.count(key) || seen.count(neg)) continue;
        int pos = 0, negc = 0;
        for (std::size_t m = 0; m < M && !(pos && negc); ++m) {
          I128 v = idot(n, s.x[m]) - b;
          if (v > 0) pos = 1;
          if (v < 0) negc = 1;
        }
        seen.insert(key);
        if (pos && negc) continue;
        planes.push_back(pos ? neg : key);
      }
  if (planes.size() < 4) throw GeometryError("geometry: origin is not interior to the growth polytope");
  for (const auto& pl : planes) {
    if (pl[3] <= 0) throw GeometryError("geometry: origin is not interior to the growth polytope");
    Facet f;
    f.normal = RatVec(3);
    for (int k = 0; k < 3; ++k) f.normal(k) = i128_rat(pl[static_cast<std::size_t>(k)]) / i128_rat(pl[3]);
    // Undo the coordinate scale: <n, D p> = b  =>  normal = n D / b.
    Rat D = P.points.empty() ? Rat(1) : Rat(0);
    for (std::size_t i = 0; i < N && D == 0; ++i)
      for (int k = 0; k < 3; ++k)
        if (P.points[i](k) != 0) {
          D = Rat(static_cast<long long>(s.x[i][static_cast<std::size_t>(k)])) / P.points[i](k);
          break;
        }
    f.normal *= D;
    f.points = facet_points(P, f.normal);
    FacetChart ch = facet_chart(f.normal);
    Pts chart;
    for (int id : f.points) chart.push_back(ch.to_chart(P.points[static_cast<std::size_t>(id)]));
    Pts hull = strict_hull2(chart);
    for (const auto& hv : hull)
      for (std::size_t t = 0; t < chart.size(); ++t)
        if (chart[t] == hv) {
          f.vertices.push_back(f.points[t]);
          break;
        }
    P.facets.push_back(std::move(f));
  }
  std::sort(P.facets.begin(), P.facets.end(), [](const Facet& a, const Facet& b) { return lex_less(a.normal, b.normal); });
}

}  // namespace

Rat GrowthPolytope::gauge(const RatVec& y) const {
  Rat best = 0;
  for (const auto& f : facets) best = std::max(best, Rat(f.normal.dot(y)));
  return best;
}

GrowthPolytope build_growth_polytope(const std::vector<RatVec>& points, int dim) {
  if (points.empty()) throw GeometryError("geometry: empty point set");
  if (dim < 1 || dim > 3) throw GeometryError("geometry: dimension must be 1, 2 or 3");
  GrowthPolytope P;
  P.dim = dim;
  P.points = points;
  RatMat A(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) A.col(static_cast<Eigen::Index>(i)) = points[i];
  if (rank(A) < dim) throw GeometryError("geometry: origin is not interior to the growth polytope");
  if (dim == 1) build_1d(P);
  if (dim == 2) build_2d(P);
  if (dim == 3) build_3d(P);
  std::set<int> verts;
  for (const auto& f : P.facets) verts.insert(f.vertices.begin(), f.vertices.end());
  P.vertices.assign(verts.begin(), verts.end());
  // Certificate: every point satisfies every inequality; every facet spans its hyperplane.
  for (const auto& f : P.facets) {
    for (const auto& p : P.points)
      if (p.dot(f.normal) > 1) throw GeometryError("geometry: hull certificate failed");
    if (static_cast<int>(f.vertices.size()) < dim) throw GeometryError("geometry: degenerate facet");
  }
  return P;
}

bool origin_interior(const std::vector<RatVec>& points, int dim) {
  try {
    build_growth_polytope(points, dim);
    return true;
  } catch (const GeometryError&) {
    return false;
  }
}

FacetChart facet_chart(const RatVec& normal) {
  FacetChart ch;
  ch.normal = normal;
  for (Eigen::Index k = 1; k < normal.size(); ++k)
    if (abs(normal(k)) > abs(normal(ch.drop))) ch.drop = static_cast<int>(k);
  return ch;
}

RatVec FacetChart::to_chart(const RatVec& x) const {
  RatVec y(x.size() - 1);
  for (Eigen::Index k = 0, j = 0; k < x.size(); ++k)
    if (k != drop) y(j++) = x(k);
  return y;
}

RatVec FacetChart::lift(const RatVec& y) const {
  RatVec x(y.size() + 1);
  Rat rest = 1;
  for (Eigen::Index k = 0, j = 0; k < x.size(); ++k)
    if (k != drop) {
      x(k) = y(j++);
      rest -= normal(k) * x(k);
    }
  x(drop) = rest / normal(drop);
  return x;
}

namespace {

struct Line2 {
  RatVec n;  // n . x = c
  Rat c;
};

Line2 line_through(const RatVec& p, const RatVec& q) {
  RatVec d = q - p;
  RatVec n = vec2(-d(1), d(0));
  Rat scale = n(0) != 0 ? n(0) : n(1);
  n /= scale;
  return {n, n.dot(p) / 1};
}

// Splits a convex polygon (counter-clockwise) by a line when it crosses the interior.
std::vector<Pts> split(const Pts& poly, const Line2& L) {
  std::vector<Rat> s;
  bool pos = false, neg = false;
  for (const auto& p : poly) {
    s.push_back(L.n.dot(p) - L.c);
    if (s.back() > 0) pos = true;
    if (s.back() < 0) neg = true;
  }
  if (!(pos && neg)) return {poly};
  Pts a, b;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    std::size_t j = (i + 1) % poly.size();
    if (s[i] >= 0) a.push_back(poly[i]);
    if (s[i] <= 0) b.push_back(poly[i]);
    if ((s[i] > 0 && s[j] < 0) || (s[i] < 0 && s[j] > 0)) {
      RatVec x = poly[i] + (poly[j] - poly[i]) * (s[i] / (s[i] - s[j]));
      a.push_back(x);
      b.push_back(x);
    }
  }
  return {a, b};
}

// Fan from the lexicographically smallest apex giving only proper triangles;
// otherwise a fan from the centroid of the strict corners.
void triangulate_cell(const Pts& cell, std::vector<Pts>& out) {
  const std::size_t m = cell.size();
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lex_less(cell[x], cell[y]); });
  for (std::size_t apex : order) {
    bool ok = true;
    for (std::size_t j = 1; j + 1 < m && ok; ++j)
      if (cross3(cell[apex], cell[(apex + j) % m], cell[(apex + j + 1) % m]) == 0) ok = false;
    if (!ok) continue;
    for (std::size_t j = 1; j + 1 < m; ++j) out.push_back({cell[apex], cell[(apex + j) % m], cell[(apex + j + 1) % m]});
    return;
  }
  Pts corners = strict_hull2(cell);
  RatVec c = RatVec::Zero(2);
  for (const auto& p : corners) c += p;
  c /= Rat(static_cast<long long>(corners.size()));
  for (std::size_t j = 0; j < m; ++j) out.push_back({c, cell[j], cell[(j + 1) % m]});
}

FacetTriangulation assemble(int facet, const FacetChart& ch, const std::vector<Pts>& simplices) {
  FacetTriangulation T;
  T.facet = facet;
  std::vector<RatVec> chart_verts;
  for (const auto& s : simplices) {
    std::vector<int> ids;
    for (const auto& p : s) {
      auto it = std::find(chart_verts.begin(), chart_verts.end(), p);
      if (it == chart_verts.end()) {
        chart_verts.push_back(p);
        T.verts.push_back(ch.lift(p));
        ids.push_back(static_cast<int>(chart_verts.size()) - 1);
      } else {
        ids.push_back(static_cast<int>(it - chart_verts.begin()));
      }
    }
    T.simplices.push_back(ids);
  }
  return T;
}

FacetTriangulation arrangement_triangulation(const GrowthPolytope& P, int fi) {
  const Facet& f = P.facets[static_cast<std::size_t>(fi)];
  FacetChart ch = facet_chart(f.normal);
  Pts pts;
  for (int id : f.points) pts.push_back(ch.to_chart(P.points[static_cast<std::size_t>(id)]));
  Pts poly = strict_hull2(pts);
  std::vector<Line2> lines;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      Line2 L = line_through(pts[i], pts[j]);
      bool dup = false;
      for (const auto& M : lines)
        if (M.n == L.n && M.c == L.c) dup = true;
      if (!dup) lines.push_back(L);
    }
  std::vector<Pts> cells{poly};
  for (const auto& L : lines) {
    std::vector<Pts> next;
    for (const auto& c : cells)
      for (auto& part : split(c, L)) next.push_back(std::move(part));
    cells = std::move(next);
  }
  Pts all;
  for (const auto& c : cells)
    for (const auto& p : c)
      if (std::find(all.begin(), all.end(), p) == all.end()) all.push_back(p);
  std::vector<Pts> simplices;
  for (auto& c : cells) {
    // Insert vertices of neighbouring cells that lie inside an edge.
    Pts full;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const RatVec& a = c[i];
      const RatVec& b = c[(i + 1) % c.size()];
      full.push_back(a);
      std::vector<std::pair<Rat, RatVec>> mid;
      for (const auto& p : all)
        if (p != a && p != b && on_segment(p, a, b)) mid.emplace_back((p - a).dot(b - a), p);
      std::sort(mid.begin(), mid.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      for (auto& [t, p] : mid) full.push_back(p);
    }
    triangulate_cell(full, simplices);
  }
  return assemble(fi, ch, simplices);
}

}  // namespace

std::vector<FacetTriangulation> triangulate_facets(const GrowthPolytope& P) {
  std::vector<FacetTriangulation> out;
  for (std::size_t fi = 0; fi < P.facets.size(); ++fi) {
    const Facet& f = P.facets[fi];
    FacetTriangulation T;
    T.facet = static_cast<int>(fi);
    if (P.dim <= 2) {
      for (int id : f.points) T.verts.push_back(P.points[static_cast<std::size_t>(id)]);
      if (P.dim == 1) T.simplices.push_back({0});
      for (std::size_t i = 0; P.dim == 2 && i + 1 < f.points.size(); ++i)
        T.simplices.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
    } else {
      T = arrangement_triangulation(P, static_cast<int>(fi));
    }
    out.push_back(std::move(T));
  }
  return out;
}

std::vector<FacetTriangulation> vertex_triangulations(const GrowthPolytope& P) {
  std::vector<FacetTriangulation> out;
  for (std::size_t fi = 0; fi < P.facets.size(); ++fi) {
    const Facet& f = P.facets[fi];
    FacetTriangulation T;
    T.facet = static_cast<int>(fi);
    for (int id : f.vertices) T.verts.push_back(P.points[static_cast<std::size_t>(id)]);
    const int m = static_cast<int>(f.vertices.size());
    if (P.dim == 1) T.simplices.push_back({0});
    if (P.dim == 2) T.simplices.push_back({0, 1});
    if (P.dim == 3) {
      int apex = 0;
      for (int i = 1; i < m; ++i)
        if (lex_less(T.verts[static_cast<std::size_t>(i)], T.verts[static_cast<std::size_t>(apex)])) apex = i;
      for (int j = 1; j + 1 < m; ++j) T.simplices.push_back({apex, (apex + j) % m, (apex + j + 1) % m});
    }
    out.push_back(std::move(T));
  }
  return out;
}

std::vector<TriangulationOverride> parse_triangulation_overrides(const std::string& document) {
  using json = nlohmann::json;
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw GeometryError(std::string("triangulation: malformed document: ") + e.what());
  }
  if (j.is_object()) j = json::array({j});
  if (!j.is_array()) throw GeometryError("triangulation: expected an object or an array of objects");
  auto vec = [](const json& a, const std::string& field) {
    if (!a.is_array()) throw GeometryError("triangulation: field '" + field + "': expected an array");
    RatVec v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].is_string()) throw GeometryError("triangulation: field '" + field + "': expected rational strings");
      v(static_cast<Eigen::Index>(k)) = parse_rat(a[k].get<std::string>());
    }
    return v;
  };
  std::vector<TriangulationOverride> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& o = j[i];
    std::string f = "[" + std::to_string(i) + "]";
    if (!o.is_object() || !o.contains("facet") || !o.contains("simplices"))
      throw GeometryError("triangulation: entry " + f + " needs 'facet' and 'simplices'");
    TriangulationOverride ov;
    ov.normal = vec(o["facet"], f + ".facet");
    if (!o["simplices"].is_array()) throw GeometryError("triangulation: field '" + f + ".simplices': expected an array");
    for (const auto& s : o["simplices"]) {
      if (!s.is_array()) throw GeometryError("triangulation: field '" + f + ".simplices': expected arrays of points");
      std::vector<RatVec> simplex;
      for (const auto& p : s) simplex.push_back(vec(p, f + ".simplices"));
      ov.simplices.push_back(std::move(simplex));
    }
    out.push_back(std::move(ov));
  }
  return out;
}

void apply_overrides(const GrowthPolytope& P, std::vector<FacetTriangulation>& tri,
                     const std::vector<TriangulationOverride>& overrides) {
  for (const auto& ov : overrides) {
    auto it = std::find_if(P.facets.begin(), P.facets.end(), [&](const Facet& f) { return f.normal == ov.normal; });
    if (it == P.facets.end())
      throw GeometryError("triangulation: no facet with normal " + to_string(ov.normal));
    int fi = static_cast<int>(it - P.facets.begin());
    FacetTriangulation T;
    T.facet = fi;
    for (const auto& s : ov.simplices) {
      if (static_cast<int>(s.size()) != P.dim) throw GeometryError("triangulation: simplex needs one point per dimension");
      std::vector<int> ids;
      for (const auto& p : s) {
        if (p.size() != P.dim) throw GeometryError("triangulation: point dimension mismatch");
        auto vit = std::find(T.verts.begin(), T.verts.end(), p);
        if (vit == T.verts.end()) {
          T.verts.push_back(p);
          ids.push_back(static_cast<int>(T.verts.size()) - 1);
        } else {
          ids.push_back(static_cast<int>(vit - T.verts.begin()));
        }
      }
      T.simplices.push_back(ids);
    }
    tri[static_cast<std::size_t>(fi)] = std::move(T);
  }
}

namespace {

Pts chart_simplex(const FacetChart& ch, const FacetTriangulation& T, std::size_t s) {
  Pts out;
  for (int id : T.simplices[s]) out.push_back(ch.to_chart(T.verts[static_cast<std::size_t>(id)]));
  return out;
}

std::string simplex_name(const FacetTriangulation& T, std::size_t s) {
  std::string r = "facet " + std::to_string(T.facet) + " simplex {";
  for (std::size_t i = 0; i < T.simplices[s].size(); ++i)
    r += (i ? " " : "") + to_string(T.verts[static_cast<std::size_t>(T.simplices[s][i])]);
  return r + "}";
}

bool all_in(const Pts& pts, const Pts& allowed) {
  for (const auto& p : pts)
    if (std::find(allowed.begin(), allowed.end(), p) == allowed.end()) return false;
  return true;
}

}  // namespace

void verify_triangulation(const GrowthPolytope& P, const FacetTriangulation& T) {
  const Facet& f = P.facets[static_cast<std::size_t>(T.facet)];
  FacetChart ch = facet_chart(f.normal);
  Pts fpts;
  for (int id : f.points) fpts.push_back(ch.to_chart(P.points[static_cast<std::size_t>(id)]));
  Pts outline;
  for (int id : f.vertices) outline.push_back(ch.to_chart(P.points[static_cast<std::size_t>(id)]));
  for (const auto& v : T.verts) {
    if (v.size() != P.dim || v.dot(f.normal) != 1 || !point_in_hull(ch.to_chart(v), outline))
      throw GeometryError("triangulation: vertex " + to_string(v) + " is not on facet " + std::to_string(T.facet));
  }
  Rat total = 0;
  std::vector<Pts> simp;
  for (std::size_t s = 0; s < T.simplices.size(); ++s) {
    if (static_cast<int>(T.simplices[s].size()) != P.dim)
      throw GeometryError("triangulation: " + simplex_name(T, s) + " has the wrong number of vertices");
    simp.push_back(chart_simplex(ch, T, s));
    Rat m = measure(simp.back());
    if (m == 0) throw GeometryError("triangulation: " + simplex_name(T, s) + " is degenerate");
    total += m;
  }
  if (total != polygon_measure(outline))
    throw GeometryError("triangulation: simplices of facet " + std::to_string(T.facet) + " do not cover it exactly");
  for (std::size_t s = 0; s < simp.size(); ++s)
    for (std::size_t t = s + 1; t < simp.size(); ++t) {
      Pts common;
      for (const auto& p : simp[s])
        if (std::find(simp[t].begin(), simp[t].end(), p) != simp[t].end()) common.push_back(p);
      if (!all_in(intersect_convex(simp[s], simp[t]), common))
        throw GeometryError("triangulation: " + simplex_name(T, s) + " and " + simplex_name(T, t) +
                            " do not meet in a common face");
    }
  if (fpts.size() > 20) throw GeometryError("triangulation: too many points on facet " + std::to_string(T.facet) + " for exhaustive verification");
  const std::uint64_t subsets = std::uint64_t{1} << fpts.size();
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    Pts F;
    for (std::size_t k = 0; k < fpts.size(); ++k)
      if (mask >> k & 1) F.push_back(fpts[k]);
    for (std::size_t s = 0; s < simp.size(); ++s)
      if (!all_in(intersect_convex(simp[s], F), simp[s])) {
        std::string w;
        for (std::size_t k = 0; k < fpts.size(); ++k)
          if (mask >> k & 1) w += " " + to_string(P.points[static_cast<std::size_t>(f.points[k])]);
        throw GeometryError("triangulation: " + simplex_name(T, s) + " meets conv{" + w + " } outside a face");
      }
  }
}

std::vector<std::vector<int>> halfspace_family(const GrowthPolytope& P, int facet, const RatVec& v) {
  const Facet& f = P.facets[static_cast<std::size_t>(facet)];
  FacetChart ch = facet_chart(f.normal);
  RatVec cv = ch.to_chart(v);
  Pts pts;
  for (int id : f.points) pts.push_back(ch.to_chart(P.points[static_cast<std::size_t>(id)]));
  const auto k = cv.size();
  // Candidate inner normals of the boundary through v.
  std::vector<RatVec> normals;
  if (k == 0) {
    normals.push_back(RatVec(0));
  } else if (k == 1) {
    RatVec a(1), b(1);
    a(0) = 1;
    b(0) = -1;
    normals = {a, b};
  } else {
    std::vector<RatVec> crit;
    for (const auto& p : pts) {
      RatVec d = p - cv;
      if (d.isZero()) continue;
      crit.push_back(vec2(-d(1), d(0)));
      crit.push_back(vec2(d(1), -d(0)));
    }
    auto upper = [](const RatVec& a) { return a(1) > 0 || (a(1) == 0 && a(0) > 0); };
    std::sort(crit.begin(), crit.end(), [&](const RatVec& a, const RatVec& b) {
      bool ua = upper(a), ub = upper(b);
      if (ua != ub) return ua;
      return cross(a, b) > 0;
    });
    std::vector<RatVec> dirs;
    for (const auto& c : crit)
      if (dirs.empty() || !(cross(dirs.back(), c) == 0 && dirs.back().dot(c) > 0)) dirs.push_back(c);
    if (dirs.size() > 1 && cross(dirs.back(), dirs.front()) == 0 && dirs.back().dot(dirs.front()) > 0) dirs.pop_back();
    if (dirs.empty()) dirs.push_back(vec2(1, 0));
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const RatVec& a = dirs[i];
      const RatVec& b = dirs[(i + 1) % dirs.size()];
      normals.push_back(a);
      Rat cr = cross(a, b);
      if (dirs.size() == 1) {
        normals.push_back(RatVec(-a));
      } else if (cr > 0) {
        normals.push_back(RatVec(a + b));
      } else if (cr == 0) {
        normals.push_back(vec2(-a(1), a(0)));
      } else {
        normals.push_back(RatVec(-(a + b)));
      }
    }
  }
  std::set<std::vector<int>> members;
  for (const auto& n : normals) {
    std::vector<int> m;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (k == 0 || n.dot(pts[i] - cv) >= 0) m.push_back(f.points[i]);
    std::sort(m.begin(), m.end());
    members.insert(m);
  }
  std::vector<std::vector<int>> out;
  for (const auto& m : members) {
    bool minimal = true;
    for (const auto& o : members)
      if (o != m && std::includes(m.begin(), m.end(), o.begin(), o.end())) minimal = false;
    if (minimal) out.push_back(m);
  }
  return out;
}

bool verify_choice_property(const GrowthPolytope& P, int facet, const RatVec& v,
                            const std::vector<std::vector<int>>& family) {
  const Facet& f = P.facets[static_cast<std::size_t>(facet)];
  FacetChart ch = facet_chart(f.normal);
  RatVec cv = ch.to_chart(v);
  std::vector<std::size_t> pick(family.size(), 0);
  for (const auto& m : family)
    if (m.empty()) return false;
  while (true) {
    Pts chosen;
    for (std::size_t i = 0; i < family.size(); ++i)
      chosen.push_back(ch.to_chart(P.points[static_cast<std::size_t>(family[i][pick[i]])]));
    if (!point_in_hull(cv, chosen)) return false;
    std::size_t i = 0;
    while (i < family.size() && ++pick[i] == family[i].size()) pick[i++] = 0;
    if (i == family.size()) break;
  }
  return true;
}

RatVec simplex_coordinates(const FacetTriangulation& T, int simplex, const RatVec& z) {
  const auto& ids = T.simplices[static_cast<std::size_t>(simplex)];
  RatMat M(z.size(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = T.verts[static_cast<std::size_t>(ids[i])];
  auto x = solve_linear(M, z);
  if (!x) throw GeometryError("geometry: simplex vertices are linearly dependent");
  return *x;
}

namespace {

// Half-space through the points y_j spanning the separator and a v, for the
// largest admissible a up to the epsilon floor.
struct Candidate {
  std::vector<RatVec> line;
  RatVec functional;
  std::vector<Rat> a;
  Rat h;
};

std::optional<Candidate> evaluate_line(const GrowthPolytope& P, const std::vector<RatVec>& simplex, int vpos,
                                       const std::vector<int>& F, const std::vector<RatVec>& line, const Rat& eps) {
  const int n = P.dim;
  const RatVec& v = simplex[static_cast<std::size_t>(vpos)];
  RatMat B(n, n);
  for (int j = 0; j < n - 1; ++j) B.col(j) = line[static_cast<std::size_t>(j)];
  B.col(n - 1) = v;
  if (rank(B) < n) return std::nullopt;
  Rat amin = 0;
  std::vector<char> inF(P.points.size(), 0);
  for (int id : F) inF[static_cast<std::size_t>(id)] = 1;
  for (std::size_t i = 0; i < P.points.size(); ++i) {
    if (inF[i]) continue;
    auto coef = solve_linear(B, P.points[i]);
    Rat lam = 0;
    for (int j = 0; j < n - 1; ++j) lam += (*coef)(j);
    Rat kappa = (*coef)(n - 1);
    if (kappa <= 0) continue;
    if (1 - lam <= kappa) return std::nullopt;  // not separated inside the facet
    amin = std::max(amin, Rat(kappa / (1 - lam)));
  }
  Rat av = std::max(eps, amin);
  RatMat C(n, n);
  RatVec rhs = RatVec::Constant(n, Rat(1));
  for (int j = 0; j < n - 1; ++j) C.row(j) = line[static_cast<std::size_t>(j)].transpose();
  C.row(n - 1) = (v * av).transpose();
  auto c = solve_linear(C, rhs);
  if (!c) return std::nullopt;
  Candidate cand;
  cand.line = line;
  cand.functional = *c;
  for (std::size_t i = 0; i < simplex.size(); ++i) {
    Rat val = c->dot(simplex[i]);
    if (val < 1) return std::nullopt;
    cand.a.push_back(static_cast<int>(i) == vpos ? av : Rat(1 / val));
  }
  Rat top = 0;
  for (int id : P.vertices) top = std::max(top, Rat(c->dot(P.points[static_cast<std::size_t>(id)])));
  cand.h = 1 / top;
  return cand;
}

}  // namespace

SupportCoefficients support_coefficients(const GrowthPolytope& P, const FacetTriangulation& T, int simplex,
                                         int vpos, const std::vector<int>& F, const Rat& epsilon,
                                         const SupportCost& cost) {
  const Facet& f = P.facets[static_cast<std::size_t>(T.facet)];
  std::vector<RatVec> verts;
  for (int id : T.simplices[static_cast<std::size_t>(simplex)]) verts.push_back(T.verts[static_cast<std::size_t>(id)]);
  const RatVec v = verts[static_cast<std::size_t>(vpos)];
  std::vector<RatVec> rest;  // facet points outside F
  for (int id : f.points)
    if (std::find(F.begin(), F.end(), id) == F.end()) rest.push_back(P.points[static_cast<std::size_t>(id)]);
  FacetChart ch = facet_chart(f.normal);

  std::vector<std::vector<RatVec>> lines;
  if (P.dim == 1) {
    lines.push_back({});
  } else if (P.dim == 2) {
    // Nearest point outside F along the edge.
    RatVec cv = ch.to_chart(v);
    const RatVec* best = nullptr;
    Rat bestd = -1;
    for (const auto& p : rest) {
      Rat d = abs(ch.to_chart(p)(0) - cv(0));
      if (best == nullptr || d < bestd) {
        best = &p;
        bestd = d;
      }
    }
    if (best != nullptr) lines.push_back({*best});
  } else {
    std::vector<RatVec> pool = rest;
    for (std::size_t i = 0; i < verts.size(); ++i)
      if (static_cast<int>(i) != vpos && std::find(pool.begin(), pool.end(), verts[i]) == pool.end()) pool.push_back(verts[i]);
    RatVec cv = ch.to_chart(v);
    auto valid = [&](const RatVec& a, const RatVec& b) {
      Rat sv = cross3(a, b, cv);
      if (sv == 0) return false;
      for (const auto& p : rest)
        if (cross3(a, b, ch.to_chart(p)) * sv > 0) return false;
      for (const auto& p : verts)
        if (cross3(a, b, ch.to_chart(p)) * sv < 0) return false;
      return true;
    };
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j)
        if (valid(ch.to_chart(pool[i]), ch.to_chart(pool[j]))) lines.push_back({pool[i], pool[j]});
    if (lines.empty()) {
      for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = 0; j < pool.size(); ++j)
          for (std::size_t k = j + 1; k < pool.size(); ++k) {
            RatVec a = ch.to_chart(pool[i]);
            RatVec b = a + ch.to_chart(pool[k]) - ch.to_chart(pool[j]);
            if (valid(a, b)) lines.push_back({pool[i], ch.lift(b)});
          }
    }
  }
  std::optional<Candidate> best;
  Rat best_cost;
  for (const auto& line : lines) {
    auto cand = evaluate_line(P, verts, vpos, F, line, epsilon);
    if (!cand) continue;
    Rat score = cost ? cost(cand->a[static_cast<std::size_t>(vpos)], cand->h) : cand->a[static_cast<std::size_t>(vpos)] - cand->h;
    if (!best || score < best_cost) {
      best = cand;
      best_cost = score;
    }
  }
  if (!best) {
    std::string w;
    for (int id : F) w += " " + to_string(P.points[static_cast<std::size_t>(id)]);
    throw GeometryError("support: no separating boundary for vertex " + to_string(v) + " and F = {" + w + " } on facet " +
                        std::to_string(T.facet));
  }
  SupportCoefficients sc;
  sc.a = best->a;
  sc.h = best->h;
  sc.functional = best->functional;
  sc.line = best->line;
  return sc;
}

void verify_support(const GrowthPolytope& P, const FacetTriangulation& T, int simplex, int vpos,
                    const std::vector<int>& F, const SupportCoefficients& sc) {
  const auto& ids = T.simplices[static_cast<std::size_t>(simplex)];
  const int n = P.dim;
  auto fail = [&](const std::string& what) {
    throw GeometryError("support: " + what + " for vertex " +
                        to_string(T.verts[static_cast<std::size_t>(ids[static_cast<std::size_t>(vpos)])]) + " on facet " +
                        std::to_string(T.facet));
  };
  const Rat& av = sc.a[static_cast<std::size_t>(vpos)];
  if (!(av > 0 && av < 1)) fail("a(v) outside (0,1)");
  for (const auto& a : sc.a)
    if (!(a > 0 && a <= 1)) fail("a(v') outside (0,1]");
  RatMat C(n, n);
  for (int j = 0; j < n; ++j)
    C.row(j) = (T.verts[static_cast<std::size_t>(ids[static_cast<std::size_t>(j)])] * sc.a[static_cast<std::size_t>(j)]).transpose();
  auto c = solve_linear(C, RatVec::Constant(n, Rat(1)));
  if (!c) fail("scaled vertices are dependent");
  for (std::size_t i = 0; i < P.points.size(); ++i) {
    if (std::find(F.begin(), F.end(), static_cast<int>(i)) != F.end()) continue;
    if (c->dot(P.points[i]) > 1) fail("point " + to_string(P.points[i]) + " outside the half-space");
  }
  Rat top = 0;
  for (int id : P.vertices) top = std::max(top, Rat(c->dot(P.points[static_cast<std::size_t>(id)])));
  if (top <= 0 || sc.h != 1 / top) fail("h is not the largest scale of P inside the half-space");
  if (sc.h > av) fail("h exceeds a(v)");
}

}  // namespace pg
