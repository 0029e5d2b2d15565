#include "pg/invariants.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace pg {

CycleGeometry build_cycle_geometry(const PeriodicGraph& g, std::size_t cycle_cap) {
  CycleGeometry geo;
  geo.table = build_nu_table(enumerate_cycles(g, cycle_cap));
  geo.P = build_growth_polytope(geo.table.points(), g.dim);
  geo.tri = triangulate_facets(geo.P);
  return geo;
}

namespace {

struct Decomposition {
  std::vector<int> G;
  RatVec c;
};

// Independent G within S with v = sum c_u u and c >= 0.
std::vector<Decomposition> decompositions(const CycleGeometry& geo, const RatVec& v, const std::vector<int>& S) {
  const int n = geo.P.dim;
  std::vector<Decomposition> out;
  std::vector<int> G;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (!G.empty()) {
      RatMat A(n, static_cast<Eigen::Index>(G.size()));
      for (std::size_t i = 0; i < G.size(); ++i) A.col(static_cast<Eigen::Index>(i)) = geo.P.points[static_cast<std::size_t>(G[i])];
      if (rank(A) == static_cast<int>(G.size())) {
        auto c = solve_linear(A, v);
        if (c && (c->array() >= Rat(0)).all()) out.push_back({G, *c});
      } else {
        return;  // supersets stay dependent
      }
    }
    if (static_cast<int>(G.size()) == n) return;
    for (std::size_t i = from; i < S.size(); ++i) {
      G.push_back(S[i]);
      self(self, i + 1);
      G.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

BigInt ceil_big(const Rat& x) { return ceil(x); }

}  // namespace

int compute_cpx(const CycleGeometry& geo, const RatVec& v, const std::vector<int>& support_set) {
  BigInt D = 1;
  for (const auto& dec : decompositions(geo, v, support_set))
    for (std::size_t i = 0; i < dec.G.size(); ++i) {
      const Rat& c = dec.c(static_cast<Eigen::Index>(i));
      if (c == 0) continue;
      for (int d : geo.table.entries[static_cast<std::size_t>(dec.G[i])].lens()) {
        BigInt q = denominator(c / Rat(d));
        D = D / gcd(D, q) * q;
      }
    }
  if (D > BigInt(std::int64_t{1} << 30)) throw std::runtime_error("invariants: cpx exceeds the supported range");
  return D.convert_to<int>();
}

int compute_m(const CycleGeometry& geo, const RatVec& v, const std::vector<int>& support_set, int u, int cpx) {
  std::optional<Rat> best;
  for (const auto& dec : decompositions(geo, v, support_set))
    for (std::size_t i = 0; i < dec.G.size(); ++i)
      if (dec.G[i] == u && (!best || dec.c(static_cast<Eigen::Index>(i)) > *best)) best = dec.c(static_cast<Eigen::Index>(i));
  if (!best) return 1;
  BigInt m = ceil_big(Rat(cpx) * *best);
  return std::max(1, m.convert_to<int>());
}

int compute_sF(const CycleGeometry& geo, const std::vector<int>& F, const std::map<int, int>& m) {
  int s = 0;
  for (int u : F) {
    const NuEntry& e = geo.table.entries[static_cast<std::size_t>(u)];
    auto it = m.find(u);
    int mu = it == m.end() ? 1 : it->second;
    for (int d : e.lens()) s += mu + d * (e.num(d) - 1);
  }
  return s;
}

VertexInvariants compute_vertex_invariants(const CycleGeometry& geo, int facet, const RatVec& v) {
  VertexInvariants vi;
  vi.facet = facet;
  vi.v = v;
  vi.family = halfspace_family(geo.P, facet, v);
  std::set<int> S;
  for (const auto& F : vi.family) S.insert(F.begin(), F.end());
  vi.support_set.assign(S.begin(), S.end());
  vi.cpx = compute_cpx(geo, v, vi.support_set);
  for (int u : vi.support_set) vi.m[u] = compute_m(geo, v, vi.support_set, u, vi.cpx);
  return vi;
}

namespace {

RatVec displacement(const PeriodicGraph& g, int start, const Vertex& y) {
  return g.realize(y) - g.pos[static_cast<std::size_t>(start)];
}

struct VKey {
  int cls;
  std::array<std::int64_t, 3> o;
  bool operator<(const VKey& b) const { return std::tie(cls, o) < std::tie(b.cls, b.o); }
};

std::uint64_t pack(int cls, const std::array<std::int64_t, 3>& o) {
  constexpr std::int64_t bias = std::int64_t{1} << 18;
  for (auto x : o)
    if (x <= -bias || x >= bias) throw std::runtime_error("invariants: offset outside the packed range");
  return static_cast<std::uint64_t>(cls) << 57 | static_cast<std::uint64_t>(o[0] + bias) << 38 |
         static_cast<std::uint64_t>(o[1] + bias) << 19 | static_cast<std::uint64_t>(o[2] + bias);
}

Vertex to_vertex(int dim, int cls, const std::array<std::int64_t, 3>& o) {
  Vertex v{cls, IVec(dim)};
  for (int k = 0; k < dim; ++k) v.offset(k) = o[static_cast<std::size_t>(k)];
  return v;
}

}  // namespace

Rat compute_C1(const PeriodicGraph& g, int start, const GrowthPolytope& P, const LatticeOptions& opt) {
  const int hops = g.classes - 1;
  std::set<VKey> seen{{start, {0, 0, 0}}};
  std::vector<VKey> layer{{start, {0, 0, 0}}};
  for (int h = 0; h < hops; ++h) {
    std::vector<VKey> next;
    for (const auto& x : layer)
      for (const auto& e : g.edges) {
        if (e.from != x.cls) continue;
        VKey y{e.to, x.o};
        for (int k = 0; k < g.dim; ++k) y.o[static_cast<std::size_t>(k)] += e.shift(k);
        if (seen.insert(y).second) next.push_back(y);
      }
    layer = std::move(next);
  }
  DistanceMap dm = distance_map(g, start, g.max_weight() * hops, opt);
  Rat best = 0;
  for (const auto& y : seen) {
    Vertex v = to_vertex(g.dim, y.cls, y.o);
    int d = dm.distance(v);
    if (d < 0) throw std::runtime_error("invariants: C1 distance map too small");
    best = std::max(best, Rat(P.gauge(displacement(g, start, v)) - d));
  }
  return best;
}

C2Result compute_C2_prime(const PeriodicGraph& g, int start, const CycleGeometry& geo, std::size_t state_cap) {
  if (g.classes > 24) throw std::runtime_error("invariants: too many classes for the all-class walk search");
  const int n = g.dim;
  const auto vt = vertex_triangulations(geo.P);
  // Simplices scaled by the shortest cycle weight of each vertex.
  std::vector<std::vector<RatVec>> cells;
  for (const auto& T : vt)
    for (const auto& s : T.simplices) {
      std::vector<RatVec> cell;
      for (int id : s) {
        const RatVec& v = T.verts[static_cast<std::size_t>(id)];
        int idx = geo.table.find(v);
        if (idx < 0) throw std::runtime_error("invariants: hull vertex without a cycle");
        cell.push_back(v * Rat(geo.table.entries[static_cast<std::size_t>(idx)].min_len()));
      }
      cells.push_back(std::move(cell));
    }
  RatVec lo = RatVec::Zero(n), hi = RatVec::Zero(n);
  for (const auto& cell : cells) {
    RatVec a = RatVec::Zero(n), b = RatVec::Zero(n);
    for (const auto& w : cell)
      for (int k = 0; k < n; ++k) {
        if (w(k) < 0) a(k) += w(k);
        if (w(k) > 0) b(k) += w(k);
      }
    for (int k = 0; k < n; ++k) {
      lo(k) = std::min(lo(k), a(k));
      hi(k) = std::max(hi(k), b(k));
    }
  }
  std::vector<RatMat> inverse;
  for (const auto& cell : cells) {
    RatMat M(n, n);
    for (int j = 0; j < n; ++j) M.col(j) = cell[static_cast<std::size_t>(j)];
    inverse.push_back(M);
  }
  auto in_region = [&](const RatVec& z) {
    for (const auto& M : inverse) {
      auto c = solve_linear(M, z);
      if (c && (c->array() >= Rat(0)).all() && (c->array() < Rat(1)).all()) return true;
    }
    return false;
  };
  std::unordered_map<std::uint64_t, std::pair<int, Rat>> targets;  // key -> (target id, gauge)
  const RatVec& x0 = g.pos[static_cast<std::size_t>(start)];
  for (int cls = 0; cls < g.classes; ++cls) {
    RatVec base = g.pos[static_cast<std::size_t>(cls)] - x0;
    std::array<std::int64_t, 3> from{0, 0, 0}, to{0, 0, 0};
    for (int k = 0; k < n; ++k) {
      from[static_cast<std::size_t>(k)] = ceil(Rat(lo(k) - base(k))).convert_to<std::int64_t>();
      to[static_cast<std::size_t>(k)] = floor(Rat(hi(k) - base(k))).convert_to<std::int64_t>();
    }
    std::array<std::int64_t, 3> o = from;
    while (true) {
      RatVec z = base;
      for (int k = 0; k < n; ++k) z(k) += Rat(o[static_cast<std::size_t>(k)]);
      if (in_region(z)) targets.emplace(pack(cls, o), std::make_pair(static_cast<int>(targets.size()), geo.P.gauge(z)));
      int k = 0;
      while (k < n && ++o[static_cast<std::size_t>(k)] > to[static_cast<std::size_t>(k)]) {
        o[static_cast<std::size_t>(k)] = from[static_cast<std::size_t>(k)];
        ++k;
      }
      if (k == n) break;
    }
  }
  // Shortest walks over states (vertex, set of visited classes).
  const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << g.classes) - 1);
  const std::size_t words = std::max<std::size_t>(1, (std::size_t{1} << g.classes) / 64);
  std::unordered_map<std::uint64_t, int> ids;
  std::vector<std::array<std::int64_t, 3>> offs;
  std::vector<int> cls_of;
  std::vector<std::uint64_t> bits;
  auto vertex_id = [&](int cls, const std::array<std::int64_t, 3>& o) {
    auto [it, fresh] = ids.emplace(pack(cls, o), static_cast<int>(offs.size()));
    if (fresh) {
      offs.push_back(o);
      cls_of.push_back(cls);
      bits.resize(bits.size() + words, 0);
    }
    return it->second;
  };
  const int W = g.max_weight();
  std::vector<std::vector<std::pair<int, std::uint32_t>>> ring(static_cast<std::size_t>(W + 1));
  ring[0].push_back({vertex_id(start, {0, 0, 0}), std::uint32_t{1} << start});
  std::size_t remaining = targets.size();
  std::size_t popped = 0;
  C2Result res;
  res.targets = static_cast<int>(targets.size());
  res.value = 0;
  bool first = true;
  for (int d = 0; remaining > 0; ++d) {
    auto& bucket = ring[static_cast<std::size_t>(d % (W + 1))];
    if (d > 0 && std::all_of(ring.begin(), ring.end(), [](const auto& b) { return b.empty(); }))
      throw std::runtime_error("invariants: some region vertices are unreachable through all classes");
    for (std::size_t i = 0; i < bucket.size() && remaining > 0; ++i) {
      auto [id, mask] = bucket[i];
      std::uint64_t& w = bits[static_cast<std::size_t>(id) * words + mask / 64];
      std::uint64_t bit = std::uint64_t{1} << (mask % 64);
      if (w & bit) continue;
      w |= bit;
      if (++popped > state_cap) throw std::runtime_error("invariants: state cap exceeded in the all-class walk search");
      const int cls = cls_of[static_cast<std::size_t>(id)];
      const auto o = offs[static_cast<std::size_t>(id)];
      if (mask == full) {
        auto t = targets.find(pack(cls, o));
        if (t != targets.end() && t->second.first >= 0) {
          Rat val = Rat(d) - t->second.second;
          if (first || val > res.value) res.value = val;
          first = false;
          res.max_walk = std::max(res.max_walk, d);
          t->second.first = -1;
          --remaining;
        }
      }
      for (const auto& e : g.edges) {
        if (e.from != cls) continue;
        std::array<std::int64_t, 3> p = o;
        for (int k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] += e.shift(k);
        int nid = vertex_id(e.to, p);
        std::uint32_t nm = mask | std::uint32_t{1} << e.to;
        if (bits[static_cast<std::size_t>(nid) * words + nm / 64] >> (nm % 64) & 1) continue;
        ring[static_cast<std::size_t>((d + e.weight) % (W + 1))].push_back({nid, nm});
      }
    }
    bucket.clear();
  }
  res.value = std::max(res.value, Rat(0));
  return res;
}

Rat alpha_bound(const Rat& a, const Rat& h, const Rat& C1, const Rat& C2p, int s, int W, int classes) {
  return a / (1 - a) * (C1 / h + C2p + (1 - h) / h * Rat(s + W * (classes - 1)));
}

InvariantReport assemble_report(const PeriodicGraph& g, int start, const CycleGeometry& geo, const Rat& epsilon,
                                const Rat& C1, const Rat& C2p) {
  InvariantReport r;
  r.name = g.name;
  r.start = start;
  r.classes = g.classes;
  r.W = g.max_weight();
  r.epsilon = epsilon;
  r.C1 = C1;
  r.C2p = C2p;
  auto vertex_inv = [&](int facet, const RatVec& v) -> const VertexInvariants& {
    for (const auto& vi : r.vertices)
      if (vi.facet == facet && vi.v == v) return vi;
    r.vertices.push_back(compute_vertex_invariants(geo, facet, v));
    return r.vertices.back();
  };
  std::vector<std::vector<int>> products;
  Rat best = 0;
  for (const auto& T : geo.tri)
    for (std::size_t s = 0; s < T.simplices.size(); ++s) {
      SimplexInvariants si;
      si.facet = T.facet;
      si.simplex = static_cast<int>(s);
      si.beta = 0;
      std::vector<int> product;
      for (std::size_t vp = 0; vp < T.simplices[s].size(); ++vp) {
        const RatVec& v = T.verts[static_cast<std::size_t>(T.simplices[s][vp])];
        const VertexInvariants vi = vertex_inv(T.facet, v);
        SimplexVertexInvariants e;
        e.facet = T.facet;
        e.simplex = static_cast<int>(s);
        e.vpos = static_cast<int>(vp);
        e.v = v;
        e.cpx = vi.cpx;
        product.push_back(vi.cpx);
        bool any = false;
        for (const auto& F : vi.family) {
          HalfspaceRecord rec;
          rec.F = F;
          rec.s = compute_sF(geo, F, vi.m);
          auto cost = [&](const Rat& a, const Rat& h) { return alpha_bound(a, h, C1, C2p, rec.s, r.W, r.classes); };
          rec.support = support_coefficients(geo.P, T, static_cast<int>(s), static_cast<int>(vp), F, epsilon, cost);
          verify_support(geo.P, T, static_cast<int>(s), static_cast<int>(vp), F, rec.support);
          const Rat& a = rec.support.a[vp];
          rec.alpha_prime = alpha_bound(a, rec.support.h, C1, C2p, rec.s, r.W, r.classes);
          rec.alpha = alpha_bound(a, rec.support.h, C1, C2p, 0, r.W, r.classes);
          if (!any || rec.alpha_prime > e.alpha_prime) e.alpha_prime = rec.alpha_prime;
          if (!any || rec.alpha > e.alpha) e.alpha = rec.alpha;
          any = true;
          e.records.push_back(std::move(rec));
        }
        Rat shifted = e.alpha_prime - Rat(e.cpx);
        e.beta = std::max(e.alpha, shifted);
        if (e.beta != shifted)
          r.notes.push_back("alpha exceeds alpha' - cpx at facet " + std::to_string(e.facet) + " vertex " + to_string(v));
        e.beta_prime = e.beta + Rat(e.cpx);
        si.beta += e.beta;
        r.cpx_gamma = lcm(r.cpx_gamma, e.cpx);
        r.entries.push_back(std::move(e));
      }
      best = std::max(best, si.beta);
      products.push_back(product);
      r.simplices.push_back(si);
    }
  r.beta = C2p + best;
  r.R = lcm_factor_products(products);
  r.gamma = floor(r.beta).convert_to<int>() + r.R.cover.degree();
  return r;
}

void compute_C2_exact(const PeriodicGraph& g, const CycleGeometry& geo, InvariantReport& report,
                      const LatticeOptions& opt, int radius_cap) {
  struct Cell {
    RatMat M;
    std::vector<Rat> bound;
  };
  std::vector<Cell> cells;
  Rat reach = 0;
  for (const auto& T : geo.tri)
    for (std::size_t s = 0; s < T.simplices.size(); ++s) {
      Cell c;
      c.M = RatMat(g.dim, g.dim);
      Rat sum = 0;
      for (std::size_t vp = 0; vp < T.simplices[s].size(); ++vp) {
        c.M.col(static_cast<Eigen::Index>(vp)) = T.verts[static_cast<std::size_t>(T.simplices[s][vp])];
        for (const auto& e : report.entries)
          if (e.facet == T.facet && e.simplex == static_cast<int>(s) && e.vpos == static_cast<int>(vp)) {
            c.bound.push_back(e.beta_prime);
            sum += e.beta_prime;
          }
      }
      reach = std::max(reach, sum);
      cells.push_back(std::move(c));
    }
  // Every target has d <= gauge + C2' <= reach + C2'.
  BigInt need = ceil(Rat(reach + report.C2p));
  int radius = need > BigInt(radius_cap) ? radius_cap : need.convert_to<int>();
  report.C2_exact_lower_bound = need > BigInt(radius);
  DistanceMap dm;
  try {
    dm = distance_map(g, report.start, radius, opt);
  } catch (const LatticeError&) {
    radius = std::max(1, radius / 4);
    report.C2_exact_lower_bound = true;
    dm = distance_map(g, report.start, radius, opt);
  }
  Rat best = 0;
  dm.for_each([&](const Vertex& y, int d) {
    RatVec z = displacement(g, report.start, y);
    for (const auto& c : cells) {
      auto x = solve_linear(c.M, z);
      if (!x) continue;
      bool ok = true;
      for (Eigen::Index k = 0; k < x->size() && ok; ++k) ok = (*x)(k) >= 0 && (*x)(k) <= c.bound[static_cast<std::size_t>(k)];
      if (ok) {
        best = std::max(best, Rat(Rat(d) - geo.P.gauge(z)));
        break;
      }
    }
  });
  report.C2_exact = best;
}

namespace {

std::string point_set(const CycleGeometry& geo, const std::vector<int>& F) {
  std::string s = "{";
  for (std::size_t i = 0; i < F.size(); ++i) s += (i ? " " : "") + to_string(geo.P.points[static_cast<std::size_t>(F[i])]);
  return s + "}";
}

}  // namespace

std::string render_report(const InvariantReport& r, const CycleGeometry& geo) {
  std::ostringstream os;
  os << "graph " << r.name << " start " << r.start << " classes " << r.classes << " W " << r.W << " epsilon "
     << to_string(r.epsilon) << "\n";
  os << "C1 " << to_string(r.C1) << "\nC2' " << to_string(r.C2p) << "\n";
  for (const auto& e : r.entries) {
    os << "facet " << e.facet << " " << to_string(geo.P.facets[static_cast<std::size_t>(e.facet)].normal) << " simplex "
       << e.simplex << " vertex " << to_string(e.v) << " cpx " << e.cpx << "\n";
    for (const auto& rec : e.records) {
      os << "  F " << point_set(geo, rec.F) << " s " << rec.s << " a";
      for (const auto& a : rec.support.a) os << " " << to_string(a);
      os << " h " << to_string(rec.support.h) << " alpha' " << to_string(rec.alpha_prime) << "\n";
    }
    os << "  alpha " << to_string(e.alpha) << " alpha' " << to_string(e.alpha_prime) << " beta " << to_string(e.beta)
       << " beta' " << to_string(e.beta_prime) << "\n";
  }
  for (const auto& s : r.simplices)
    os << "simplex facet " << s.facet << " #" << s.simplex << " beta " << to_string(s.beta) << "\n";
  os << "beta " << to_string(r.beta) << "\ncpx_Gamma " << r.cpx_gamma << "\nR";
  for (int a : r.R.cover.factors) os << " (1-t^" << a << ")";
  os << "\ndeg R " << r.R_degree() << " (exact lcm degree " << r.R.exact_degree << ")\ngamma " << r.gamma << "\n";
  if (r.C2_exact) os << "C2 " << to_string(*r.C2_exact) << (r.C2_exact_lower_bound ? " (lower bound only)" : "") << "\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  return os.str();
}

std::string report_json(const InvariantReport& r, const CycleGeometry& geo) {
  using json = nlohmann::json;
  auto vec = [](const RatVec& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(to_string(v(k)));
    return a;
  };
  json j;
  j["name"] = r.name;
  j["start"] = r.start;
  j["W"] = r.W;
  j["epsilon"] = to_string(r.epsilon);
  j["C1"] = to_string(r.C1);
  j["C2_prime"] = to_string(r.C2p);
  j["records"] = json::array();
  for (const auto& e : r.entries)
    for (const auto& rec : e.records) {
      json x;
      x["facet"] = vec(geo.P.facets[static_cast<std::size_t>(e.facet)].normal);
      x["simplex"] = e.simplex;
      x["vertex"] = vec(e.v);
      x["cpx"] = e.cpx;
      json F = json::array();
      json m = json::array();
      for (int u : rec.F) {
        F.push_back(vec(geo.P.points[static_cast<std::size_t>(u)]));
        for (const auto& vi : r.vertices)
          if (vi.facet == e.facet && vi.v == e.v) m.push_back(vi.m.at(u));
      }
      x["F"] = F;
      x["m"] = m;
      x["s"] = rec.s;
      json a = json::array();
      for (const auto& q : rec.support.a) a.push_back(to_string(q));
      x["a"] = a;
      x["h"] = to_string(rec.support.h);
      x["alpha_prime"] = to_string(rec.alpha_prime);
      x["beta"] = to_string(e.beta);
      j["records"].push_back(x);
    }
  j["beta"] = to_string(r.beta);
  j["cpx_gamma"] = r.cpx_gamma;
  j["R"] = r.R.cover.factors;
  j["gamma"] = r.gamma;
  if (r.C2_exact) {
    j["C2_exact"] = to_string(*r.C2_exact);
    j["C2_exact_lower_bound"] = r.C2_exact_lower_bound;
  }
  j["notes"] = r.notes;
  return j.dump(2);
}

}  // namespace pg
