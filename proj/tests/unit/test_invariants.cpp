#include <doctest.h>

#include "../common.hpp"

#include "pg/pipeline.hpp"

#include <map>
#include <random>
#include <set>

using namespace pg;

namespace {

struct Fixture {
  PeriodicGraph g;
  CycleGeometry geo;
  InvariantReport report;
};

// Reports are cached across test cases; each costs up to a few seconds.
const Fixture& fixture(const std::string& name, int start) {
  static std::map<std::pair<std::string, int>, Fixture> cache;
  auto key = std::make_pair(name, start);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  RunConfig cfg;
  cfg.start = start;
  Prepared p = prepare(testing::load(name), cfg);
  Fixture f{p.graph, p.geo, compute_invariants(p, cfg)};
  return cache.emplace(key, std::move(f)).first->second;
}

std::multiset<Rat> a_values(const InvariantReport& r) {
  std::multiset<Rat> out;
  for (const auto& e : r.entries)
    for (const auto& rec : e.records) out.insert(rec.support.a[static_cast<std::size_t>(e.vpos)]);
  return out;
}

bool has_record(const InvariantReport& r, int cpx, int s, const Rat& a, const Rat& h) {
  for (const auto& e : r.entries)
    for (const auto& rec : e.records)
      if (e.cpx == cpx && rec.s == s && rec.support.a[static_cast<std::size_t>(e.vpos)] == a && rec.support.h == h)
        return true;
  return false;
}

struct FacetCycle {
  int w;
  IVec mu;
  std::uint64_t supp;
  int point;
};

// Cycles whose normalized displacement lies on the facet.
std::vector<FacetCycle> facet_cycles(const PeriodicGraph& g, const CycleGeometry& geo, int facet) {
  std::vector<FacetCycle> out;
  const auto& n = geo.P.facets[static_cast<std::size_t>(facet)].normal;
  for (const auto& q : enumerate_cycles(g))
    if (n.dot(q.nu) == 1) out.push_back({q.weight, q.mu, q.support, geo.table.find(q.nu)});
  return out;
}

// Exhaustive search for b with sum b w = cpx (forced on a facet) and sum b mu = target.
// mode 'S': b <= a and every used cycle has a support superset with b < a.
// mode 'R': b positive only where a is.
bool witness_exists(const std::vector<FacetCycle>& cyc, const std::vector<int>& a, int cpx, const IVec& target, char mode) {
  std::vector<int> b(cyc.size(), 0);
  IVec sum = IVec::Zero(target.size());
  auto leaf = [&]() {
    if (sum != target) return false;
    if (mode == 'R') return true;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      if (b[i] == 0) continue;
      bool ok = false;
      for (std::size_t j = 0; j < cyc.size() && !ok; ++j)
        ok = b[j] < a[j] && (cyc[i].supp & ~cyc[j].supp) == 0;
      if (!ok) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t i, int rem) -> bool {
    if (rem == 0) return leaf();
    if (i == cyc.size()) return false;
    int cap = rem / cyc[i].w;
    if (mode == 'S') cap = std::min(cap, a[i]);
    if (mode == 'R' && a[i] == 0) cap = 0;
    for (int k = cap; k >= 0; --k) {
      b[i] = k;
      sum += cyc[i].mu * k;
      bool found = self(self, i + 1, rem - k * cyc[i].w);
      sum -= cyc[i].mu * k;
      b[i] = 0;
      if (found) return true;
    }
    return false;
  };
  return rec(rec, 0, cpx);
}

// Samples near-minimal a meeting the thresholds and searches for a witness b.
int spot_check(const Fixture& f, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::map<int, std::vector<FacetCycle>> per_facet;
  int failures = 0;
  for (int k = 0; k < samples; ++k) {
    const auto& e = f.report.entries[rng() % f.report.entries.size()];
    auto& cyc = per_facet[e.facet];
    if (cyc.empty()) cyc = facet_cycles(f.g, f.geo, e.facet);
    RatVec tv = e.v * Rat(e.cpx);
    IVec target(tv.size());
    for (Eigen::Index j = 0; j < tv.size(); ++j) target(j) = numerator(tv(j)).convert_to<std::int64_t>();
    for (char mode : {'S', 'R'}) {
      std::vector<int> a(cyc.size(), 0);
      for (const auto& rec : e.records) {
        std::vector<std::size_t> inF;
        for (std::size_t i = 0; i < cyc.size(); ++i)
          if (std::find(rec.F.begin(), rec.F.end(), cyc[i].point) != rec.F.end()) inF.push_back(i);
        REQUIRE_FALSE(inF.empty());
        const int threshold = mode == 'S' ? rec.s : 0;
        auto mass = [&]() {
          long m = 0;
          for (std::size_t i : inF) m += static_cast<long>(a[i]) * cyc[i].w;
          return m;
        };
        while (mass() <= threshold) ++a[inF[rng() % inF.size()]];
      }
      if (!witness_exists(cyc, a, e.cpx, target, mode)) ++failures;
    }
  }
  return failures;
}

}  // namespace

TEST_CASE("square lattice invariants") {
  const auto& f = fixture("square", 0);
  CHECK(f.report.C1 == 0);
  CHECK(f.report.C2p == 0);
  for (const auto& e : f.report.entries) CHECK(e.cpx == 1);
  CHECK(f.report.cpx_gamma == 1);
  RatVec e1(2);
  e1 << 1, 0;
  int facet = -1;
  for (std::size_t k = 0; k < f.geo.P.facets.size(); ++k)
    if (f.geo.P.facets[k].normal.dot(e1) == 1) facet = static_cast<int>(k);
  auto vi = compute_vertex_invariants(f.geo, facet, e1);
  CHECK(vi.cpx == 1);
  // Self case: m(v) = cpx.
  int idx = f.geo.table.find(e1);
  CHECK(compute_m(f.geo, e1, vi.support_set, idx, vi.cpx) == vi.cpx);
}

TEST_CASE("Wakatsuki invariants") {
  const auto& f = fixture("wakatsuki", 2);
  const auto& r = f.report;
  CHECK(r.C1 == 1);
  CHECK(r.C2p == 3);
  CHECK(r.beta == 25);
  CHECK(r.cpx_gamma == 2);
  CHECK(r.entries.size() == 12);
  for (const auto& e : r.entries) {
    CHECK(e.cpx == 2);
    for (const auto& rec : e.records) CHECK(rec.s == 2);
    CHECK((e.beta == 11 || e.beta == 7));
    CHECK(e.beta_prime == e.beta + e.cpx);
  }
  auto a = a_values(r);
  CHECK(a.count(Rat(2, 3)) == 8);
  CHECK(a.count(Rat(1, 2)) == 4);
  std::multiset<Rat> sb;
  for (const auto& s : r.simplices) sb.insert(s.beta);
  CHECK(sb == std::multiset<Rat>{18, 18, 18, 18, 22, 22});
}

TEST_CASE("three-uniform invariants") {
  const auto& f = fixture("three_uniform", 0);
  const auto& r = f.report;
  std::set<int> cpx;
  for (const auto& e : r.entries) cpx.insert(e.cpx);
  CHECK(cpx == std::set<int>{4, 7, 11});
  std::set<int> s;
  for (const auto& e : r.entries)
    for (const auto& rec : e.records) s.insert(rec.s);
  CHECK(s == std::set<int>{20, 42, 86, 108});
  CHECK(r.C2p == 13);
  CHECK(r.R_degree() == 22);
  CHECK(r.gamma == floor(r.beta).convert_to<int>() + 22);
  CHECK(has_record(r, 7, 42, Rat(21, 22), Rat(21, 22)));
  CHECK(has_record(r, 4, 20, Rat(10, 11), Rat(10, 11)));
  CHECK(has_record(r, 11, 108, Rat(22, 23), Rat(14, 15)));
  CHECK(has_record(r, 11, 86, Rat(22, 23), Rat(8, 9)));
}

TEST_CASE("K6 invariants") {
  const auto& f = fixture("k6", 0);
  const auto& r = f.report;
  CHECK(r.C1 == Rat(1, 2));
  CHECK(r.C2p == 13);
  CHECK(r.beta == 396);
  std::set<int> cpx;
  for (const auto& e : r.entries) cpx.insert(e.cpx);
  CHECK(cpx == std::set<int>{4, 6, 12});
  CHECK(has_record(r, 4, 8, Rat(4, 5), Rat(4, 5)));
  CHECK(has_record(r, 6, 6, Rat(6, 7), Rat(6, 7)));
  CHECK(has_record(r, 12, 24, Rat(12, 13), Rat(6, 7)));
  for (const auto& e : r.entries)
    if (e.cpx == 4) CHECK(e.alpha_prime == Rat(5) * r.C1 + Rat(4) * r.C2p + 19);
  // m at the midpoint: 6 at both ends, 12 at itself.
  for (const auto& vi : r.vertices) {
    if (vi.cpx != 12) continue;
    std::multiset<int> m;
    for (auto [u, val] : vi.m) m.insert(val);
    CHECK(m == std::multiset<int>{6, 6, 12});
  }
}

TEST_CASE("CFS invariants") {
  const auto& f = fixture("cfs", 0);
  const auto& r = f.report;
  CHECK(r.C1 == Rat(3, 5));
  CHECK(r.C2p == 7);
  CHECK(r.beta == 210);
  std::set<int> cpx;
  for (const auto& e : r.entries) cpx.insert(e.cpx);
  CHECK(cpx == std::set<int>{3, 4, 6, 12});
  bool centre = false;
  for (const auto& vi : r.vertices) {
    if (vi.cpx != 12 || vi.family.size() != 4) continue;
    centre = true;
    CHECK(vi.m.size() == 4);
    for (auto [u, val] : vi.m) CHECK(val == 6);
  }
  CHECK(centre);
  CHECK(has_record(r, 12, 15, Rat(12, 13), Rat(6, 7)));
  CHECK(has_record(r, 6, 6, Rat(6, 7), Rat(6, 7)));
  CHECK(has_record(r, 3, 6, Rat(3, 4), Rat(3, 4)));
}

TEST_CASE("report structure invariants on every fixture") {
  for (const auto& fx : testing::fixtures()) {
    CAPTURE(fx.name);
    const auto& f = fixture(fx.name, fx.start);
    const auto& r = f.report;
    CHECK(r.beta >= r.C2p);
    CHECK(r.gamma == floor(r.beta).convert_to<int>() + r.R_degree());
    for (const auto& e : r.entries) {
      CHECK(r.cpx_gamma % e.cpx == 0);
      CHECK(e.beta == std::max(e.alpha, e.alpha_prime - e.cpx));
      CHECK(e.beta_prime == e.beta + e.cpx);
      // cpx v is a lattice vector.
      for (Eigen::Index j = 0; j < e.v.size(); ++j) CHECK(denominator(e.v(j) * Rat(e.cpx)) == 1);
    }
    // The exact LCM divides (1 - t^cpx_gamma)^n; the (1 - t^a) cover is a multiple of it.
    IntPoly bound = IntPoly::constant(BigInt(1));
    for (int k = 0; k < f.g.dim; ++k) bound = bound * one_minus_t_pow(static_cast<int>(r.cpx_gamma));
    CHECK(divmod_monic(bound, expand(r.R.exact)).second.is_zero());
    CHECK(divmod_monic(r.R.cover.expand(), expand(r.R.exact)).second.is_zero());
  }
}

TEST_CASE("C1 and C2' on small inputs") {
  PeriodicGraph sq = testing::load("square");
  CycleGeometry geo = build_cycle_geometry(sq);
  CHECK(compute_C1(sq, 0, geo.P) == 0);
  CHECK(compute_C2_prime(sq, 0, geo).value == 0);
}

TEST_CASE("sandwich bounds hold on radius-30 balls") {
  for (const auto& fx : testing::fixtures()) {
    CAPTURE(fx.name);
    const auto& f = fixture(fx.name, fx.start);
    auto s = sandwich_check(f.g, fx.start, f.geo.P, f.report.C1, f.report.C2p, 30);
    CHECK(s.checked > 0);
    CHECK(s.violations == 0);
  }
}

TEST_CASE("exact C2") {
  {
    const auto& f = fixture("square", 0);
    InvariantReport r = f.report;
    compute_C2_exact(f.g, f.geo, r);
    REQUIRE(r.C2_exact);
    CHECK(*r.C2_exact == 0);
  }
  const auto& f = fixture("wakatsuki", 2);
  InvariantReport r = f.report;
  compute_C2_exact(f.g, f.geo, r);
  REQUIRE(r.C2_exact);
  CHECK_FALSE(r.C2_exact_lower_bound);
  CHECK(*r.C2_exact >= 0);
  CHECK(*r.C2_exact <= r.C2p);
  auto s = sandwich_check(f.g, 2, f.geo.P, r.C1, *r.C2_exact, 40);
  CHECK(s.violations == 0);
}

TEST_CASE("a larger C2' only raises beta and leaves the series unchanged") {
  const auto& f = fixture("wakatsuki", 2);
  InvariantReport big = assemble_report(f.g, 2, f.geo, Rat(1, 2), f.report.C1, f.report.C2p + 4);
  CHECK(big.beta > f.report.beta);
  auto terms = growth_terms(f.g, 2, big.gamma + 20).s;
  std::vector<std::uint64_t> small_prefix(terms.begin(), terms.begin() + f.report.gamma + 1);
  std::vector<std::uint64_t> big_prefix(terms.begin(), terms.begin() + big.gamma + 1);
  auto a = reconstruct_series(small_prefix, f.report.beta, f.report.R.cover);
  auto b = reconstruct_series(big_prefix, big.beta, big.R.cover);
  CHECK(a.numerator == b.numerator);
  CHECK(a.denominator.factors == b.denominator.factors);
}

TEST_CASE("witness functions b exist for sampled a meeting the thresholds") {
  CHECK(spot_check(fixture("square", 0), 40, 1) == 0);
  CHECK(spot_check(fixture("wakatsuki", 2), 200, 2) == 0);
  CHECK(spot_check(fixture("three_uniform", 0), 60, 3) == 0);
  CHECK(spot_check(fixture("cfs", 0), 60, 4) == 0);
  CHECK(spot_check(fixture("k6", 0), 30, 5) == 0);
}
