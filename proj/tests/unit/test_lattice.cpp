#include <doctest.h>

#include "../common.hpp"
#include "../oracles.hpp"

#include "pg/lattice.hpp"

#include <atomic>
#include <random>

using namespace pg;

TEST_CASE("growth terms match the unrolled-grid oracle up to N = 12 on every fixture") {
  for (const auto& fx : testing::fixtures()) {
    CAPTURE(fx.name);
    PeriodicGraph g = testing::load(fx.name);
    for (int start = 0; start < std::min(g.classes, 3); ++start) {
      auto t = growth_terms(g, start, 12);
      CHECK(t.s == oracle::growth(g, start, 12));
      CHECK(t.s[0] == 1);
      std::uint64_t b = 0;
      for (std::size_t i = 0; i < t.s.size(); ++i) {
        b += t.s[i];
        CHECK(t.b[i] == b);
        CHECK(t.s[i] > 0);
      }
    }
  }
}

TEST_CASE("weighted and random graphs match the Dijkstra oracle") {
  std::mt19937 rng(31);
  int tested = 0;
  for (int trial = 0; trial < 40; ++trial) {
    PeriodicGraph g = oracle::random_graph(rng, 1 + static_cast<int>(rng() % 4), static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 3));
    if (!validate_graph(g).accepted()) continue;
    ++tested;
    int start = static_cast<int>(rng() % static_cast<unsigned>(g.classes));
    CHECK(growth_terms(g, start, 12).s == oracle::growth(g, start, 12));
  }
  CHECK(tested >= 20);
}

TEST_CASE("growth term examples") {
  std::vector<std::uint64_t> sq{1, 4, 8, 12};
  CHECK(growth_terms(testing::load("square"), 0, 3).s == sq);
  std::vector<std::uint64_t> hc{1, 3, 6, 9};
  CHECK(growth_terms(testing::load("honeycomb"), 0, 3).s == hc);
  // Cairo from a quadratic start: coefficients of (1 + 2t + t^2) / (1 - t)^2.
  std::vector<std::uint64_t> cairo{1, 4, 8, 12, 16};
  CHECK(growth_terms(testing::load("cairo"), 0, 4).s == cairo);
}

TEST_CASE("distance map examples") {
  PeriodicGraph sq = testing::load("square");
  auto d0 = distance_map(sq, 0, 0);
  CHECK(d0.size() == 1);
  CHECK(d0.distance({0, IVec::Zero(2)}) == 0);
  CHECK(d0.distance({0, IVec::Ones(2)}) == -1);

  auto d2 = distance_map(sq, 0, 2);
  CHECK(d2.size() == 13);
  IVec y(2);
  y << 1, -1;
  CHECK(d2.distance({0, y}) == 2);

  PeriodicGraph w = testing::load("wakatsuki");
  auto dw = distance_map(w, 2, 3);
  CHECK(dw.size() == growth_terms(w, 2, 3).b[3]);
}

TEST_CASE("distance maps agree with the oracle and satisfy the edge inequality") {
  for (const char* name : {"wakatsuki", "cairo", "k6", "cfs"}) {
    CAPTURE(name);
    PeriodicGraph g = testing::load(name);
    const int D = 8;
    auto dm = distance_map(g, 0, D);
    auto ref = oracle::distances(g, 0, D);
    CHECK(dm.size() == ref.size());
    std::size_t bad = 0;
    dm.for_each([&](const Vertex& y, int d) {
      auto it = ref.find(oracle::key(y.cls, y.offset));
      if (it == ref.end() || it->second != d) ++bad;
      for (const auto& e : g.edges) {
        if (e.from != y.cls) continue;
        int dn = dm.distance({e.to, IVec(y.offset + e.shift)});
        if (d + e.weight <= D && (dn < 0 || dn > d + e.weight)) ++bad;
      }
    });
    CHECK(bad == 0);
  }
}

TEST_CASE("results do not depend on the thread count") {
  for (const char* name : {"three_uniform", "k6"}) {
    CAPTURE(name);
    PeriodicGraph g = testing::load(name);
    LatticeOptions one;
    one.threads = 1;
    LatticeOptions many;
    many.threads = 4;
    CHECK(growth_terms(g, 0, 60, one).s == growth_terms(g, 0, 60, many).s);
    auto a = distance_map(g, 0, 25, one);
    auto b = distance_map(g, 0, 25, many);
    CHECK(a.size() == b.size());
    std::size_t diff = 0;
    a.for_each([&](const Vertex& y, int d) { diff += b.distance(y) != d; });
    CHECK(diff == 0);
  }
}

TEST_CASE("memory cap reports the achieved radius") {
  LatticeOptions tiny;
  tiny.max_bytes = 1 << 20;
  try {
    growth_terms(testing::load("k6"), 0, 200, tiny);
    FAIL("expected LatticeError");
  } catch (const LatticeError& e) {
    CHECK(e.achieved > 0);
    CHECK(e.achieved < 200);
  }
  CHECK_THROWS_AS(distance_map(testing::load("k6"), 0, 200, tiny), LatticeError);
}

TEST_CASE("parallel_for covers the range exactly once") {
  for (int threads : {1, 2, 5}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    int bad = 0;
    for (auto& h : hits) bad += h.load() != 1;
    CHECK(bad == 0);
  }
}
