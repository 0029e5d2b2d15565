#include <doctest.h>

#include "../common.hpp"
#include "../oracles.hpp"

#include "pg/cycles.hpp"
#include "pg/graph.hpp"

#include <random>

using namespace pg;

namespace {

const char* kWakatsukiAssignment = R"(dim=2
c=3
edges=[
    [(1,(0,0)),(1,(-1,0)),(1,(-1,-1)),(2,(0,0))],
    [(0,(0,0)),(0,(1,0)),(0,(1,1)),(2,(0,0))],
    [(0,(0,0)),(1,(0,0))]
]
pos=[(0,0),(0.5,0.5),(0.5,0)]
)";

const char* kSquare = R"({"dim": 2, "classes": 1, "undirected": true,
  "edges": [{"from": 0, "to": 0, "shift": [1, 0]}, {"from": 0, "to": 0, "shift": [0, 1]}],
  "pos": [["0", "0"]]})";

std::string message_of(const std::string& doc) {
  try {
    parse_graph(doc);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("square document parses and symmetrizes") {
  PeriodicGraph g = parse_graph(kSquare);
  CHECK(g.dim == 2);
  CHECK(g.classes == 1);
  CHECK(g.edges.size() == 4);
  CHECK(g.max_weight() == 1);
  auto v = validate_graph(g);
  CHECK(v.quotient_strongly_connected);
  CHECK(v.zero_in_interior);
  CHECK(v.max_weight == 1);
  CHECK(v.accepted());
}

TEST_CASE("assignment style matches the structured fixture") {
  PeriodicGraph a = parse_assignment_graph(kWakatsukiAssignment);
  PeriodicGraph f = testing::load("wakatsuki");
  CHECK(a.dim == 2);
  CHECK(a.classes == 3);
  CHECK(a.edges.size() == 10);
  CHECK(a.out_edges()[0].size() == 4);
  CHECK(a.pos[1](0) == Rat(1, 2));
  CHECK(a.pos[2](1) == Rat(0));
  CHECK(symmetrize(a).edges.size() == a.edges.size());
  a.name = f.name;
  CHECK(render_graph(symmetrize(a)) == render_graph(symmetrize(f)));
}

TEST_CASE("render then parse is the identity on every fixture") {
  for (const auto& fx : testing::fixtures()) {
    CAPTURE(fx.name);
    PeriodicGraph g = testing::load(fx.name);
    CHECK(parse_graph(render_graph(g)) == g);
  }
}

TEST_CASE("symmetrize is idempotent and closes under reversal") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    PeriodicGraph g;
    g.dim = 2;
    g.classes = 3;
    for (int k = 0; k < 7; ++k) {
      LabeledEdge e;
      e.from = static_cast<int>(rng() % 3);
      e.to = static_cast<int>(rng() % 3);
      e.shift = IVec(2);
      e.shift << static_cast<long>(rng() % 3) - 1, static_cast<long>(rng() % 3) - 1;
      e.weight = 1 + static_cast<int>(rng() % 2);
      g.edges.push_back(e);
    }
    g.pos.assign(3, RatVec::Zero(2));
    PeriodicGraph s = symmetrize(g);
    CHECK(symmetrize(s) == s);
    for (const auto& e : s.edges) {
      auto count = [&](const LabeledEdge& x) { return std::count(s.edges.begin(), s.edges.end(), x); };
      CHECK(count(e) == count(LabeledEdge{e.to, e.from, IVec(-e.shift), e.weight}));
    }
  }
}

TEST_CASE("schema violations name the field") {
  CHECK(message_of(R"({"dim": 4, "classes": 1, "edges": [], "pos": [["0","0","0","0"]]})").find("'dim'") !=
        std::string::npos);
  CHECK(message_of(R"({"dim": 1, "classes": 1, "edges": [{"from": 0, "to": 2, "shift": [1]}], "pos": [["0"]]})")
            .find("edges[0].to") != std::string::npos);
  CHECK(message_of(R"({"dim": 1, "classes": 1, "edges": [{"from": 0, "to": 0, "shift": [1], "weight": 0}], "pos": [["0"]]})")
            .find("edges[0].weight") != std::string::npos);
  CHECK(message_of(R"({"dim": 1, "classes": 1, "edges": [], "pos": [["1e-3"]]})").find("pos[0]") != std::string::npos);
  CHECK(message_of(R"({"dim": 1, "classes": 2, "edges": [], "pos": [["0"]]})").find("'pos'") != std::string::npos);
  CHECK(message_of(R"({"classes": 1, "edges": [], "pos": [["0"]]})").find("'dim'") != std::string::npos);
  CHECK(message_of("{not json").find("malformed") != std::string::npos);
}

TEST_CASE("validation rejects degenerate inputs") {
  // A single +e1 loop: P is a segment on one side of the origin.
  PeriodicGraph ray = parse_graph(R"({"dim": 1, "classes": 1, "edges": [{"from": 0, "to": 0, "shift": [1]}], "pos": [["0"]]})");
  auto v = validate_graph(ray);
  CHECK(v.quotient_strongly_connected);
  CHECK_FALSE(v.zero_in_interior);
  CHECK_FALSE(v.accepted());

  // Two components in the quotient.
  PeriodicGraph split = parse_graph(R"({"dim": 1, "classes": 2, "undirected": true,
    "edges": [{"from": 0, "to": 0, "shift": [1]}, {"from": 1, "to": 1, "shift": [1]}], "pos": [["0"], ["1/2"]]})");
  CHECK_FALSE(validate_graph(split).quotient_strongly_connected);

  // Steps of two only reach the even sublattice.
  PeriodicGraph even = parse_graph(R"({"dim": 1, "classes": 1, "undirected": true,
    "edges": [{"from": 0, "to": 0, "shift": [2]}], "pos": [["0"]]})");
  CHECK(validate_graph(even).cycle_lattice_index == 2);
  CHECK_FALSE(validate_graph(even).accepted());

  // Zero-shift loops are accepted with a warning.
  PeriodicGraph loop = parse_graph(R"({"dim": 1, "classes": 1, "undirected": true,
    "edges": [{"from": 0, "to": 0, "shift": [1]}, {"from": 0, "to": 0, "shift": [0]}], "pos": [["0"]]})");
  auto lv = validate_graph(loop);
  CHECK(lv.accepted());
  CHECK_FALSE(lv.warnings.empty());
}

TEST_CASE("every shipped fixture validates") {
  for (const auto& fx : testing::fixtures()) {
    CAPTURE(fx.name);
    auto v = validate_graph(testing::load(fx.name));
    CHECK(v.quotient_strongly_connected);
    CHECK(v.zero_in_interior);
    CHECK(v.cycle_lattice_index == 1);
  }
  CHECK(validate_graph(testing::load("wakatsuki")).max_weight == 1);
}

TEST_CASE("cycle enumeration matches a brute-force oracle") {
  auto summarize = [](const PeriodicGraph& g) {
    std::multiset<oracle::CycleSummary> out;
    for (const auto& q : enumerate_cycles(g))
      out.insert({q.weight, std::vector<long>(q.mu.data(), q.mu.data() + q.mu.size()), q.support});
    return out;
  };
  for (const char* name : {"square", "honeycomb", "wakatsuki", "cairo", "snub_square", "k6", "cfs"}) {
    CAPTURE(name);
    PeriodicGraph g = testing::load(name);
    CHECK(summarize(g) == oracle::cycles(g));
  }
  std::mt19937 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    PeriodicGraph g = oracle::random_graph(rng, 2 + static_cast<int>(rng() % 3), 4, 3);
    CHECK(summarize(g) == oracle::cycles(g));
  }
}

TEST_CASE("cycle records are internally consistent") {
  for (const auto& fx : testing::fixtures()) {
    CAPTURE(fx.name);
    PeriodicGraph g = testing::load(fx.name);
    auto cycles = enumerate_cycles(g);
    for (const auto& q : cycles) {
      IVec mu = IVec::Zero(g.dim);
      int w = 0;
      for (std::size_t k = 0; k < q.edges.size(); ++k) {
        const auto& e = g.edges[static_cast<std::size_t>(q.edges[k])];
        const auto& next = g.edges[static_cast<std::size_t>(q.edges[(k + 1) % q.edges.size()])];
        CHECK(e.to == next.from);
        mu += e.shift;
        w += e.weight;
      }
      CHECK(mu == q.mu);
      CHECK(w == q.weight);
      CHECK(to_rat(q.mu) == q.nu * Rat(q.weight));
      CHECK(__builtin_popcountll(q.support) == q.length());
    }
    CHECK(enumerate_cycles(g).size() == cycles.size());
  }
}

TEST_CASE("cycle examples") {
  auto sq = enumerate_cycles(testing::load("square"));
  CHECK(sq.size() == 4);
  for (const auto& q : sq) CHECK(q.weight == 1);

  PeriodicGraph path = parse_graph(R"({"dim": 1, "classes": 2, "undirected": true,
    "edges": [{"from": 0, "to": 1, "shift": [0]}], "pos": [["0"], ["1/2"]]})");
  auto pc = enumerate_cycles(path);
  REQUIRE(pc.size() == 1);
  CHECK(pc[0].length() == 2);
  CHECK(pc[0].mu == IVec::Zero(1));

  CHECK_THROWS(enumerate_cycles(testing::load("k6"), 10));
}

TEST_CASE("nu table quantities") {
  // Wakatsuki: the six hull vertices each carry one 2-cycle up to rotation, so
  // Len = {2} and num = 1.
  auto wt = build_nu_table(enumerate_cycles(testing::load("wakatsuki")));
  CHECK(wt.entries.size() == 11);
  int hull = 0;
  for (const auto& e : wt.entries)
    if (e.lens() == std::vector<int>{2} && e.num(2) == 1) ++hull;
  CHECK(hull == 6);

  // Square: four points, each with minimal length 1.
  auto st = build_nu_table(enumerate_cycles(testing::load("square")));
  CHECK(st.entries.size() == 4);
  for (const auto& e : st.entries) CHECK(e.min_len() == 1);

  // Three-uniform: lengths 7, 4, 11 with 6, 5, 6 distinct supports on one facet.
  auto tu = build_nu_table(enumerate_cycles(testing::load("three_uniform")));
  std::multiset<std::pair<int, int>> lens;
  for (const auto& e : tu.entries)
    if (e.lens().size() == 1) lens.insert({e.lens()[0], e.num(e.lens()[0])});
  CHECK(lens.count({7, 6}) >= 1);
  CHECK(lens.count({4, 5}) >= 1);
  CHECK(lens.count({11, 6}) >= 1);

  for (const auto& e : tu.entries) {
    CHECK(tu.find(e.point) >= 0);
    for (int d : e.lens()) CHECK(e.num(d) >= 1);
  }
}
