#include <doctest.h>

#include "../common.hpp"

#include "pg/pipeline.hpp"

#include <cstdio>
#include <fstream>

using namespace pg;

namespace {

IntPoly ip(std::initializer_list<long> c) {
  std::vector<BigInt> v;
  for (long x : c) v.emplace_back(x);
  return IntPoly(std::move(v));
}

// Equality of rational functions by cross-multiplication.
bool same_function(const GrowthSeries& s, const IntPoly& num, const std::vector<int>& den) {
  return s.numerator * FactoredDenominator{den}.expand() == num * s.denominator.expand();
}

std::string stage_message(const RunConfig& cfg) {
  try {
    run_series(cfg);
  } catch (const StageError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("Wakatsuki end to end") {
  RunConfig cfg;
  cfg.input = testing::fixture("wakatsuki");
  cfg.start = 2;
  SeriesRun run = run_series(cfg);
  CHECK(run.report.beta == 25);
  CHECK(run.report.cpx_gamma == 2);
  CHECK(run.prediction.ok);
  CHECK(run.terms.s.size() == static_cast<std::size_t>(run.report.gamma + 1 + 100));
  CHECK(same_function(run.series, ip({1, 2, 2, 8, 5, 2, -2}), {2, 2}));
  CHECK(run.qp.period == 2);
  CHECK(reconstruction_residual(run.series, run.terms.s).is_zero());

  auto samples = translation_check(run.prep, run.report, 200);
  CHECK(samples.size() == 200);
  for (const auto& s : samples) CHECK(s.ok);
}

TEST_CASE("snub-632 from the distinguished start") {
  RunConfig cfg;
  cfg.input = testing::fixture("snub632_dual");
  cfg.start = 4;
  SeriesRun run = run_series(cfg);
  CHECK(run.prediction.ok);
  CHECK(same_function(run.series, ip({1, 6, 12, 10, 12, 12, 1}), {3, 3}));
}

TEST_CASE("square lattice translation samples") {
  RunConfig cfg;
  cfg.input = testing::fixture("square");
  Prepared p = prepare(cfg);
  InvariantReport r = compute_invariants(p, cfg);
  auto samples = translation_check(p, r, 100);
  for (const auto& s : samples) {
    CHECK(s.ok);
    CHECK(s.d_after == s.d_before + 1);
  }
}

TEST_CASE("errors carry the module that raised them") {
  RunConfig cfg;
  cfg.input = testing::fixture("no_such_graph");
  CHECK(stage_message(cfg).rfind("graph_model:", 0) == 0);

  cfg.input = testing::fixture("square");
  cfg.start = 3;
  CHECK(stage_message(cfg).rfind("cli_frontend:", 0) == 0);

  cfg.start = 0;
  cfg.epsilon = Rat(3, 2);
  CHECK(stage_message(cfg).rfind("cli_frontend:", 0) == 0);

  cfg.epsilon = Rat(1, 2);
  cfg.cycle_cap = 2;
  CHECK(stage_message(cfg).rfind("quotient_cycles:", 0) == 0);

  PeriodicGraph ray = parse_graph(R"({"dim": 1, "classes": 1, "edges": [{"from": 0, "to": 0, "shift": [1]}], "pos": [["0"]]})");
  RunConfig rc;
  try {
    run_series(ray, rc);
    FAIL("expected rejection");
  } catch (const StageError& e) {
    CHECK(std::string(e.what()).find("graph_model: input rejected") == 0);
  }

  cfg.cycle_cap = 10'000'000;
  cfg.triangulation = testing::fixture("no_such_override");
  CHECK(stage_message(cfg).rfind("growth_geometry:", 0) == 0);
}

TEST_CASE("triangulation override through the pipeline") {
  RunConfig cfg;
  cfg.input = testing::fixture("k6");
  Prepared base = prepare(cfg);
  int f = -1;
  for (std::size_t k = 0; k < base.geo.P.facets.size(); ++k)
    if (base.geo.P.facets[k].points.size() == 4) f = static_cast<int>(k);
  REQUIRE(f >= 0);
  const auto& T = base.geo.tri[static_cast<std::size_t>(f)];
  auto list = [](const RatVec& v) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ",\"" : "\"") + to_string(v(i)) + "\"";
    return s + "]";
  };
  auto write = [&](const std::string& path, const std::vector<std::vector<int>>& simplices) {
    std::string s = "{\"facet\": " + list(base.geo.P.facets[static_cast<std::size_t>(f)].normal) + ", \"simplices\": [";
    for (std::size_t k = 0; k < simplices.size(); ++k) {
      s += k ? ",[" : "[";
      for (std::size_t j = 0; j < simplices[k].size(); ++j) s += (j ? "," : "") + list(T.verts[static_cast<std::size_t>(simplices[k][j])]);
      s += "]";
    }
    std::ofstream(path) << s << "]}";
  };
  const std::string good = "override_good.json", bad = "override_bad.json";
  write(good, {T.simplices[1], T.simplices[0]});
  write(bad, {T.simplices[0]});
  cfg.triangulation = good;
  Prepared p = prepare(cfg);
  CHECK(p.geo.tri[static_cast<std::size_t>(f)].simplices.size() == 2);
  cfg.triangulation = bad;
  try {
    prepare(cfg);
    FAIL("expected rejection");
  } catch (const StageError& e) {
    CHECK(std::string(e.what()).rfind("growth_geometry:", 0) == 0);
  }
  std::remove(good.c_str());
  std::remove(bad.c_str());
}

TEST_CASE("structured output is reproducible") {
  RunConfig cfg;
  cfg.input = testing::fixture("cairo");
  cfg.check_extra = 20;
  std::string a = series_document(run_series(cfg));
  std::string b = series_document(run_series(cfg));
  CHECK(a == b);
  CHECK(a.find("\"denominator_factors\"") != std::string::npos);
  CHECK(a.find("\"prediction_ok\": true") != std::string::npos);
}
