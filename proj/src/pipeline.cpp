#include "pg/pipeline.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace pg {

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(std::string(name) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

LatticeOptions lattice_options(const RunConfig& cfg) {
  LatticeOptions o;
  o.max_bytes = cfg.max_bytes;
  return o;
}

}  // namespace

Prepared prepare(const RunConfig& cfg) {
  PeriodicGraph g = stage("graph_model", [&] { return load_graph(cfg.input); });
  return prepare(g, cfg);
}

Prepared prepare(const PeriodicGraph& g, const RunConfig& cfg) {
  Prepared p;
  p.graph = g;
  stage("cli_frontend", [&] {
    if (cfg.start < 0 || cfg.start >= g.classes)
      throw std::invalid_argument("start class " + std::to_string(cfg.start) + " is outside [0, " +
                                  std::to_string(g.classes) + ")");
    if (!(cfg.epsilon > 0 && cfg.epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
    return 0;
  });
  p.validation = stage("graph_model", [&] { return validate_graph(g); });
  if (!p.validation.accepted()) {
    std::string why;
    if (!p.validation.quotient_strongly_connected) why += " quotient graph is not strongly connected;";
    if (!p.validation.zero_in_interior) why += " origin is not interior to the growth polytope;";
    if (p.validation.cycle_lattice_index != 1)
      why += " closed walks generate a sublattice of index " + p.validation.cycle_lattice_index.str() + ";";
    throw StageError("graph_model: input rejected:" + why);
  }
  p.geo = stage("quotient_cycles", [&] {
    CycleGeometry geo;
    geo.table = build_nu_table(enumerate_cycles(g, cfg.cycle_cap));
    return geo;
  });
  stage("growth_geometry", [&] {
    p.geo.P = build_growth_polytope(p.geo.table.points(), g.dim);
    p.geo.tri = triangulate_facets(p.geo.P);
    if (cfg.triangulation)
      apply_overrides(p.geo.P, p.geo.tri, parse_triangulation_overrides(read_file(*cfg.triangulation)));
    for (const auto& T : p.geo.tri) {
      verify_triangulation(p.geo.P, T);
      for (const auto& v : T.verts)
        if (!verify_choice_property(p.geo.P, T.facet, v, halfspace_family(p.geo.P, T.facet, v)))
          throw GeometryError("half-space family at " + to_string(v) + " fails the choice property");
    }
    return 0;
  });
  return p;
}

InvariantReport compute_invariants(const Prepared& p, const RunConfig& cfg) {
  return stage("invariant_engine", [&] {
    const auto opt = lattice_options(cfg);
    Rat C1 = compute_C1(p.graph, cfg.start, p.geo.P, opt);
    Rat C2p = compute_C2_prime(p.graph, cfg.start, p.geo).value;
    InvariantReport r = assemble_report(p.graph, cfg.start, p.geo, cfg.epsilon, C1, C2p);
    if (cfg.exact_c2) compute_C2_exact(p.graph, p.geo, r, opt);
    return r;
  });
}

std::vector<TranslationSample> translation_check(const Prepared& p, const InvariantReport& r, int samples,
                                                 const LatticeOptions& opt, unsigned seed) {
  return stage("lattice_engine", [&] {
    const PeriodicGraph& g = p.graph;
    const int n = g.dim;
    std::mt19937 rng(seed);
    struct Pick {
      Vertex y;
      const SimplexVertexInvariants* e;
      IVec step;
      Rat reach;
    };
    std::vector<Pick> picks;
    const RatVec& x0 = g.pos[static_cast<std::size_t>(r.start)];
    for (int k = 0, guard = 0; k < samples; ++guard) {
      if (guard > 1000 * samples + 1000) throw std::runtime_error("translation check: cannot place samples");
      const auto& e = r.entries[rng() % r.entries.size()];
      const auto& T = p.geo.tri[static_cast<std::size_t>(e.facet)];
      const auto& ids = T.simplices[static_cast<std::size_t>(e.simplex)];
      RatVec step = e.v * Rat(e.cpx);
      IVec istep(n);
      for (int j = 0; j < n; ++j) {
        if (denominator(step(j)) != 1) throw std::runtime_error("cpx v is not a lattice vector at " + to_string(e.v));
        istep(j) = numerator(step(j)).convert_to<std::int64_t>();
      }
      // Target coordinates: beyond beta along v, modest along the others.
      RatVec z = RatVec::Zero(n);
      for (std::size_t j = 0; j < ids.size(); ++j) {
        Rat c = static_cast<int>(j) == e.vpos ? Rat(floor(e.beta).convert_to<long>() + 2 + static_cast<long>(rng() % 8))
                                              : Rat(static_cast<long>(rng() % 12));
        z += T.verts[static_cast<std::size_t>(ids[j])] * c;
      }
      int cls = static_cast<int>(rng() % static_cast<unsigned>(g.classes));
      Vertex y{cls, IVec(n)};
      RatVec base = z - g.pos[static_cast<std::size_t>(cls)] + x0;
      for (int j = 0; j < n; ++j) y.offset(j) = floor(base(j)).convert_to<std::int64_t>();
      RatVec disp = g.realize(y) - x0;
      RatVec coords = simplex_coordinates(T, e.simplex, disp);
      if ((coords.array() < Rat(0)).any() || !(coords(e.vpos) > e.beta)) continue;
      picks.push_back({y, &e, istep, p.geo.P.gauge(disp + step)});
      ++k;
    }
    Rat reach = 0;
    for (const auto& pk : picks) reach = std::max(reach, pk.reach);
    int radius = ceil(Rat(reach + r.C2p)).convert_to<int>() + g.max_weight();
    DistanceMap dm = distance_map(g, r.start, radius, opt);
    std::vector<TranslationSample> out;
    for (const auto& pk : picks) {
      TranslationSample s;
      s.y = pk.y;
      s.v = pk.e->v;
      s.cpx = pk.e->cpx;
      s.d_before = dm.distance(pk.y);
      Vertex moved{pk.y.cls, pk.y.offset + pk.step};
      s.d_after = dm.distance(moved);
      if (s.d_before < 0 || s.d_after < 0) throw std::runtime_error("translation check: distance map radius too small");
      s.ok = s.d_after == s.d_before + s.cpx;
      out.push_back(s);
    }
    return out;
  });
}

SandwichResult sandwich_check(const PeriodicGraph& g, int start, const GrowthPolytope& P, const Rat& C1, const Rat& C2p,
                              int radius, const LatticeOptions& opt) {
  SandwichResult res;
  DistanceMap dm = distance_map(g, start, radius, opt);
  const RatVec& x0 = g.pos[static_cast<std::size_t>(start)];
  dm.for_each([&](const Vertex& y, int d) {
    Rat gauge = P.gauge(g.realize(y) - x0);
    ++res.checked;
    if (Rat(d) < gauge - C1 || Rat(d) > gauge + C2p) ++res.violations;
  });
  return res;
}

SeriesRun run_series(const RunConfig& cfg) {
  PeriodicGraph g = stage("graph_model", [&] { return load_graph(cfg.input); });
  return run_series(g, cfg);
}

SeriesRun run_series(const PeriodicGraph& g, const RunConfig& cfg) {
  SeriesRun run;
  run.prep = prepare(g, cfg);
  run.report = compute_invariants(run.prep, cfg);
  const int total = run.report.gamma + std::max(0, cfg.check_extra);
  run.terms = stage("lattice_engine", [&] { return growth_terms(g, cfg.start, total, lattice_options(cfg)); });
  std::vector<std::uint64_t> first(run.terms.s.begin(), run.terms.s.begin() + run.report.gamma + 1);
  run.series = stage("series_builder", [&] { return reconstruct_series(first, run.report.beta, run.report.R.cover); });
  run.qp = stage("series_builder", [&] { return extract_quasipolynomial(run.series, g.dim); });
  run.prediction = compare_with_terms(run.series, run.terms.s);
  return run;
}

std::string series_document(const SeriesRun& run) {
  using json = nlohmann::json;
  json j;
  json num = json::array();
  for (const auto& c : run.series.numerator.c) num.push_back(c.convert_to<long long>());
  j["numerator"] = num;
  j["denominator_factors"] = run.series.denominator.factors;
  j["period"] = run.qp.period;
  j["threshold"] = run.qp.threshold;
  json pieces = json::array();
  for (const auto& p : run.qp.pieces) {
    json a = json::array();
    for (const auto& c : p) a.push_back(to_string(c));
    pieces.push_back(a);
  }
  j["pieces"] = pieces;
  j["gamma"] = run.report.gamma;
  j["beta"] = to_string(run.report.beta);
  j["latex"] = series_latex(run.series);
  j["C1"] = to_string(run.report.C1);
  j["C2_prime"] = to_string(run.report.C2p);
  j["cpx_gamma"] = run.report.cpx_gamma;
  j["R"] = run.report.R.cover.factors;
  j["verified_terms"] = run.terms.s.size();
  j["prediction_ok"] = run.prediction.ok;
  return j.dump(2);
}

}  // namespace pg
