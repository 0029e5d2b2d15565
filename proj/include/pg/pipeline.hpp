#pragma once

#include "pg/invariants.hpp"
#include "pg/lattice.hpp"
#include "pg/series.hpp"

#include <optional>
#include <string>

namespace pg {

struct RunConfig {
  std::string input;
  int start = 0;
  Rat epsilon = Rat(1, 2);
  std::optional<std::string> triangulation;  // override document path
  int check_extra = 100;
  int samples = 100;
  std::size_t max_bytes = std::size_t{12} << 30;
  std::size_t cycle_cap = 10'000'000;
  bool exact_c2 = false;
};

// Error raised by a pipeline stage, prefixed with the stage name.
struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Prepared {
  PeriodicGraph graph;
  ValidationReport validation;
  CycleGeometry geo;
};

// Parse, validate, enumerate cycles, build and verify the triangulations and
// the half-space families.
Prepared prepare(const RunConfig& cfg);
Prepared prepare(const PeriodicGraph& g, const RunConfig& cfg);

InvariantReport compute_invariants(const Prepared& p, const RunConfig& cfg);

struct TranslationSample {
  Vertex y;
  RatVec v;
  int cpx = 1;
  int d_before = 0;
  int d_after = 0;
  bool ok = false;
};

// Samples vertices deep in cone(simplex) along each vertex direction and checks
// that translating by cpx v adds exactly cpx to the distance.
std::vector<TranslationSample> translation_check(const Prepared& p, const InvariantReport& r, int samples,
                                                 const LatticeOptions& opt = {}, unsigned seed = 20240611u);

struct SandwichResult {
  std::size_t checked = 0;
  std::size_t violations = 0;
};
// gauge - C1 <= d <= gauge + C2' on the ball of the given radius.
SandwichResult sandwich_check(const PeriodicGraph& g, int start, const GrowthPolytope& P, const Rat& C1, const Rat& C2p,
                              int radius, const LatticeOptions& opt = {});

struct SeriesRun {
  Prepared prep;
  InvariantReport report;
  GrowthTerms terms;  // gamma + 1 + check_extra terms
  GrowthSeries series;
  QuasiPolynomial qp;
  Prediction prediction;
};

SeriesRun run_series(const RunConfig& cfg);
SeriesRun run_series(const PeriodicGraph& g, const RunConfig& cfg);

// Structured output document.
std::string series_document(const SeriesRun& run);

}  // namespace pg
