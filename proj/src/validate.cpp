#include "pg/cycles.hpp"
#include "pg/geometry.hpp"
#include "pg/graph.hpp"

namespace pg {

ValidationReport validate_graph(const PeriodicGraph& g) {
  ValidationReport r;
  r.max_weight = g.max_weight();
  r.quotient_strongly_connected = quotient_strongly_connected(g);
  r.cycle_lattice_index = cycle_lattice_index(g);
  for (const auto& e : g.edges)
    if (e.from == e.to && e.shift.isZero())
      r.warnings.push_back("loop at class " + std::to_string(e.from) + " with zero shift");
  if (r.quotient_strongly_connected) {
    NuTable table = build_nu_table(enumerate_cycles(g));
    r.zero_in_interior = origin_interior(table.points(), g.dim);
  }
  return r;
}

}  // namespace pg
