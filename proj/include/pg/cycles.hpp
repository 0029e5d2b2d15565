#pragma once

#include "pg/graph.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pg {

// Vertex-simple directed cycle of the quotient multigraph, starting at its
// smallest class.
struct QuotientCycle {
  std::vector<int> edges;
  int weight = 0;
  IVec mu;
  RatVec nu;
  std::uint64_t support = 0;  // bit k set iff class k is visited

  int length() const { return static_cast<int>(edges.size()); }
};

// Classes are limited to 64 so that supports fit in one word.
std::vector<QuotientCycle> enumerate_cycles(const PeriodicGraph& g, std::size_t cap = 10'000'000);

std::string dump_cycle(const QuotientCycle& q);

// Cycles grouped by exact normalized displacement.
struct NuEntry {
  RatVec point;
  std::vector<int> cycles;
  // Distinct supports per cycle weight.
  std::map<int, std::vector<std::uint64_t>> supports;

  std::vector<int> lens() const;
  int num(int d) const;
  int min_len() const { return supports.begin()->first; }
};

struct NuTable {
  std::vector<NuEntry> entries;

  // Index of the entry at exactly this point, or -1.
  int find(const RatVec& p) const;
  std::vector<RatVec> points() const;
};

NuTable build_nu_table(const std::vector<QuotientCycle>& cycles);

}  // namespace pg
