#pragma once

#include "pg/graph.hpp"

#include <string>
#include <vector>

#ifndef PG_FIXTURE_DIR
#error "PG_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(PG_FIXTURE_DIR) + "/" + name + ".json"; }

inline pg::PeriodicGraph load(const std::string& name) { return pg::load_graph(fixture(name)); }

struct FixtureStart {
  std::string name;
  int start;
};

// Every shipped fixture with the start class used by default in the tests.
inline const std::vector<FixtureStart>& fixtures() {
  static const std::vector<FixtureStart> all{
      {"square", 0},         {"honeycomb", 0},          {"wakatsuki", 2},         {"cairo", 0},
      {"snub_square", 0},    {"truncated_square", 0},   {"rhombitrihexagonal", 0}, {"truncated_hexagonal", 0},
      {"snub_hexagonal", 0}, {"snub632_dual", 0},       {"three_uniform", 0},     {"k6", 0},
      {"cfs", 0},
  };
  return all;
}

}  // namespace testing
