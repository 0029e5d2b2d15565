#pragma once

#include "pg/graph.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace pg {

struct LatticeOptions {
  std::size_t max_bytes = std::size_t{12} << 30;
  int threads = 0;  // 0: PG_THREADS if set, else hardware concurrency
};

// Memory cap reached; achieved is the last fully settled radius.
struct LatticeError : std::runtime_error {
  LatticeError(const std::string& what, long achieved_radius) : std::runtime_error(what), achieved(achieved_radius) {}
  long achieved;
};

int thread_count(const LatticeOptions& opt);

// Runs body(i) for i in [0, n) on up to threads workers; body must be thread-safe.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body);

struct GrowthTerms {
  int start = 0;
  std::vector<std::uint64_t> s;  // s[i] = #{y : d(x0, y) = i}
  std::vector<std::uint64_t> b;  // cumulative
};

// Exact s_0..s_N from x0 = (start, 0).
GrowthTerms growth_terms(const PeriodicGraph& g, int start, int N, const LatticeOptions& opt = {});

// Exact distances of every vertex within radius D of x0 = (start, 0), stored on
// per-class dense offset windows.
class DistanceMap {
 public:
  DistanceMap() = default;

  int start() const { return start_; }
  int radius() const { return radius_; }
  int dim() const { return dim_; }
  // -1 when the vertex is farther than radius().
  int distance(const Vertex& y) const;
  std::size_t size() const { return count_; }
  void for_each(const std::function<void(const Vertex&, int)>& f) const;

 private:
  friend DistanceMap distance_map(const PeriodicGraph&, int, int, const LatticeOptions&);
  std::size_t index(const std::array<std::int64_t, 3>& o) const;
  bool inside(const std::array<std::int64_t, 3>& o) const;

  int start_ = 0;
  int radius_ = 0;
  int dim_ = 0;
  int classes_ = 0;
  std::size_t count_ = 0;
  std::array<std::int64_t, 3> lo_{0, 0, 0};
  std::array<std::int64_t, 3> ext_{1, 1, 1};
  std::size_t volume_ = 1;
  std::vector<std::int32_t> dist_;  // class-major
};

DistanceMap distance_map(const PeriodicGraph& g, int start, int D, const LatticeOptions& opt = {});

}  // namespace pg
