#include "pg/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace pg {

namespace {

using Off = std::array<std::int64_t, 3>;

struct Arc {
  int to;
  int weight;
  Off shift;
};

std::vector<std::vector<Arc>> arcs(const PeriodicGraph& g) {
  std::vector<std::vector<Arc>> out(static_cast<std::size_t>(g.classes));
  for (const auto& e : g.edges) {
    Arc a{e.to, e.weight, {0, 0, 0}};
    for (int k = 0; k < g.dim; ++k) a.shift[static_cast<std::size_t>(k)] = e.shift(k);
    out[static_cast<std::size_t>(e.from)].push_back(a);
  }
  return out;
}

std::int64_t max_shift(const PeriodicGraph& g) {
  std::int64_t m = 0;
  for (const auto& e : g.edges)
    for (int k = 0; k < g.dim; ++k) m = std::max<std::int64_t>(m, std::abs(e.shift(k)));
  return m;
}

// Box of lattice offsets stored densely; unused axes have extent 1.
struct Box {
  int dim = 1;
  Off lo{0, 0, 0};
  Off ext{1, 1, 1};

  std::size_t volume() const {
    return static_cast<std::size_t>(ext[0]) * static_cast<std::size_t>(ext[1]) * static_cast<std::size_t>(ext[2]);
  }
  bool inside(const Off& o) const {
    for (int k = 0; k < dim; ++k) {
      std::size_t kk = static_cast<std::size_t>(k);
      if (o[kk] < lo[kk] || o[kk] >= lo[kk] + ext[kk]) return false;
    }
    return true;
  }
  std::size_t index(const Off& o) const {
    return static_cast<std::size_t>(((o[0] - lo[0]) * ext[1] + (o[1] - lo[1])) * ext[2] + (o[2] - lo[2]));
  }
  Off offset(std::size_t i) const {
    Off o;
    o[2] = static_cast<std::int64_t>(i % static_cast<std::size_t>(ext[2])) + lo[2];
    i /= static_cast<std::size_t>(ext[2]);
    o[1] = static_cast<std::int64_t>(i % static_cast<std::size_t>(ext[1])) + lo[1];
    o[0] = static_cast<std::int64_t>(i / static_cast<std::size_t>(ext[1])) + lo[0];
    return o;
  }
  // Geometric enlargement covering [need_lo, need_hi].
  Box grown(const Off& need_lo, const Off& need_hi) const {
    Box b = *this;
    for (int k = 0; k < dim; ++k) {
      std::size_t kk = static_cast<std::size_t>(k);
      std::int64_t a = std::min(lo[kk], need_lo[kk]);
      std::int64_t z = std::max(lo[kk] + ext[kk] - 1, need_hi[kk]);
      std::int64_t span = z - a + 1;
      std::int64_t e = std::max(2 * ext[kk], span + span / 2 + 2);
      b.lo[kk] = a - (e - span) / 2;
      b.ext[kk] = e;
    }
    return b;
  }
};

Box initial_box(int dim, std::int64_t half) {
  Box b;
  b.dim = dim;
  for (int k = 0; k < dim; ++k) {
    b.lo[static_cast<std::size_t>(k)] = -half;
    b.ext[static_cast<std::size_t>(k)] = 2 * half + 1;
  }
  return b;
}

// Per-class visited bitmaps over a shared box.
class Bitmaps {
 public:
  Bitmaps(int classes, Box box, std::size_t max_bytes) : classes_(classes), max_bytes_(max_bytes) { reset(box); }

  const Box& box() const { return box_; }
  std::size_t words_per_class() const { return words_; }

  void ensure(const Off& need_lo, const Off& need_hi, long radius) {
    if (box_.inside(need_lo) && box_.inside(need_hi)) return;
    Box nb = box_.grown(need_lo, need_hi);
    std::size_t nw = (nb.volume() + 63) / 64;
    if (nw * 8 * static_cast<std::size_t>(classes_) > max_bytes_)
      throw LatticeError("lattice: memory cap reached while growing the offset window", radius);
    std::vector<std::uint64_t> nbits(nw * static_cast<std::size_t>(classes_), 0);
    for (int c = 0; c < classes_; ++c)
      for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t word = bits_[static_cast<std::size_t>(c) * words_ + w];
        while (word) {
          int t = __builtin_ctzll(word);
          word &= word - 1;
          std::size_t i = w * 64 + static_cast<std::size_t>(t);
          std::size_t j = nb.index(box_.offset(i));
          nbits[static_cast<std::size_t>(c) * nw + j / 64] |= std::uint64_t{1} << (j % 64);
        }
      }
    box_ = nb;
    words_ = nw;
    bits_ = std::move(nbits);
  }

  bool test_and_set(int c, const Off& o) {
    std::size_t i = box_.index(o);
    std::uint64_t& w = bits_[static_cast<std::size_t>(c) * words_ + i / 64];
    std::uint64_t m = std::uint64_t{1} << (i % 64);
    bool was = w & m;
    w |= m;
    return was;
  }

  bool test_and_set_atomic(int c, const Off& o) {
    std::size_t i = box_.index(o);
    std::atomic_ref<std::uint64_t> w(bits_[static_cast<std::size_t>(c) * words_ + i / 64]);
    std::uint64_t m = std::uint64_t{1} << (i % 64);
    return w.fetch_or(m, std::memory_order_relaxed) & m;
  }

  bool test(int c, const Off& o) const {
    std::size_t i = box_.index(o);
    return bits_[static_cast<std::size_t>(c) * words_ + i / 64] >> (i % 64) & 1;
  }

 private:
  void reset(Box box) {
    box_ = box;
    words_ = (box.volume() + 63) / 64;
    if (words_ * 8 * static_cast<std::size_t>(classes_) > max_bytes_)
      throw LatticeError("lattice: memory cap reached", -1);
    bits_.assign(words_ * static_cast<std::size_t>(classes_), 0);
  }

  int classes_;
  std::size_t max_bytes_;
  Box box_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct Item {
  int cls;
  Off o;
};

void bounds(const std::vector<Item>& items, std::int64_t pad, Off& lo, Off& hi) {
  lo = {0, 0, 0};
  hi = {0, 0, 0};
  bool first = true;
  for (const auto& it : items)
    for (std::size_t k = 0; k < 3; ++k) {
      if (first || it.o[k] < lo[k]) lo[k] = it.o[k];
      if (first || it.o[k] > hi[k]) hi[k] = it.o[k];
      if (k == 2) first = false;
    }
  for (std::size_t k = 0; k < 3; ++k) {
    lo[k] -= pad;
    hi[k] += pad;
  }
}

Off plus(const Off& a, const Off& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

void check_start(const PeriodicGraph& g, int start) {
  if (start < 0 || start >= g.classes) throw std::invalid_argument("lattice: start class out of range");
}

}  // namespace

int thread_count(const LatticeOptions& opt) {
  int t = opt.threads;
  if (t <= 0) {
    if (const char* env = std::getenv("PG_THREADS")) t = std::atoi(env);
  }
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, t);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
  std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), std::max<std::size_t>(1, n / 4096));
  if (t <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < t; ++k) pool.emplace_back([&, k] { body(n * k / t, n * (k + 1) / t); });
  for (auto& th : pool) th.join();
}

GrowthTerms growth_terms(const PeriodicGraph& g, int start, int N, const LatticeOptions& opt) {
  check_start(g, start);
  GrowthTerms out;
  out.start = start;
  if (N < 0) return out;
  const auto adj = arcs(g);
  const std::int64_t ms = std::max<std::int64_t>(1, max_shift(g));
  const int W = g.max_weight();
  Bitmaps seen(g.classes, initial_box(g.dim, 8 * ms), opt.max_bytes);
  auto record = [&](std::uint64_t count) {
    out.s.push_back(count);
    out.b.push_back((out.b.empty() ? 0 : out.b.back()) + count);
  };
  const Item x0{start, {0, 0, 0}};
  if (W == 1) {
    const int threads = thread_count(opt);
    std::vector<Item> frontier{x0};
    seen.test_and_set(start, x0.o);
    record(1);
    for (int d = 1; d <= N; ++d) {
      Off lo, hi;
      bounds(frontier, ms, lo, hi);
      seen.ensure(lo, hi, d - 1);
      std::vector<std::vector<Item>> parts(static_cast<std::size_t>(threads));
      std::atomic<std::size_t> slot{0};
      parallel_for(frontier.size(), threads, [&](std::size_t b, std::size_t e) {
        auto& next = parts[slot++];
        const bool shared = e - b < frontier.size();
        for (std::size_t i = b; i < e; ++i)
          for (const Arc& a : adj[static_cast<std::size_t>(frontier[i].cls)]) {
            Off o = plus(frontier[i].o, a.shift);
            bool was = shared ? seen.test_and_set_atomic(a.to, o) : seen.test_and_set(a.to, o);
            if (!was) next.push_back({a.to, o});
          }
      });
      frontier.clear();
      for (auto& p : parts) frontier.insert(frontier.end(), p.begin(), p.end());
      record(frontier.size());
    }
    return out;
  }
  // Dial buckets; a vertex is settled when popped.
  std::vector<std::vector<Item>> ring(static_cast<std::size_t>(W + 1));
  ring[0].push_back(x0);
  for (int d = 0; d <= N; ++d) {
    auto& bucket = ring[static_cast<std::size_t>(d % (W + 1))];
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      Item it = bucket[i];
      if (!seen.box().inside(it.o)) seen.ensure(it.o, it.o, d - 1);
      if (seen.test_and_set(it.cls, it.o)) continue;
      ++count;
      for (const Arc& a : adj[static_cast<std::size_t>(it.cls)]) {
        Off o = plus(it.o, a.shift);
        if (seen.box().inside(o) && seen.test(a.to, o)) continue;
        ring[static_cast<std::size_t>((d + a.weight) % (W + 1))].push_back({a.to, o});
      }
    }
    bucket.clear();
    record(count);
  }
  return out;
}

std::size_t DistanceMap::index(const Off& o) const {
  return static_cast<std::size_t>(((o[0] - lo_[0]) * ext_[1] + (o[1] - lo_[1])) * ext_[2] + (o[2] - lo_[2]));
}

bool DistanceMap::inside(const Off& o) const {
  for (int k = 0; k < dim_; ++k) {
    std::size_t kk = static_cast<std::size_t>(k);
    if (o[kk] < lo_[kk] || o[kk] >= lo_[kk] + ext_[kk]) return false;
  }
  return true;
}

int DistanceMap::distance(const Vertex& y) const {
  if (y.cls < 0 || y.cls >= classes_) return -1;
  Off o{0, 0, 0};
  for (int k = 0; k < dim_; ++k) o[static_cast<std::size_t>(k)] = y.offset(k);
  if (!inside(o)) return -1;
  return dist_[static_cast<std::size_t>(y.cls) * volume_ + index(o)];
}

void DistanceMap::for_each(const std::function<void(const Vertex&, int)>& f) const {
  Box b;
  b.dim = dim_;
  b.lo = lo_;
  b.ext = ext_;
  for (int c = 0; c < classes_; ++c)
    for (std::size_t i = 0; i < volume_; ++i) {
      int d = dist_[static_cast<std::size_t>(c) * volume_ + i];
      if (d < 0) continue;
      Off o = b.offset(i);
      Vertex v{c, IVec(dim_)};
      for (int k = 0; k < dim_; ++k) v.offset(k) = o[static_cast<std::size_t>(k)];
      f(v, d);
    }
}

DistanceMap distance_map(const PeriodicGraph& g, int start, int D, const LatticeOptions& opt) {
  check_start(g, start);
  DistanceMap m;
  m.start_ = start;
  m.radius_ = std::max(0, D);
  m.dim_ = g.dim;
  m.classes_ = g.classes;
  const auto adj = arcs(g);
  const int W = g.max_weight();
  Box box = initial_box(g.dim, 8 * std::max<std::int64_t>(1, max_shift(g)));
  auto adopt = [&](const Box& b) {
    std::size_t bytes = b.volume() * static_cast<std::size_t>(g.classes) * sizeof(std::int32_t);
    if (bytes > opt.max_bytes) throw LatticeError("lattice: distance map exceeds the memory cap", -1);
    std::vector<std::int32_t> nd(b.volume() * static_cast<std::size_t>(g.classes), -1);
    Box old;
    old.dim = m.dim_;
    old.lo = m.lo_;
    old.ext = m.ext_;
    for (int c = 0; c < g.classes && !m.dist_.empty(); ++c)
      for (std::size_t i = 0; i < m.volume_; ++i) {
        std::int32_t d = m.dist_[static_cast<std::size_t>(c) * m.volume_ + i];
        if (d >= 0) nd[static_cast<std::size_t>(c) * b.volume() + b.index(old.offset(i))] = d;
      }
    m.lo_ = b.lo;
    m.ext_ = b.ext;
    m.volume_ = b.volume();
    m.dist_ = std::move(nd);
  };
  adopt(box);
  auto slot = [&](int c, const Off& o) -> std::int32_t& {
    if (!m.inside(o)) {
      Box cur;
      cur.dim = m.dim_;
      cur.lo = m.lo_;
      cur.ext = m.ext_;
      adopt(cur.grown(o, o));
    }
    return m.dist_[static_cast<std::size_t>(c) * m.volume_ + m.index(o)];
  };
  std::vector<std::vector<Item>> ring(static_cast<std::size_t>(W + 1));
  ring[0].push_back({start, {0, 0, 0}});
  for (int d = 0; d <= m.radius_; ++d) {
    auto& bucket = ring[static_cast<std::size_t>(d % (W + 1))];
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      Item it = bucket[i];
      std::int32_t& here = slot(it.cls, it.o);
      if (here >= 0) continue;
      here = d;
      ++m.count_;
      for (const Arc& a : adj[static_cast<std::size_t>(it.cls)]) {
        if (d + a.weight > m.radius_) continue;
        Off o = plus(it.o, a.shift);
        if (slot(a.to, o) >= 0) continue;
        ring[static_cast<std::size_t>((d + a.weight) % (W + 1))].push_back({a.to, o});
      }
    }
    bucket.clear();
  }
  return m;
}

}  // namespace pg
