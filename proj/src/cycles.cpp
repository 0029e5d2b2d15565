#include "pg/cycles.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pg {

namespace {

// Circuit search on the simple digraph of classes; each class cycle is then
// expanded over all parallel-edge choices.
class Johnson {
 public:
  Johnson(const PeriodicGraph& g, std::size_t cap, std::vector<QuotientCycle>& out)
      : g_(g), cap_(cap), out_(out), c_(g.classes) {
    between_.assign(static_cast<std::size_t>(c_ * c_), {});
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const auto& e = g.edges[i];
      if (e.from == e.to) continue;
      between_[idx(e.from, e.to)].push_back(static_cast<int>(i));
    }
    adj_.assign(static_cast<std::size_t>(c_), {});
    for (int u = 0; u < c_; ++u)
      for (int v = 0; v < c_; ++v)
        if (!between_[idx(u, v)].empty()) adj_[static_cast<std::size_t>(u)].push_back(v);
  }

  void run() {
    for (std::size_t i = 0; i < g_.edges.size(); ++i)
      if (g_.edges[i].from == g_.edges[i].to) emit_edges({static_cast<int>(i)});
    for (s_ = 0; s_ < c_; ++s_) {
      blocked_.assign(static_cast<std::size_t>(c_), 0);
      bset_.assign(static_cast<std::size_t>(c_), {});
      circuit(s_);
    }
  }

 private:
  std::size_t idx(int u, int v) const { return static_cast<std::size_t>(u * c_ + v); }

  void unblock(int u) {
    blocked_[static_cast<std::size_t>(u)] = 0;
    auto pending = std::move(bset_[static_cast<std::size_t>(u)]);
    bset_[static_cast<std::size_t>(u)].clear();
    for (int w : pending)
      if (blocked_[static_cast<std::size_t>(w)]) unblock(w);
  }

  bool circuit(int v) {
    bool found = false;
    stack_.push_back(v);
    blocked_[static_cast<std::size_t>(v)] = 1;
    for (int w : adj_[static_cast<std::size_t>(v)]) {
      if (w < s_) continue;
      if (w == s_) {
        expand();
        found = true;
      } else if (!blocked_[static_cast<std::size_t>(w)] && circuit(w)) {
        found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (int w : adj_[static_cast<std::size_t>(v)]) {
        if (w < s_) continue;
        auto& b = bset_[static_cast<std::size_t>(w)];
        if (std::find(b.begin(), b.end(), v) == b.end()) b.push_back(v);
      }
    }
    stack_.pop_back();
    return found;
  }

  void expand() {
    std::vector<int> chosen(stack_.size());
    expand_from(0, chosen);
  }

  void expand_from(std::size_t k, std::vector<int>& chosen) {
    if (k == stack_.size()) {
      emit_edges(chosen);
      return;
    }
    int u = stack_[k], v = stack_[(k + 1) % stack_.size()];
    for (int e : between_[idx(u, v)]) {
      chosen[k] = e;
      expand_from(k + 1, chosen);
    }
  }

  void emit_edges(const std::vector<int>& edges) {
    if (out_.size() >= cap_)
      throw std::runtime_error("cycles: more than " + std::to_string(cap_) + " simple cycles; raise the cap");
    QuotientCycle q;
    q.edges = edges;
    q.mu = IVec::Zero(g_.dim);
    for (int id : edges) {
      const auto& e = g_.edges[static_cast<std::size_t>(id)];
      q.weight += e.weight;
      q.mu += e.shift;
      q.support |= std::uint64_t{1} << e.from;
    }
    q.nu = to_rat(q.mu) / Rat(q.weight);
    out_.push_back(std::move(q));
  }

  const PeriodicGraph& g_;
  std::size_t cap_;
  std::vector<QuotientCycle>& out_;
  int c_;
  int s_ = 0;
  std::vector<std::vector<int>> between_;
  std::vector<std::vector<int>> adj_;
  std::vector<char> blocked_;
  std::vector<std::vector<int>> bset_;
  std::vector<int> stack_;
};

std::string vec_string(const IVec& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << ")";
  return os.str();
}

}  // namespace

std::vector<QuotientCycle> enumerate_cycles(const PeriodicGraph& g, std::size_t cap) {
  if (g.classes > 64) throw std::runtime_error("cycles: at most 64 classes are supported");
  std::vector<QuotientCycle> out;
  Johnson(g, cap, out).run();
  return out;
}

std::string dump_cycle(const QuotientCycle& q) {
  std::ostringstream os;
  os << "w=" << q.weight << " mu=" << vec_string(q.mu) << " nu=" << to_string(q.nu) << " supp={";
  bool first = true;
  for (int k = 0; k < 64; ++k)
    if (q.support >> k & 1) {
      os << (first ? "" : ",") << k;
      first = false;
    }
  os << "} edges=[";
  for (std::size_t i = 0; i < q.edges.size(); ++i) os << (i ? "," : "") << q.edges[i];
  os << "]";
  return os.str();
}

std::vector<int> NuEntry::lens() const {
  std::vector<int> out;
  for (const auto& [d, s] : supports) out.push_back(d);
  return out;
}

int NuEntry::num(int d) const {
  auto it = supports.find(d);
  return it == supports.end() ? 0 : static_cast<int>(it->second.size());
}

int NuTable::find(const RatVec& p) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].point == p) return static_cast<int>(i);
  return -1;
}

std::vector<RatVec> NuTable::points() const {
  std::vector<RatVec> out;
  for (const auto& e : entries) out.push_back(e.point);
  return out;
}

NuTable build_nu_table(const std::vector<QuotientCycle>& cycles) {
  // Key (mu/g, w/g) with g = gcd(mu, w) is a canonical form of nu.
  std::map<std::vector<std::int64_t>, std::size_t> index;
  NuTable table;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& q = cycles[i];
    std::int64_t g = q.weight;
    for (Eigen::Index k = 0; k < q.mu.size(); ++k) g = std::gcd(g, q.mu(k));
    std::vector<std::int64_t> key;
    for (Eigen::Index k = 0; k < q.mu.size(); ++k) key.push_back(q.mu(k) / g);
    key.push_back(q.weight / g);
    auto [it, fresh] = index.emplace(key, table.entries.size());
    if (fresh) {
      NuEntry e;
      e.point = q.nu;
      table.entries.push_back(std::move(e));
    }
    NuEntry& e = table.entries[it->second];
    e.cycles.push_back(static_cast<int>(i));
    auto& sup = e.supports[q.weight];
    if (std::find(sup.begin(), sup.end(), q.support) == sup.end()) sup.push_back(q.support);
  }
  // Deterministic order: by canonical key.
  NuTable sorted;
  for (const auto& [key, pos] : index) sorted.entries.push_back(std::move(table.entries[pos]));
  for (auto& e : sorted.entries)
    for (auto& [d, s] : e.supports) std::sort(s.begin(), s.end());
  return sorted;
}

}  // namespace pg
