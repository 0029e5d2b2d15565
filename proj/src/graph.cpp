#include "pg/graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace pg {

using json = nlohmann::json;

std::vector<std::vector<int>> PeriodicGraph::out_edges() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < edges.size(); ++i) out[static_cast<std::size_t>(edges[i].from)].push_back(static_cast<int>(i));
  return out;
}

int PeriodicGraph::max_weight() const {
  int w = 0;
  for (const auto& e : edges) w = std::max(w, e.weight);
  return w;
}

bool operator==(const PeriodicGraph& a, const PeriodicGraph& b) {
  if (a.dim != b.dim || a.classes != b.classes || a.undirected != b.undirected || a.edges != b.edges) return false;
  if (a.pos.size() != b.pos.size()) return false;
  for (std::size_t i = 0; i < a.pos.size(); ++i)
    if (a.pos[i] != b.pos[i]) return false;
  return true;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::runtime_error("graph: field '" + field + "': " + what);
}

void check_shape(const PeriodicGraph& g) {
  if (g.dim < 1 || g.dim > 3) fail("dim", "must be 1, 2 or 3");
  if (g.classes < 1) fail("classes", "must be positive");
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    std::string f = "edges[" + std::to_string(i) + "]";
    if (e.from < 0 || e.from >= g.classes) fail(f + ".from", "class index out of range");
    if (e.to < 0 || e.to >= g.classes) fail(f + ".to", "class index out of range");
    if (e.shift.size() != g.dim) fail(f + ".shift", "length differs from dim");
    if (e.weight < 1) fail(f + ".weight", "must be at least 1");
  }
  if (static_cast<int>(g.pos.size()) != g.classes) fail("pos", "one point per class required");
  for (std::size_t i = 0; i < g.pos.size(); ++i)
    if (g.pos[i].size() != g.dim) fail("pos[" + std::to_string(i) + "]", "length differs from dim");
}

Rat json_rat(const json& v, const std::string& field) {
  try {
    if (v.is_string()) return parse_rat(v.get<std::string>());
    if (v.is_number_integer()) return Rat(v.get<long long>());
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
  fail(field, "expected a rational string or an integer");
}

}  // namespace

PeriodicGraph parse_graph(const std::string& document) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("graph: malformed document: ") + e.what());
  }
  if (!j.is_object()) fail("<root>", "expected an object");
  PeriodicGraph g;
  for (const char* key : {"dim", "classes", "edges", "pos"})
    if (!j.contains(key)) fail(key, "missing");
  if (!j["dim"].is_number_integer()) fail("dim", "expected an integer");
  if (!j["classes"].is_number_integer()) fail("classes", "expected an integer");
  g.dim = j["dim"].get<int>();
  g.classes = j["classes"].get<int>();
  g.name = j.value("name", std::string());
  if (j.contains("undirected")) {
    if (!j["undirected"].is_boolean()) fail("undirected", "expected a boolean");
    g.undirected = j["undirected"].get<bool>();
  }
  if (!j["edges"].is_array()) fail("edges", "expected an array");
  for (std::size_t i = 0; i < j["edges"].size(); ++i) {
    const json& je = j["edges"][i];
    std::string f = "edges[" + std::to_string(i) + "]";
    if (!je.is_object()) fail(f, "expected an object");
    LabeledEdge e;
    for (const char* key : {"from", "to", "shift"})
      if (!je.contains(key)) fail(f + "." + key, "missing");
    if (!je["from"].is_number_integer()) fail(f + ".from", "expected an integer");
    if (!je["to"].is_number_integer()) fail(f + ".to", "expected an integer");
    e.from = je["from"].get<int>();
    e.to = je["to"].get<int>();
    if (!je["shift"].is_array()) fail(f + ".shift", "expected an array");
    e.shift = IVec(static_cast<Eigen::Index>(je["shift"].size()));
    for (std::size_t k = 0; k < je["shift"].size(); ++k) {
      if (!je["shift"][k].is_number_integer()) fail(f + ".shift", "expected integers");
      e.shift(static_cast<Eigen::Index>(k)) = je["shift"][k].get<std::int64_t>();
    }
    if (je.contains("weight")) {
      if (!je["weight"].is_number_integer()) fail(f + ".weight", "expected an integer");
      e.weight = je["weight"].get<int>();
    }
    g.edges.push_back(std::move(e));
  }
  if (!j["pos"].is_array()) fail("pos", "expected an array");
  for (std::size_t i = 0; i < j["pos"].size(); ++i) {
    const json& jp = j["pos"][i];
    std::string f = "pos[" + std::to_string(i) + "]";
    if (!jp.is_array()) fail(f, "expected an array");
    RatVec p(static_cast<Eigen::Index>(jp.size()));
    for (std::size_t k = 0; k < jp.size(); ++k) p(static_cast<Eigen::Index>(k)) = json_rat(jp[k], f);
    g.pos.push_back(std::move(p));
  }
  check_shape(g);
  return g.undirected ? symmetrize(g) : g;
}

namespace {

// Minimal reader for nested tuples/lists of numbers.
struct Literal {
  bool is_list = false;
  std::string atom;
  std::vector<Literal> items;
};

class LiteralReader {
 public:
  explicit LiteralReader(const std::string& s) : s_(s) {}

  Literal read() {
    skip();
    if (i_ >= s_.size()) throw std::runtime_error("graph: unexpected end of assignment document");
    char ch = s_[i_];
    if (ch == '[' || ch == '(') {
      char close = ch == '[' ? ']' : ')';
      ++i_;
      Literal lit;
      lit.is_list = true;
      skip();
      while (i_ < s_.size() && s_[i_] != close) {
        lit.items.push_back(read());
        skip();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip();
      }
      if (i_ >= s_.size()) throw std::runtime_error("graph: unbalanced bracket in assignment document");
      ++i_;
      return lit;
    }
    Literal lit;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' ||
                              s_[i_] == '-' || s_[i_] == '+' || s_[i_] == '/'))
      lit.atom.push_back(s_[i_++]);
    if (lit.atom.empty()) throw std::runtime_error(std::string("graph: unexpected character '") + ch + "'");
    return lit;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  const std::string& s_;
  std::size_t i_ = 0;
};

long long literal_int(const Literal& l, const std::string& field) {
  if (l.is_list) fail(field, "expected an integer");
  try {
    std::size_t used = 0;
    long long v = std::stoll(l.atom, &used);
    if (used != l.atom.size()) fail(field, "expected an integer");
    return v;
  } catch (const std::logic_error&) {
    fail(field, "expected an integer");
  }
}

}  // namespace

PeriodicGraph parse_assignment_graph(const std::string& document) {
  std::map<std::string, std::string> rhs;
  std::string key;
  std::size_t i = 0;
  // Split "name = value" pairs; a value runs until the next "name =" at bracket depth 0.
  std::vector<std::pair<std::string, std::size_t>> starts;
  int depth = 0;
  for (i = 0; i < document.size(); ++i) {
    char ch = document[i];
    if (ch == '[' || ch == '(') ++depth;
    if (ch == ']' || ch == ')') --depth;
    if (ch == '=' && depth == 0) {
      std::size_t e = i;
      while (e > 0 && std::isspace(static_cast<unsigned char>(document[e - 1]))) --e;
      std::size_t b = e;
      while (b > 0 && (std::isalnum(static_cast<unsigned char>(document[b - 1])) || document[b - 1] == '_')) --b;
      starts.emplace_back(document.substr(b, e - b), i + 1);
    }
  }
  for (std::size_t k = 0; k < starts.size(); ++k) {
    std::size_t end = document.size();
    if (k + 1 < starts.size()) {
      end = starts[k + 1].second - 1;
      while (end > 0 && document[end - 1] != '\n' && document[end - 1] != ';') --end;
    }
    rhs[starts[k].first] = document.substr(starts[k].second, end - starts[k].second);
  }
  for (const char* need : {"dim", "c", "edges", "pos"})
    if (!rhs.count(need)) fail(need, "missing");

  PeriodicGraph g;
  g.undirected = true;
  g.dim = static_cast<int>(literal_int(LiteralReader(rhs["dim"]).read(), "dim"));
  g.classes = static_cast<int>(literal_int(LiteralReader(rhs["c"]).read(), "c"));
  Literal edges = LiteralReader(rhs["edges"]).read();
  if (!edges.is_list) fail("edges", "expected a list");
  for (std::size_t from = 0; from < edges.items.size(); ++from) {
    const Literal& lst = edges.items[from];
    std::string f = "edges[" + std::to_string(from) + "]";
    if (!lst.is_list) fail(f, "expected a list");
    for (const Literal& item : lst.items) {
      if (!item.is_list || item.items.size() < 2 || !item.items[1].is_list) fail(f, "expected (target, (shift...))");
      LabeledEdge e;
      e.from = static_cast<int>(from);
      e.to = static_cast<int>(literal_int(item.items[0], f));
      e.shift = IVec(static_cast<Eigen::Index>(item.items[1].items.size()));
      for (std::size_t k = 0; k < item.items[1].items.size(); ++k)
        e.shift(static_cast<Eigen::Index>(k)) = literal_int(item.items[1].items[k], f + ".shift");
      if (item.items.size() >= 3) e.weight = static_cast<int>(literal_int(item.items[2], f + ".weight"));
      g.edges.push_back(std::move(e));
    }
  }
  Literal pos = LiteralReader(rhs["pos"]).read();
  if (!pos.is_list) fail("pos", "expected a list");
  for (std::size_t k = 0; k < pos.items.size(); ++k) {
    const Literal& p = pos.items[k];
    std::string f = "pos[" + std::to_string(k) + "]";
    if (!p.is_list) fail(f, "expected a tuple");
    RatVec v(static_cast<Eigen::Index>(p.items.size()));
    for (std::size_t m = 0; m < p.items.size(); ++m) {
      if (p.items[m].is_list) fail(f, "expected numbers");
      try {
        v(static_cast<Eigen::Index>(m)) = parse_rat(p.items[m].atom);
      } catch (const std::invalid_argument& e) {
        fail(f, e.what());
      }
    }
    g.pos.push_back(std::move(v));
  }
  check_shape(g);
  return symmetrize(g);
}

PeriodicGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("graph: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  std::size_t k = text.find_first_not_of(" \t\r\n");
  if (k != std::string::npos && text[k] == '{') return parse_graph(text);
  return parse_assignment_graph(text);
}

std::string render_graph(const PeriodicGraph& g) {
  json j;
  if (!g.name.empty()) j["name"] = g.name;
  j["dim"] = g.dim;
  j["classes"] = g.classes;
  j["undirected"] = g.undirected;
  j["edges"] = json::array();
  for (const auto& e : g.edges) {
    json je;
    je["from"] = e.from;
    je["to"] = e.to;
    je["shift"] = std::vector<std::int64_t>(e.shift.data(), e.shift.data() + e.shift.size());
    if (e.weight != 1) je["weight"] = e.weight;
    j["edges"].push_back(je);
  }
  j["pos"] = json::array();
  for (const auto& p : g.pos) {
    json jp = json::array();
    for (Eigen::Index k = 0; k < p.size(); ++k) jp.push_back(to_string(p(k)));
    j["pos"].push_back(jp);
  }
  return j.dump(2);
}

PeriodicGraph symmetrize(const PeriodicGraph& g) {
  using Key = std::tuple<int, int, std::vector<std::int64_t>, int>;
  auto key_of = [](const LabeledEdge& e) {
    return Key{e.from, e.to, std::vector<std::int64_t>(e.shift.data(), e.shift.data() + e.shift.size()), e.weight};
  };
  std::map<Key, int> count;
  for (const auto& e : g.edges) ++count[key_of(e)];
  PeriodicGraph out = g;
  out.undirected = true;
  for (const auto& e : g.edges) {
    LabeledEdge r{e.to, e.from, IVec(-e.shift), e.weight};
    Key kr = key_of(r);
    Key ke = key_of(e);
    if (count[kr] < count[ke]) {
      ++count[kr];
      out.edges.push_back(r);
    }
  }
  return out;
}

bool quotient_strongly_connected(const PeriodicGraph& g) {
  auto reach = [&](bool reverse) {
    std::vector<char> seen(static_cast<std::size_t>(g.classes), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto& e : g.edges) {
        int a = reverse ? e.to : e.from, b = reverse ? e.from : e.to;
        if (a == u && !seen[static_cast<std::size_t>(b)]) {
          seen[static_cast<std::size_t>(b)] = 1;
          stack.push_back(b);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach(false) && reach(true);
}

BigInt cycle_lattice_index(const PeriodicGraph& g) {
  const int n = g.dim;
  std::vector<IVec> pot(static_cast<std::size_t>(g.classes));
  std::vector<char> seen(static_cast<std::size_t>(g.classes), 0);
  pot[0] = IVec::Zero(n);
  seen[0] = 1;
  std::queue<int> q;
  q.push(0);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const auto& e : g.edges) {
      if (e.from == u && !seen[static_cast<std::size_t>(e.to)]) {
        pot[static_cast<std::size_t>(e.to)] = pot[static_cast<std::size_t>(u)] + e.shift;
        seen[static_cast<std::size_t>(e.to)] = 1;
        q.push(e.to);
      } else if (e.to == u && !seen[static_cast<std::size_t>(e.from)]) {
        pot[static_cast<std::size_t>(e.from)] = pot[static_cast<std::size_t>(u)] - e.shift;
        seen[static_cast<std::size_t>(e.from)] = 1;
        q.push(e.from);
      }
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](char c) { return c == 0; })) return 0;
  std::vector<std::vector<BigInt>> rows;
  for (const auto& e : g.edges) {
    IVec gen = pot[static_cast<std::size_t>(e.from)] + e.shift - pot[static_cast<std::size_t>(e.to)];
    std::vector<BigInt> r(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) r[static_cast<std::size_t>(k)] = BigInt(static_cast<long long>(gen(k)));
    rows.push_back(std::move(r));
  }
  // Integer row reduction to a triangular basis.
  BigInt index = 1;
  std::size_t top = 0;
  for (int col = 0; col < n; ++col) {
    while (true) {
      std::size_t piv = rows.size();
      for (std::size_t r = top; r < rows.size(); ++r)
        if (rows[r][static_cast<std::size_t>(col)] != 0 &&
            (piv == rows.size() || abs(rows[r][static_cast<std::size_t>(col)]) < abs(rows[piv][static_cast<std::size_t>(col)])))
          piv = r;
      if (piv == rows.size()) return 0;
      std::swap(rows[top], rows[piv]);
      bool clean = true;
      for (std::size_t r = top + 1; r < rows.size(); ++r) {
        BigInt f = rows[r][static_cast<std::size_t>(col)] / rows[top][static_cast<std::size_t>(col)];
        if (f != 0)
          for (int k = 0; k < n; ++k) rows[r][static_cast<std::size_t>(k)] -= f * rows[top][static_cast<std::size_t>(k)];
        if (rows[r][static_cast<std::size_t>(col)] != 0) clean = false;
      }
      if (clean) break;
    }
    index *= abs(rows[top][static_cast<std::size_t>(col)]);
    ++top;
  }
  return index;
}

}  // namespace pg
