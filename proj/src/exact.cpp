#include "pg/exact.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pg {

Rat parse_rat(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty rational");
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  auto digits = [&](std::size_t from) {
    std::size_t j = from;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    return j;
  };
  std::size_t j = digits(i);
  std::string whole = s.substr(i, j - i);
  Rat value;
  if (j < s.size() && s[j] == '/') {
    std::size_t k = digits(j + 1);
    std::string den = s.substr(j + 1, k - j - 1);
    if (whole.empty() || den.empty() || k != s.size())
      throw std::invalid_argument("malformed rational '" + text + "'");
    BigInt d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    value = Rat(BigInt(whole), d);
  } else if (j < s.size() && s[j] == '.') {
    std::size_t k = digits(j + 1);
    std::string frac = s.substr(j + 1, k - j - 1);
    if ((whole.empty() && frac.empty()) || k != s.size())
      throw std::invalid_argument("malformed decimal '" + text + "'");
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt num = BigInt(whole.empty() ? "0" : whole) * scale + BigInt(frac.empty() ? "0" : frac);
    value = Rat(num, scale);
  } else {
    if (whole.empty() || j != s.size()) throw std::invalid_argument("malformed rational '" + text + "'");
    value = Rat(BigInt(whole));
  }
  return neg ? Rat(-value) : value;
}

std::string to_string(const Rat& x) { return x.str(); }

std::string to_string(const RatVec& x) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out += ",";
    out += x(i).str();
  }
  return out + ")";
}

BigInt numerator(const Rat& x) { return boost::multiprecision::numerator(x); }
BigInt denominator(const Rat& x) { return boost::multiprecision::denominator(x); }

BigInt floor(const Rat& x) {
  BigInt n = numerator(x), d = denominator(x);
  BigInt q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

BigInt ceil(const Rat& x) { return -floor(Rat(-x)); }

namespace {

// Row echelon form in place; returns pivot columns.
std::vector<int> echelon(RatMat& M) {
  std::vector<int> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < M.cols() && row < M.rows(); ++col) {
    Eigen::Index p = row;
    while (p < M.rows() && M(p, col) == 0) ++p;
    if (p == M.rows()) continue;
    if (p != row) M.row(p).swap(M.row(row));
    Rat inv = Rat(1) / M(row, col);
    for (Eigen::Index c = col; c < M.cols(); ++c) M(row, c) *= inv;
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      if (r == row || M(r, col) == 0) continue;
      Rat f = M(r, col);
      for (Eigen::Index c = col; c < M.cols(); ++c) M(r, c) -= f * M(row, c);
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  return pivots;
}

}  // namespace

std::optional<RatVec> solve_linear(const RatMat& A, const RatVec& b) {
  if (A.rows() != b.size()) throw std::invalid_argument("solve_linear: shape mismatch");
  RatMat M(A.rows(), A.cols() + 1);
  M.leftCols(A.cols()) = A;
  M.col(A.cols()) = b;
  auto piv = echelon(M);
  if (!piv.empty() && piv.back() == A.cols()) return std::nullopt;
  if (static_cast<Eigen::Index>(piv.size()) != A.cols()) return std::nullopt;
  RatVec x(A.cols());
  for (std::size_t r = 0; r < piv.size(); ++r) x(piv[r]) = M(static_cast<Eigen::Index>(r), A.cols());
  return x;
}

int rank(RatMat A) { return static_cast<int>(echelon(A).size()); }

Rat determinant(RatMat A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("determinant: not square");
  Rat det = 1;
  const Eigen::Index n = A.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index p = col;
    while (p < n && A(p, col) == 0) ++p;
    if (p == n) return 0;
    if (p != col) {
      A.row(p).swap(A.row(col));
      det = -det;
    }
    det *= A(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (A(r, col) == 0) continue;
      Rat f = A(r, col) / A(col, col);
      for (Eigen::Index c = col; c < n; ++c) A(r, c) -= f * A(col, c);
    }
  }
  return det;
}

IntPoly one_minus_t_pow(int a) {
  if (a < 1) throw std::invalid_argument("one_minus_t_pow: exponent must be positive");
  std::vector<BigInt> c(static_cast<std::size_t>(a) + 1);
  c[0] = 1;
  c[static_cast<std::size_t>(a)] = -1;
  return IntPoly(std::move(c));
}

namespace {

std::vector<int> divisors(int n) {
  std::vector<int> out;
  for (int d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  std::sort(out.begin(), out.end());
  return out;
}

int euler_phi(int n) {
  int r = n;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      r -= r / p;
    }
  if (n > 1) r -= r / n;
  return r;
}

// Cyclotomic factor normalized to constant term +1 (1 - t in place of t - 1).
IntPoly unit_cyclotomic(int d) {
  if (d == 1) return one_minus_t_pow(1);
  return cyclotomic(d);
}

}  // namespace

IntPoly cyclotomic(int d) {
  static std::mutex mu;
  static std::map<int, IntPoly> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
  }
  if (d < 1) throw std::invalid_argument("cyclotomic: index must be positive");
  IntPoly p = IntPoly::monomial(BigInt(1), static_cast<std::size_t>(d)) - IntPoly::constant(BigInt(1));
  for (int e : divisors(d))
    if (e < d) p = divmod_monic(p, cyclotomic(e)).first;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(d, p);
  return p;
}

std::string to_string(const IntPoly& p, const std::string& var) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < p.c.size(); ++i) {
    const BigInt& a = p.c[i];
    if (a == 0) continue;
    BigInt mag = a < 0 ? BigInt(-a) : a;
    if (first) {
      if (a < 0) os << "-";
    } else {
      os << (a < 0 ? " - " : " + ");
    }
    if (i == 0 || mag != 1) os << mag;
    if (i >= 1) os << var;
    if (i >= 2) os << "^" << i;
    first = false;
  }
  return os.str();
}

std::string to_latex(const IntPoly& p, const std::string& var) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < p.c.size(); ++i) {
    const BigInt& a = p.c[i];
    if (a == 0) continue;
    BigInt mag = a < 0 ? BigInt(-a) : a;
    if (a < 0) os << "-";
    else if (!first) os << "+";
    if (i == 0 || mag != 1) os << mag;
    if (i >= 1) os << var;
    if (i >= 2) os << "^{" << i << "}";
    first = false;
  }
  return os.str();
}

CycloCounts cyclo_counts(const std::vector<int>& factors) {
  CycloCounts out;
  for (int a : factors)
    for (int d : divisors(a)) ++out[d];
  return out;
}

IntPoly expand(const CycloCounts& counts) {
  IntPoly r = IntPoly::constant(BigInt(1));
  for (auto [d, k] : counts)
    for (int i = 0; i < k; ++i) r = r * unit_cyclotomic(d);
  return r;
}

int degree(const CycloCounts& counts) {
  int deg = 0;
  for (auto [d, k] : counts) deg += euler_phi(d) * k;
  return deg;
}

int FactoredDenominator::degree() const { return std::accumulate(factors.begin(), factors.end(), 0); }

IntPoly FactoredDenominator::expand() const {
  IntPoly r = IntPoly::constant(BigInt(1));
  for (int a : factors) r = r * one_minus_t_pow(a);
  return r;
}

FactoredDenominator min_product_cover(const CycloCounts& need_in) {
  CycloCounts need;
  int top = 1;
  for (auto [d, k] : need_in)
    if (k > 0) {
      need[d] = k;
      top = static_cast<int>(std::lcm(static_cast<long long>(top), static_cast<long long>(d)));
    }
  if (need.empty()) return {};
  const std::vector<int> cand = divisors(top);

  std::vector<int> best;
  int best_deg = std::numeric_limits<int>::max();
  std::vector<int> cur;

  std::map<CycloCounts, int> seen;
  std::function<void(CycloCounts&, int)> search = [&](CycloCounts& rem, int deg) {
    int lower = degree(rem);
    if (deg + lower >= best_deg) return;
    auto [it, fresh] = seen.emplace(rem, deg);
    if (!fresh) {
      if (it->second <= deg) return;
      it->second = deg;
    }
    // Largest index with unmet multiplicity must be covered by one of its multiples.
    int d = 0;
    for (auto it = rem.rbegin(); it != rem.rend(); ++it)
      if (it->second > 0) {
        d = it->first;
        break;
      }
    if (d == 0) {
      best = cur;
      best_deg = deg;
      return;
    }
    for (int a : cand) {
      if (a % d != 0) continue;
      CycloCounts next = rem;
      for (auto& [e, k] : next)
        if (a % e == 0 && k > 0) --k;
      std::erase_if(next, [](const auto& kv) { return kv.second == 0; });
      cur.push_back(a);
      search(next, deg + a);
      cur.pop_back();
    }
  };
  CycloCounts rem = need;
  search(rem, 0);
  std::sort(best.begin(), best.end(), std::greater<int>());
  return FactoredDenominator{best};
}

CycloCounts lcm_counts(const std::vector<std::vector<int>>& products) {
  CycloCounts out;
  for (const auto& prod : products)
    for (auto [d, k] : cyclo_counts(prod)) out[d] = std::max(out[d], k);
  return out;
}

LcmResult lcm_factor_products(const std::vector<std::vector<int>>& products) {
  LcmResult r;
  r.exact = lcm_counts(products);
  r.exact_degree = degree(r.exact);
  r.cover = min_product_cover(r.exact);
  return r;
}

ReducedFraction rational_reduce(const IntPoly& num, const FactoredDenominator& den) {
  CycloCounts counts = den.counts();
  IntPoly q = num;
  for (auto& [d, k] : counts) {
    IntPoly f = unit_cyclotomic(d);
    while (k > 0 && !q.is_zero()) {
      auto [quo, rem] = divmod_monic(q, f);
      if (!rem.is_zero()) break;
      q = quo;
      --k;
    }
  }
  FactoredDenominator cover = min_product_cover(counts);
  CycloCounts extra = cover.counts();
  for (auto& [d, k] : extra) {
    auto it = counts.find(d);
    k -= it == counts.end() ? 0 : it->second;
  }
  q = q * expand(extra);
  return ReducedFraction{q, cover};
}

BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

std::int64_t lcm(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

}  // namespace pg
