#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pg {

using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RatVec = Vec<Rat>;
using RatMat = Mat<Rat>;
using IVec = Vec<std::int64_t>;

// Accepts "p", "p/q" and finite decimals such as "-0.125".
Rat parse_rat(const std::string& text);
std::string to_string(const Rat& x);
std::string to_string(const RatVec& x);

BigInt numerator(const Rat& x);
BigInt denominator(const Rat& x);
BigInt floor(const Rat& x);
BigInt ceil(const Rat& x);

template <class Derived>
RatVec to_rat(const Eigen::MatrixBase<Derived>& v) {
  RatVec r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r(i) = Rat(static_cast<long long>(v(i)));
  return r;
}

// Exact solve of A x = b. Rectangular A is allowed; returns nullopt when the
// system is inconsistent or the solution is not unique.
std::optional<RatVec> solve_linear(const RatMat& A, const RatVec& b);
int rank(RatMat A);
Rat determinant(RatMat A);

// Dense univariate polynomial, ascending coefficients, no trailing zeros.
template <class T>
struct Poly {
  std::vector<T> c;

  Poly() = default;
  explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }

  static Poly constant(const T& x) { return Poly(std::vector<T>{x}); }
  static Poly monomial(const T& x, std::size_t deg) {
    std::vector<T> v(deg + 1);
    v[deg] = x;
    return Poly(std::move(v));
  }

  bool is_zero() const { return c.empty(); }
  long degree() const { return static_cast<long>(c.size()) - 1; }
  T coeff(std::size_t i) const { return i < c.size() ? c[i] : T(0); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }

  bool operator==(const Poly& o) const { return c == o.c; }
};

using IntPoly = Poly<BigInt>;
using RatPoly = Poly<Rat>;

template <class T>
Poly<T> operator+(const Poly<T>& p, const Poly<T>& q) {
  std::vector<T> r(std::max(p.c.size(), q.c.size()));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = p.coeff(i) + q.coeff(i);
  return Poly<T>(std::move(r));
}

template <class T>
Poly<T> operator-(const Poly<T>& p, const Poly<T>& q) {
  std::vector<T> r(std::max(p.c.size(), q.c.size()));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = p.coeff(i) - q.coeff(i);
  return Poly<T>(std::move(r));
}

// Product with every term of degree > max_deg dropped; max_deg < 0 keeps all.
template <class T>
Poly<T> truncmul(const Poly<T>& p, const Poly<T>& q, long max_deg) {
  if (p.is_zero() || q.is_zero()) return {};
  long full = p.degree() + q.degree();
  long top = max_deg < 0 ? full : std::min(full, max_deg);
  if (top < 0) return {};
  std::vector<T> r(static_cast<std::size_t>(top + 1));
  for (std::size_t i = 0; i < p.c.size() && static_cast<long>(i) <= top; ++i) {
    if (p.c[i] == 0) continue;
    for (std::size_t j = 0; j < q.c.size() && static_cast<long>(i + j) <= top; ++j)
      r[i + j] += p.c[i] * q.c[j];
  }
  return Poly<T>(std::move(r));
}

template <class T>
Poly<T> operator*(const Poly<T>& p, const Poly<T>& q) {
  return truncmul(p, q, -1);
}

template <class T>
Poly<T> operator*(const T& s, const Poly<T>& p) {
  std::vector<T> r(p.c);
  for (auto& x : r) x *= s;
  return Poly<T>(std::move(r));
}

// Division with remainder by a polynomial with unit leading coefficient
// (exact over the integers).
template <class T>
std::pair<Poly<T>, Poly<T>> divmod_monic(const Poly<T>& p, const Poly<T>& d) {
  std::vector<T> rem(p.c);
  if (p.degree() < d.degree()) return {Poly<T>{}, p};
  const T lead = d.c.back();
  std::vector<T> quo(static_cast<std::size_t>(p.degree() - d.degree() + 1));
  for (long i = p.degree(); i >= d.degree(); --i) {
    T f = rem[static_cast<std::size_t>(i)] / lead;
    if (f == 0) continue;
    quo[static_cast<std::size_t>(i - d.degree())] = f;
    for (long j = 0; j <= d.degree(); ++j)
      rem[static_cast<std::size_t>(i - d.degree() + j)] -= f * d.c[static_cast<std::size_t>(j)];
  }
  return {Poly<T>(std::move(quo)), Poly<T>(std::move(rem))};
}

// Coefficients of a formal power series p / prod (1 - t^a) up to degree n.
template <class T>
std::vector<T> expand_over(const Poly<T>& p, const std::vector<int>& factors, std::size_t n) {
  std::vector<T> a(n + 1);
  for (std::size_t i = 0; i <= n && i < p.c.size(); ++i) a[i] = p.c[i];
  for (int f : factors)
    for (std::size_t i = static_cast<std::size_t>(f); i <= n; ++i) a[i] += a[i - static_cast<std::size_t>(f)];
  return a;
}

IntPoly one_minus_t_pow(int a);
IntPoly cyclotomic(int d);
std::string to_string(const IntPoly& p, const std::string& var = "t");
std::string to_latex(const IntPoly& p, const std::string& var = "t");

// Multiplicity of each cyclotomic factor Phi_d.
using CycloCounts = std::map<int, int>;

CycloCounts cyclo_counts(const std::vector<int>& factors);
IntPoly expand(const CycloCounts& counts);
int degree(const CycloCounts& counts);

// Product of (1 - t^a) factors; an empty list is the constant 1.
struct FactoredDenominator {
  std::vector<int> factors;

  int degree() const;
  IntPoly expand() const;
  CycloCounts counts() const { return cyclo_counts(factors); }
};

// Smallest-degree product of (1 - t^a) divisible by the given cyclotomic product.
FactoredDenominator min_product_cover(const CycloCounts& need);

CycloCounts lcm_counts(const std::vector<std::vector<int>>& products);

// LCM of the products prod (1 - t^a), presented as the smallest-degree
// (1 - t^a) product it divides. Exact LCM degree is reported separately.
struct LcmResult {
  FactoredDenominator cover;
  CycloCounts exact;
  int exact_degree = 0;
};
LcmResult lcm_factor_products(const std::vector<std::vector<int>>& products);

struct ReducedFraction {
  IntPoly numerator;
  FactoredDenominator denominator;
};

// Cancels common factors of num / den and re-expresses the reduced
// denominator as the smallest (1 - t^a) product it divides.
ReducedFraction rational_reduce(const IntPoly& num, const FactoredDenominator& den);

BigInt gcd(const BigInt& a, const BigInt& b);
std::int64_t lcm(std::int64_t a, std::int64_t b);

}  // namespace pg
