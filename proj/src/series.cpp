#include "pg/series.hpp"

#include <map>
#include <numeric>
#include <sstream>

namespace pg {

namespace {

IntPoly terms_poly(const std::vector<std::uint64_t>& terms, std::size_t count) {
  std::vector<BigInt> c;
  for (std::size_t i = 0; i < count && i < terms.size(); ++i) c.emplace_back(static_cast<unsigned long long>(terms[i]));
  return IntPoly(std::move(c));
}

std::string denominator_string(const FactoredDenominator& d, bool latex) {
  std::map<int, int> mult;
  for (int a : d.factors) ++mult[a];
  std::string out;
  for (auto it = mult.rbegin(); it != mult.rend(); ++it) {
    auto [a, k] = *it;
    std::string f = latex ? (a == 1 ? "(1-t)" : "(1-t^{" + std::to_string(a) + "})")
                          : (a == 1 ? "(1-t)" : "(1-t^" + std::to_string(a) + ")");
    out += f;
    if (k > 1) out += latex ? "^{" + std::to_string(k) + "}" : "^" + std::to_string(k);
  }
  return out.empty() ? "1" : out;
}

}  // namespace

std::vector<BigInt> GrowthSeries::expand(std::size_t upto) const { return expand_over(numerator, denominator.factors, upto); }

GrowthSeries reconstruct_series(const std::vector<std::uint64_t>& terms, const Rat& beta, const FactoredDenominator& R) {
  if (beta < 0) throw SeriesError("series: negative threshold");
  GrowthSeries s;
  s.beta = beta;
  s.gamma = floor(beta).convert_to<int>() + R.degree();
  if (terms.size() < static_cast<std::size_t>(s.gamma) + 1) throw InsufficientTerms(terms.size(), s.gamma + 1);
  const IntPoly Rp = R.expand();
  s.certified_numerator = truncmul(Rp, terms_poly(terms, static_cast<std::size_t>(s.gamma) + 1), s.gamma);
  s.certified_denominator = R;
  // Every available coefficient of R * S beyond gamma must vanish.
  IntPoly full = truncmul(Rp, terms_poly(terms, terms.size()), static_cast<long>(terms.size()) - 1);
  for (std::size_t k = static_cast<std::size_t>(s.gamma) + 1; k < terms.size(); ++k)
    if (full.coeff(k) != 0)
      throw SeriesError("series: coefficient " + std::to_string(k) + " of R(t) S(t) is nonzero; the threshold is unsound");
  ReducedFraction red = rational_reduce(s.certified_numerator, R);
  s.numerator = red.numerator;
  s.denominator = red.denominator;
  return s;
}

IntPoly reconstruction_residual(const GrowthSeries& s, const std::vector<std::uint64_t>& terms) {
  IntPoly prod = truncmul(s.certified_denominator.expand(), terms_poly(terms, static_cast<std::size_t>(s.gamma) + 1), s.gamma);
  return s.certified_numerator - prod;
}

Rat QuasiPolynomial::eval(long i) const {
  const auto& p = pieces[static_cast<std::size_t>(((i % period) + period) % period)];
  Rat v = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * Rat(i) + *it;
  return v;
}

QuasiPolynomial extract_quasipolynomial(const GrowthSeries& s, int dim) {
  long N = 1;
  for (int a : s.denominator.factors) N = std::lcm(N, static_cast<long>(a));
  const long floor_beta = floor(s.beta).convert_to<long>();
  const long start = std::max(floor_beta + 1, std::max(0L, s.numerator.degree() - s.denominator.degree() + 1));
  const long L = start + 2 * N * dim + N;
  const auto a = s.expand(static_cast<std::size_t>(L));
  QuasiPolynomial q;
  q.period = static_cast<int>(N);
  q.pieces.resize(static_cast<std::size_t>(N));
  for (long r = 0; r < N; ++r) {
    long i0 = start + ((r - start) % N + N) % N;
    RatMat V(dim, dim);
    RatVec y(dim);
    for (int j = 0; j < dim; ++j) {
      long i = i0 + j * N;
      Rat p = 1;
      for (int k = 0; k < dim; ++k) {
        V(j, k) = p;
        p *= Rat(i);
      }
      y(j) = Rat(a[static_cast<std::size_t>(i)]);
    }
    auto c = solve_linear(V, y);
    if (!c) throw SeriesError("series: singular fit for residue " + std::to_string(r));
    q.pieces[static_cast<std::size_t>(r)].assign(c->data(), c->data() + dim);
  }
  for (long i = start; i <= L; ++i)
    if (q.eval(i) != Rat(a[static_cast<std::size_t>(i)]))
      throw SeriesError("series: quasi-polynomial fit fails at i = " + std::to_string(i) + " beyond the threshold");
  for (long p = 1; p <= N; ++p) {
    if (N % p != 0) continue;
    bool same = true;
    for (long r = 0; r < N && same; ++r) same = q.pieces[static_cast<std::size_t>(r)] == q.pieces[static_cast<std::size_t>(r % p)];
    if (same) {
      q.pieces.resize(static_cast<std::size_t>(p));
      q.period = static_cast<int>(p);
      break;
    }
  }
  long t = start;
  while (t > 0 && q.eval(t - 1) == Rat(a[static_cast<std::size_t>(t - 1)])) --t;
  q.threshold = static_cast<int>(t);
  return q;
}

Prediction compare_with_terms(const GrowthSeries& s, const std::vector<std::uint64_t>& terms) {
  Prediction p;
  if (terms.empty()) return p;
  const auto a = s.expand(terms.size() - 1);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    BigInt actual(static_cast<unsigned long long>(terms[i]));
    if (a[i] != actual) {
      p.ok = false;
      p.first_mismatch = static_cast<long>(i);
      p.expected = a[i];
      p.actual = actual;
      break;
    }
  }
  return p;
}

std::string series_plain(const GrowthSeries& s) {
  return "(" + to_string(s.numerator) + ")/" + denominator_string(s.denominator, false);
}

std::string series_latex(const GrowthSeries& s) {
  return "\\frac{" + to_latex(s.numerator) + "}{" + denominator_string(s.denominator, true) + "}";
}

}  // namespace pg
