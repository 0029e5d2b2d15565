#pragma once

#include "pg/exact.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pg {

struct InsufficientTerms : std::runtime_error {
  InsufficientTerms(std::size_t have, int need)
      : std::runtime_error("series: " + std::to_string(have) + " terms given but " + std::to_string(need) +
                           " (gamma + 1) are required"),
        required(need) {}
  int required;
};

struct SeriesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GrowthSeries {
  IntPoly numerator;                // reduced
  FactoredDenominator denominator;  // reduced
  IntPoly certified_numerator;      // before reduction, over the certified denominator
  FactoredDenominator certified_denominator;
  Rat beta;
  int gamma = 0;

  std::vector<BigInt> expand(std::size_t upto) const;
};

// Q = R * sum s_i t^i truncated at degree gamma = floor(beta) + deg R. Extra terms
// beyond gamma are checked against the identity R * S = Q.
GrowthSeries reconstruct_series(const std::vector<std::uint64_t>& terms, const Rat& beta, const FactoredDenominator& R);

// Q(t) - R(t) * sum_{i <= gamma} s_i t^i modulo t^{gamma+1}; zero for a sound reconstruction.
IntPoly reconstruction_residual(const GrowthSeries& s, const std::vector<std::uint64_t>& terms);

struct QuasiPolynomial {
  int period = 1;
  int threshold = 0;
  std::vector<std::vector<Rat>> pieces;  // pieces[r][k]: coefficient of i^k for i = r mod period

  Rat eval(long i) const;
};

// Fits degree dim-1 pieces beyond max(beta, deg Q - deg R), verifies them on
// floor(beta) + 2 N dim expanded terms and minimizes the period over divisors
// of N = lcm of the denominator exponents.
QuasiPolynomial extract_quasipolynomial(const GrowthSeries& s, int dim);

struct Prediction {
  bool ok = true;
  long first_mismatch = -1;
  BigInt expected, actual;
};

// Compares the series expansion with independently computed terms.
Prediction compare_with_terms(const GrowthSeries& s, const std::vector<std::uint64_t>& terms);

std::string series_plain(const GrowthSeries& s);
std::string series_latex(const GrowthSeries& s);

}  // namespace pg
