#pragma once

// Closed-form values for the CHSH game with independent Bernoulli(p) inputs,
// plus the Tsirelson-boundary feasibility test for two-party binary
// correlations.  These are exact formulas used both by callers and as
// oracles for the numeric solvers.
//
// Classical:  c*(p) = 1 - p^2          for p in [0, 1/2]
//             c*(p) = -p^2 + 2p        for p in [1/2, 1]
// Quantum:    q*(p) = c*(p)            outside (1 - 1/sqrt2, 1/sqrt2)
//             q*(p) = (1/sqrt2)(1 - 2p(1-p)) + 1/2   inside
// A strict quantum-classical gap exists exactly for
// p in (1 - 1/sqrt2, 1/sqrt2).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "tacit/errors.hpp"

namespace tacit {

inline constexpr double kGapLow = 0.29289321881345247;   // 1 - 1/sqrt(2)
inline constexpr double kGapHigh = 0.7071067811865476;   // 1/sqrt(2)

enum class BernoulliBranch { low, middle, high };

struct PiecewiseValue {
  double value = 0.0;
  BernoulliBranch branch = BernoulliBranch::low;
};

inline void check_unit_interval(double p, const char* where) {
  if (!(p >= 0.0 && p <= 1.0))
    throw input_error(std::string(where) + ": p outside [0, 1]");
}

inline PiecewiseValue chsh_bernoulli_classical(double p) {
  check_unit_interval(p, "chsh_bernoulli_classical");
  if (p <= 0.5) return {1.0 - p * p, BernoulliBranch::low};
  return {-p * p + 2.0 * p, BernoulliBranch::high};
}

// Branch boundaries belong to the closed classical pieces, so the middle
// branch applies on the open gap interval only.
inline PiecewiseValue chsh_bernoulli_quantum(double p) {
  check_unit_interval(p, "chsh_bernoulli_quantum");
  if (p <= kGapLow) return {1.0 - p * p, BernoulliBranch::low};
  if (p >= kGapHigh) return {-p * p + 2.0 * p, BernoulliBranch::high};
  const double value = (1.0 - 2.0 * p * (1.0 - p)) / std::sqrt(2.0) + 0.5;
  return {value, BernoulliBranch::middle};
}

inline bool gap_region(double p) {
  check_unit_interval(p, "gap_region");
  return p > kGapLow && p < kGapHigh;
}

// Lagrange multiplier of the Tsirelson-boundary optimization underlying the
// middle branch; real only on the closed interval [1 - 1/sqrt2, 1/sqrt2].
inline std::optional<double> lambda_star(double p) {
  check_unit_interval(p, "lambda_star");
  if (p < kGapLow || p > kGapHigh) return std::nullopt;
  const double f = (2.0 * p * p - 1.0) * (2.0 * p * p - 4.0 * p + 1.0);
  return std::sqrt(std::max(f, 0.0)) / (2.0 * std::sqrt(2.0));
}

// A two-party binary correlation matrix (a, b; c, d) is quantum-realizable
// iff every signed combination of arcsines with one odd sign stays within
// pi.  Inputs must be valid correlations in [-1, 1].
inline bool tsirelson_feasible(double a, double b, double c, double d,
                               double tol = 1e-10) {
  for (double v : {a, b, c, d})
    if (!(v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12))
      throw input_error("tsirelson_feasible: correlation outside [-1, 1]");
  const double pi = std::acos(-1.0);
  const double s[4] = {std::asin(std::clamp(a, -1.0, 1.0)),
                       std::asin(std::clamp(b, -1.0, 1.0)),
                       std::asin(std::clamp(c, -1.0, 1.0)),
                       std::asin(std::clamp(d, -1.0, 1.0))};
  for (int minus = 0; minus < 4; ++minus) {
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) sum += (j == minus) ? -s[j] : s[j];
    if (std::abs(sum) > pi + tol) return false;
  }
  return true;
}

}  // namespace tacit
