#include <cmath>
#include <vector>

#include "doctest.h"
#include "tacit/cmaes.hpp"
#include "tacit/nelder_mead.hpp"

using namespace tacit;

TEST_CASE("nelder-mead climbs a smooth unimodal function") {
  auto f = [](const std::vector<double>& x) {
    double s = 0.0;
    for (size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - (0.5 + static_cast<double>(j));
      s -= d * d;
    }
    return s;
  };
  const NelderMeadResult r =
      nelder_mead_maximize(f, {0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}, 1e-12);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.x[2] == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(r.evaluations > 0);
}

TEST_CASE("nelder-mead handles one dimension and empty input") {
  auto f = [](const std::vector<double>& x) {
    return x.empty() ? 7.0 : -(x[0] - 2.0) * (x[0] - 2.0);
  };
  const NelderMeadResult one = nelder_mead_maximize(f, {10.0}, {1.0});
  CHECK(one.x[0] == doctest::Approx(2.0).epsilon(1e-6));
  const NelderMeadResult zero = nelder_mead_maximize(f, {}, {});
  CHECK(zero.converged);
  CHECK(zero.value == 7.0);
}

TEST_CASE("nelder-mead respects its iteration cap") {
  auto f = [](const std::vector<double>& x) { return -x[0] * x[0]; };
  const NelderMeadResult r = nelder_mead_maximize(f, {100.0}, {0.1}, 1e-14, 3);
  CHECK(r.iterations <= 3);
}

TEST_CASE("coordinate canonicalization wraps and rounds") {
  const VariableSpec angle = VariableSpec::continuous(0.0, 6.0);
  CHECK(detail::canonical_coordinate(6.5, angle) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(detail::canonical_coordinate(-1.0, angle) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(detail::canonical_coordinate(3.7, angle) == doctest::Approx(3.7).epsilon(1e-12));

  const VariableSpec digit = VariableSpec::integer(4);
  CHECK(detail::canonical_coordinate(2.4, digit) == 2.0);
  CHECK(detail::canonical_coordinate(-3.0, digit) == 0.0);
  CHECK(detail::canonical_coordinate(9.9, digit) == 3.0);
}

TEST_CASE("cma-es solves a continuous quadratic") {
  auto f = [](const std::vector<double>& x) {
    double s = 0.0;
    for (size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - 1.0 - 0.5 * static_cast<double>(j);
      s -= d * d;
    }
    return s;
  };
  std::vector<VariableSpec> vars(5, VariableSpec::continuous(-4.0, 4.0));
  CmaesOptions options;
  options.restarts = 3;
  const CmaesResult r = cmaes_maximize(f, vars, options);
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-8));
  for (size_t j = 0; j < 5; ++j)
    CHECK(r.x[j] == doctest::Approx(1.0 + 0.5 * static_cast<double>(j)).epsilon(1e-4));
}

TEST_CASE("cma-es finds mixed continuous-discrete optima") {
  // Optimum at x = 2.3 and digit k = 3 of radix 6.
  auto f = [](const std::vector<double>& x) {
    const double k = x[1];
    return -(x[0] - 2.3) * (x[0] - 2.3) - 0.5 * (k - 3.0) * (k - 3.0);
  };
  std::vector<VariableSpec> vars = {VariableSpec::continuous(0.0, 5.0),
                                    VariableSpec::integer(6)};
  CmaesOptions options;
  options.restarts = 4;
  const CmaesResult r = cmaes_maximize(f, vars, options);
  CHECK(r.x[1] == 3.0);
  CHECK(r.x[0] == doctest::Approx(2.3).epsilon(1e-3));
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("cma-es margin keeps discrete coordinates from stalling") {
  // The discrete coordinate only matters through a small additive bonus, a
  // shape that collapses sigma quickly; the margin must keep the rounding
  // boundary reachable so the best digit is still found.
  auto f = [](const std::vector<double>& x) {
    const double bonus = (x[1] == 2.0) ? 0.05 : 0.0;
    return -(x[0] - 0.7) * (x[0] - 0.7) + bonus;
  };
  std::vector<VariableSpec> vars = {VariableSpec::continuous(0.0, 1.0),
                                    VariableSpec::integer(5)};
  CmaesOptions options;
  options.restarts = 5;
  const CmaesResult r = cmaes_maximize(f, vars, options);
  CHECK(r.x[1] == 2.0);
  CHECK(r.value == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("cma-es is deterministic under a fixed seed") {
  auto f = [](const std::vector<double>& x) {
    return -(x[0] - 0.25) * (x[0] - 0.25) - std::abs(x[1] - 1.0);
  };
  std::vector<VariableSpec> vars = {VariableSpec::continuous(-2.0, 2.0),
                                    VariableSpec::integer(3)};
  CmaesOptions options;
  options.seed = 99;
  const CmaesResult a = cmaes_maximize(f, vars, options);
  const CmaesResult b = cmaes_maximize(f, vars, options);
  CHECK(a.value == b.value);
  CHECK(a.evaluations == b.evaluations);
  REQUIRE(a.x.size() == b.x.size());
  for (size_t j = 0; j < a.x.size(); ++j) CHECK(a.x[j] == b.x[j]);
}

TEST_CASE("cma-es respects the evaluation budget") {
  auto f = [](const std::vector<double>& x) { return -x[0] * x[0]; };
  std::vector<VariableSpec> vars = {VariableSpec::continuous(-1.0, 1.0)};
  CmaesOptions options;
  options.max_evaluations = 40;
  const CmaesResult r = cmaes_maximize(f, vars, options);
  CHECK(r.budget_exhausted);
  CHECK(r.evaluations <= 40 + 8);  // may finish the sampled generation
}
