#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tacit/analytic.hpp"
#include "tacit/classical.hpp"
#include "tacit/errors.hpp"
#include "tacit/nelder_mead.hpp"
#include "tacit/problem.hpp"
#include "tacit/quantum_solver.hpp"
#include "tacit/quantum_strategy.hpp"

using namespace tacit;

namespace {

// Independent oracle for two-party binary problems whose utility depends on
// decisions only through their parity: the reachable correlations are exactly
// cos(a_o - b_d), so the value is a four-angle maximization that never touches
// the solver's parameterization or eigensolver.
double parity_game_oracle(double w_nn, double w_ni, double w_in, double w_ii,
                          double b_nn, double b_ni, double b_in, double b_ii) {
  auto eu = [&](const std::vector<double>& t) {
    const double c00 = std::cos(t[0] - t[2]), c01 = std::cos(t[0] - t[3]);
    const double c10 = std::cos(t[1] - t[2]), c11 = std::cos(t[1] - t[3]);
    return 0.5 + w_nn * b_nn * c00 + w_ni * b_ni * c01 + w_in * b_in * c10 +
           w_ii * b_ii * c11;
  };
  double best = -1e300;
  std::vector<double> best_t;
  const int steps = 14;
  std::vector<double> t(4);
  for (int i0 = 0; i0 < steps; ++i0)
    for (int i1 = 0; i1 < steps; ++i1)
      for (int i2 = 0; i2 < steps; ++i2)
        for (int i3 = 0; i3 < steps; ++i3) {
          t = {i0 * 6.283185307179586 / steps, i1 * 6.283185307179586 / steps,
               i2 * 6.283185307179586 / steps, i3 * 6.283185307179586 / steps};
          const double v = eu(t);
          if (v > best) {
            best = v;
            best_t = t;
          }
        }
  const NelderMeadResult polished =
      nelder_mead_maximize(eu, best_t, std::vector<double>(4, 0.3), 1e-12);
  return std::max(best, polished.value);
}

double hedge_oracle(double p, double beta) {
  const double w_nn = (1.0 - p) * (1.0 - p), w_mid = p * (1.0 - p), w_ii = p * p;
  return parity_game_oracle(w_nn, w_mid, w_mid, w_ii, -0.5, beta - 0.5, beta - 0.5, 0.5);
}

}  // namespace

TEST_CASE("search space shapes and reductions") {
  const TcProblem problem = make_hedge_or_not(0.3, 0.3);
  const SearchSpace raw = make_search_space(problem, {2, 2});
  CHECK(raw.angle_slots.size() == 4);  // [phase, rotation] per party
  CHECK(raw.discrete_slots.size() == 4);
  CHECK(raw.discrete_combos() == 256);
  for (const auto& slot : raw.discrete_slots) {
    CHECK(slot.kind == SearchSpace::DiscreteSlot::Kind::partition);
    CHECK(slot.radix == 4);
  }

  const SearchSpace no_phases = reduce_phase_params_n22(problem, raw);
  REQUIRE(no_phases.angle_slots.size() == 2);
  for (const auto& slot : no_phases.angle_slots) {
    CHECK(slot.index == 1);  // the rotation within each [phase, rotation] pair
    CHECK(slot.lo == 0.0);
    CHECK(slot.hi == doctest::Approx(kPi / 2.0));
  }

  const SearchSpace pinned = fix_nondegenerate_222(problem, no_phases);
  CHECK(pinned.discrete_slots.empty());
  for (const auto& party : pinned.base.partitions)
    for (const auto& partition : party) CHECK(partition == std::vector<int>{0, 1});

  SolverOptions options;
  const SearchSpace prepared = prepare_search_space(problem, {2, 2}, options);
  CHECK(prepared.angle_slots.size() == 2);
  CHECK(prepared.discrete_slots.empty());

  // Reductions refuse shapes they do not cover.
  const TcProblem three({{"x0", "x1"}, {"y0", "y1"}},
                        {{"a0", "a1", "a2"}, {"b0", "b1"}},
                        {0.25, 0.25, 0.25, 0.25}, std::vector<double>(24, 0.0));
  CHECK_THROWS_AS((void)reduce_phase_params_n22(three, make_search_space(three, {3, 2})),
                  input_error);
  CHECK_THROWS_AS((void)fix_nondegenerate_222(three, make_search_space(three, {3, 2})),
                  input_error);

  CHECK(default_dims(problem) == std::vector<int>{2, 2});
  CHECK(default_dims(three) == std::vector<int>{3, 2});
}

TEST_CASE("grid and cma-es reproduce the known binary-game curve") {
  for (double p : {0.2, 0.3, 0.5}) {
    const TcProblem problem = make_chsh(p, true);
    SolverOptions options;
    options.method = SolveMethod::both;
    const QuantumReport report = quantum_value(problem, {2, 2}, options);
    const double expected = chsh_bernoulli_quantum(p).value;
    CHECK(report.value == doctest::Approx(expected).epsilon(1e-8));
    REQUIRE(report.grid_value.has_value());
    REQUIRE(report.cmaes_value.has_value());
    CHECK(*report.grid_value == doctest::Approx(expected).epsilon(1e-8));
    CHECK(*report.cmaes_value == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("hedging problem value against the correlation-space oracle") {
  const TcProblem problem = make_hedge_or_not(0.3, 0.3);
  SolverOptions options;
  options.method = SolveMethod::grid;
  const QuantumReport report = quantum_value(problem, {2, 2}, options);
  CHECK(report.value == doctest::Approx(0.812339559).epsilon(1e-6));

  const double oracle = hedge_oracle(0.3, 0.3);
  CHECK(report.value == doctest::Approx(oracle).epsilon(1e-7));

  // The oracle also reproduces the closed form at beta = 0.
  CHECK(hedge_oracle(0.5, 0.0) ==
        doctest::Approx(chsh_bernoulli_quantum(0.5).value).epsilon(1e-9));
}

TEST_CASE("solved strategy is consistent with its reported value") {
  const TcProblem problem = make_hedge_or_not(0.3, 0.3);
  SolverOptions options;
  const QuantumReport report = quantum_value(problem, {2, 2}, options);
  CHECK_NOTHROW(report.strategy.validate(problem));
  CHECK(report.method == "both");
  CHECK(report.seed == options.seed);
  CHECK(report.evaluations > 0);
  CHECK(report.spectral_gap >= 0.0);
  CHECK(report.value ==
        doctest::Approx(std::max(report.grid_value.value_or(-1e300),
                                 report.cmaes_value.value_or(-1e300)))
            .epsilon(1e-9));
  // The stored state is the top eigenvector, so the behavior route agrees.
  CHECK(expected_utility(problem, report.strategy) ==
        doctest::Approx(report.value).epsilon(1e-9));
  const Behavior b = behavior_of(problem, report.strategy);
  CHECK(check_no_signaling(b).max_violation < 1e-9);
}

TEST_CASE("pinned reductions lose nothing against the full search space") {
  const TcProblem problem = make_chsh(0.5, true);

  SolverOptions reduced;
  reduced.method = SolveMethod::grid;
  const QuantumReport fast = quantum_value(problem, {2, 2}, reduced);

  SolverOptions unreduced;
  unreduced.method = SolveMethod::grid;
  unreduced.reduce_n22_phases = false;
  unreduced.pin_nondegenerate_222 = false;
  unreduced.grid_points = 7;
  unreduced.refine_top = 3;
  unreduced.budget = 3'000'000;
  const QuantumReport full = quantum_value(problem, {2, 2}, unreduced);

  const double expected = chsh_bernoulli_quantum(0.5).value;
  CHECK(fast.value == doctest::Approx(expected).epsilon(1e-10));
  CHECK(full.value == doctest::Approx(expected).epsilon(1e-7));
  CHECK(full.evaluations > fast.evaluations);
}

TEST_CASE("solver output is deterministic") {
  const TcProblem problem = make_hedge_or_not(0.35, 0.2);
  SolverOptions options;
  options.method = SolveMethod::both;
  options.seed = 777;
  const QuantumReport a = quantum_value(problem, {2, 2}, options);
  const QuantumReport b = quantum_value(problem, {2, 2}, options);
  CHECK(a.value == b.value);
  CHECK(a.evaluations == b.evaluations);
  CHECK(*a.grid_value == *b.grid_value);
  CHECK(*a.cmaes_value == *b.cmaes_value);
  for (size_t i = 0; i < a.params.angles.size(); ++i)
    for (size_t o = 0; o < a.params.angles[i].size(); ++o)
      for (size_t k = 0; k < a.params.angles[i][o].size(); ++k)
        CHECK(a.params.angles[i][o][k] == b.params.angles[i][o][k]);
}

TEST_CASE("budget refusal on oversized grids") {
  const TcProblem problem = make_hedge_or_not(0.3, 0.3);
  SolverOptions options;
  options.method = SolveMethod::grid;
  options.budget = 100;  // the 20x20 angle grid alone exceeds this
  CHECK_THROWS_AS((void)quantum_value(problem, {2, 2}, options), budget_error);
}

TEST_CASE("single-observation problems gain nothing from entanglement") {
  const TcProblem problem({{"x"}, {"y"}}, {{"a0", "a1"}, {"b0", "b1", "b2"}}, {1.0},
                          {0.1, 0.9, 0.4, 0.3, 0.2, 0.8});
  const double classical = classical_value(problem).value;
  CHECK(classical == 0.9);
  SolverOptions options;
  options.method = SolveMethod::grid;
  const QuantumReport report = quantum_value(problem, default_dims(problem), options);
  CHECK(report.value == doctest::Approx(classical).epsilon(1e-9));
}
