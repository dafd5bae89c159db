#include <cmath>
#include <vector>

#include "doctest.h"
#include "tacit/analytic.hpp"
#include "tacit/classical.hpp"
#include "tacit/noise.hpp"
#include "tacit/problem.hpp"
#include "tacit/quantum_solver.hpp"
#include "tacit/quantum_strategy.hpp"

using namespace tacit;

namespace {

// Embeds a two-party qubit strategy into ququarts by tagging each party with a
// fresh ancilla in |0>.  The first decision keeps its rank-1 projector (tensor
// the ancilla's |0><0|); the second decision absorbs the rest of the identity,
// so its rank grows to 3 while the ideal behavior is unchanged.
QuantumStrategy lift_to_ququarts(const QuantumStrategy& qubit) {
  QuantumStrategy lifted;
  lifted.dims = {4, 4};
  cmat anc0 = cmat::Zero(2, 2);
  anc0(0, 0) = 1.0;
  lifted.measurements.resize(2);
  for (size_t i = 0; i < 2; ++i) {
    lifted.measurements[i].resize(qubit.measurements[i].size());
    for (size_t o = 0; o < qubit.measurements[i].size(); ++o) {
      const cmat first = kron(qubit.measurements[i][o][0], anc0);
      lifted.measurements[i][o] = {first, cmat::Identity(4, 4) - first};
    }
  }
  lifted.state = cvec::Zero(16);
  for (int a1 = 0; a1 < 2; ++a1)
    for (int b1 = 0; b1 < 2; ++b1)
      lifted.state[(2 * a1 + 0) * 4 + (2 * b1 + 0)] = qubit.state[a1 * 2 + b1];
  return lifted;
}

}  // namespace

TEST_CASE("projector rank reads the trace") {
  CHECK(projector_rank(cmat::Identity(3, 3)) == 3);
  CHECK(projector_rank(cmat::Zero(2, 2)) == 0);
  cmat p = cmat::Zero(2, 2);
  p(0, 0) = 1.0;
  CHECK(projector_rank(p) == 1);
  CHECK_THROWS_AS((void)projector_rank(0.3 * p), input_error);
}

TEST_CASE("rank-one strategies produce the uniform factorizable behavior") {
  const TcProblem problem = make_hedge_or_not(0.3, 0.3);
  SolverOptions options;
  options.method = SolveMethod::grid;
  options.refine_top = 10;
  const QuantumReport report = quantum_value(problem, {2, 2}, options);
  const Behavior fact = factorizable_behavior(problem, report.strategy);
  for (double x : fact.probabilities()) CHECK(x == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(expected_utility(problem, fact) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("noisy behavior interpolates between ideal and factorizable") {
  const TcProblem problem = make_hedge_or_not(0.3, 0.3);
  SolverOptions options;
  options.method = SolveMethod::grid;
  options.refine_top = 10;
  const QuantumReport report = quantum_value(problem, {2, 2}, options);

  const Behavior ideal = behavior_of(problem, report.strategy);
  const Behavior fact = factorizable_behavior(problem, report.strategy);
  const Behavior at0 = noisy_behavior(problem, report.strategy, 0.0);
  const Behavior at1 = noisy_behavior(problem, report.strategy, 1.0);
  const Behavior mid = noisy_behavior(problem, report.strategy, 0.3);
  for (size_t k = 0; k < ideal.probabilities().size(); ++k) {
    CHECK(at0.probabilities()[k] == doctest::Approx(ideal.probabilities()[k]).epsilon(1e-12));
    CHECK(at1.probabilities()[k] == doctest::Approx(fact.probabilities()[k]).epsilon(1e-12));
    const double expect = 0.7 * ideal.probabilities()[k] + 0.3 * fact.probabilities()[k];
    CHECK(mid.probabilities()[k] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(noisy_expected_utility(problem, report.strategy, 0.3) ==
        doctest::Approx(0.7 * report.value + 0.3 * 0.5).epsilon(1e-9));
  CHECK_THROWS_AS((void)noisy_behavior(problem, report.strategy, 1.5), input_error);
}

TEST_CASE("robustness formula and clamping") {
  const double q = 0.5 * (1.0 + 1.0 / std::sqrt(2.0));  // cos^2(pi/8)
  CHECK(robustness_from_values(q, 0.75, 0.5) ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(robustness_from_values(0.7, 0.75, 0.5) == 0.0);   // no advantage
  CHECK(robustness_from_values(0.9, 0.75, 0.8) == 1.0);   // floor above classical
  CHECK(robustness_from_values(0.9, 0.75, 0.75) == 1.0);  // floor exactly classical
  CHECK_THROWS_AS((void)robustness_from_values(std::nan(""), 0.5, 0.5), input_error);
}

TEST_CASE("noise robustness of the maximally gapped point") {
  const TcProblem problem = make_hedge_or_not(0.5, 0.0);
  SolverOptions options;
  options.method = SolveMethod::grid;
  options.refine_top = 10;
  const NoiseReport report = noise_robustness(problem, {2, 2}, options);
  CHECK(!report.gapless);
  CHECK(report.classical_value == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(report.quantum_value ==
        doctest::Approx(chsh_bernoulli_quantum(0.5).value).epsilon(1e-8));
  CHECK(report.factorizable_utility == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.nu_star == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(report.nu_star == doctest::Approx(0.29289).epsilon(1e-3));
}

TEST_CASE("noise robustness is zero for gapless problems") {
  const TcProblem problem = make_hedge_or_not(0.5, 0.5);
  SolverOptions options;
  options.method = SolveMethod::grid;
  options.refine_top = 10;
  const NoiseReport report = noise_robustness(problem, {2, 2}, options);
  CHECK(report.gapless);
  CHECK(report.nu_star == 0.0);
}

TEST_CASE("ququart embedding gains exactly nu/16 in noisy utility") {
  // Plain win-on-matching-parity game: three of the four observation rows
  // reward equal decisions, which is where the lifted ranks put their mass.
  const TcProblem problem = make_chsh(0.5);
  SolverOptions options;
  options.method = SolveMethod::grid;
  options.refine_top = 10;
  const QuantumReport qubit = quantum_value(problem, {2, 2}, options);
  const QuantumStrategy lifted = lift_to_ququarts(qubit.strategy);
  lifted.validate(problem);

  // The embedding leaves the ideal behavior untouched...
  const Behavior a = behavior_of(problem, qubit.strategy);
  const Behavior b = behavior_of(problem, lifted);
  for (size_t k = 0; k < a.probabilities().size(); ++k)
    CHECK(a.probabilities()[k] == doctest::Approx(b.probabilities()[k]).epsilon(1e-10));

  // ...but skews the factorizable rows to ranks (1, 3) per party.
  const Behavior fact = factorizable_behavior(problem, lifted);
  const std::int64_t nd = problem.dec_shape().total();
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o) {
    CHECK(fact(o, 0) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(fact(o, 1) == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
    CHECK(fact(o, 2) == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
    CHECK(fact(o, 3) == doctest::Approx(9.0 / 16.0).epsilon(1e-12));
    (void)nd;
  }
  CHECK(expected_utility(problem, fact) == doctest::Approx(9.0 / 16.0).epsilon(1e-12));

  for (double nu : {0.1, 0.5, 1.0}) {
    const double gain = noisy_expected_utility(problem, lifted, nu) -
                        noisy_expected_utility(problem, qubit.strategy, nu);
    CHECK(gain == doctest::Approx(nu / 16.0).epsilon(1e-12));
  }
}
