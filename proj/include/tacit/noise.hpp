#pragma once

// Noise robustness.  With probability nu the entangled resource is replaced by
// the maximally mixed product state, under which each projector fires with
// probability rank / dimension independently of the others.  The advantage
// over the best classical strategy survives as long as the mixture's expected
// utility stays above the classical value.

#include <cmath>
#include <vector>

#include "tacit/classical.hpp"
#include "tacit/errors.hpp"
#include "tacit/problem.hpp"
#include "tacit/quantum_solver.hpp"
#include "tacit/quantum_strategy.hpp"

namespace tacit {

// Integer rank of a projector, read off the trace.
inline int projector_rank(const cmat& projector) {
  const double trace = projector.trace().real();
  const int rank = static_cast<int>(std::lround(trace));
  if (std::abs(trace - rank) > 1e-8 || rank < 0)
    throw input_error("projector_rank: trace is not a nonnegative integer");
  return rank;
}

// Behavior of a strategy measured on the maximally mixed product state:
// p(d | o) = prod_i rank(P_i^(d_i|o_i)) / q_i.
inline Behavior factorizable_behavior(const TcProblem& problem,
                                      const QuantumStrategy& strategy) {
  strategy.validate(problem);
  const int n = problem.parties();
  const std::int64_t nd = problem.dec_shape().total();
  std::vector<double> p(static_cast<size_t>(problem.obs_shape().total() * nd), 0.0);
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o) {
    const std::vector<int> obs = problem.obs_shape().unflatten(o);
    for (std::int64_t d = 0; d < nd; ++d) {
      const std::vector<int> dec = problem.dec_shape().unflatten(d);
      double prob = 1.0;
      for (int i = 0; i < n; ++i) {
        const auto& projector =
            strategy.measurements[static_cast<size_t>(i)][static_cast<size_t>(
                obs[static_cast<size_t>(i)])][static_cast<size_t>(dec[static_cast<size_t>(i)])];
        prob *= static_cast<double>(projector_rank(projector)) /
                static_cast<double>(strategy.dims[static_cast<size_t>(i)]);
      }
      p[static_cast<size_t>(o * nd + d)] = prob;
    }
  }
  return Behavior(problem.obs_shape(), problem.dec_shape(), std::move(p));
}

inline Behavior noisy_behavior(const TcProblem& problem, const QuantumStrategy& strategy,
                               double nu) {
  if (!(nu >= 0.0 && nu <= 1.0))
    throw input_error("noisy_behavior: noise level must lie in [0, 1]");
  const Behavior ideal = behavior_of(problem, strategy);
  const Behavior fact = factorizable_behavior(problem, strategy);
  std::vector<double> p(ideal.probabilities().size());
  for (size_t k = 0; k < p.size(); ++k)
    p[k] = (1.0 - nu) * ideal.probabilities()[k] + nu * fact.probabilities()[k];
  return Behavior(problem.obs_shape(), problem.dec_shape(), std::move(p));
}

inline double noisy_expected_utility(const TcProblem& problem,
                                     const QuantumStrategy& strategy, double nu) {
  return expected_utility(problem, noisy_behavior(problem, strategy, nu));
}

// Critical noise level: the nu at which (1 - nu) * quantum + nu * factorizable
// drops to the classical value.  Clamped to [0, 1]; zero when there is no
// advantage to begin with.
inline double robustness_from_values(double quantum, double classical,
                                     double factorizable) {
  if (!std::isfinite(quantum) || !std::isfinite(classical) || !std::isfinite(factorizable))
    throw input_error("robustness_from_values: values must be finite");
  if (quantum <= classical) return 0.0;
  if (factorizable >= classical) return 1.0;  // the mixture never drops below classical
  return (quantum - classical) / (quantum - factorizable);
}

struct NoiseReport {
  double nu_star = 0.0;
  double quantum_value = 0.0;
  double classical_value = 0.0;
  double factorizable_utility = 0.0;
  bool gapless = false;
  std::int64_t evaluations = 0;
};

inline NoiseReport noise_robustness(const TcProblem& problem, const std::vector<int>& dims,
                                    const SolverOptions& options = {},
                                    std::int64_t classical_budget = 100'000'000) {
  NoiseReport report;
  report.classical_value = classical_value(problem, classical_budget).value;
  const QuantumReport q = quantum_value(problem, dims, options);
  report.quantum_value = q.value;
  report.evaluations = q.evaluations;
  report.factorizable_utility =
      expected_utility(problem, factorizable_behavior(problem, q.strategy));
  report.gapless = q.value <= report.classical_value + 1e-9;
  report.nu_star = report.gapless ? 0.0
                                  : robustness_from_values(q.value, report.classical_value,
                                                           report.factorizable_utility);
  return report;
}

}  // namespace tacit
