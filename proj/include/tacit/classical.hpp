#pragma once

// Exhaustive search over deterministic strategies.  The optimal classical
// value of a tacit-coordination problem is attained by a deterministic
// strategy (shared randomness only mixes over them), so enumerating the
// product space of per-party response functions is exact.

#include <cstdint>
#include <string>
#include <vector>

#include "tacit/errors.hpp"
#include "tacit/problem.hpp"

namespace tacit {

struct ClassicalReport {
  double value = 0.0;
  DeterministicStrategy strategy;       // first maximizer in canonical order
  std::int64_t strategies_total = 0;    // size of the search space
  std::int64_t strategies_evaluated = 0;
};

// Number of deterministic strategies, prod_i |D_i|^{|O_i|}; throws
// budget_error when it exceeds the budget (or overflows).
inline std::int64_t count_deterministic_strategies(const TcProblem& problem,
                                                   std::int64_t budget) {
  std::int64_t total = 1;
  for (int i = 0; i < problem.parties(); ++i)
    for (int o = 0; o < problem.obs_shape().size(i); ++o) {
      const std::int64_t radix = problem.dec_shape().size(i);
      if (total > budget / radix + 1)
        throw budget_error("classical_value: strategy space exceeds budget of " +
                           std::to_string(budget) + " strategies");
      total *= radix;
    }
  if (total > budget)
    throw budget_error("classical_value: strategy space of " + std::to_string(total) +
                       " strategies exceeds budget of " + std::to_string(budget));
  return total;
}

inline ClassicalReport classical_value(const TcProblem& problem,
                                       std::int64_t budget = 100'000'000) {
  ClassicalReport report;
  report.strategies_total = count_deterministic_strategies(problem, budget);

  const int n = problem.parties();
  const std::int64_t no = problem.obs_shape().total();
  const std::int64_t ndec = problem.dec_shape().total();

  // Current strategy in canonical digit order; index 0 = all-zero digits.
  DeterministicStrategy s;
  s.decisions.assign(static_cast<size_t>(n), {});
  for (int i = 0; i < n; ++i)
    s.decisions[static_cast<size_t>(i)].assign(
        static_cast<size_t>(problem.obs_shape().size(i)), 0);

  // Per joint observation, precompute the party-local observation letters
  // and the stride of each party's decision digit inside the joint decision
  // index, so scoring a strategy is a flat loop.
  std::vector<std::vector<int>> local_obs(static_cast<size_t>(no));
  for (std::int64_t o = 0; o < no; ++o)
    local_obs[static_cast<size_t>(o)] = problem.obs_shape().unflatten(o);
  std::vector<std::int64_t> dec_stride(static_cast<size_t>(n));
  {
    std::int64_t stride = 1;
    for (int i = n; i-- > 0;) {
      dec_stride[static_cast<size_t>(i)] = stride;
      stride *= problem.dec_shape().size(i);
    }
  }
  const std::vector<double>& w = problem.weighted_utility();

  auto score = [&]() {
    double eu = 0.0;
    for (std::int64_t o = 0; o < no; ++o) {
      std::int64_t d = 0;
      const auto& lo = local_obs[static_cast<size_t>(o)];
      for (int i = 0; i < n; ++i)
        d += dec_stride[static_cast<size_t>(i)] *
             s.decisions[static_cast<size_t>(i)][static_cast<size_t>(lo[static_cast<size_t>(i)])];
      eu += w[static_cast<size_t>(o * ndec + d)];
    }
    return eu;
  };

  // Odometer over strategy digits; strictly-greater keeps the first (lowest
  // canonical index) maximizer.
  bool first = true;
  bool more = true;
  while (more) {
    const double eu = score();
    ++report.strategies_evaluated;
    if (first || eu > report.value) {
      report.value = eu;
      report.strategy = s;
      first = false;
    }
    more = false;
    for (int i = n; i-- > 0 && !more;) {
      auto& row = s.decisions[static_cast<size_t>(i)];
      for (size_t o = row.size(); o-- > 0;) {
        if (++row[o] < problem.dec_shape().size(i)) {
          more = true;
          break;
        }
        row[o] = 0;
      }
    }
  }
  return report;
}

}  // namespace tacit
