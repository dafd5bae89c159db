#pragma once

// Numeric maximization of the quantum value: parameterize each party's
// measurement bases (first observation pinned to the computational basis,
// which costs no generality by local unitary freedom), enumerate the
// projector partitions, and maximize the largest eigenvalue of the Bell
// operator over the remaining angles.
//
// Search-space size: sum_i (q_i^2 - q_i)(|O_i| - 1) continuous angles and
// sum_i |O_i| discrete partition assignments.  Two exact reductions apply to
// qubit problems:
//   * two-observation qubit parties need no relative phase (conjugation by a
//     diagonal unitary preserves the spectrum), leaving one rotation angle
//     per party,
//   * for two parties with binary observations and decisions the optimum is
//     attained at nondegenerate measurements with the identity partition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tacit/cmaes.hpp"
#include "tacit/errors.hpp"
#include "tacit/nelder_mead.hpp"
#include "tacit/parameterization.hpp"
#include "tacit/problem.hpp"
#include "tacit/quantum_strategy.hpp"

namespace tacit {

inline constexpr double kPi = 3.14159265358979323846;

// Full angle/partition description of every party's measurements.  Angle
// vectors follow the canonical packing of basis_from_params; observation 0
// is always all-zero (computational basis).
struct MeasurementParams {
  std::vector<int> dims;
  std::vector<std::vector<std::vector<double>>> angles;     // [party][obs][q^2-q]
  std::vector<std::vector<std::vector<int>>> partitions;    // [party][obs][q]
};

inline MeasurementSet realize_measurements(const TcProblem& problem,
                                           const MeasurementParams& params) {
  const int n = problem.parties();
  MeasurementSet set(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int q = params.dims[static_cast<size_t>(i)];
    const int n_obs = problem.obs_shape().size(i);
    set[static_cast<size_t>(i)].resize(static_cast<size_t>(n_obs));
    for (int o = 0; o < n_obs; ++o)
      set[static_cast<size_t>(i)][static_cast<size_t>(o)] = measurement_from_params(
          q, problem.dec_shape().size(i), params.angles[static_cast<size_t>(i)][static_cast<size_t>(o)],
          params.partitions[static_cast<size_t>(i)][static_cast<size_t>(o)]);
  }
  return set;
}

// ---------------------------------------------------------------------------
// Search space: which angle and partition entries are free.
// ---------------------------------------------------------------------------
struct SearchSpace {
  MeasurementParams base;  // pinned values for everything not listed below

  struct AngleSlot {
    int party = 0, obs = 0, index = 0;  // position within base.angles
    double lo = 0.0, hi = 0.0;
  };
  // Discrete slots cover both projector partitions (radix |D_i|^{q_i}) and,
  // for lossy searches, per-observation fallback decisions (radix |D_i|).
  struct DiscreteSlot {
    enum class Kind { partition, fallback };
    Kind kind = Kind::partition;
    int party = 0, obs = 0;
    std::int64_t radix = 0;
  };
  std::vector<AngleSlot> angle_slots;
  std::vector<DiscreteSlot> discrete_slots;

  [[nodiscard]] std::int64_t discrete_combos() const {
    std::int64_t total = 1;
    for (const auto& slot : discrete_slots) total *= slot.radix;
    return total;
  }
};

namespace detail {

inline std::vector<int> partition_from_assignment(std::int64_t assignment, int q,
                                                  int decisions) {
  std::vector<int> partition(static_cast<size_t>(q));
  for (int l = q; l-- > 0;) {
    partition[static_cast<size_t>(l)] = static_cast<int>(assignment % decisions);
    assignment /= decisions;
  }
  return partition;
}

inline std::int64_t pow_int(std::int64_t base, int exp) {
  std::int64_t out = 1;
  for (int k = 0; k < exp; ++k) out *= base;
  return out;
}

}  // namespace detail

inline bool is_two_observation_qubit_shape(const TcProblem& problem,
                                           const std::vector<int>& dims) {
  for (int i = 0; i < problem.parties(); ++i)
    if (dims[static_cast<size_t>(i)] != 2 || problem.obs_shape().size(i) != 2 ||
        problem.dec_shape().size(i) != 2)
      return false;
  return true;
}

inline bool is_222_qubit_shape(const TcProblem& problem, const std::vector<int>& dims) {
  return problem.parties() == 2 && is_two_observation_qubit_shape(problem, dims);
}

inline SearchSpace make_search_space(const TcProblem& problem,
                                     const std::vector<int>& dims) {
  const int n = problem.parties();
  if (static_cast<int>(dims.size()) != n)
    throw input_error("make_search_space: one local dimension per party required");
  SearchSpace space;
  space.base.dims = dims;
  space.base.angles.resize(static_cast<size_t>(n));
  space.base.partitions.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int q = dims[static_cast<size_t>(i)];
    const int n_dec = problem.dec_shape().size(i);
    if (q < n_dec)
      throw input_error("make_search_space: local dimension below decision count");
    const int n_obs = problem.obs_shape().size(i);
    space.base.angles[static_cast<size_t>(i)].assign(
        static_cast<size_t>(n_obs),
        std::vector<double>(static_cast<size_t>(basis_param_count(q)), 0.0));
    // Default partition: identity-like assignment l -> min(l, n_dec - 1).
    std::vector<int> id_partition(static_cast<size_t>(q));
    for (int l = 0; l < q; ++l) id_partition[static_cast<size_t>(l)] = std::min(l, n_dec - 1);
    space.base.partitions[static_cast<size_t>(i)].assign(static_cast<size_t>(n_obs),
                                                         id_partition);
    // Free angles for every observation beyond the first, packed
    // [phase (0..2pi), rotation (0..pi/2)] per (m, n) pair.
    for (int o = 1; o < n_obs; ++o) {
      int idx = 0;
      for (int m = 0; m < q - 1; ++m)
        for (int nn = m + 1; nn < q; ++nn) {
          space.angle_slots.push_back({i, o, idx++, 0.0, 2.0 * kPi});
          space.angle_slots.push_back({i, o, idx++, 0.0, kPi / 2.0});
        }
    }
    // Free partition per observation.
    const std::int64_t radix = detail::pow_int(n_dec, q);
    for (int o = 0; o < n_obs; ++o)
      if (radix > 1)
        space.discrete_slots.push_back(
            {SearchSpace::DiscreteSlot::Kind::partition, i, o, radix});
  }
  return space;
}

// Drop the relative-phase angles for two-observation qubit parties; the Bell
// operator spectrum is invariant under the diagonal conjugation that removes
// them.
inline SearchSpace reduce_phase_params_n22(const TcProblem& problem, SearchSpace space) {
  if (!is_two_observation_qubit_shape(problem, space.base.dims))
    throw input_error("reduce_phase_params_n22: needs two-observation qubit parties");
  std::vector<SearchSpace::AngleSlot> kept;
  for (const auto& slot : space.angle_slots)
    if (slot.index != 0) kept.push_back(slot);  // index 0 is the phase slot
  space.angle_slots = std::move(kept);
  return space;
}

// Pin identity partitions for two-party binary problems; the optimum is
// attained by nondegenerate measurements there.
inline SearchSpace fix_nondegenerate_222(const TcProblem& problem, SearchSpace space) {
  if (!is_222_qubit_shape(problem, space.base.dims))
    throw input_error("fix_nondegenerate_222: needs the (2,2,2) qubit shape");
  std::erase_if(space.discrete_slots, [](const SearchSpace::DiscreteSlot& slot) {
    return slot.kind == SearchSpace::DiscreteSlot::Kind::partition;
  });
  for (auto& party : space.base.partitions)
    for (auto& partition : party) partition = {0, 1};
  return space;
}

// ---------------------------------------------------------------------------
// Solver configuration and report.
// ---------------------------------------------------------------------------
enum class SolveMethod { grid, cmaes, both };

struct SolverOptions {
  SolveMethod method = SolveMethod::both;
  int grid_points = 20;
  int refine_top = 0;  // 0: refine every grid point; k > 0: only the best k
  double refine_tol = 1e-10;
  std::int64_t budget = 5'000'000;  // objective evaluations, grid phase
  std::uint64_t seed = 2024;
  int cmaes_restarts = 5;
  int cmaes_max_iterations = 400;
  bool reduce_n22_phases = true;
  bool pin_nondegenerate_222 = true;
};

struct QuantumReport {
  double value = 0.0;
  MeasurementParams params;
  QuantumStrategy strategy;  // realized measurements plus the top eigenvector
  double spectral_gap = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  std::optional<double> grid_value;
  std::optional<double> cmaes_value;
  std::int64_t evaluations = 0;
  bool budget_exhausted = false;
};

namespace detail {

// Applies a flat parameter vector (angles then discrete assignments) to the
// base measurement description.  Fallback slots are ignored here; lossy code
// reads them separately via fallback_from_discrete.
struct SpaceBinding {
  const TcProblem* problem = nullptr;
  const SearchSpace* space = nullptr;

  [[nodiscard]] MeasurementParams realize(const std::vector<double>& angles,
                                          const std::vector<std::int64_t>& discrete) const {
    MeasurementParams params = space->base;
    for (size_t k = 0; k < space->angle_slots.size(); ++k) {
      const auto& slot = space->angle_slots[k];
      params.angles[static_cast<size_t>(slot.party)][static_cast<size_t>(slot.obs)]
                   [static_cast<size_t>(slot.index)] = angles[k];
    }
    for (size_t k = 0; k < space->discrete_slots.size(); ++k) {
      const auto& slot = space->discrete_slots[k];
      if (slot.kind != SearchSpace::DiscreteSlot::Kind::partition) continue;
      params.partitions[static_cast<size_t>(slot.party)][static_cast<size_t>(slot.obs)] =
          partition_from_assignment(
              discrete[k], params.dims[static_cast<size_t>(slot.party)],
              problem->dec_shape().size(slot.party));
    }
    return params;
  }
};

// Grid-plus-refinement over the continuous angles for one fixed partition
// assignment.  Returns the best refined point.
template <typename Objective>
NelderMeadResult grid_refine(Objective&& objective, const SearchSpace& space,
                             const SolverOptions& options, std::int64_t& evaluations,
                             const std::vector<std::vector<double>>& extra_starts) {
  const int n_angles = static_cast<int>(space.angle_slots.size());
  NelderMeadResult best;
  best.value = -1e300;

  std::vector<double> point(static_cast<size_t>(n_angles), 0.0);
  std::vector<std::pair<double, std::vector<double>>> candidates;
  if (n_angles == 0) {
    best.x = {};
    best.value = objective(point);
    ++evaluations;
    best.converged = true;
    return best;
  }

  std::vector<int> idx(static_cast<size_t>(n_angles), 0);
  bool more = true;
  while (more) {
    for (int j = 0; j < n_angles; ++j) {
      const auto& slot = space.angle_slots[static_cast<size_t>(j)];
      point[static_cast<size_t>(j)] =
          slot.lo + (slot.hi - slot.lo) *
                        (options.grid_points == 1
                             ? 0.0
                             : static_cast<double>(idx[static_cast<size_t>(j)]) /
                                   (options.grid_points - 1));
    }
    candidates.emplace_back(objective(point), point);
    ++evaluations;
    more = false;
    for (int j = n_angles; j-- > 0;) {
      if (++idx[static_cast<size_t>(j)] < options.grid_points) {
        more = true;
        break;
      }
      idx[static_cast<size_t>(j)] = 0;
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  size_t refine_count = candidates.size();
  if (options.refine_top > 0)
    refine_count = std::min(refine_count, static_cast<size_t>(options.refine_top));

  std::vector<double> step(static_cast<size_t>(n_angles));
  for (int j = 0; j < n_angles; ++j) {
    const auto& slot = space.angle_slots[static_cast<size_t>(j)];
    step[static_cast<size_t>(j)] =
        (slot.hi - slot.lo) / (2.0 * std::max(options.grid_points - 1, 1));
  }

  std::vector<std::vector<double>> starts;
  for (size_t c = 0; c < refine_count; ++c) starts.push_back(candidates[c].second);
  for (const auto& s : extra_starts)
    if (static_cast<int>(s.size()) == n_angles) starts.push_back(s);

  for (const auto& start : starts) {
    if (evaluations >= options.budget) break;
    const auto local = nelder_mead_maximize(objective, start, step, options.refine_tol);
    evaluations += local.evaluations;
    if (local.value > best.value) {
      best = local;
    }
  }
  if (best.x.empty()) {
    best.value = candidates.front().first;
    best.x = candidates.front().second;
  }
  return best;
}

}  // namespace detail

struct GridOutcome {
  double value = -1e300;
  std::vector<double> angles;
  std::vector<std::int64_t> discrete;
  std::int64_t evaluations = 0;
  bool budget_exhausted = false;
};

// Exhaustive discrete enumeration with grid + local refinement per combo.
template <typename Objective>
GridOutcome grid_search(Objective&& objective, const SearchSpace& space,
                        const SolverOptions& options,
                        const std::vector<std::vector<double>>& extra_starts = {}) {
  const std::int64_t combos = space.discrete_combos();
  const int n_angles = static_cast<int>(space.angle_slots.size());
  std::int64_t grid_cost = 1;
  for (int j = 0; j < n_angles; ++j) {
    grid_cost *= options.grid_points;
    if (grid_cost > options.budget)
      throw budget_error("grid_search: grid of " + std::to_string(grid_cost) +
                         "+ evaluations exceeds budget of " +
                         std::to_string(options.budget));
  }
  if (combos > options.budget / std::max<std::int64_t>(grid_cost, 1))
    throw budget_error("grid_search: " + std::to_string(combos) +
                       " discrete assignments x " + std::to_string(grid_cost) +
                       " grid points exceeds budget of " + std::to_string(options.budget));

  GridOutcome outcome;
  std::vector<std::int64_t> combo(space.discrete_slots.size(), 0);
  bool more = true;
  while (more) {
    auto bound_objective = [&](const std::vector<double>& angles) {
      std::vector<double> wrapped(angles.size());
      for (size_t j = 0; j < angles.size(); ++j) {
        const auto& slot = space.angle_slots[j];
        VariableSpec v = VariableSpec::continuous(slot.lo, slot.hi);
        wrapped[j] = detail::canonical_coordinate(angles[j], v);
      }
      return objective(wrapped, combo);
    };
    const auto local = detail::grid_refine(bound_objective, space, options,
                                           outcome.evaluations, extra_starts);
    if (local.value > outcome.value) {
      outcome.value = local.value;
      outcome.angles = local.x;
      outcome.discrete = combo;
    }
    if (outcome.evaluations >= options.budget) {
      outcome.budget_exhausted = true;
      break;
    }
    more = false;
    for (size_t k = combo.size(); k-- > 0;) {
      if (++combo[k] < space.discrete_slots[k].radix) {
        more = true;
        break;
      }
      combo[k] = 0;
    }
  }
  // Canonicalize the reported angles into their ranges.
  for (size_t j = 0; j < outcome.angles.size(); ++j) {
    const auto& slot = space.angle_slots[j];
    outcome.angles[j] = detail::canonical_coordinate(
        outcome.angles[j], VariableSpec::continuous(slot.lo, slot.hi));
  }
  return outcome;
}

// CMA-ES over angles and discrete assignments jointly.
template <typename Objective>
GridOutcome cmaes_search(Objective&& objective, const SearchSpace& space,
                         const SolverOptions& options) {
  std::vector<VariableSpec> vars;
  for (const auto& slot : space.angle_slots)
    vars.push_back(VariableSpec::continuous(slot.lo, slot.hi));
  for (const auto& slot : space.discrete_slots)
    vars.push_back(VariableSpec::integer(static_cast<int>(slot.radix)));
  GridOutcome outcome;
  if (vars.empty()) {
    outcome.value = objective({}, {});
    outcome.evaluations = 1;
    return outcome;
  }

  CmaesOptions cma;
  cma.seed = options.seed;
  cma.restarts = options.cmaes_restarts;
  cma.max_iterations = options.cmaes_max_iterations;
  cma.max_evaluations = options.budget;

  const size_t n_angles = space.angle_slots.size();
  auto f = [&](const std::vector<double>& x) {
    std::vector<double> angles(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_angles));
    std::vector<std::int64_t> combo;
    for (size_t k = n_angles; k < x.size(); ++k)
      combo.push_back(static_cast<std::int64_t>(std::llround(x[k])));
    return objective(angles, combo);
  };
  const CmaesResult r = cmaes_maximize(f, vars, cma);
  outcome.value = r.value;
  outcome.evaluations = r.evaluations;
  outcome.budget_exhausted = r.budget_exhausted;
  outcome.angles.assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(n_angles));
  for (size_t k = n_angles; k < r.x.size(); ++k)
    outcome.discrete.push_back(static_cast<std::int64_t>(std::llround(r.x[k])));
  return outcome;
}

inline SearchSpace prepare_search_space(const TcProblem& problem,
                                        const std::vector<int>& dims,
                                        const SolverOptions& options) {
  SearchSpace space = make_search_space(problem, dims);
  if (options.reduce_n22_phases && is_two_observation_qubit_shape(problem, dims))
    space = reduce_phase_params_n22(problem, space);
  if (options.pin_nondegenerate_222 && is_222_qubit_shape(problem, dims))
    space = fix_nondegenerate_222(problem, space);
  return space;
}

inline std::vector<int> default_dims(const TcProblem& problem) {
  std::vector<int> dims;
  for (int i = 0; i < problem.parties(); ++i)
    dims.push_back(problem.dec_shape().size(i));
  return dims;
}

inline QuantumReport quantum_value(const TcProblem& problem,
                                   const std::vector<int>& dims,
                                   const SolverOptions& options = {}) {
  const SearchSpace space = prepare_search_space(problem, dims, options);
  const detail::SpaceBinding binding{&problem, &space};

  auto objective = [&](const std::vector<double>& angles,
                       const std::vector<std::int64_t>& discrete) {
    const MeasurementParams params = binding.realize(angles, discrete);
    return largest_eigenvalue(bell_operator(problem, realize_measurements(problem, params)))
        .value;
  };

  QuantumReport report;
  report.seed = options.seed;
  GridOutcome best;
  bool have_best = false;

  if (options.method == SolveMethod::grid || options.method == SolveMethod::both) {
    const GridOutcome g = grid_search(objective, space, options);
    report.grid_value = g.value;
    report.evaluations += g.evaluations;
    report.budget_exhausted |= g.budget_exhausted;
    best = g;
    have_best = true;
  }
  if (options.method == SolveMethod::cmaes || options.method == SolveMethod::both) {
    const GridOutcome c = cmaes_search(objective, space, options);
    report.cmaes_value = c.value;
    report.evaluations += c.evaluations;
    report.budget_exhausted |= c.budget_exhausted;
    if (!have_best || c.value > best.value) best = c;
  }

  switch (options.method) {
    case SolveMethod::grid: report.method = "grid"; break;
    case SolveMethod::cmaes: report.method = "cmaes"; break;
    case SolveMethod::both: report.method = "both"; break;
  }

  report.params = binding.realize(best.angles, best.discrete);
  const MeasurementSet set = realize_measurements(problem, report.params);
  const EigenPair top = largest_eigenvalue(bell_operator(problem, set));
  report.value = top.value;
  report.spectral_gap = top.spectral_gap;
  report.strategy.dims = dims;
  report.strategy.measurements = set;
  report.strategy.state = top.vector;
  return report;
}

inline QuantumReport quantum_value(const TcProblem& problem,
                                   const SolverOptions& options = {}) {
  return quantum_value(problem, default_dims(problem), options);
}

}  // namespace tacit
