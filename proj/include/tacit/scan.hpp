#pragma once

// Parameter scans over the hedge-or-not family: evaluate a derived quantity
// (quantum-classical gap, detection-efficiency threshold, noise robustness,
// or noise-degraded gap) on a (p, beta) grid and serialize the result as CSV.
//
// Scans are deterministic: cells are assigned fixed per-cell seeds, computed
// in any order by a worker pool, and assembled in row-major order (p outer,
// beta inner) before serialization.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "tacit/classical.hpp"
#include "tacit/errors.hpp"
#include "tacit/io.hpp"
#include "tacit/lossy.hpp"
#include "tacit/noise.hpp"
#include "tacit/problem.hpp"
#include "tacit/quantum_solver.hpp"

namespace tacit {

enum class ScanQuantity { gap, eta_star, robustness, noisy_gap };

inline ScanQuantity scan_quantity_from_name(const std::string& name) {
  if (name == "gap") return ScanQuantity::gap;
  if (name == "eta_star") return ScanQuantity::eta_star;
  if (name == "robustness") return ScanQuantity::robustness;
  if (name == "noisy_gap") return ScanQuantity::noisy_gap;
  throw input_error("scan: unknown quantity '" + name +
                    "' (expected gap, eta_star, robustness, or noisy_gap)");
}

inline std::string scan_quantity_name(ScanQuantity quantity) {
  switch (quantity) {
    case ScanQuantity::gap: return "gap";
    case ScanQuantity::eta_star: return "eta_star";
    case ScanQuantity::robustness: return "robustness";
    case ScanQuantity::noisy_gap: return "noisy_gap";
  }
  throw input_error("scan: invalid quantity");
}

struct ScanRange {
  double start = 0.0, stop = 1.0, step = 0.1;

  void validate(const char* name) const {
    if (!(std::isfinite(start) && std::isfinite(stop) && std::isfinite(step)))
      throw input_error(std::string("scan: ") + name + " range must be finite");
    if (!(step > 0.0))
      throw input_error(std::string("scan: ") + name + " step must be positive");
    if (!(start >= 0.0 && stop <= 1.0 && start <= stop))
      throw input_error(std::string("scan: ") + name +
                        " range must satisfy 0 <= start <= stop <= 1");
  }

  [[nodiscard]] std::vector<double> values() const {
    const auto count =
        static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<size_t>(count));
    for (std::int64_t k = 0; k < count; ++k)
      out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
};

struct ScanSpec {
  ScanQuantity quantity = ScanQuantity::gap;
  ScanRange p_range;
  ScanRange beta_range;
  double nu = 0.1;            // mixing weight, noisy_gap only
  double gap_epsilon = 1e-7;  // gaps at or below this serialize as 0.0
  int workers = 1;
  SolverOptions solver;        // per-cell quantum search configuration
  ThresholdOptions threshold;  // per-cell bisection configuration (eta_star)
  std::int64_t classical_budget = 100'000'000;

  ScanSpec() {
    // Scans favor the economical grid search; CMA-ES adds nothing on the
    // reduced two-angle spaces but multiplies the per-cell cost.
    solver.method = SolveMethod::grid;
    solver.refine_top = 10;
  }

  void validate() const {
    p_range.validate("p");
    beta_range.validate("beta");
    if (!(nu >= 0.0 && nu <= 1.0)) throw input_error("scan: nu must lie in [0, 1]");
    if (!(gap_epsilon >= 0.0)) throw input_error("scan: gap epsilon must be nonnegative");
    if (workers < 1) throw input_error("scan: worker count must be at least 1");
  }
};

struct ScanCell {
  double p = 0.0;
  double beta = 0.0;
  double value = 0.0;
};

struct ScanResult {
  ScanQuantity quantity = ScanQuantity::gap;
  std::vector<ScanCell> cells;  // row-major: p outer, beta inner
  std::int64_t evaluations = 0;
};

namespace detail {

inline double scan_cell_value(const ScanSpec& spec, double p, double beta,
                              std::uint64_t cell_seed, std::int64_t& evaluations) {
  const TcProblem problem = make_hedge_or_not(p, beta);
  const std::vector<int> dims = default_dims(problem);
  switch (spec.quantity) {
    case ScanQuantity::gap: {
      SolverOptions options = spec.solver;
      options.seed = cell_seed;
      const double classical = classical_value(problem, spec.classical_budget).value;
      const QuantumReport quantum = quantum_value(problem, dims, options);
      evaluations += quantum.evaluations;
      const double gap = quantum.value - classical;
      return gap > spec.gap_epsilon ? gap : 0.0;
    }
    case ScanQuantity::eta_star: {
      ThresholdOptions options = spec.threshold;
      options.solver.seed = cell_seed;
      options.classical_budget = spec.classical_budget;
      const ThresholdReport report = threshold_efficiency(problem, dims, options);
      evaluations += report.evaluations;
      return report.eta_star;
    }
    case ScanQuantity::robustness: {
      SolverOptions options = spec.solver;
      options.seed = cell_seed;
      const NoiseReport report =
          noise_robustness(problem, dims, options, spec.classical_budget);
      evaluations += report.evaluations;
      return report.nu_star;
    }
    case ScanQuantity::noisy_gap: {
      SolverOptions options = spec.solver;
      options.seed = cell_seed;
      const NoiseReport report =
          noise_robustness(problem, dims, options, spec.classical_budget);
      evaluations += report.evaluations;
      const double noisy_value = (1.0 - spec.nu) * report.quantum_value +
                                 spec.nu * report.factorizable_utility;
      const double gap = noisy_value - report.classical_value;
      return gap > spec.gap_epsilon ? gap : 0.0;
    }
  }
  throw input_error("scan: invalid quantity");
}

}  // namespace detail

inline ScanResult run_scan(const ScanSpec& spec) {
  spec.validate();
  const std::vector<double> ps = spec.p_range.values();
  const std::vector<double> betas = spec.beta_range.values();

  ScanResult result;
  result.quantity = spec.quantity;
  result.cells.reserve(ps.size() * betas.size());
  for (double p : ps)
    for (double beta : betas) result.cells.push_back({p, beta, 0.0});

  const size_t n_cells = result.cells.size();
  std::vector<std::int64_t> cell_evaluations(n_cells, 0);
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    while (true) {
      const size_t k = next.fetch_add(1);
      if (k >= n_cells) break;
      try {
        ScanCell& cell = result.cells[k];
        cell.value = detail::scan_cell_value(
            spec, cell.p, cell.beta,
            spec.solver.seed + static_cast<std::uint64_t>(k), cell_evaluations[k]);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const int extra =
      std::min<int>(spec.workers - 1, static_cast<int>(n_cells) - 1);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(std::max(extra, 0)));
  for (int t = 0; t < extra; ++t) pool.emplace_back(worker);
  worker();
  for (auto& thread : pool) thread.join();
  if (first_error) std::rethrow_exception(first_error);

  for (std::int64_t e : cell_evaluations) result.evaluations += e;
  return result;
}

// ---------------------------------------------------------------------------
// CSV serialization: fixed header, one row per cell, nine significant digits,
// '\n' line endings.  parse_scan_csv() inverts scan_to_csv() exactly.
// ---------------------------------------------------------------------------

inline std::string scan_to_csv(const ScanResult& result) {
  std::string out = "p,beta,value\n";
  for (const auto& cell : result.cells) {
    out += format9(cell.p);
    out += ',';
    out += format9(cell.beta);
    out += ',';
    out += format9(cell.value);
    out += '\n';
  }
  return out;
}

inline ScanResult parse_scan_csv(const std::string& text) {
  ScanResult result;
  size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= text.size()) return false;
    const size_t end = text.find('\n', pos);
    if (end == std::string::npos)
      throw input_error("scan CSV: missing trailing newline");
    line = text.substr(pos, end - pos);
    pos = end + 1;
    return true;
  };

  std::string line;
  if (!next_line(line) || line != "p,beta,value")
    throw input_error("scan CSV: expected header 'p,beta,value'");
  while (next_line(line)) {
    ScanCell cell;
    const char* cursor = line.c_str();
    double* fields[3] = {&cell.p, &cell.beta, &cell.value};
    for (int f = 0; f < 3; ++f) {
      char* after = nullptr;
      *fields[f] = std::strtod(cursor, &after);
      if (after == cursor) throw input_error("scan CSV: malformed row '" + line + "'");
      cursor = after;
      if (f < 2) {
        if (*cursor != ',')
          throw input_error("scan CSV: malformed row '" + line + "'");
        ++cursor;
      }
    }
    if (*cursor != '\0') throw input_error("scan CSV: malformed row '" + line + "'");
    result.cells.push_back(cell);
  }
  return result;
}

}  // namespace tacit
