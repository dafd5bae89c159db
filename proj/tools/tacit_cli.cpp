// tacit — command-line front end for the tacit-coordination solvers.
//
// Subcommands: classical, quantum, lossy, threshold, scan, linkbudget.
// Machine-readable results (JSON or CSV) go to standard output or --output;
// diagnostics go to standard error.  Identical inputs and seed produce
// byte-identical output.  Exit codes: 0 success, 2 input error, 3 budget
// exceeded, 4 internal numerical failure.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tacit/io.hpp"
#include "tacit/scan.hpp"

namespace {

using namespace tacit;

// --seed always wins; TACIT_SEED provides the session default when set.
std::uint64_t default_seed() {
  if (const char* env = std::getenv("TACIT_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return value;
    std::cerr << "warning: ignoring unparsable TACIT_SEED value\n";
  }
  return 2024;
}

// ---------------------------------------------------------------------------
// Shared option groups.
// ---------------------------------------------------------------------------

struct ProblemArgs {
  std::string file;
  std::string generator;
  double p = 0.5;
  double beta = 0.0;
  bool anti = false;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& args) {
  auto* file =
      cmd->add_option("--problem-file", args.file, "Path to a problem JSON document");
  auto* gen = cmd->add_option("--problem", args.generator,
                              "Built-in generator: hedge-or-not or chsh");
  cmd->add_option("--p", args.p,
                  "Generator parameter: per-party probability of the second "
                  "observation (default 0.5)");
  cmd->add_option("--beta", args.beta,
                  "hedge-or-not: utility of hedged outcomes (default 0)");
  cmd->add_flag("--anti", args.anti,
                "chsh: reward anticorrelated decisions on the (I, I) round");
  file->excludes(gen);
  gen->excludes(file);
}

TcProblem load_problem(const ProblemArgs& args) {
  if (!args.file.empty()) {
    std::ifstream in(args.file, std::ios::binary);
    if (!in) throw input_error("cannot open problem file '" + args.file + "'");
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    return problem_from_json_text(text);
  }
  if (args.generator == "hedge-or-not") return make_hedge_or_not(args.p, args.beta);
  if (args.generator == "chsh") return make_chsh(args.p, args.anti);
  if (args.generator.empty())
    throw input_error("no problem given: pass --problem-file or --problem");
  throw input_error("unknown generator '" + args.generator +
                    "' (expected hedge-or-not or chsh)");
}

struct SolverArgs {
  std::vector<int> dims;
  std::string method = "both";
  int grid_size = 0;
  int refine_top = -1;
  std::int64_t budget = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_solver_options(CLI::App* cmd, SolverArgs& args, const char* default_method) {
  args.method = default_method;
  cmd->add_option("--dims", args.dims,
                  "Local Hilbert-space dimensions, one per party (default: "
                  "decision counts)")
      ->delimiter(',');
  cmd->add_option("--method", args.method, "Search method: grid, cmaes, or both")
      ->check(CLI::IsMember({"grid", "cmaes", "both"}));
  cmd->add_option("--grid-size", args.grid_size, "Grid points per angle");
  cmd->add_option("--refine-top", args.refine_top,
                  "Refine only the best K grid cells (0 = refine every cell)");
  cmd->add_option("--budget", args.budget, "Objective-evaluation budget");
  cmd->add_option("--seed", args.seed, "Optimizer seed (overrides TACIT_SEED)")
      ->trigger_on_parse()
      ->each([&args](const std::string&) { args.seed_given = true; });
}

SolveMethod method_from_name(const std::string& name) {
  if (name == "grid") return SolveMethod::grid;
  if (name == "cmaes") return SolveMethod::cmaes;
  if (name == "both") return SolveMethod::both;
  throw input_error("unknown method '" + name + "'");
}

void apply_solver_args(const SolverArgs& args, SolverOptions& options) {
  options.method = method_from_name(args.method);
  if (args.grid_size > 0) options.grid_points = args.grid_size;
  if (args.refine_top >= 0) options.refine_top = args.refine_top;
  if (args.budget > 0) options.budget = args.budget;
  options.seed = args.seed_given ? args.seed : default_seed();
}

std::vector<int> resolve_dims(const TcProblem& problem, const std::vector<int>& dims) {
  return dims.empty() ? default_dims(problem) : dims;
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw input_error("cannot open output file '" + output_path + "'");
  out << text;
  if (!out) throw input_error("failed writing output file '" + output_path + "'");
}

// ---------------------------------------------------------------------------
// Subcommand argument bundles.
// ---------------------------------------------------------------------------

struct ClassicalCmd {
  ProblemArgs problem;
  std::int64_t budget = 100'000'000;
  std::string output;
};

struct QuantumCmd {
  ProblemArgs problem;
  SolverArgs solver;
  std::string output;
};

struct LossyCmd {
  ProblemArgs problem;
  SolverArgs solver;
  double eta = 1.0;
  std::vector<double> eta_per_party;
  std::string output;
};

struct ThresholdCmd {
  ProblemArgs problem;
  SolverArgs solver;
  double tol = 1e-3;
  double epsilon = 1e-7;
  std::string output;
};

struct ScanCmd {
  std::string quantity = "gap";
  ScanRange p_range;
  ScanRange beta_range;
  double nu = 0.1;
  int workers = 1;
  SolverArgs solver;
  std::string output;
};

struct LinkBudgetCmd {
  std::string medium = "fiber";
  std::string herald_medium = "free_space";
  double distance_km = 0.0;
  int multiplicity = 1;
  double target_rate_hz = 0.0;
  double projection = 0.5;
  double extra_efficiency = 1.0;
  double eta_target = 0.0;
  std::string output;
};

int run_classical(const ClassicalCmd& cmd) {
  const TcProblem problem = load_problem(cmd.problem);
  const ClassicalReport report = classical_value(problem, cmd.budget);
  emit(dump_report(classical_report_to_json(report)), cmd.output);
  return 0;
}

int run_quantum(const QuantumCmd& cmd) {
  const TcProblem problem = load_problem(cmd.problem);
  SolverOptions options;
  apply_solver_args(cmd.solver, options);
  const QuantumReport report =
      quantum_value(problem, resolve_dims(problem, cmd.solver.dims), options);
  emit(dump_report(quantum_report_to_json(problem, report)), cmd.output);
  return 0;
}

int run_lossy(const LossyCmd& cmd) {
  const TcProblem problem = load_problem(cmd.problem);
  SolverOptions options;
  apply_solver_args(cmd.solver, options);
  const LossModel loss = cmd.eta_per_party.empty()
                             ? LossModel::uniform(problem.parties(), cmd.eta)
                             : LossModel{cmd.eta_per_party};
  const LossyReport report =
      lossy_value(problem, resolve_dims(problem, cmd.solver.dims), loss, options);
  emit(dump_report(lossy_report_to_json(problem, report)), cmd.output);
  return 0;
}

int run_threshold(const ThresholdCmd& cmd) {
  const TcProblem problem = load_problem(cmd.problem);
  ThresholdOptions options;
  options.tol = cmd.tol;
  options.epsilon = cmd.epsilon;
  apply_solver_args(cmd.solver, options.solver);
  const ThresholdReport report = threshold_efficiency(
      problem, resolve_dims(problem, cmd.solver.dims), options);
  emit(dump_report(threshold_report_to_json(report)), cmd.output);
  return 0;
}

int run_scan(const ScanCmd& cmd) {
  ScanSpec spec;
  spec.quantity = scan_quantity_from_name(cmd.quantity);
  spec.p_range = cmd.p_range;
  spec.beta_range = cmd.beta_range;
  spec.nu = cmd.nu;
  spec.workers = cmd.workers;
  apply_solver_args(cmd.solver, spec.solver);
  spec.threshold.solver = spec.solver;
  const ScanResult result = tacit::run_scan(spec);
  std::cerr << "scan: " << result.cells.size() << " cells, " << result.evaluations
            << " objective evaluations\n";
  emit(scan_to_csv(result), cmd.output);
  return 0;
}

int run_linkbudget(const LinkBudgetCmd& cmd) {
  LinkBudgetRequest request;
  request.photon_medium = medium_by_name(cmd.medium);
  request.herald_medium = medium_by_name(cmd.herald_medium);
  request.config.distance_km = cmd.distance_km;
  request.config.multiplicity = cmd.multiplicity;
  request.config.projection_probability = cmd.projection;
  request.config.extra_efficiency = cmd.extra_efficiency;
  request.target_rate_hz = cmd.target_rate_hz;
  request.eta_target = cmd.eta_target;
  emit(dump_report(link_budget_report_to_json(request)), cmd.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tacit: classical, quantum, lossy, and noisy values of "
               "tacit-coordination problems"};
  app.require_subcommand(1);

  ClassicalCmd classical;
  auto* classical_cmd = app.add_subcommand(
      "classical", "Exact optimal value over deterministic strategies");
  add_problem_options(classical_cmd, classical.problem);
  classical_cmd->add_option("--budget", classical.budget,
                            "Maximum number of strategies to enumerate");
  classical_cmd->add_option("--output", classical.output, "Write the report here");

  QuantumCmd quantum;
  auto* quantum_cmd = app.add_subcommand(
      "quantum", "Optimized entangled-strategy value (lossless)");
  add_problem_options(quantum_cmd, quantum.problem);
  add_solver_options(quantum_cmd, quantum.solver, "both");
  quantum_cmd->add_option("--output", quantum.output, "Write the report here");

  LossyCmd lossy;
  auto* lossy_cmd = app.add_subcommand(
      "lossy", "Optimized value with heralded-failure detection efficiency");
  add_problem_options(lossy_cmd, lossy.problem);
  add_solver_options(lossy_cmd, lossy.solver, "grid");
  lossy_cmd->add_option("--eta", lossy.eta, "Detection efficiency, all parties")
      ->check(CLI::Range(0.0, 1.0));
  lossy_cmd->add_option("--eta-per-party", lossy.eta_per_party,
                        "Per-party detection efficiencies")
      ->delimiter(',');
  lossy_cmd->add_option("--output", lossy.output, "Write the report here");

  ThresholdCmd threshold;
  auto* threshold_cmd = app.add_subcommand(
      "threshold", "Critical detection efficiency via bisection");
  add_problem_options(threshold_cmd, threshold.problem);
  add_solver_options(threshold_cmd, threshold.solver, "grid");
  threshold_cmd->add_option("--tol", threshold.tol, "Bisection resolution on eta");
  threshold_cmd->add_option("--epsilon", threshold.epsilon,
                            "Advantage below this counts as gapless");
  threshold_cmd->add_option("--output", threshold.output, "Write the report here");

  ScanCmd scan;
  auto* scan_cmd = app.add_subcommand(
      "scan", "Evaluate a quantity over a (p, beta) grid of hedge-or-not "
              "problems; emits CSV");
  scan_cmd->add_option("--quantity", scan.quantity,
                       "gap, eta_star, robustness, or noisy_gap")
      ->check(CLI::IsMember({"gap", "eta_star", "robustness", "noisy_gap"}));
  scan_cmd->add_option("--p-start", scan.p_range.start, "First p value");
  scan_cmd->add_option("--p-stop", scan.p_range.stop, "Last p value (inclusive)");
  scan_cmd->add_option("--p-step", scan.p_range.step, "p increment");
  scan_cmd->add_option("--beta-start", scan.beta_range.start, "First beta value");
  scan_cmd->add_option("--beta-stop", scan.beta_range.stop,
                       "Last beta value (inclusive)");
  scan_cmd->add_option("--beta-step", scan.beta_range.step, "beta increment");
  scan_cmd->add_option("--nu", scan.nu, "Noise weight for noisy_gap");
  scan_cmd->add_option("--workers", scan.workers, "Worker threads for cells");
  add_solver_options(scan_cmd, scan.solver, "grid");
  scan_cmd->add_option("--output", scan.output, "Write the CSV here");

  LinkBudgetCmd link;
  auto* link_cmd = app.add_subcommand(
      "linkbudget", "Photonic link efficiencies, timing, and rates");
  link_cmd->add_option("--medium", link.medium,
                       "fiber, vacuum_guide, waveguide, or free_space");
  link_cmd->add_option("--herald-medium", link.herald_medium,
                       "Medium carrying the heralding signal");
  link_cmd->add_option("--distance", link.distance_km, "Party separation in km")
      ->required();
  link_cmd->add_option("--multiplicity", link.multiplicity,
                       "Parallel entangled copies per attempt");
  link_cmd->add_option("--target-rate", link.target_rate_hz,
                       "Report the multiplicity needed for this rate (Hz)");
  link_cmd->add_option("--projection", link.projection,
                       "Success probability of the heralding projection");
  link_cmd->add_option("--extra-efficiency", link.extra_efficiency,
                       "Extra multiplicative efficiency (detectors, coupling)");
  link_cmd->add_option("--eta-target", link.eta_target,
                       "Report the longest arm keeping efficiency above this");
  link_cmd->add_option("--output", link.output, "Write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classical_cmd->parsed()) return run_classical(classical);
    if (quantum_cmd->parsed()) return run_quantum(quantum);
    if (lossy_cmd->parsed()) return run_lossy(lossy);
    if (threshold_cmd->parsed()) return run_threshold(threshold);
    if (scan_cmd->parsed()) return run_scan(scan);
    if (link_cmd->parsed()) return run_linkbudget(link);
    std::cerr << "error: no subcommand selected\n";
    return 2;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const budget_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
}
