#pragma once

// JSON serialization of problems and solver reports, with deterministic float
// formatting: every double is rounded to nine significant digits before it
// enters a document, so identical inputs produce byte-identical output.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "json.hpp"
#include "tacit/classical.hpp"
#include "tacit/errors.hpp"
#include "tacit/link_budget.hpp"
#include "tacit/lossy.hpp"
#include "tacit/noise.hpp"
#include "tacit/problem.hpp"
#include "tacit/quantum_solver.hpp"
#include "tacit/quantum_strategy.hpp"

namespace tacit {

using ordered_json = nlohmann::ordered_json;

// Round to nine significant digits (the serialization precision contract).
inline double round9(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline std::string format9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline ordered_json json_number_array(const std::vector<double>& xs) {
  ordered_json arr = ordered_json::array();
  for (double x : xs) arr.push_back(round9(x));
  return arr;
}

// ---------------------------------------------------------------------------
// Problem documents.
// ---------------------------------------------------------------------------

inline ordered_json problem_to_json(const TcProblem& problem) {
  ordered_json doc;
  doc["parties"] = problem.parties();
  doc["observations"] = problem.observation_labels();
  doc["decisions"] = problem.decision_labels();
  std::vector<double> probs;
  for (std::int64_t o = 0; o < problem.obs_shape().total(); ++o)
    probs.push_back(problem.input_probability(o));
  doc["input_distribution"] = {{"type", "explicit"}, {"probs", json_number_array(probs)}};
  doc["utility"] = json_number_array(problem.utility_array());
  return doc;
}

namespace detail {

inline TcProblem problem_from_json_impl(const ordered_json& doc) {
  for (const char* field : {"parties", "observations", "decisions",
                            "input_distribution", "utility"})
    if (!doc.contains(field))
      throw input_error(std::string("problem document: missing field '") + field + "'");

  const int parties = doc.at("parties").get<int>();
  auto labels = [&](const char* field) {
    std::vector<std::vector<std::string>> out;
    for (const auto& party : doc.at(field))
      out.push_back(party.get<std::vector<std::string>>());
    if (static_cast<int>(out.size()) != parties)
      throw input_error(std::string("problem document: '") + field +
                        "' must list one label array per party");
    return out;
  };
  const auto observations = labels("observations");
  const auto decisions = labels("decisions");

  std::int64_t n_obs = 1;
  for (const auto& o : observations) n_obs *= static_cast<std::int64_t>(o.size());

  const auto& dist = doc.at("input_distribution");
  const std::string type = dist.at("type").get<std::string>();
  std::vector<double> probs;
  if (type == "explicit") {
    probs = dist.at("probs").get<std::vector<double>>();
  } else if (type == "bernoulli_product") {
    const double p = dist.at("p").get<double>();
    if (!(p >= 0.0 && p <= 1.0))
      throw input_error("problem document: bernoulli_product p must lie in [0, 1]");
    for (const auto& o : observations)
      if (o.size() != 2)
        throw input_error(
            "problem document: bernoulli_product requires binary observations");
    for (std::int64_t joint = 0; joint < n_obs; ++joint) {
      double prob = 1.0;
      for (int i = parties - 1, rest = static_cast<int>(joint); i >= 0; --i) {
        prob *= (rest % 2 == 1) ? p : 1.0 - p;
        rest /= 2;
      }
      probs.push_back(prob);
    }
  } else {
    throw input_error("problem document: unknown input_distribution type '" + type + "'");
  }

  const auto utility = doc.at("utility").get<std::vector<double>>();
  return TcProblem(observations, decisions, probs, utility);
}

}  // namespace detail

inline TcProblem problem_from_json(const ordered_json& doc) {
  try {
    return detail::problem_from_json_impl(doc);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("problem document: ") + e.what());
  }
}

inline TcProblem problem_from_json_text(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("problem document: ") + e.what());
  }
  return problem_from_json(doc);
}

// ---------------------------------------------------------------------------
// Report documents.
// ---------------------------------------------------------------------------

inline ordered_json strategy_to_json(const DeterministicStrategy& strategy) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : strategy.decisions) arr.push_back(row);
  return arr;
}

inline ordered_json classical_report_to_json(const ClassicalReport& report) {
  ordered_json doc;
  doc["command"] = "classical";
  doc["value"] = round9(report.value);
  doc["strategy"] = strategy_to_json(report.strategy);
  doc["strategies_total"] = report.strategies_total;
  doc["strategies_evaluated"] = report.strategies_evaluated;
  return doc;
}

inline ordered_json params_to_json(const MeasurementParams& params) {
  ordered_json doc;
  doc["dims"] = params.dims;
  ordered_json angles = ordered_json::array();
  for (const auto& party : params.angles) {
    ordered_json per_obs = ordered_json::array();
    for (const auto& obs : party) per_obs.push_back(json_number_array(obs));
    angles.push_back(per_obs);
  }
  doc["angles"] = angles;
  ordered_json partitions = ordered_json::array();
  for (const auto& party : params.partitions) {
    ordered_json per_obs = ordered_json::array();
    for (const auto& obs : party) per_obs.push_back(obs);
    partitions.push_back(per_obs);
  }
  doc["partitions"] = partitions;
  return doc;
}

inline ordered_json state_to_json(const cvec& state) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index k = 0; k < state.size(); ++k)
    arr.push_back({round9(state(k).real()), round9(state(k).imag())});
  return arr;
}

inline ordered_json quantum_report_to_json(const TcProblem& problem,
                                           const QuantumReport& report) {
  ordered_json doc;
  doc["command"] = "quantum";
  doc["value"] = round9(report.value);
  doc["spectral_gap"] = round9(report.spectral_gap);
  doc["parameters"] = params_to_json(report.params);
  doc["state"] = state_to_json(report.strategy.state);
  if (problem.parties() == 2) {
    const SchmidtDecomposition schmidt = schmidt_decompose(
        report.strategy.state, report.strategy.dims[0], report.strategy.dims[1]);
    doc["schmidt_coefficients"] = json_number_array(schmidt.coefficients);
  }
  ordered_json opt;
  opt["method"] = report.method;
  opt["seed"] = report.seed;
  if (report.grid_value) opt["grid_value"] = round9(*report.grid_value);
  if (report.cmaes_value) opt["cmaes_value"] = round9(*report.cmaes_value);
  opt["evaluations"] = report.evaluations;
  opt["budget_exhausted"] = report.budget_exhausted;
  doc["optimizer"] = opt;
  return doc;
}

inline ordered_json lossy_report_to_json(const TcProblem& problem,
                                         const LossyReport& report) {
  ordered_json doc;
  doc["command"] = "lossy";
  doc["value"] = round9(report.value);
  doc["efficiencies"] = json_number_array(report.loss.eta);
  doc["spectral_gap"] = round9(report.spectral_gap);
  doc["parameters"] = params_to_json(report.params);
  doc["fallback"] = strategy_to_json(report.fallback);
  doc["state"] = state_to_json(report.strategy.state);
  if (problem.parties() == 2) {
    const SchmidtDecomposition schmidt = schmidt_decompose(
        report.strategy.state, report.strategy.dims[0], report.strategy.dims[1]);
    doc["schmidt_coefficients"] = json_number_array(schmidt.coefficients);
  }
  ordered_json opt;
  opt["method"] = report.method;
  opt["seed"] = report.seed;
  if (report.grid_value) opt["grid_value"] = round9(*report.grid_value);
  if (report.cmaes_value) opt["cmaes_value"] = round9(*report.cmaes_value);
  opt["evaluations"] = report.evaluations;
  opt["budget_exhausted"] = report.budget_exhausted;
  doc["optimizer"] = opt;
  return doc;
}

inline ordered_json threshold_report_to_json(const ThresholdReport& report) {
  ordered_json doc;
  doc["command"] = "threshold";
  doc["eta_star"] = round9(report.eta_star);
  doc["gapless"] = report.gapless;
  doc["bracket_valid"] = report.bracket_valid;
  doc["bracket_lo"] = round9(report.bracket_lo);
  doc["classical_value"] = round9(report.classical_value);
  doc["value_at_unit_efficiency"] = round9(report.value_at_unit_efficiency);
  doc["gap_at_threshold"] = round9(report.gap_at_threshold);
  doc["bisection_iterations"] = report.bisection_iterations;
  doc["evaluations"] = report.evaluations;
  return doc;
}

inline ordered_json noise_report_to_json(const NoiseReport& report) {
  ordered_json doc;
  doc["command"] = "robustness";
  doc["nu_star"] = round9(report.nu_star);
  doc["quantum_value"] = round9(report.quantum_value);
  doc["classical_value"] = round9(report.classical_value);
  doc["factorizable_utility"] = round9(report.factorizable_utility);
  doc["gapless"] = report.gapless;
  doc["evaluations"] = report.evaluations;
  return doc;
}

struct LinkBudgetRequest {
  Medium photon_medium = media::fiber();
  Medium herald_medium = media::free_space();
  LinkConfig config;
  double target_rate_hz = 0.0;   // 0: skip the multiplicity requirement
  double eta_target = 0.0;       // 0: skip the max-arm-length field
};

inline ordered_json link_budget_report_to_json(const LinkBudgetRequest& request) {
  request.config.validate();
  const double d = request.config.distance_km;
  ordered_json doc;
  doc["command"] = "linkbudget";
  doc["medium"] = request.photon_medium.name;
  doc["herald_medium"] = request.herald_medium.name;
  doc["distance_km"] = round9(d);
  doc["arm_length_km"] = round9(0.5 * d);
  const double arm_eta =
      efficiency(request.photon_medium, 0.5 * d, request.config.extra_efficiency);
  doc["arm_efficiency"] = round9(arm_eta);
  doc["arm_loss"] = round9(1.0 - arm_eta);
  doc["end_to_end_efficiency"] = round9(
      efficiency(request.photon_medium, 0.5 * d, request.config.extra_efficiency) *
      efficiency(request.photon_medium, 0.5 * d));
  doc["attempt_time_s"] =
      round9(attempt_time(d, request.photon_medium, request.herald_medium));
  doc["success_probability"] = round9(
      success_probability(request.photon_medium, d, request.config.projection_probability,
                          request.config.extra_efficiency));
  LinkConfig single = request.config;
  single.multiplicity = 1;
  doc["per_copy_rate_hz"] =
      round9(effective_rate(single, request.photon_medium, request.herald_medium));
  doc["multiplicity"] = request.config.multiplicity;
  doc["effective_rate_hz"] =
      round9(effective_rate(request.config, request.photon_medium, request.herald_medium));
  if (request.target_rate_hz > 0.0) {
    doc["target_rate_hz"] = round9(request.target_rate_hz);
    doc["required_multiplicity"] =
        required_multiplicity(request.target_rate_hz, request.config,
                              request.photon_medium, request.herald_medium);
  }
  if (request.eta_target > 0.0) {
    const ArmLengthResult arm = max_arm_length(request.photon_medium, request.eta_target);
    doc["eta_target"] = round9(request.eta_target);
    if (arm.unbounded)
      doc["max_arm_length_km"] = nullptr;
    else
      doc["max_arm_length_km"] = round9(arm.length_km);
    doc["max_arm_length_unbounded"] = arm.unbounded;
  }
  return doc;
}

inline std::string dump_report(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace tacit
