#pragma once

// Photonic link budget for entanglement distribution: a source at the midpoint
// between two parties sends one photon of each pair down an arm of length d/2.
// Attenuation follows the standard decibel law, heralding travels over a
// (possibly different) classical medium, and multiple source copies multiply
// the effective rate.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "tacit/errors.hpp"

namespace tacit {

struct Medium {
  std::string name;
  double attenuation_db_per_km = 0.0;
  double speed_m_per_s = 299'792'458.0;

  void validate() const {
    if (!(attenuation_db_per_km >= 0.0) || !std::isfinite(attenuation_db_per_km))
      throw input_error("Medium: attenuation must be a finite nonnegative value");
    if (!(speed_m_per_s > 0.0) || speed_m_per_s > 3.0e8)
      throw input_error("Medium: speed must lie in (0, 3e8] m/s");
  }
};

namespace media {

// Telecom fiber at 1550 nm.
inline Medium fiber() { return {"fiber", 0.17, 2.0e8}; }
// Evacuated beam guide; attenuation from numerical simulations.
inline Medium vacuum_guide() { return {"vacuum_guide", 5.0e-5, 3.0e8}; }
// On-chip optical waveguide: 0.2 dB/cm expressed per kilometre.
inline Medium waveguide() { return {"waveguide", 2.0e4, 2.0e8}; }
// Idealized lossless line-of-sight path.
inline Medium free_space() { return {"free_space", 0.0, 3.0e8}; }

}  // namespace media

inline Medium medium_by_name(const std::string& name) {
  if (name == "fiber") return media::fiber();
  if (name == "vacuum_guide") return media::vacuum_guide();
  if (name == "waveguide") return media::waveguide();
  if (name == "free_space") return media::free_space();
  throw input_error("medium_by_name: unknown medium '" + name +
                    "' (expected fiber, vacuum_guide, waveguide, or free_space)");
}

struct LinkConfig {
  double distance_km = 0.0;              // separation between the two parties
  std::int64_t multiplicity = 1;         // number of parallel source copies
  double projection_probability = 0.5;   // heralded projection success
  double extra_efficiency = 1.0;         // detector/coupling losses, folded in

  void validate() const {
    if (!(distance_km > 0.0) || !std::isfinite(distance_km))
      throw input_error("LinkConfig: distance must be positive");
    if (multiplicity < 1) throw input_error("LinkConfig: multiplicity must be >= 1");
    if (!(projection_probability > 0.0 && projection_probability <= 1.0))
      throw input_error("LinkConfig: projection probability must lie in (0, 1]");
    if (!(extra_efficiency > 0.0 && extra_efficiency <= 1.0))
      throw input_error("LinkConfig: extra efficiency must lie in (0, 1]");
  }
};

// Transmission efficiency of one arm: eta = 10^(-0.1 * alpha * l) times any
// additional multiplicative loss factor.
inline double efficiency(const Medium& medium, double arm_length_km,
                         double extra_efficiency = 1.0) {
  medium.validate();
  if (!(arm_length_km >= 0.0) || !std::isfinite(arm_length_km))
    throw input_error("efficiency: arm length must be a finite nonnegative value");
  if (!(extra_efficiency > 0.0 && extra_efficiency <= 1.0))
    throw input_error("efficiency: extra efficiency must lie in (0, 1]");
  return extra_efficiency *
         std::pow(10.0, -0.1 * medium.attenuation_db_per_km * arm_length_km);
}

struct ArmLengthResult {
  double length_km = 0.0;
  bool unbounded = false;  // lossless medium: any length meets the target
};

// Longest arm that still meets the efficiency target.
inline ArmLengthResult max_arm_length(const Medium& medium, double eta_target) {
  medium.validate();
  if (!(eta_target > 0.0 && eta_target <= 1.0))
    throw input_error("max_arm_length: target efficiency must lie in (0, 1]");
  if (medium.attenuation_db_per_km == 0.0)
    return {std::numeric_limits<double>::infinity(), true};
  return {-10.0 * std::log10(eta_target) / medium.attenuation_db_per_km, false};
}

// One entanglement attempt: the photon reaches its party over d/2 of the
// photon medium while the herald covers d/2 of the herald medium.
inline double attempt_time(double distance_km, const Medium& photon_medium,
                           const Medium& herald_medium) {
  photon_medium.validate();
  herald_medium.validate();
  if (!(distance_km > 0.0) || !std::isfinite(distance_km))
    throw input_error("attempt_time: distance must be positive");
  const double half_m = 0.5 * distance_km * 1000.0;
  return half_m / photon_medium.speed_m_per_s + half_m / herald_medium.speed_m_per_s;
}

// Success probability of one attempt: both arms of d/2 must transmit (their
// product <=> one full-distance transmission) and the projection must succeed.
inline double success_probability(const Medium& medium, double distance_km,
                                  double projection_probability = 0.5,
                                  double extra_efficiency = 1.0) {
  medium.validate();
  if (!(distance_km >= 0.0) || !std::isfinite(distance_km))
    throw input_error("success_probability: distance must be nonnegative");
  if (!(projection_probability > 0.0 && projection_probability <= 1.0))
    throw input_error("success_probability: projection probability must lie in (0, 1]");
  const double arm = 0.5 * distance_km;
  return projection_probability * efficiency(medium, arm, extra_efficiency) *
         efficiency(medium, arm);
}

// Effective entanglement rate with M parallel copies: M * p_s / t_a.
inline double effective_rate(const LinkConfig& config, const Medium& photon_medium,
                             const Medium& herald_medium) {
  config.validate();
  const double p_s =
      success_probability(photon_medium, config.distance_km,
                          config.projection_probability, config.extra_efficiency);
  const double t_a = attempt_time(config.distance_km, photon_medium, herald_medium);
  return static_cast<double>(config.multiplicity) * p_s / t_a;
}

// Smallest number of copies whose combined rate reaches the target.
inline std::int64_t required_multiplicity(double target_rate_hz, const LinkConfig& config,
                                          const Medium& photon_medium,
                                          const Medium& herald_medium) {
  if (!(target_rate_hz > 0.0) || !std::isfinite(target_rate_hz))
    throw input_error("required_multiplicity: target rate must be positive");
  LinkConfig single = config;
  single.multiplicity = 1;
  const double per_copy = effective_rate(single, photon_medium, herald_medium);
  if (per_copy <= 0.0)
    throw numerical_error("required_multiplicity: per-copy rate underflowed to zero");
  return static_cast<std::int64_t>(std::ceil(target_rate_hz / per_copy - 1e-12));
}

}  // namespace tacit
