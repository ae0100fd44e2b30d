#pragma once

#include <riscf/error.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace riscf {

/// Planar coordinates in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class ThetaInit { kOnes, kRandomPhases };

/// Complete description of one experiment. Powers are in dBm/dB at this
/// boundary; everything downstream works in milliwatts.
struct ScenarioConfig {
  int num_aps = 5;
  int antennas_per_ap = 8;
  int num_users = 4;
  int ris_elements = 100;
  std::vector<Position> ap_positions{{0, -50}, {30, -50}, {60, -50}, {90, -50}, {120, -50}};
  Position ris_position{60, 10};
  Position user_circle_center{60, 0};
  double user_circle_radius = 5.0;
  double p_max_dbm = 20.0;
  double noise_dbm = -70.0;
  double pathloss_ref_db = -32.0;
  double ref_distance = 1.0;
  double exponent_ap_user = 3.6;
  double exponent_ap_ris = 2.2;
  double exponent_ris_user = 2.6;
  std::vector<double> rate_weights{1, 1, 1, 1};
  double convergence_eps = 1e-3;
  int max_iterations = 100;
  std::uint64_t seed = 1;
  ThetaInit theta_init = ThetaInit::kOnes;
};

/// dBm -> mW.
inline double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Distance-dependent path loss C0 - 10*kappa*log10(d/d0), in dB.
inline double pathloss_db(double d, double exponent, double c0_db, double d0) {
  if (!(d > 0.0) || !(d0 > 0.0) || !std::isfinite(d)) {
    throw DegenerateGeometryError("pathloss_db: distance must be positive and finite, got d=" +
                                  std::to_string(d) + ", d0=" + std::to_string(d0));
  }
  return c0_db - 10.0 * exponent * std::log10(d / d0);
}

inline double p_max_mw(const ScenarioConfig& c) { return dbm_to_linear(c.p_max_dbm); }
inline double noise_mw(const ScenarioConfig& c) { return dbm_to_linear(c.noise_dbm); }

/// Throws ConfigError describing the first violated constraint.
inline void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("invalid scenario: " + m); };
  if (c.num_aps <= 0) fail("num_aps must be positive");
  if (c.antennas_per_ap <= 0) fail("antennas_per_ap must be positive");
  if (c.num_users <= 0) fail("num_users must be positive");
  if (c.ris_elements <= 0) fail("ris_elements must be positive");
  if (static_cast<int>(c.ap_positions.size()) != c.num_aps)
    fail("ap_positions has " + std::to_string(c.ap_positions.size()) + " entries, expected " +
         std::to_string(c.num_aps));
  if (static_cast<int>(c.rate_weights.size()) != c.num_users)
    fail("rate_weights has " + std::to_string(c.rate_weights.size()) + " entries, expected " +
         std::to_string(c.num_users));
  for (double w : c.rate_weights)
    if (!(w > 0.0) || !std::isfinite(w)) fail("rate_weights must be positive");
  if (!(c.exponent_ap_user > 0 && c.exponent_ap_ris > 0 && c.exponent_ris_user > 0))
    fail("path-loss exponents must be positive");
  if (!(c.user_circle_radius >= 0.0)) fail("user_circle_radius must be nonnegative");
  if (!(c.ref_distance > 0.0)) fail("ref_distance must be positive");
  if (!(c.convergence_eps > 0.0)) fail("convergence_eps must be positive");
  if (c.max_iterations <= 0) fail("max_iterations must be positive");
  for (double v : {c.p_max_dbm, c.noise_dbm, c.pathloss_ref_db, c.ris_position.x, c.ris_position.y,
                   c.user_circle_center.x, c.user_circle_center.y})
    if (!std::isfinite(v)) fail("non-finite scalar field");
  for (const auto& p : c.ap_positions)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail("non-finite AP position");
}

}  // namespace riscf
