#pragma once

#include <riscf/error.hpp>
#include <riscf/orchestrator.hpp>
#include <riscf/scenario.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace riscf {

using Json = nlohmann::json;

namespace detail {

inline Json position_json(const Position& p) { return Json::array({p.x, p.y}); }

inline Position position_from(const Json& j, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(std::string("'") + key + "' must be a two-element [x, y] array");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline Json to_json(const ScenarioConfig& c) {
  Json aps = Json::array();
  for (const auto& p : c.ap_positions) aps.push_back(detail::position_json(p));
  return Json{{"num_aps", c.num_aps},
              {"antennas_per_ap", c.antennas_per_ap},
              {"num_users", c.num_users},
              {"ris_elements", c.ris_elements},
              {"ap_positions", aps},
              {"ris_position", detail::position_json(c.ris_position)},
              {"user_circle_center", detail::position_json(c.user_circle_center)},
              {"user_circle_radius", c.user_circle_radius},
              {"p_max_dbm", c.p_max_dbm},
              {"noise_dbm", c.noise_dbm},
              {"pathloss_ref_db", c.pathloss_ref_db},
              {"ref_distance", c.ref_distance},
              {"exponent_ap_user", c.exponent_ap_user},
              {"exponent_ap_ris", c.exponent_ap_ris},
              {"exponent_ris_user", c.exponent_ris_user},
              {"rate_weights", c.rate_weights},
              {"convergence_eps", c.convergence_eps},
              {"max_iterations", c.max_iterations},
              {"seed", c.seed},
              {"theta_init", c.theta_init == ThetaInit::kOnes ? "ones" : "random"}};
}

/// Every key is optional. A config that changes num_users without giving
/// rate_weights gets unit weights of the new length.
inline ScenarioConfig config_from_json(const Json& j, ScenarioConfig c = {}) {
  if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
  static const char* known[] = {"num_aps", "antennas_per_ap", "num_users", "ris_elements",
                                "ap_positions", "ris_position", "user_circle_center",
                                "user_circle_radius", "p_max_dbm", "noise_dbm",
                                "pathloss_ref_db", "ref_distance", "exponent_ap_user",
                                "exponent_ap_ris", "exponent_ris_user", "rate_weights",
                                "convergence_eps", "max_iterations", "seed", "theta_init"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key '" + key + "'");
  }
  using detail::read_field;
  read_field(j, "num_aps", c.num_aps);
  read_field(j, "antennas_per_ap", c.antennas_per_ap);
  read_field(j, "num_users", c.num_users);
  read_field(j, "ris_elements", c.ris_elements);
  if (j.contains("ap_positions")) {
    const Json& a = j["ap_positions"];
    if (!a.is_array()) throw ConfigError("'ap_positions' must be an array");
    c.ap_positions.clear();
    for (const auto& p : a) c.ap_positions.push_back(detail::position_from(p, "ap_positions"));
  }
  if (j.contains("ris_position")) c.ris_position = detail::position_from(j["ris_position"], "ris_position");
  if (j.contains("user_circle_center"))
    c.user_circle_center = detail::position_from(j["user_circle_center"], "user_circle_center");
  read_field(j, "user_circle_radius", c.user_circle_radius);
  read_field(j, "p_max_dbm", c.p_max_dbm);
  read_field(j, "noise_dbm", c.noise_dbm);
  read_field(j, "pathloss_ref_db", c.pathloss_ref_db);
  read_field(j, "ref_distance", c.ref_distance);
  read_field(j, "exponent_ap_user", c.exponent_ap_user);
  read_field(j, "exponent_ap_ris", c.exponent_ap_ris);
  read_field(j, "exponent_ris_user", c.exponent_ris_user);
  if (j.contains("rate_weights"))
    read_field(j, "rate_weights", c.rate_weights);
  else if (static_cast<int>(c.rate_weights.size()) != c.num_users)
    c.rate_weights.assign(static_cast<std::size_t>(std::max(c.num_users, 0)), 1.0);
  read_field(j, "convergence_eps", c.convergence_eps);
  read_field(j, "max_iterations", c.max_iterations);
  read_field(j, "seed", c.seed);
  if (j.contains("theta_init")) {
    const std::string s = j["theta_init"].is_string() ? j["theta_init"].get<std::string>() : "";
    if (s == "ones")
      c.theta_init = ThetaInit::kOnes;
    else if (s == "random")
      c.theta_init = ThetaInit::kRandomPhases;
    else
      throw ConfigError("'theta_init' must be \"ones\" or \"random\"");
  }
  validate(c);
  return c;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

/// "default" (or an empty path) yields the built-in configuration.
inline ScenarioConfig load_config(const std::string& path) {
  if (path.empty() || path == "default") return ScenarioConfig{};
  return config_from_json(read_json_file(path));
}

inline Json to_json(const SolveReport& r) {
  Json trace = Json::array();
  for (const auto& it : r.trace) {
    trace.push_back({{"iteration", it.index},
                     {"sum_rate_bps_hz", it.sum_rate},
                     {"surrogate_nats", it.surrogate},
                     {"ap_power_mw", std::vector<double>(it.ap_power.data(),
                                                         it.ap_power.data() + it.ap_power.size())},
                     {"theta_excess", it.theta_excess},
                     {"signaling_symbols_paper", it.paper_symbols},
                     {"signaling_symbols_actual", it.actual_symbols}});
  }
  Json kinds = Json::object();
  const auto totals = r.ledger.totals_by_kind();
  for (std::size_t i = 0; i < totals.size(); ++i)
    kinds[to_string(static_cast<MessageKind>(i))] = totals[i];
  return Json{{"method", r.method},
              {"initial_sum_rate_bps_hz", r.initial_sum_rate},
              {"initial_surrogate_nats", r.initial_surrogate},
              {"final_sum_rate_bps_hz", r.final_sum_rate},
              {"iterations", r.iterations_used},
              {"converged", r.converged},
              {"wall_time_s", r.wall_time},
              {"max_surrogate_decrease", r.max_surrogate_decrease},
              {"signaling",
               {{"paper_total", r.ledger.total_paper_symbols()},
                {"actual_total", r.ledger.total_symbols()},
                {"actual_by_kind", kinds}}},
              {"trace", trace}};
}

}  // namespace riscf
