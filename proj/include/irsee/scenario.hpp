#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsee/rng.hpp"
#include "irsee/units.hpp"

namespace irsee {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct DiscRegion {
  Vec3 center;
  double radius = 0.0;
};

// Flat "section.key -> value" view of an INI-style config file.
using ConfigDoc = std::map<std::string, std::string>;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable experiment description, the single input every other module
// consumes. dB/dBm-valued quantities are stored in their config units so a
// Scenario -> document -> Scenario round trip is bit-exact; the accessors
// below convert to linear watts/ratios once, at the point of use.
struct Scenario {
  // Topology
  int m_u = 10;    // transmit antennas at the user-network AP
  int m_i = 10;    // transmit antennas at the IoT-network AP
  int k_i = 6;     // user count
  int k_ei = 6;    // IoT device count
  int n_irs = 32;  // reflecting elements

  // Geometry (meters)
  Vec3 ap_pos{0.0, 0.0, 0.0};
  Vec3 irs_pos{6.0, 8.0, 0.0};
  DiscRegion user_region{{10.0, 0.0, 0.0}, 6.0};
  DiscRegion device_region{{10.0, 0.0, 0.0}, 6.0};

  // Large-scale propagation
  double a_ap_irs = 2.0;
  double a_irs_user = 2.5;
  double a_ap_user = 3.5;
  double c0_db = -30.0;  // reference path loss at d0
  double d0 = 1.0;
  double rician_k_db = 5.0;
  double noise_dbm = -80.0;
  double bandwidth_hz = 1e6;

  // Power budgets and constraints
  double p_ap_u_max_dbm = 30.0;
  double p_ap_i_max_dbm = 30.0;
  double sinr_min_db = 4.0;
  double amp_efficiency = 0.8;   // eta
  double p_static_ap_dbm = 5.0;  // lumped static circuit power
  double p_per_element_w = 0.0;
  double p_per_terminal_w = 0.0;
  double eh_efficiency = 0.8;  // mu
  double eh_min_dbm = -50.0;
  double ps_slack = 1e-5;  // epsilon

  // Algorithm knobs
  double xi = 1e-3;               // outer-loop relative-change tolerance
  int max_outer = 30;             // outer iteration cap
  int max_sweeps = 3000;          // coordinate-descent sweep cap
  int randomizations = 10000;     // Gaussian randomization draws
  double line_search_step = 0.1;  // zeta: log10 step of the lambda grid
  std::uint64_t seed = 1;

  double sinr_min() const { return db_to_linear(sinr_min_db); }
  double rician_k() const { return db_to_linear(rician_k_db); }
  double c0() const { return db_to_linear(c0_db); }
  double noise_variance() const { return dbm_to_watt(noise_dbm); }
  double p_ap_u_max() const { return dbm_to_watt(p_ap_u_max_dbm); }
  double p_ap_i_max() const { return dbm_to_watt(p_ap_i_max_dbm); }
  double p_static_ap() const { return dbm_to_watt(p_static_ap_dbm); }
  double eh_min() const { return dbm_to_watt(eh_min_dbm); }

  double circuit_power_unet() const {
    return p_static_ap() + n_irs * p_per_element_w + k_i * p_per_terminal_w;
  }
  double circuit_power_inet() const { return p_static_ap() + k_ei * p_per_terminal_w; }

  // Throws ConfigError naming the offending key.
  void validate() const;
};

ConfigDoc parse_config(const std::string& text);
ConfigDoc load_config_file(const std::string& path);

// Builds a Scenario from a document; unknown keys are rejected, missing keys
// take the defaults above.
Scenario build_scenario(const ConfigDoc& doc);

ConfigDoc to_config(const Scenario& s);
std::string serialize_config(const ConfigDoc& doc);

// Uniform placement over a disc (z = center.z); deterministic given the rng.
std::vector<Vec3> place_receivers(const DiscRegion& region, int count, Rng& rng);

}  // namespace irsee
