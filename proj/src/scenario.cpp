#include "irsee/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace irsee {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const ConfigDoc& doc, const std::string& key, double fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for '" + key + "': " + it->second);
  }
}

int parse_int(const ConfigDoc& doc, const std::string& key, int fallback) {
  const double v = parse_double(doc, key, fallback);
  if (v != std::floor(v)) throw ConfigError("expected integer for '" + key + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const ConfigDoc& doc, const std::string& key, std::uint64_t fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("invalid seed value for '" + key + "': " + it->second);
  }
}

Vec3 parse_vec3(const ConfigDoc& doc, const std::string& key, Vec3 fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  std::istringstream in(it->second);
  Vec3 v;
  if (!(in >> v.x >> v.y >> v.z)) throw ConfigError("expected three numbers for '" + key + "'");
  return v;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x) + " " + fmt(v.y) + " " + fmt(v.z); }

const char* const kKnownKeys[] = {
    "system.seed", "system.n_irs",
    "unet.m", "unet.k", "unet.p_ap_max_dbm",
    "inet.m", "inet.k", "inet.p_ap_max_dbm", "inet.eh_efficiency", "inet.eh_min_dbm",
    "inet.ps_slack",
    "geometry.ap_pos", "geometry.irs_pos", "geometry.user_region_center",
    "geometry.user_region_radius", "geometry.device_region_center",
    "geometry.device_region_radius",
    "channel.a_ap_irs", "channel.a_irs_user", "channel.a_ap_user", "channel.c0_db",
    "channel.d0", "channel.rician_k_db", "channel.noise_dbm", "channel.bandwidth_hz",
    "algorithm.sinr_min_db", "algorithm.amp_efficiency", "algorithm.p_static_ap_dbm",
    "algorithm.p_per_element_w", "algorithm.p_per_terminal_w", "algorithm.xi",
    "algorithm.max_outer", "algorithm.max_sweeps", "algorithm.randomizations",
    "algorithm.line_search_step",
};

}  // namespace

void Scenario::validate() const {
  require(m_u >= 1, "unet.m must be >= 1");
  require(m_i >= 1, "inet.m must be >= 1");
  require(k_i >= 1, "unet.k must be >= 1");
  require(k_ei >= 1, "inet.k must be >= 1");
  require(n_irs >= 1, "system.n_irs must be >= 1");
  require(m_u >= k_i, "unet.m must be >= unet.k (spatial multiplexing infeasible)");
  require(m_i >= k_ei, "inet.m must be >= inet.k (spatial multiplexing infeasible)");
  require(user_region.radius > 0.0, "geometry.user_region_radius must be > 0");
  require(device_region.radius > 0.0, "geometry.device_region_radius must be > 0");
  for (const auto& [key, a] : {std::pair<const char*, double>{"channel.a_ap_irs", a_ap_irs},
                               {"channel.a_irs_user", a_irs_user},
                               {"channel.a_ap_user", a_ap_user}})
    require(a >= 2.0 && a <= 6.0, std::string(key) + " must lie in [2, 6]");
  require(d0 > 0.0, "channel.d0 must be > 0");
  require(bandwidth_hz > 0.0, "channel.bandwidth_hz must be > 0");
  require(amp_efficiency > 0.0 && amp_efficiency <= 1.0,
          "algorithm.amp_efficiency must lie in (0, 1]");
  require(p_per_element_w >= 0.0, "algorithm.p_per_element_w must be >= 0");
  require(p_per_terminal_w >= 0.0, "algorithm.p_per_terminal_w must be >= 0");
  require(eh_efficiency >= 0.0 && eh_efficiency <= 1.0, "inet.eh_efficiency must lie in [0, 1]");
  require(ps_slack > 0.0 && ps_slack < 0.1, "inet.ps_slack must lie in (0, 0.1)");
  require(xi > 0.0, "algorithm.xi must be > 0");
  require(max_outer >= 1, "algorithm.max_outer must be >= 1");
  require(max_sweeps >= 1, "algorithm.max_sweeps must be >= 1");
  require(randomizations >= 1, "algorithm.randomizations must be >= 1");
  require(line_search_step > 0.0, "algorithm.line_search_step must be > 0");
}

ConfigDoc parse_config(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    doc[section.empty() ? key : section + "." + key] = val;
  }
  return doc;
}

ConfigDoc load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Scenario build_scenario(const ConfigDoc& doc) {
  for (const auto& [key, value] : doc) {
    (void)value;
    if (std::find_if(std::begin(kKnownKeys), std::end(kKnownKeys),
                     [&](const char* k) { return key == k; }) == std::end(kKnownKeys))
      throw ConfigError("unknown config key '" + key + "'");
  }

  Scenario s;
  s.seed = parse_u64(doc, "system.seed", s.seed);
  s.n_irs = parse_int(doc, "system.n_irs", s.n_irs);
  s.m_u = parse_int(doc, "unet.m", s.m_u);
  s.k_i = parse_int(doc, "unet.k", s.k_i);
  s.m_i = parse_int(doc, "inet.m", s.m_i);
  s.k_ei = parse_int(doc, "inet.k", s.k_ei);
  s.p_ap_u_max_dbm = parse_double(doc, "unet.p_ap_max_dbm", s.p_ap_u_max_dbm);
  s.p_ap_i_max_dbm = parse_double(doc, "inet.p_ap_max_dbm", s.p_ap_i_max_dbm);
  s.eh_efficiency = parse_double(doc, "inet.eh_efficiency", s.eh_efficiency);
  s.eh_min_dbm = parse_double(doc, "inet.eh_min_dbm", s.eh_min_dbm);
  s.ps_slack = parse_double(doc, "inet.ps_slack", s.ps_slack);
  s.ap_pos = parse_vec3(doc, "geometry.ap_pos", s.ap_pos);
  s.irs_pos = parse_vec3(doc, "geometry.irs_pos", s.irs_pos);
  s.user_region.center = parse_vec3(doc, "geometry.user_region_center", s.user_region.center);
  s.user_region.radius = parse_double(doc, "geometry.user_region_radius", s.user_region.radius);
  s.device_region.center =
      parse_vec3(doc, "geometry.device_region_center", s.device_region.center);
  s.device_region.radius =
      parse_double(doc, "geometry.device_region_radius", s.device_region.radius);
  s.a_ap_irs = parse_double(doc, "channel.a_ap_irs", s.a_ap_irs);
  s.a_irs_user = parse_double(doc, "channel.a_irs_user", s.a_irs_user);
  s.a_ap_user = parse_double(doc, "channel.a_ap_user", s.a_ap_user);
  s.c0_db = parse_double(doc, "channel.c0_db", s.c0_db);
  s.d0 = parse_double(doc, "channel.d0", s.d0);
  s.rician_k_db = parse_double(doc, "channel.rician_k_db", s.rician_k_db);
  s.noise_dbm = parse_double(doc, "channel.noise_dbm", s.noise_dbm);
  s.bandwidth_hz = parse_double(doc, "channel.bandwidth_hz", s.bandwidth_hz);
  s.sinr_min_db = parse_double(doc, "algorithm.sinr_min_db", s.sinr_min_db);
  s.amp_efficiency = parse_double(doc, "algorithm.amp_efficiency", s.amp_efficiency);
  s.p_static_ap_dbm = parse_double(doc, "algorithm.p_static_ap_dbm", s.p_static_ap_dbm);
  s.p_per_element_w = parse_double(doc, "algorithm.p_per_element_w", s.p_per_element_w);
  s.p_per_terminal_w = parse_double(doc, "algorithm.p_per_terminal_w", s.p_per_terminal_w);
  s.xi = parse_double(doc, "algorithm.xi", s.xi);
  s.max_outer = parse_int(doc, "algorithm.max_outer", s.max_outer);
  s.max_sweeps = parse_int(doc, "algorithm.max_sweeps", s.max_sweeps);
  s.randomizations = parse_int(doc, "algorithm.randomizations", s.randomizations);
  s.line_search_step = parse_double(doc, "algorithm.line_search_step", s.line_search_step);

  s.validate();
  return s;
}

ConfigDoc to_config(const Scenario& s) {
  ConfigDoc d;
  d["system.seed"] = std::to_string(s.seed);
  d["system.n_irs"] = std::to_string(s.n_irs);
  d["unet.m"] = std::to_string(s.m_u);
  d["unet.k"] = std::to_string(s.k_i);
  d["unet.p_ap_max_dbm"] = fmt(s.p_ap_u_max_dbm);
  d["inet.m"] = std::to_string(s.m_i);
  d["inet.k"] = std::to_string(s.k_ei);
  d["inet.p_ap_max_dbm"] = fmt(s.p_ap_i_max_dbm);
  d["inet.eh_efficiency"] = fmt(s.eh_efficiency);
  d["inet.eh_min_dbm"] = fmt(s.eh_min_dbm);
  d["inet.ps_slack"] = fmt(s.ps_slack);
  d["geometry.ap_pos"] = fmt(s.ap_pos);
  d["geometry.irs_pos"] = fmt(s.irs_pos);
  d["geometry.user_region_center"] = fmt(s.user_region.center);
  d["geometry.user_region_radius"] = fmt(s.user_region.radius);
  d["geometry.device_region_center"] = fmt(s.device_region.center);
  d["geometry.device_region_radius"] = fmt(s.device_region.radius);
  d["channel.a_ap_irs"] = fmt(s.a_ap_irs);
  d["channel.a_irs_user"] = fmt(s.a_irs_user);
  d["channel.a_ap_user"] = fmt(s.a_ap_user);
  d["channel.c0_db"] = fmt(s.c0_db);
  d["channel.d0"] = fmt(s.d0);
  d["channel.rician_k_db"] = fmt(s.rician_k_db);
  d["channel.noise_dbm"] = fmt(s.noise_dbm);
  d["channel.bandwidth_hz"] = fmt(s.bandwidth_hz);
  d["algorithm.sinr_min_db"] = fmt(s.sinr_min_db);
  d["algorithm.amp_efficiency"] = fmt(s.amp_efficiency);
  d["algorithm.p_static_ap_dbm"] = fmt(s.p_static_ap_dbm);
  d["algorithm.p_per_element_w"] = fmt(s.p_per_element_w);
  d["algorithm.p_per_terminal_w"] = fmt(s.p_per_terminal_w);
  d["algorithm.xi"] = fmt(s.xi);
  d["algorithm.max_outer"] = std::to_string(s.max_outer);
  d["algorithm.max_sweeps"] = std::to_string(s.max_sweeps);
  d["algorithm.randomizations"] = std::to_string(s.randomizations);
  d["algorithm.line_search_step"] = fmt(s.line_search_step);
  return d;
}

std::string serialize_config(const ConfigDoc& doc) {
  // std::map ordering already clusters "section.key" entries by section.
  std::ostringstream out;
  std::string current;
  bool first = true;
  for (const auto& [full, value] : doc) {
    const auto dot = full.find('.');
    const std::string section = dot == std::string::npos ? "" : full.substr(0, dot);
    const std::string key = dot == std::string::npos ? full : full.substr(dot + 1);
    if (section != current || first) {
      if (!first) out << "\n";
      out << "[" << section << "]\n";
      current = section;
      first = false;
    }
    out << key << " = " << value << "\n";
  }
  return out.str();
}

std::vector<Vec3> place_receivers(const DiscRegion& region, int count, Rng& rng) {
  std::vector<Vec3> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double r = region.radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * M_PI * rng.uniform();
    out.push_back({region.center.x + r * std::cos(phi), region.center.y + r * std::sin(phi),
                   region.center.z});
  }
  return out;
}

}  // namespace irsee
