#pragma once

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "satrelay/link_budget.hpp"
#include "satrelay/montecarlo.hpp"

namespace satrelay {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct ConfigLine {
  std::string source;
  int number = 0;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source + ":" + std::to_string(number) + ": " + msg);
  }
  double as_double(const std::string& v) const {
    std::size_t pos = 0;
    double d = 0;
    try {
      d = std::stod(v, &pos);
    } catch (const std::exception&) {
      fail("expected a number, got '" + v + "'");
    }
    if (pos != v.size()) fail("trailing characters after number in '" + v + "'");
    return d;
  }
  long long as_int(const std::string& v) const {
    const double d = as_double(v);
    if (d != static_cast<long long>(d)) fail("expected an integer, got '" + v + "'");
    return static_cast<long long>(d);
  }
  bool as_bool(const std::string& v) const {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail("expected true/false, got '" + v + "'");
  }
};

}  // namespace detail

/// Flat sectioned key-value config; the reference-scenario values are the defaults, keys with
/// a _db suffix convert to linear once here, unknown keys are hard errors.
inline ScenarioConfig parse_config(std::istream& in, const std::string& source_name = "<config>") {
  ScenarioConfig cfg;
  // reference scenario defaults
  cfg.uplink = {db_to_linear(60.0), 1.0, 0.015, 1.0, 1.0, db_to_linear(3.0), 3.6e-12, 0.5e9};
  cfg.downlink = {db_to_linear(30.0), 1.0, 0.0231, 1.0, 1.0, db_to_linear(3.0), 3.6e-12, 0.25e9};
  cfg.pkt = {0.5e9, 0.5e9};

  std::string section;
  std::string line;
  int lineno = 0;
  // noise source bookkeeping: 0 none, 1 power, 2 temperature
  int up_noise = 0, dn_noise = 0;
  double up_temp = 0.0, dn_temp = 0.0;

  while (std::getline(in, line)) {
    ++lineno;
    detail::ConfigLine at{source_name, lineno};
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "geometry" && section != "uplink" && section != "downlink" &&
          section != "fading" && section != "packet" && section != "run" &&
          section != "numerics")
        at.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) at.fail("empty key or value");
    if (section.empty()) at.fail("key '" + key + "' outside any section");

    auto link_key = [&](LinkBudgetParams& p, int& noise_src, double& temp) {
      if (key == "eirp_db") p.eirp = db_to_linear(at.as_double(val));
      else if (key == "eirp_w") p.eirp = at.as_double(val);
      else if (key == "rx_gain_db") p.rx_gain = db_to_linear(at.as_double(val));
      else if (key == "wavelength_m") p.wavelength = at.as_double(val);
      else if (key == "feeder_loss_tx_db") p.feeder_loss_tx = db_to_linear(at.as_double(val));
      else if (key == "feeder_loss_rx_db") p.feeder_loss_rx = db_to_linear(at.as_double(val));
      else if (key == "additional_loss_db") p.additional_loss = db_to_linear(at.as_double(val));
      else if (key == "bandwidth_hz") p.bandwidth = at.as_double(val);
      else if (key == "noise_power_w") {
        if (noise_src == 2) at.fail("noise_power_w conflicts with noise_temperature_k");
        noise_src = 1;
        p.noise_power = at.as_double(val);
      } else if (key == "noise_temperature_k") {
        if (noise_src == 1) at.fail("noise_temperature_k conflicts with noise_power_w");
        noise_src = 2;
        temp = at.as_double(val);
      } else
        at.fail("unknown key '" + key + "' in section [" + section + "]");
    };

    if (section == "geometry") {
      if (key == "re_km") cfg.geom.re_km = at.as_double(val);
      else if (key == "rs_km") cfg.geom.rs_km = at.as_double(val);
      else if (key == "altitude_km") cfg.geom.rs_km = cfg.geom.re_km + at.as_double(val);
      else if (key == "n_sats") cfg.geom.n_sats = static_cast<int>(at.as_int(val));
      else at.fail("unknown key '" + key + "' in section [geometry]");
    } else if (section == "uplink") {
      link_key(cfg.uplink, up_noise, up_temp);
    } else if (section == "downlink") {
      link_key(cfg.downlink, dn_noise, dn_temp);
    } else if (section == "fading") {
      if (key == "m") cfg.srp.m = at.as_double(val);
      else if (key == "b0") cfg.srp.b0 = at.as_double(val);
      else if (key == "omega") cfg.srp.omega = at.as_double(val);
      else if (key == "series_eps") cfg.srp.series_eps = at.as_double(val);
      else if (key == "series_max_terms") cfg.srp.series_max_terms = static_cast<int>(at.as_int(val));
      else at.fail("unknown key '" + key + "' in section [fading]");
    } else if (section == "packet") {
      if (key == "size_bits") cfg.pkt.packet_bits = at.as_double(val);
      else at.fail("unknown key '" + key + "' in section [packet]");
    } else if (section == "run") {
      if (key == "theta_sep_rad") cfg.theta_sep = at.as_double(val);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(at.as_int(val));
      else if (key == "n_trials") cfg.n_trials = static_cast<int>(at.as_int(val));
      else if (key == "workers") cfg.workers = static_cast<int>(at.as_int(val));
      else if (key == "gamma_min") cfg.delay_window.gamma_min = at.as_double(val);
      else if (key == "gamma_max") cfg.delay_window.gamma_max = at.as_double(val);
      else if (key == "min_snr_feasibility") cfg.min_snr_feasibility = at.as_double(val);
      else if (key == "use_doubled_psi") cfg.use_doubled_psi = at.as_bool(val);
      else at.fail("unknown key '" + key + "' in section [run]");
    } else if (section == "numerics") {
      if (key == "rel_tol") cfg.quad.rel_tol = at.as_double(val);
      else if (key == "abs_tol") cfg.quad.abs_tol = at.as_double(val);
      else if (key == "max_subdivisions") cfg.quad.max_subdivisions = static_cast<int>(at.as_int(val));
      else if (key == "differentiation_step") cfg.quad.differentiation_step = at.as_double(val);
      else at.fail("unknown key '" + key + "' in section [numerics]");
    }
  }
  if (up_noise == 2) cfg.uplink.noise_power = noise_power(kBoltzmann, cfg.uplink.bandwidth, up_temp);
  if (dn_noise == 2)
    cfg.downlink.noise_power = noise_power(kBoltzmann, cfg.downlink.bandwidth, dn_temp);
  cfg.delay_window.quad = cfg.quad;
  try {
    cfg.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, path);
}

}  // namespace satrelay
