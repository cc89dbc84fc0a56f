#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "satrelay/config.hpp"
#include "satrelay/delay.hpp"
#include "satrelay/distributions.hpp"
#include "satrelay/montecarlo.hpp"
#include "satrelay/stats.hpp"

namespace satrelay {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Locale-independent number formatting shared by every CSV writer.
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    return os.str();
  }
};

// ---- validation suite ----

struct ValidationCheck {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<", ">", "report"
  bool pass = true;
  bool gating = true;  // "report" rows are diagnostics, not gates
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (c.gating && !c.pass) return false;
    return true;
  }

  CsvTable to_csv() const {
    CsvTable t;
    t.header = {"check", "statistic", "relation", "threshold", "result"};
    for (const auto& c : checks)
      t.rows.push_back({c.name, csv_num(c.statistic), c.relation, csv_num(c.threshold),
                        c.gating ? (c.pass ? "pass" : "FAIL") : "info"});
    return t;
  }
};

namespace detail {

inline void gate(ValidationReport& r, const std::string& name, double stat, double thr,
                 bool less_than = true) {
  r.checks.push_back({name, stat, thr, less_than ? "<" : ">",
                      less_than ? stat < thr : stat > thr, true});
}

inline void info(ValidationReport& r, const std::string& name, double stat) {
  r.checks.push_back({name, stat, 0.0, "report", true, false});
}

/// CDF of the fading power by cumulative quadrature of the series PDF.
class SrCdf {
 public:
  SrCdf(const ShadowedRicianParams& srp, double t_max = 25.0, int grid_n = 2048)
      : t_max_(t_max), cdf_(grid_n + 1) {
    const double h = t_max / grid_n;
    static constexpr double gx[2] = {0.3399810435848563, 0.8611363115940526};
    static constexpr double gw[2] = {0.6521451548625461, 0.3478548451374538};
    cdf_[0] = 0.0;
    for (int i = 0; i < grid_n; ++i) {
      const double c = (i + 0.5) * h, hh = 0.5 * h;
      double seg = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double dx = hh * gx[j];
        seg += gw[j] * (sr_pdf(c - dx, srp) + sr_pdf(c + dx, srp));
      }
      cdf_[i + 1] = cdf_[i] + seg * hh;
    }
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= t_max_) return cdf_.back();
    const double h = t_max_ / (cdf_.size() - 1);
    const auto i = static_cast<std::size_t>(t / h);
    const double frac = t / h - static_cast<double>(i);
    return cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
  }

 private:
  double t_max_;
  std::vector<double> cdf_;
};

}  // namespace detail

/// Full analytic-vs-simulation consistency suite at the scenario's settings.
inline ValidationReport run_validation(const ScenarioConfig& cfg) {
  cfg.validate();
  ValidationReport rep;
  const auto& geom = cfg.geom;
  const auto& srp = cfg.srp;
  const QuadratureConfig& quad = cfg.quad;

  // SR fading closed-form suite
  const double norm = integrate([&](double t) { return sr_pdf(t, srp); }, 0.0, 40.0, quad);
  detail::gate(rep, "sr_pdf_normalization_abs_err", std::abs(norm - 1.0), 1e-6);
  const double num_mean =
      integrate([&](double t) { return t * sr_pdf(t, srp); }, 0.0, 60.0, quad);
  detail::gate(rep, "sr_mean_numeric_abs_err", std::abs(num_mean - sr_mean(srp)), 1e-4);
  const double h = 1e-4;  // one-sided second-order difference; sr_mgf needs sigma >= 0
  const double mgf_mean =
      -(-3.0 * sr_mgf(0.0, srp) + 4.0 * sr_mgf(h, srp) - sr_mgf(2.0 * h, srp)) / (2.0 * h);
  detail::gate(rep, "sr_mgf_mean_abs_err", std::abs(mgf_mean - sr_mean(srp)), 1e-6);

  // sampler vs series pdf
  {
    RandomStream rng(splitmix64(cfg.seed ^ 0xa5a5a5a5a5a5a5a5ULL));
    const int n = 100000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = sr_sample(rng, srp);
    const detail::SrCdf F(srp);
    detail::gate(rep, "sr_sampler_ks", ks_statistic(draws, F), 0.005);
    const auto ci = mean_ci95(draws);
    detail::gate(rep, "sr_sampler_mean_abs_err", std::abs(ci.mean - sr_mean(srp)),
                 3.0 * ci.halfwidth95 / 1.959963984540054 + 1e-12);
  }

  // geometry constants at the shell in use
  detail::info(rep, "l_max_km", l_max(geom));
  detail::info(rep, "visibility_angle_rad", visibility_angle(geom));

  // campaign-backed distribution fidelity
  const DelayStats mc = run_campaign(cfg);
  detail::gate(rep, "outage_fraction", mc.outage_fraction, 1e-3);
  detail::gate(rep, "ks_theta1", ks_statistic(mc.theta1, [&](double t) { return theta1_cdf(t, geom); }),
               0.01);
  detail::gate(rep, "ks_d_down",
               ks_statistic(mc.d_down, [&](double d) { return downlink_distance_cdf(d, geom); }),
               0.01);
  const Theta2Distribution t2(cfg.theta_sep, geom, quad, 2048, cfg.psi_form());
  detail::gate(rep, "ks_theta2", ks_statistic(mc.theta2, [&](double b) { return t2.cdf(b); }),
               0.01);
  detail::gate(rep, "ks_d_up",
               ks_statistic(mc.d_up, [&](double d) { return uplink_distance_cdf(d, t2); }), 0.01);

  // downlink plug-in vs simulator mean: the exact mean delay diverges (the
  // fading density is positive at zero), so the gap is reported, not gated.
  const double tau_dn_plugin = avg_delay_downlink(geom, cfg.downlink, srp, cfg.pkt_down());
  detail::info(rep, "tau_down_plugin_s", tau_dn_plugin);
  detail::info(rep, "tau_down_mc_mean_s", mc.mean_down);
  detail::info(rep, "downlink_jensen_gap_ratio", mc.mean_down / tau_dn_plugin);

  // windowed uplink expectation, simulator identically censored on the same window
  const UplinkSnrPdf fsnr(cfg.theta_sep, geom, cfg.uplink, srp, quad);
  const UplinkDelayResult up = avg_delay_uplink(fsnr, cfg.pkt_up(), cfg.delay_window);
  // the stats vectors are sorted independently, so censor on tau directly:
  // the SNR window maps monotonically onto a delay window
  const double tau_hi = link_delay(cfg.delay_window.gamma_min, cfg.pkt_up());
  const double tau_lo = link_delay(up.gamma_max, cfg.pkt_up());
  double censored_sum = 0.0;
  for (double t : mc.tau_up)
    if (t >= tau_lo && t <= tau_hi) censored_sum += t;
  const double censored_mc = censored_sum / static_cast<double>(mc.tau_up.size());
  detail::gate(rep, "uplink_window_rel_err", std::abs(up.delay_s - censored_mc) / censored_mc, 0.05);
  detail::gate(rep, "uplink_window_truncated_mass", up.truncated_mass(), 1e-3);
  detail::info(rep, "tau_up_window_s", up.delay_s);
  detail::info(rep, "snr_up_window_mass", up.window_mass);

  return rep;
}

// ---- manifests ----

struct RunManifest {
  std::string command;
  ScenarioConfig config;
  std::vector<std::string> outputs;
  double wall_clock_s = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["artifact_version"] = kArtifactVersion;
    j["command"] = command;
    j["outputs"] = outputs;
    j["wall_clock_s"] = wall_clock_s;
    nlohmann::json c;
    c["geometry"] = {{"re_km", config.geom.re_km},
                     {"rs_km", config.geom.rs_km},
                     {"n_sats", config.geom.n_sats}};
    auto link = [](const LinkBudgetParams& p) {
      return nlohmann::json{{"eirp_w", p.eirp},           {"rx_gain", p.rx_gain},
                            {"wavelength_m", p.wavelength}, {"feeder_loss_tx", p.feeder_loss_tx},
                            {"feeder_loss_rx", p.feeder_loss_rx},
                            {"additional_loss", p.additional_loss},
                            {"noise_power_w", p.noise_power}, {"bandwidth_hz", p.bandwidth}};
    };
    c["uplink"] = link(config.uplink);
    c["downlink"] = link(config.downlink);
    c["fading"] = {{"m", config.srp.m},
                   {"b0", config.srp.b0},
                   {"omega", config.srp.omega},
                   {"series_eps", config.srp.series_eps},
                   {"series_max_terms", config.srp.series_max_terms}};
    c["packet"] = {{"size_bits", config.pkt.packet_bits}};
    c["run"] = {{"theta_sep_rad", config.theta_sep},
                {"seed", config.seed},
                {"n_trials", config.n_trials},
                {"workers", config.workers},
                {"gamma_min", config.delay_window.gamma_min},
                {"gamma_max", config.delay_window.gamma_max},
                {"min_snr_feasibility", config.min_snr_feasibility},
                {"use_doubled_psi", config.use_doubled_psi}};
    c["numerics"] = {{"rel_tol", config.quad.rel_tol},
                     {"abs_tol", config.quad.abs_tol},
                     {"max_subdivisions", config.quad.max_subdivisions},
                     {"differentiation_step", config.quad.differentiation_step}};
    j["config"] = c;
    return j;
  }
};

// ---- experiment sweeps ----

namespace detail {

inline ScenarioConfig with_shell(const ScenarioConfig& base, double altitude_km, int n_sats) {
  ScenarioConfig c = base;
  c.geom.rs_km = c.geom.re_km + altitude_km;
  c.geom.n_sats = n_sats;
  return c;
}

inline double analytic_total_delay(const ScenarioConfig& c) {
  return total_delay_analytic(c.theta_sep, c.geom, c.uplink, c.downlink, c.srp, c.pkt_up(),
                              c.pkt_down(), c.delay_window)
      .total_s;
}

}  // namespace detail

/// Delay against constellation size and shell altitude.
inline CsvTable sweep_nsat(const ScenarioConfig& base, const std::vector<int>& nsat_list,
                           const std::vector<double>& altitude_list_km) {
  if (nsat_list.empty() || altitude_list_km.empty())
    throw std::invalid_argument("sweep_nsat: empty sweep lists");
  CsvTable t;
  t.header = {"n_sats",          "altitude_km",       "tau_total_analytic_s",
              "tau_total_mc_s",  "tau_total_mc_ci95_s", "outage_fraction",
              "status"};
  for (double alt : altitude_list_km) {
    for (int ns : nsat_list) {
      const ScenarioConfig c = detail::with_shell(base, alt, ns);
      if (c.theta_sep > 2.0 * visibility_angle(c.geom)) {
        t.rows.push_back({std::to_string(ns), csv_num(alt), "", "", "", "", "infeasible"});
        continue;
      }
      const DelayStats mc = run_campaign(c);
      const bool outage_only = mc.tau_total.empty();
      t.rows.push_back({std::to_string(ns), csv_num(alt),
                        csv_num(detail::analytic_total_delay(c)),
                        outage_only ? "" : csv_num(mc.mean_total),
                        outage_only ? "" : csv_num(mc.ci95_total),
                        csv_num(mc.outage_fraction), outage_only ? "outage" : "ok"});
    }
  }
  return t;
}

struct OperatorPreset {
  std::string name;
  double altitude_km;
};

inline const std::vector<OperatorPreset>& operator_presets() {
  static const std::vector<OperatorPreset> presets = {
      {"oneweb", 1200.0}, {"telesat", 1150.0}, {"spacex", 1110.0}};
  return presets;
}

/// Delay against station separation for the operator altitude presets.
/// Distances are ground chords between the two stations, km.
inline CsvTable sweep_distance(const ScenarioConfig& base,
                               const std::vector<double>& distance_list_km,
                               const std::vector<OperatorPreset>& presets = operator_presets()) {
  if (distance_list_km.empty()) throw std::invalid_argument("sweep_distance: empty distance list");
  CsvTable t;
  t.header = {"operator",        "altitude_km",       "distance_km",
              "theta_sep_rad",   "tau_total_analytic_s", "tau_total_mc_s",
              "tau_total_mc_ci95_s", "outage_fraction",   "status"};
  for (const auto& p : presets) {
    for (double dist : distance_list_km) {
      ScenarioConfig c = detail::with_shell(base, p.altitude_km, base.geom.n_sats);
      if (dist >= 2.0 * c.geom.re_km) {
        t.rows.push_back({p.name, csv_num(p.altitude_km), csv_num(dist), "", "", "", "", "",
                          "infeasible"});
        continue;
      }
      c.theta_sep = 2.0 * std::asin(dist / (2.0 * c.geom.re_km));
      if (c.theta_sep > 2.0 * visibility_angle(c.geom)) {
        t.rows.push_back({p.name, csv_num(p.altitude_km), csv_num(dist), csv_num(c.theta_sep),
                          "", "", "", "", "infeasible"});
        continue;
      }
      const DelayStats mc = run_campaign(c);
      const bool outage_only = mc.tau_total.empty();
      t.rows.push_back({p.name, csv_num(p.altitude_km), csv_num(dist), csv_num(c.theta_sep),
                        csv_num(detail::analytic_total_delay(c)),
                        outage_only ? "" : csv_num(mc.mean_total),
                        outage_only ? "" : csv_num(mc.ci95_total), csv_num(mc.outage_fraction),
                        outage_only ? "outage" : "ok"});
    }
  }
  return t;
}

/// Multi-hop long-distance transmission against shell altitude.
inline CsvTable sweep_hops(const ScenarioConfig& base, double total_distance_km,
                           const std::vector<double>& altitude_list_km) {
  if (!(total_distance_km > 0)) throw std::invalid_argument("sweep_hops: distance must be positive");
  if (altitude_list_km.empty()) throw std::invalid_argument("sweep_hops: empty altitude list");
  CsvTable t;
  t.header = {"altitude_km", "l_max_km",         "n_hops",
              "theta_seg_rad", "tau_total_mc_s", "tau_total_mc_ci95_s",
              "outage_fraction", "status"};
  for (double alt : altitude_list_km) {
    const ScenarioConfig c = detail::with_shell(base, alt, base.geom.n_sats);
    try {
      const MultihopStats ms = simulate_multihop(total_distance_km, c);
      const bool outage_only = ms.totals.tau_total.empty();
      t.rows.push_back({csv_num(alt), csv_num(l_max(c.geom)), std::to_string(ms.n_hops),
                        csv_num(ms.theta_seg),
                        outage_only ? "" : csv_num(ms.totals.mean_total),
                        outage_only ? "" : csv_num(ms.totals.ci95_total),
                        csv_num(ms.totals.outage_fraction), outage_only ? "outage" : "ok"});
    } catch (const std::runtime_error&) {
      t.rows.push_back({csv_num(alt), csv_num(l_max(c.geom)),
                        std::to_string(min_hops(total_distance_km, c.geom)), "", "", "", "",
                        "infeasible"});
    }
  }
  return t;
}

/// Ideal-relay-position sweep: deterministic mean-fading delays on a grid of
/// arc positions plus a simulator run that picks the satellite nearest to the
/// ideal point. The analytic argmin row is marked.
inline CsvTable relay_sweep(const ScenarioConfig& base, const std::vector<double>& angle_grid) {
  if (angle_grid.empty()) throw std::invalid_argument("relay_sweep: empty grid");
  for (double t : angle_grid)
    if (t < 0.0 || t > base.theta_sep)
      throw std::invalid_argument("relay_sweep: grid point outside [0, Theta]");
  CsvTable t;
  t.header = {"relay_angle_rad", "tau_up_analytic_s", "tau_down_analytic_s",
              "tau_total_analytic_s", "tau_total_mc_s",  "tau_total_mc_ci95_s",
              "outage_fraction", "is_argmin"};
  const double wbar = sr_mean(base.srp);
  const PacketParams pkt_up = base.pkt_up(), pkt_down = base.pkt_down();
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::array<double, 3>> analytic(angle_grid.size());
  for (std::size_t i = 0; i < angle_grid.size(); ++i) {
    const double tt = angle_grid[i];
    const double up =
        link_delay(snr(chord_distance(base.theta_sep - tt, base.geom), wbar, base.uplink), pkt_up);
    const double dn = link_delay(snr(chord_distance(tt, base.geom), wbar, base.downlink), pkt_down);
    analytic[i] = {up, dn, up + dn};
    if (up + dn < best_val) {
      best_val = up + dn;
      best = i;
    }
  }
  for (std::size_t i = 0; i < angle_grid.size(); ++i) {
    const DelayStats mc = run_ideal_position_campaign(base, angle_grid[i]);
    const bool outage_only = mc.tau_total.empty();
    t.rows.push_back({csv_num(angle_grid[i]), csv_num(analytic[i][0]), csv_num(analytic[i][1]),
                      csv_num(analytic[i][2]), outage_only ? "" : csv_num(mc.mean_total),
                      outage_only ? "" : csv_num(mc.ci95_total), csv_num(mc.outage_fraction),
                      i == best ? "1" : "0"});
  }
  return t;
}

}  // namespace satrelay
