#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "satrelay/delay.hpp"
#include "satrelay/distributions.hpp"
#include "satrelay/geometry.hpp"
#include "satrelay/link_budget.hpp"
#include "satrelay/rng.hpp"

namespace satrelay {

/// Everything one experiment needs: geometry, station separation, both link
/// budgets, fading, packet, numerics, and the RNG contract.
struct ScenarioConfig {
  ConstellationGeometry geom{};
  double theta_sep = 0.1;  // rad
  LinkBudgetParams uplink{};
  LinkBudgetParams downlink{};
  ShadowedRicianParams srp{};
  PacketParams pkt{};  // pkt.bandwidth is unused; per-link bandwidths apply
  std::uint64_t seed = 1;
  int n_trials = 100000;
  int workers = 0;              // 0 = hardware concurrency
  double min_snr_feasibility = 0.0;  // optional mean-fading SNR floor, off when 0
  bool use_doubled_psi = false;      // analytic psi form, see geometry::PsiForm
  QuadratureConfig quad{};
  DelayIntegrationConfig delay_window{};

  PacketParams pkt_up() const { return {pkt.packet_bits, uplink.bandwidth}; }
  PacketParams pkt_down() const { return {pkt.packet_bits, downlink.bandwidth}; }
  PsiForm psi_form() const {
    return use_doubled_psi ? PsiForm::doubled_angle : PsiForm::law_of_cosines;
  }

  void validate() const {
    geom.validate();
    uplink.validate();
    downlink.validate();
    srp.validate();
    pkt.validate();
    quad.validate();
    delay_window.validate();
    if (theta_sep < 0.0 || theta_sep > kPi)
      throw std::domain_error("ScenarioConfig: theta_sep outside [0, pi]");
    if (n_trials < 1) throw std::domain_error("ScenarioConfig: n_trials >= 1");
    if (workers < 0) throw std::domain_error("ScenarioConfig: workers >= 0");
  }
};

struct EpisodeResult {
  bool relay_found = false;
  double theta1 = 0.0;  // relay central angle from the receiver
  double theta2 = 0.0;  // relay central angle from the transmitter
  double d_up = 0.0, d_down = 0.0;       // km
  double w2_up = 0.0, w2_down = 0.0;     // fading draws
  double snr_up = 0.0, snr_down = 0.0;   // linear
  double tau_up = 0.0, tau_down = 0.0, tau_total = 0.0;  // s
};

/// Campaign aggregate: moments and empirical-distribution handles over the
/// non-outage episodes.
struct DelayStats {
  long count = 0;
  long outage_count = 0;
  double outage_fraction = 0.0;
  double mean_total = 0.0, var_total = 0.0, ci95_total = 0.0;
  double mean_up = 0.0, mean_down = 0.0;
  double median_total = 0.0, q90_total = 0.0;
  // sorted empirical samples (non-outage episodes only)
  std::vector<double> theta1, theta2, d_up, d_down, snr_up, snr_down;
  std::vector<double> tau_up, tau_down, tau_total;
};

inline std::vector<SphericalPoint> sample_constellation(RandomStream& rng,
                                                        const ConstellationGeometry& geom) {
  std::vector<SphericalPoint> pts(static_cast<std::size_t>(geom.n_sats));
  for (auto& p : pts) {
    p.polar = std::acos(rng.uniform(-1.0, 1.0));
    p.azimuth = rng.uniform(0.0, 2.0 * kPi);
    p.radius_km = geom.rs_km;
  }
  return pts;
}

struct RelaySelection {
  bool found = false;
  int index = -1;
  double angle_rx = 0.0;  // central angle to the receiver
  double angle_tx = 0.0;  // central angle to the transmitter
};

/// Dual-visibility feasibility, then minimum downlink distance (equivalently
/// minimum receiver central angle); ties toward smaller uplink distance, then
/// lowest index. Outage is a value, not an error.
inline RelaySelection select_relay(const std::vector<SphericalPoint>& points,
                                   const ScenarioConfig& scenario) {
  const double vis = visibility_angle(scenario.geom);
  const double Theta = scenario.theta_sep;
  const double sinT = std::sin(Theta), cosT = std::cos(Theta);
  RelaySelection sel;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const auto& p = points[i];
    const double a_rx = p.polar;
    if (a_rx > vis) continue;
    const double c = std::sin(p.polar) * sinT * std::cos(p.azimuth) + std::cos(p.polar) * cosT;
    const double a_tx = safe_acos(c);
    if (a_tx > vis) continue;
    if (scenario.min_snr_feasibility > 0.0) {
      const double wbar = sr_mean(scenario.srp);
      const double s_up = snr(chord_distance(a_tx, scenario.geom), wbar, scenario.uplink);
      const double s_dn = snr(chord_distance(a_rx, scenario.geom), wbar, scenario.downlink);
      if (s_up < scenario.min_snr_feasibility || s_dn < scenario.min_snr_feasibility) continue;
    }
    const bool better =
        !sel.found || a_rx < sel.angle_rx ||
        (a_rx == sel.angle_rx && (a_tx < sel.angle_tx || (a_tx == sel.angle_tx && i < sel.index)));
    if (better) {
      sel.found = true;
      sel.index = i;
      sel.angle_rx = a_rx;
      sel.angle_tx = a_tx;
    }
  }
  return sel;
}

inline EpisodeResult simulate_episode(RandomStream& rng, const ScenarioConfig& scenario) {
  const auto points = sample_constellation(rng, scenario.geom);
  const auto sel = select_relay(points, scenario);
  EpisodeResult ep;
  if (!sel.found) return ep;
  ep.relay_found = true;
  ep.theta1 = sel.angle_rx;
  ep.theta2 = sel.angle_tx;
  ep.d_up = chord_distance(sel.angle_tx, scenario.geom);
  ep.d_down = chord_distance(sel.angle_rx, scenario.geom);
  ep.w2_up = sr_sample(rng, scenario.srp);
  ep.w2_down = sr_sample(rng, scenario.srp);
  ep.snr_up = snr(ep.d_up, ep.w2_up, scenario.uplink);
  ep.snr_down = snr(ep.d_down, ep.w2_down, scenario.downlink);
  ep.tau_up = link_delay(ep.snr_up, scenario.pkt_up());
  ep.tau_down = link_delay(ep.snr_down, scenario.pkt_down());
  ep.tau_total = ep.tau_up + ep.tau_down;
  return ep;
}

namespace detail {

template <class PerTrial>
void run_trials(const ScenarioConfig& scenario, std::vector<EpisodeResult>& out,
                const PerTrial& per_trial) {
  const int n = scenario.n_trials;
  out.resize(static_cast<std::size_t>(n));
  int workers = scenario.workers > 0 ? scenario.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, n);
  if (workers == 1) {
    for (int t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = per_trial(t);
    return;
  }
  // contiguous blocks; each trial owns a private substream and output slot,
  // so the partition cannot change the result
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const int block = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * block, hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (int t = lo; t < hi; ++t) out[static_cast<std::size_t>(t)] = per_trial(t);
    });
  }
  for (auto& th : pool) th.join();
}

inline DelayStats aggregate(const std::vector<EpisodeResult>& episodes) {
  DelayStats st;
  st.count = static_cast<long>(episodes.size());
  for (const auto& ep : episodes) {
    if (!ep.relay_found) {
      ++st.outage_count;
      continue;
    }
    st.theta1.push_back(ep.theta1);
    st.theta2.push_back(ep.theta2);
    st.d_up.push_back(ep.d_up);
    st.d_down.push_back(ep.d_down);
    st.snr_up.push_back(ep.snr_up);
    st.snr_down.push_back(ep.snr_down);
    st.tau_up.push_back(ep.tau_up);
    st.tau_down.push_back(ep.tau_down);
    st.tau_total.push_back(ep.tau_total);
  }
  st.outage_fraction = st.count ? static_cast<double>(st.outage_count) / st.count : 0.0;
  const auto n = st.tau_total.size();
  if (n > 0) {
    double s_tot = 0, s_up = 0, s_dn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s_tot += st.tau_total[i];
      s_up += st.tau_up[i];
      s_dn += st.tau_down[i];
    }
    st.mean_total = s_tot / n;
    st.mean_up = s_up / n;
    st.mean_down = s_dn / n;
    double ss = 0;
    for (double v : st.tau_total) ss += (v - st.mean_total) * (v - st.mean_total);
    st.var_total = n > 1 ? ss / (n - 1) : 0.0;
    st.ci95_total = 1.959963984540054 * std::sqrt(st.var_total / n);
    for (auto* v : {&st.theta1, &st.theta2, &st.d_up, &st.d_down, &st.snr_up, &st.snr_down,
                    &st.tau_up, &st.tau_down, &st.tau_total})
      std::sort(v->begin(), v->end());
    st.median_total = st.tau_total[n / 2];
    st.q90_total = st.tau_total[static_cast<std::size_t>(0.9 * n)];
  }
  return st;
}

}  // namespace detail

/// n_trials independent episodes on per-trial counter-derived substreams;
/// bit-for-bit reproducible for a fixed (seed, n_trials) at any worker count.
inline DelayStats run_campaign(const ScenarioConfig& scenario) {
  scenario.validate();
  std::vector<EpisodeResult> eps;
  detail::run_trials(scenario, eps, [&](int t) {
    auto rng = RandomStream::for_trial(scenario.seed, static_cast<std::uint64_t>(t));
    return simulate_episode(rng, scenario);
  });
  return detail::aggregate(eps);
}

/// Relay choice for the ideal-position exploration: among dual-visible
/// satellites, the one closest to the arc point at polar angle `ideal_polar`
/// (receiver frame, azimuth 0, toward the transmitter).
inline EpisodeResult simulate_episode_ideal(RandomStream& rng, const ScenarioConfig& scenario,
                                            double ideal_polar) {
  const auto points = sample_constellation(rng, scenario.geom);
  const double vis = visibility_angle(scenario.geom);
  const double Theta = scenario.theta_sep;
  const double si = std::sin(ideal_polar), ci = std::cos(ideal_polar);
  int best = -1;
  double best_dist = 0.0, best_rx = 0.0, best_tx = 0.0;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const auto& p = points[i];
    if (p.polar > vis) continue;
    const double a_tx = safe_acos(std::sin(p.polar) * std::sin(Theta) * std::cos(p.azimuth) +
                                  std::cos(p.polar) * std::cos(Theta));
    if (a_tx > vis) continue;
    const double a_ideal =
        safe_acos(std::sin(p.polar) * si * std::cos(p.azimuth) + std::cos(p.polar) * ci);
    if (best < 0 || a_ideal < best_dist) {
      best = i;
      best_dist = a_ideal;
      best_rx = p.polar;
      best_tx = a_tx;
    }
  }
  EpisodeResult ep;
  if (best < 0) return ep;
  ep.relay_found = true;
  ep.theta1 = best_rx;
  ep.theta2 = best_tx;
  ep.d_up = chord_distance(best_tx, scenario.geom);
  ep.d_down = chord_distance(best_rx, scenario.geom);
  ep.w2_up = sr_sample(rng, scenario.srp);
  ep.w2_down = sr_sample(rng, scenario.srp);
  ep.snr_up = snr(ep.d_up, ep.w2_up, scenario.uplink);
  ep.snr_down = snr(ep.d_down, ep.w2_down, scenario.downlink);
  ep.tau_up = link_delay(ep.snr_up, scenario.pkt_up());
  ep.tau_down = link_delay(ep.snr_down, scenario.pkt_down());
  ep.tau_total = ep.tau_up + ep.tau_down;
  return ep;
}

inline DelayStats run_ideal_position_campaign(const ScenarioConfig& scenario, double ideal_polar) {
  scenario.validate();
  std::vector<EpisodeResult> eps;
  detail::run_trials(scenario, eps, [&](int t) {
    auto rng = RandomStream::for_trial(scenario.seed, static_cast<std::uint64_t>(t));
    return simulate_episode_ideal(rng, scenario, ideal_polar);
  });
  return detail::aggregate(eps);
}

struct MultihopStats {
  int n_hops = 0;
  double theta_seg = 0.0;      // per-hop station separation, rad
  double segment_chord = 0.0;  // km
  DelayStats totals;           // per-trial end-to-end sums
};

/// Long-distance chain: the ground track splits into min_hops equal chord
/// segments, each an independent ground-satellite-ground unit with a freshly
/// drawn constellation.
inline MultihopStats simulate_multihop(double total_distance_km, const ScenarioConfig& scenario) {
  if (!(total_distance_km > 0.0))
    throw std::domain_error("simulate_multihop: total distance must be positive");
  MultihopStats ms;
  ms.n_hops = min_hops(total_distance_km, scenario.geom);
  ms.segment_chord = total_distance_km / ms.n_hops;
  ms.theta_seg = 2.0 * std::asin(ms.segment_chord / (2.0 * scenario.geom.re_km));
  if (ms.theta_seg > 2.0 * visibility_angle(scenario.geom))
    throw std::runtime_error("simulate_multihop: segment separation exceeds dual visibility");
  ScenarioConfig hop = scenario;
  hop.theta_sep = ms.theta_seg;
  std::vector<EpisodeResult> eps;
  detail::run_trials(hop, eps, [&](int t) {
    auto rng = RandomStream::for_trial(hop.seed, static_cast<std::uint64_t>(t));
    EpisodeResult total;
    total.relay_found = true;
    for (int h = 0; h < ms.n_hops; ++h) {
      const EpisodeResult e = simulate_episode(rng, hop);
      if (!e.relay_found) {
        total = EpisodeResult{};  // any blocked hop voids the trial
        return total;
      }
      total.tau_up += e.tau_up;
      total.tau_down += e.tau_down;
      total.tau_total += e.tau_total;
      total.d_up += e.d_up;
      total.d_down += e.d_down;
    }
    return total;
  });
  ms.totals = detail::aggregate(eps);
  return ms;
}

}  // namespace satrelay
