#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "satrelay/distributions.hpp"
#include "satrelay/geometry.hpp"
#include "satrelay/link_budget.hpp"
#include "satrelay/quadrature.hpp"

namespace satrelay {

struct PacketParams {
  double packet_bits = 0.5e9;  // M
  double bandwidth = 0.5e9;    // B, Hz

  void validate() const {
    if (!(packet_bits > 0) || !(bandwidth > 0))
      throw std::domain_error("PacketParams: packet size and bandwidth must be positive");
  }
};

/// Integration window for the uplink delay expectation. The integrand grows
/// like 1/gamma toward 0 while the SNR density stays positive there, so the
/// untruncated expectation diverges; the window makes it well-posed and the
/// clipped mass is reported. gamma_max <= 0 requests the adaptive
/// (1 - 1e-6)-quantile.
struct DelayIntegrationConfig {
  double gamma_min = 1e-4;  // -40 dB
  double gamma_max = 0.0;   // adaptive
  QuadratureConfig quad{};

  void validate() const {
    if (!(gamma_min > 0)) throw std::domain_error("DelayIntegrationConfig: gamma_min > 0");
    if (gamma_max > 0 && !(gamma_min < gamma_max))
      throw std::domain_error("DelayIntegrationConfig: gamma_min < gamma_max");
  }
};

/// Transmission delay of one link at the given linear SNR.
inline double link_delay(double snr_linear, const PacketParams& pkt) {
  if (snr_linear < 0) throw std::domain_error("link_delay: snr must be >= 0");
  if (snr_linear == 0.0) return std::numeric_limits<double>::infinity();
  return pkt.packet_bits / (pkt.bandwidth * std::log2(1.0 + snr_linear));
}

/// Downlink average delay, plug-in style: the delay formula evaluated at the
/// mean distance and mean fading power. An approximation to E[tau], not the
/// expectation itself.
inline double avg_delay_downlink(const ConstellationGeometry& geom,
                                 const LinkBudgetParams& params,
                                 const ShadowedRicianParams& srp, const PacketParams& pkt) {
  const double dbar = mean_downlink_distance(geom);
  return link_delay(snr(dbar, sr_mean(srp), params), pkt);
}

/// Uplink SNR density with the uplink distance density tabulated once on a
/// fixed composite Gauss grid, so repeated gamma evaluations are cheap.
class UplinkSnrPdf {
 public:
  UplinkSnrPdf(double Theta, const ConstellationGeometry& geom,
               const LinkBudgetParams& params, const ShadowedRicianParams& srp,
               const QuadratureConfig& quad = {}, int panels = 96)
      : srp_(srp), z1_(z_of_gamma(1.0, params)) {
    const Theta2Distribution t2(Theta, geom, quad);
    // restrict the u-range to where the distance density carries mass
    const double total = t2.total_mass();
    double b_lo = 0.0, b_hi = kPi;
    for (double b = 0.0; b < kPi; b += kPi / 4096) {
      if (t2.cdf(b) > 1e-10 * total) { b_lo = std::max(0.0, b - kPi / 4096); break; }
    }
    for (double b = kPi; b > 0.0; b -= kPi / 4096) {
      if (total - t2.cdf(b) > 1e-10 * total) { b_hi = std::min(kPi, b + kPi / 4096); break; }
    }
    const double d_lo = chord_distance(b_lo, geom) * 1e3;  // meters
    const double d_hi = chord_distance(b_hi, geom) * 1e3;
    const double u_lo = d_lo * d_lo, u_hi = d_hi * d_hi;
    static constexpr double gx[2] = {0.3399810435848563, 0.8611363115940526};
    static constexpr double gw[2] = {0.6521451548625461, 0.3478548451374538};
    const double h = (u_hi - u_lo) / panels;
    nodes_.reserve(4 * panels);
    for (int i = 0; i < panels; ++i) {
      const double c = u_lo + (i + 0.5) * h, hh = 0.5 * h;
      for (int j = 0; j < 2; ++j) {
        for (double sgn : {-1.0, 1.0}) {
          const double u = c + sgn * hh * gx[j];
          const double d_km = std::sqrt(u) * 1e-3;
          const double fdup_m = uplink_distance_pdf(d_km, t2) * 1e-3;  // per meter
          nodes_.push_back({u, gw[j] * hh * fdup_m});
        }
      }
    }
  }

  /// Density of the uplink SNR at linear gamma.
  double operator()(double gamma) const {
    if (!(gamma > 0)) return 0.0;
    double acc = 0.0;
    for (const auto& n : nodes_) {
      const double w2 = z1_ * gamma * n.u;
      if (w2 / (2.0 * srp_.b0) > 745.0) continue;
      acc += n.w * 0.5 * std::sqrt(n.u) * sr_pdf(w2, srp_);
    }
    return z1_ * acc;
  }

  /// Probability mass on (a, b], by adaptive quadrature of the density.
  double mass(double a, double b, const QuadratureConfig& quad = {}) const {
    if (!(b > a)) return 0.0;
    return integrate([this](double g) { return (*this)(g); }, a, b, quad);
  }

  /// Smallest gamma with upper tail mass below `tail`.
  double upper_quantile(double tail, double gamma_start,
                        const QuadratureConfig& quad = {}) const {
    double g = gamma_start;
    for (int i = 0; i < 60; ++i) {
      if (mass(g, 16.0 * g, quad) + mass(16.0 * g, 256.0 * g, quad) < tail) return g;
      g *= 2.0;
    }
    throw QuadratureError("UplinkSnrPdf: upper quantile search did not converge");
  }

 private:
  struct Node {
    double u;  // squared uplink distance, m^2
    double w;  // quadrature weight times distance density
  };
  ShadowedRicianParams srp_;
  double z1_;
  std::vector<Node> nodes_;
};

/// One-off evaluation; builds the tabulated density each call. Use
/// UplinkSnrPdf directly when sweeping gamma.
inline double snr_up_pdf(double gamma, double Theta, const ConstellationGeometry& geom,
                         const LinkBudgetParams& params, const ShadowedRicianParams& srp,
                         const QuadratureConfig& quad = {}) {
  return UplinkSnrPdf(Theta, geom, params, srp, quad)(gamma);
}

struct UplinkDelayResult {
  double delay_s = 0.0;        // integral of tau(gamma) * f(gamma) over the window
  double window_mass = 0.0;    // probability inside [gamma_min, gamma_max]
  double mass_below = 0.0;     // probability below gamma_min
  double mass_above = 0.0;     // probability above gamma_max
  double gamma_max = 0.0;      // window top actually used
  bool truncation_warning = false;  // truncated mass exceeded 1e-3

  double truncated_mass() const { return mass_below + mass_above; }
};

inline UplinkDelayResult avg_delay_uplink(const UplinkSnrPdf& f, const PacketParams& pkt,
                                          const DelayIntegrationConfig& cfg = {}) {
  cfg.validate();
  UplinkDelayResult r;
  r.gamma_max = cfg.gamma_max > 0
                    ? cfg.gamma_max
                    : f.upper_quantile(1e-6, std::max(1.0, 16.0 * cfg.gamma_min), cfg.quad);
  // integrate in log-gamma; the window spans several decades
  const double xa = std::log(cfg.gamma_min), xb = std::log(r.gamma_max);
  auto weighted = [&](double x) {
    const double g = std::exp(x);
    return link_delay(g, pkt) * f(g) * g;
  };
  r.delay_s = integrate(weighted, xa, xb, cfg.quad);
  r.window_mass = integrate([&](double x) { const double g = std::exp(x); return f(g) * g; },
                            xa, xb, cfg.quad);
  r.mass_below = f.mass(0.0, cfg.gamma_min, cfg.quad);
  r.mass_above = f.mass(r.gamma_max, 256.0 * r.gamma_max, cfg.quad);
  r.truncation_warning = r.truncated_mass() > 1e-3;
  return r;
}

inline UplinkDelayResult avg_delay_uplink(double Theta, const ConstellationGeometry& geom,
                                          const LinkBudgetParams& params,
                                          const ShadowedRicianParams& srp,
                                          const PacketParams& pkt,
                                          const DelayIntegrationConfig& cfg = {}) {
  return avg_delay_uplink(UplinkSnrPdf(Theta, geom, params, srp, cfg.quad), pkt, cfg);
}

struct TotalDelayResult {
  UplinkDelayResult up;
  double down_s = 0.0;
  double total_s = 0.0;
};

inline TotalDelayResult total_delay_analytic(double Theta, const ConstellationGeometry& geom,
                                             const LinkBudgetParams& up,
                                             const LinkBudgetParams& down,
                                             const ShadowedRicianParams& srp,
                                             const PacketParams& pkt_up,
                                             const PacketParams& pkt_down,
                                             const DelayIntegrationConfig& cfg = {}) {
  TotalDelayResult r;
  r.up = avg_delay_uplink(Theta, geom, up, srp, pkt_up, cfg);
  r.down_s = avg_delay_downlink(geom, down, srp, pkt_down);
  r.total_s = r.up.delay_s + r.down_s;
  return r;
}

/// Golden-section minimum of f on [a, b].
template <class F>
double golden_section_minimize(const F& f, double a, double b, double eps = 1e-10,
                               int max_iter = 200) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > eps; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Deterministic relay-position optimizer: arc position t in [0, Theta]
/// measured from the receiver, mean-fading delays as the objective. Grid scan
/// then golden-section refinement; ties break toward the receiver.
inline double optimal_relay_angle(double Theta, const ConstellationGeometry& geom,
                                  const LinkBudgetParams& params_up,
                                  const LinkBudgetParams& params_down,
                                  const ShadowedRicianParams& srp, double packet_bits,
                                  int grid_points = 512) {
  if (!(Theta > 0.0) || !(Theta < kPi))
    throw std::domain_error("optimal_relay_angle: Theta must be in (0, pi)");
  const double vis = visibility_angle(geom);
  const double lo = std::max(0.0, Theta - vis);
  const double hi = std::min(Theta, vis);
  if (lo > hi)
    throw std::runtime_error("optimal_relay_angle: no relay position visible to both stations");
  const double wbar = sr_mean(srp);
  const PacketParams pkt_up{packet_bits, params_up.bandwidth};
  const PacketParams pkt_down{packet_bits, params_down.bandwidth};
  auto objective = [&](double t) {
    return link_delay(snr(chord_distance(Theta - t, geom), wbar, params_up), pkt_up) +
           link_delay(snr(chord_distance(t, geom), wbar, params_down), pkt_down);
  };
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid_points; ++i) {
    const double t = lo + (hi - lo) * i / grid_points;
    const double v = objective(t);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = (hi - lo) / grid_points;
  const double a = std::max(lo, lo + (best - 1) * step);
  const double b = std::min(hi, lo + (best + 1) * step);
  return golden_section_minimize(objective, a, b);
}

/// Diagnostic: the true expectation E[tau_down ; W^2 >= w2_floor] by double
/// quadrature over the nearest-angle and fading laws. The floor is required:
/// the fading density is positive at zero, so the unrestricted expectation
/// diverges logarithmically.
inline double mean_downlink_delay_expectation(const ConstellationGeometry& geom,
                                              const LinkBudgetParams& params,
                                              const ShadowedRicianParams& srp,
                                              const PacketParams& pkt, double w2_floor,
                                              double w2_ceil = 20.0,
                                              const QuadratureConfig& quad = {}) {
  auto inner = [&](double theta) {
    const double d = chord_distance(theta, geom);
    // integrate in log w^2: the delay grows like 1/w^2 toward the floor, so the
    // log substitution keeps the integrand flat there
    auto g = [&](double x) {
      const double w2 = std::exp(x);
      return link_delay(snr(d, w2, params), pkt) * sr_pdf(w2, srp) * w2;
    };
    return integrate(g, std::log(w2_floor), std::log(w2_ceil), quad) * theta1_pdf(theta, geom);
  };
  // the nearest-satellite angle has essentially all its mass near zero; cut the
  // outer range where the remaining tail mass is far below the tolerance
  double theta_hi = kPi;
  for (double t = kPi / 1024; t < kPi; t += kPi / 1024) {
    if (theta1_cdf(t, geom) > 1.0 - 1e-13) {
      theta_hi = t;
      break;
    }
  }
  return integrate(inner, 0.0, theta_hi, quad);
}

}  // namespace satrelay
