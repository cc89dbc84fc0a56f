#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "satrelay/geometry.hpp"
#include "satrelay/quadrature.hpp"
#include "satrelay/rng.hpp"

namespace satrelay {

/// Shadowed-Rician fading-power parameters and series truncation policy.
struct ShadowedRicianParams {
  double m = 19.4;       // Nakagami shadowing parameter
  double b0 = 0.158;     // half average scatter power
  double omega = 1.29;   // average line-of-sight power
  double series_eps = 1e-12;
  int series_max_terms = 2000;

  void validate() const {
    if (!(m > 0) || !(b0 > 0) || !(omega >= 0))
      throw std::domain_error("ShadowedRicianParams: require m > 0, b0 > 0, omega >= 0");
    if (!(series_eps > 0) || series_max_terms < 1)
      throw std::domain_error("ShadowedRicianParams: invalid truncation policy");
  }
};

// ---- nearest-satellite central angle (receiver side) ----

/// Density of the central angle between the receiver and its nearest satellite.
inline double theta1_pdf(double theta, const ConstellationGeometry& geom) {
  if (theta < 0.0 || theta > kPi) return 0.0;
  const double n = geom.n_sats;
  return 0.5 * n * std::sin(theta) * std::pow(0.5 * (1.0 + std::cos(theta)), n - 1.0);
}

inline double theta1_cdf(double theta, const ConstellationGeometry& geom) {
  if (theta <= 0.0) return 0.0;
  if (theta >= kPi) return 1.0;
  return 1.0 - std::pow(0.5 * (1.0 + std::cos(theta)), static_cast<double>(geom.n_sats));
}

/// Mean nearest-satellite central angle, pi times a Wallis-type product.
inline double mean_theta1(const ConstellationGeometry& geom) {
  const int n = geom.n_sats;
  double prod = 1.0;
  for (int i = 0; i < n; ++i)
    prod *= static_cast<double>(2 * n - 2 * i - 1) / static_cast<double>(2 * n - 2 * i);
  return kPi * prod;
}

// ---- downlink (receiver-to-relay) distance ----

inline double downlink_distance_pdf(double d0, const ConstellationGeometry& geom) {
  const double lo = geom.rs_km - geom.re_km, hi = geom.rs_km + geom.re_km;
  if (d0 < lo || d0 > hi) return 0.0;
  const double n = geom.n_sats;
  const double cap = (d0 * d0 - lo * lo) / (4.0 * geom.re_km * geom.rs_km);
  return n * std::pow(1.0 - cap, n - 1.0) * d0 / (2.0 * geom.re_km * geom.rs_km);
}

inline double downlink_distance_cdf(double d0, const ConstellationGeometry& geom) {
  const double lo = geom.rs_km - geom.re_km, hi = geom.rs_km + geom.re_km;
  if (d0 <= lo) return 0.0;
  if (d0 >= hi) return 1.0;
  const double cap = (d0 * d0 - lo * lo) / (4.0 * geom.re_km * geom.rs_km);
  return 1.0 - std::pow(1.0 - cap, static_cast<double>(geom.n_sats));
}

/// Plug-in mean downlink distance: chord at the mean central angle.
/// This is not E[d_down]; the gap is a Jensen-style approximation.
inline double mean_downlink_distance(const ConstellationGeometry& geom) {
  return chord_distance(mean_theta1(geom), geom);
}

// ---- relay central angle seen from the transmitter ----

namespace detail {

// theta1 ring density divided by sin(psi), with the analytic psi -> 0 / pi limit.
inline double ring_weight(double psi, const ConstellationGeometry& geom) {
  if (psi < 0.0 || psi > kPi) return 0.0;
  const double s = std::sin(psi);
  const double n = geom.n_sats;
  if (s < 1e-9) return 0.5 * n * std::pow(0.5 * (1.0 + std::cos(psi)), n - 1.0);
  return theta1_pdf(psi, geom) / s;
}

}  // namespace detail

/// Density of the relay's central angle from the transmitter, given the
/// nearest-to-receiver selection: single azimuthal integral of the cap-area
/// re-weighting of the theta1 ring density.
inline double theta2_pdf(double beta, double Theta, const ConstellationGeometry& geom,
                         const QuadratureConfig& quad = {},
                         PsiForm form = PsiForm::law_of_cosines) {
  if (beta <= 0.0 || beta >= kPi) return 0.0;
  const double sb = std::sin(beta);
  auto integrand = [&](double phi) {
    return detail::ring_weight(psi_of(beta, phi, Theta, form), geom);
  };
  // integrand is symmetric in phi about 0
  return 2.0 * integrate(integrand, 0.0, kPi, quad) * sb / (2.0 * kPi);
}

inline double theta2_cdf(double beta, double Theta, const ConstellationGeometry& geom,
                         const QuadratureConfig& quad = {},
                         PsiForm form = PsiForm::law_of_cosines) {
  if (beta <= 0.0) return 0.0;
  auto pdf = [&](double b) { return theta2_pdf(b, Theta, geom, quad, form); };
  const double v = integrate(pdf, 0.0, std::min(beta, kPi), quad);
  return std::clamp(v, 0.0, 1.0);
}

/// Tabulated theta2 distribution on a uniform beta grid. Builds the azimuthal
/// integrals once; cdf/pdf lookups interpolate. Used wherever the theta2 law
/// is evaluated many times (uplink distance/SNR densities, KS grids).
class Theta2Distribution {
 public:
  Theta2Distribution(double Theta, const ConstellationGeometry& geom,
                     const QuadratureConfig& quad = {}, int grid_n = 2048,
                     PsiForm form = PsiForm::law_of_cosines)
      : geom_(geom), grid_(grid_n + 1), pdf_(grid_n + 1), cdf_(grid_n + 1) {
    if (grid_n < 8) throw std::domain_error("Theta2Distribution: grid too coarse");
    const double h = kPi / grid_n;
    for (int i = 0; i <= grid_n; ++i) {
      grid_[i] = i * h;
      pdf_[i] = theta2_pdf(grid_[i], Theta, geom, quad, form);
    }
    // per-segment 4-point Gauss-Legendre of the pdf
    static constexpr double gx[2] = {0.3399810435848563, 0.8611363115940526};
    static constexpr double gw[2] = {0.6521451548625461, 0.3478548451374538};
    cdf_[0] = 0.0;
    for (int i = 0; i < grid_n; ++i) {
      const double c = grid_[i] + 0.5 * h, hh = 0.5 * h;
      double seg = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double dx = hh * gx[j];
        seg += gw[j] * (theta2_pdf(c - dx, Theta, geom, quad, form) +
                        theta2_pdf(c + dx, Theta, geom, quad, form));
      }
      cdf_[i + 1] = cdf_[i] + seg * hh;
    }
  }

  double total_mass() const { return cdf_.back(); }

  double cdf(double beta) const {
    if (beta <= 0.0) return 0.0;
    if (beta >= kPi) return cdf_.back();
    const double h = kPi / (grid_.size() - 1);
    const auto i = static_cast<std::size_t>(beta / h);
    const double t = (beta - grid_[i]) / h;
    return cdf_[i] + t * (cdf_[i + 1] - cdf_[i]);
  }

  double pdf(double beta) const {
    if (beta <= 0.0 || beta >= kPi) return 0.0;
    const double h = kPi / (grid_.size() - 1);
    const auto i = static_cast<std::size_t>(beta / h);
    const double t = (beta - grid_[i]) / h;
    return pdf_[i] + t * (pdf_[i + 1] - pdf_[i]);
  }

  const ConstellationGeometry& geom() const { return geom_; }

 private:
  ConstellationGeometry geom_;
  std::vector<double> grid_, pdf_, cdf_;
};

// ---- uplink (transmitter-to-relay) distance ----

/// CDF by pure monotone substitution of the chord/angle bijection into the
/// theta2 CDF; no Jacobian enters the CDF.
inline double uplink_distance_cdf(double d0, double Theta, const ConstellationGeometry& geom,
                                  const QuadratureConfig& quad = {}) {
  const double lo = geom.rs_km - geom.re_km, hi = geom.rs_km + geom.re_km;
  if (d0 <= lo) return 0.0;
  if (d0 >= hi) return 1.0;
  return theta2_cdf(central_angle_from_chord(d0, geom), Theta, geom, quad);
}

/// PDF: theta2 density times the chord Jacobian d(theta)/d(d0) = d0/(Rs Re sin(theta)).
inline double uplink_distance_pdf(double d0, double Theta, const ConstellationGeometry& geom,
                                  const QuadratureConfig& quad = {}) {
  const double lo = geom.rs_km - geom.re_km, hi = geom.rs_km + geom.re_km;
  if (d0 <= lo || d0 >= hi) return 0.0;
  const double th = central_angle_from_chord(d0, geom);
  const double jac = d0 / (geom.rs_km * geom.re_km * std::sin(th));
  return theta2_pdf(th, Theta, geom, quad) * jac;
}

inline double uplink_distance_cdf(double d0, const Theta2Distribution& dist) {
  const auto& geom = dist.geom();
  const double lo = geom.rs_km - geom.re_km, hi = geom.rs_km + geom.re_km;
  if (d0 <= lo) return 0.0;
  if (d0 >= hi) return 1.0;
  return dist.cdf(central_angle_from_chord(d0, geom));
}

inline double uplink_distance_pdf(double d0, const Theta2Distribution& dist) {
  const auto& geom = dist.geom();
  const double lo = geom.rs_km - geom.re_km, hi = geom.rs_km + geom.re_km;
  if (d0 <= lo || d0 >= hi) return 0.0;
  const double th = central_angle_from_chord(d0, geom);
  return dist.pdf(th) * d0 / (geom.rs_km * geom.re_km * std::sin(th));
}

// ---- shadowed-Rician fading power ----

/// Series-evaluated fading-power density. Terms use the ratio recurrence
/// t_{n+1}/t_n = (m+n) x / (n+1)^2; no factorials or Pochhammer values are
/// formed explicitly.
inline double sr_pdf(double t, const ShadowedRicianParams& p) {
  if (t < 0.0) return 0.0;
  const double k2b = 2.0 * p.b0;
  if (t / k2b > 745.0) return 0.0;  // exp factor underflows
  const double denom = k2b * p.m + p.omega;
  const double c = std::pow(k2b * p.m / denom, p.m) / k2b;
  const double x = p.omega * t / (k2b * denom);
  double term = 1.0, sum = 1.0;
  int n = 0;
  for (; n < p.series_max_terms; ++n) {
    term *= (p.m + n) * x / ((n + 1.0) * (n + 1.0));
    sum += term;
    if (term <= p.series_eps * sum) break;
  }
  if (n == p.series_max_terms)
    throw std::runtime_error("sr_pdf: series truncation failed to converge");
  return c * std::exp(-t / k2b) * sum;
}

/// Laplace-domain moment-generating function of the fading power.
inline double sr_mgf(double sigma, const ShadowedRicianParams& p) {
  if (sigma < 0.0) throw std::domain_error("sr_mgf: sigma must be >= 0");
  const double k2b = 2.0 * p.b0;
  const double num = std::pow(k2b * p.m, p.m) * std::pow(1.0 + k2b * sigma, p.m - 1.0);
  const double den = std::pow((k2b * p.m + p.omega) * (1.0 + k2b * sigma) - p.omega, p.m);
  return num / den;
}

inline double sr_mean(const ShadowedRicianParams& p) { return p.omega + 2.0 * p.b0; }

/// Composition sampler: Gamma-shadowed line-of-sight power, then Rician power
/// around it with per-component scatter variance b0.
inline double sr_sample(RandomStream& rng, const ShadowedRicianParams& p) {
  const double los = p.omega > 0.0 ? rng.gamma(p.m, p.omega / p.m) : 0.0;
  const double sb = std::sqrt(p.b0);
  const double x = std::sqrt(los) + sb * rng.normal();
  const double y = sb * rng.normal();
  return x * x + y * y;
}

}  // namespace satrelay
