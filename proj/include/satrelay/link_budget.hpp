#pragma once

#include <cmath>
#include <stdexcept>

#include "satrelay/geometry.hpp"

namespace satrelay {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

/// Per-direction RF budget, all linear units, SI meters/watts/hertz.
struct LinkBudgetParams {
  double eirp = 1.0;            // transmit power x transmit antenna gain (W)
  double rx_gain = 1.0;         // receive antenna gain
  double wavelength = 1.0;      // m
  double feeder_loss_tx = 1.0;  // >= 1
  double feeder_loss_rx = 1.0;  // >= 1
  double additional_loss = 1.0; // >= 1
  double noise_power = 1.0;     // W
  double bandwidth = 1.0;       // Hz

  void validate() const {
    if (!(eirp > 0) || !(rx_gain > 0) || !(wavelength > 0) || !(noise_power > 0) ||
        !(bandwidth > 0))
      throw std::domain_error("LinkBudgetParams: all fields must be positive");
    if (feeder_loss_tx < 1.0 || feeder_loss_rx < 1.0 || additional_loss < 1.0)
      throw std::domain_error("LinkBudgetParams: linear losses must be >= 1");
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Free-space propagation gain (dimensionless) at distance d, including
/// antenna gains and feeder/additional losses.
inline double propagation_loss(double d_km, const LinkBudgetParams& p) {
  if (!(d_km > 0)) throw std::domain_error("propagation_loss: d must be positive");
  const double d_m = d_km * 1e3;
  const double fourpid = 4.0 * kPi * d_m;
  return p.rx_gain * p.wavelength * p.wavelength /
         (fourpid * fourpid * p.feeder_loss_tx * p.feeder_loss_rx * p.additional_loss);
}

/// Thermal noise power k * B * T.
inline double noise_power(double boltzmann, double bandwidth_hz, double temperature_k) {
  if (!(boltzmann > 0) || !(bandwidth_hz > 0) || !(temperature_k > 0))
    throw std::domain_error("noise_power: inputs must be positive");
  return boltzmann * bandwidth_hz * temperature_k;
}

/// Received linear SNR at distance d with instantaneous fading power.
inline double snr(double d_km, double fading_power, const LinkBudgetParams& p) {
  if (!(d_km > 0)) throw std::domain_error("snr: d must be positive");
  if (fading_power < 0) throw std::domain_error("snr: fading power must be >= 0");
  return p.eirp * propagation_loss(d_km, p) * fading_power / p.noise_power;
}

/// Auxiliary of the uplink SNR density: the fading power needed to hit SNR
/// gamma at unit squared distance, so snr(d, z(gamma) * d_m^2) == gamma.
inline double z_of_gamma(double gamma, const LinkBudgetParams& p) {
  if (gamma < 0) throw std::domain_error("z_of_gamma: gamma must be >= 0");
  const double fourpi = 4.0 * kPi;
  return fourpi * fourpi * p.feeder_loss_tx * p.feeder_loss_rx * p.additional_loss *
         p.noise_power * gamma / (p.eirp * p.rx_gain * p.wavelength * p.wavelength);
}

}  // namespace satrelay
