#pragma once

#include <cmath>
#include <stdexcept>

namespace satrelay {

inline constexpr double kPi = 3.14159265358979323846;

/// Orbital-shell geometry: Earth radius, satellite shell radius, satellite count.
struct ConstellationGeometry {
  double re_km = 6371.0;
  double rs_km = 6871.0;
  int n_sats = 500;

  void validate() const {
    if (!(rs_km > re_km) || !(re_km > 0))
      throw std::domain_error("ConstellationGeometry: require rs_km > re_km > 0");
    if (n_sats < 1)
      throw std::domain_error("ConstellationGeometry: require n_sats >= 1");
  }
};

/// Point in spherical coordinates, polar angle measured from the reference axis.
struct SphericalPoint {
  double polar = 0.0;    // [0, pi]
  double azimuth = 0.0;  // [0, 2*pi)
  double radius_km = 0.0;
};

// arccos with clamping for arguments within 1e-12 of [-1, 1]; domain error beyond.
inline double safe_acos(double x) {
  if (x > 1.0) {
    if (x - 1.0 > 1e-12) throw std::domain_error("safe_acos: argument > 1");
    x = 1.0;
  } else if (x < -1.0) {
    if (-1.0 - x > 1e-12) throw std::domain_error("safe_acos: argument < -1");
    x = -1.0;
  }
  return std::acos(x);
}

/// Straight-line distance (km) between a ground point and a shell point
/// separated by central angle psi.
inline double chord_distance(double psi, const ConstellationGeometry& geom) {
  if (psi < 0.0 || psi > kPi)
    throw std::domain_error("chord_distance: psi outside [0, pi]");
  const double rs = geom.rs_km, re = geom.re_km;
  return std::sqrt(rs * rs + re * re - 2.0 * rs * re * std::cos(psi));
}

/// Inverse of chord_distance on [0, pi].
inline double central_angle_from_chord(double d_km, const ConstellationGeometry& geom) {
  const double rs = geom.rs_km, re = geom.re_km;
  const double lo = rs - re, hi = rs + re;
  if (d_km < lo - 1e-9 || d_km > hi + 1e-9)
    throw std::domain_error("central_angle_from_chord: distance outside [Rs-Re, Rs+Re]");
  return safe_acos((rs * rs + re * re - d_km * d_km) / (2.0 * rs * re));
}

/// Squared ground-to-shell distance (km^2) between a shell point at
/// (theta1, phi1) and a ground point at (theta2, phi2).
inline double dsq_operator(double theta1, double phi1, double theta2, double phi2,
                           const ConstellationGeometry& geom) {
  const double rs = geom.rs_km, re = geom.re_km;
  const double cospsi = std::sin(theta1) * std::sin(theta2) * std::cos(phi1 - phi2) +
                        std::cos(theta1) * std::cos(theta2);
  return re * re + rs * rs - 2.0 * re * rs * cospsi;
}

enum class PsiForm {
  law_of_cosines,  // cos psi = sin(theta) sin(Theta) cos(phi) + cos(theta) cos(Theta)
  doubled_angle    // same, with a leading factor of 2 kept for comparison runs
};

/// Central angle between a shell direction (theta, phi) given in the receiver
/// frame and the transmitter direction at separation Theta.
inline double psi_of(double theta, double phi, double Theta,
                     PsiForm form = PsiForm::law_of_cosines) {
  if (theta < 0.0 || theta > kPi) throw std::domain_error("psi_of: theta outside [0, pi]");
  if (Theta < 0.0 || Theta > kPi) throw std::domain_error("psi_of: Theta outside [0, pi]");
  const double c = std::sin(theta) * std::sin(Theta) * std::cos(phi) +
                   std::cos(theta) * std::cos(Theta);
  const double a = safe_acos(c);
  return form == PsiForm::doubled_angle ? 2.0 * a : a;
}

/// Horizon limit: maximum central angle between a ground station and a
/// satellite it can see.
inline double visibility_angle(const ConstellationGeometry& geom) {
  return std::acos(geom.re_km / geom.rs_km);
}

/// Maximum ground chord between two stations that can share a satellite.
inline double l_max(const ConstellationGeometry& geom) {
  return 2.0 * geom.re_km * std::sin(0.5 * visibility_angle(geom));
}

/// Minimum hop count to cover a total ground distance with l_max segments.
inline int min_hops(double total_ground_distance_km, const ConstellationGeometry& geom) {
  if (!(total_ground_distance_km > 0.0))
    throw std::domain_error("min_hops: total distance must be positive");
  return static_cast<int>(std::ceil(total_ground_distance_km / l_max(geom)));
}

}  // namespace satrelay
