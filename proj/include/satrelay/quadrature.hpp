#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace satrelay {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  double differentiation_step = 1e-5;  // rad, for numeric derivatives

  void validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0))
      throw std::domain_error("QuadratureConfig: tolerances must be positive");
    if (max_subdivisions < 1)
      throw std::domain_error("QuadratureConfig: max_subdivisions >= 1");
  }
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; symmetric).
inline constexpr std::array<double, 8> kGl15X = {
    0.0,
    0.2011940939974345,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601700,
    0.8482065834104272,
    0.9372733924007059,
    0.9879925180204854};
inline constexpr std::array<double, 8> kGl15W = {
    0.2025782419255613,
    0.1984314853271116,
    0.1861610000155622,
    0.1662692058169939,
    0.1395706779261543,
    0.1071592204671719,
    0.0703660474881081,
    0.0307532419961173};

template <class F>
double gl15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = kGl15W[0] * f(c);
  for (int i = 1; i < 8; ++i) {
    const double dx = h * kGl15X[i];
    s += kGl15W[i] * (f(c - dx) + f(c + dx));
  }
  return s * h;
}

template <class F>
double adapt(const F& f, double a, double b, double whole, double tol,
             const QuadratureConfig& cfg, int& budget, int depth) {
  if (budget <= 0)
    throw QuadratureError("adaptive quadrature exceeded max_subdivisions");
  const double c = 0.5 * (a + b);
  const double left = gl15(f, a, c);
  const double right = gl15(f, c, b);
  const double err = std::abs(left + right - whole);
  if (depth > 0 && (err <= tol || err <= cfg.rel_tol * std::abs(left + right)))
    return left + right;
  if (depth > 60) return left + right;  // interval exhausted at double precision
  --budget;
  return adapt(f, a, c, left, 0.5 * tol, cfg, budget, depth + 1) +
         adapt(f, c, b, right, 0.5 * tol, cfg, budget, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Legendre integration of f over [a, b].
template <class F>
double integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {}) {
  if (a == b) return 0.0;
  int budget = cfg.max_subdivisions;
  const double whole = detail::gl15(f, a, b);
  return detail::adapt(f, a, b, whole, std::max(cfg.abs_tol, cfg.rel_tol * std::abs(whole)),
                       cfg, budget, 0);
}

/// Central-difference derivative with step from cfg.
template <class F>
double central_difference(const F& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace satrelay
