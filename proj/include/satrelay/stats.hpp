#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace satrelay {

namespace detail {

// regularized lower incomplete gamma P(a, x); series + continued fraction
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(a, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

}  // namespace detail

/// One-sample Kolmogorov-Smirnov statistic of `samples` against the CDF `F`.
/// Samples need not be pre-sorted.
template <class Cdf>
double ks_statistic(std::vector<double> samples, const Cdf& F) {
  if (samples.empty()) throw std::domain_error("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = F(samples[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

/// Pearson chi-square goodness of fit. `observed` are bin counts, `expected`
/// the matching expected counts; bins with expected < min_expected merge into
/// their right neighbor. Returns the p-value.
inline double chi2_gof_pvalue(const std::vector<double>& observed,
                              const std::vector<double>& expected,
                              double min_expected = 5.0) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::domain_error("chi2_gof_pvalue: size mismatch");
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 && !exp.empty()) {  // fold the remainder into the last bin
    obs.back() += o_acc;
    exp.back() += e_acc;
  }
  if (exp.size() < 2) throw std::domain_error("chi2_gof_pvalue: too few usable bins");
  double chi2 = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    const double diff = obs[i] - exp[i];
    chi2 += diff * diff / exp[i];
  }
  const double dof = static_cast<double>(exp.size() - 1);
  return 1.0 - detail::gamma_p(0.5 * dof, 0.5 * chi2);
}

struct MeanCi {
  double mean = 0.0;
  double halfwidth95 = 0.0;
  double lo() const { return mean - halfwidth95; }
  double hi() const { return mean + halfwidth95; }
};

inline MeanCi mean_ci95(const std::vector<double>& xs) {
  if (xs.empty()) throw std::domain_error("mean_ci95: empty sample");
  const double n = static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += x;
  const double mean = s / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, 1.959963984540054 * std::sqrt(var / n)};
}

}  // namespace satrelay
