// Acceptance gate: eight go/no-go checks against the analytic layer, the
// simulator, and the CLI binary. One line per criterion; exit status is the
// number of failed criteria.
//
// Criterion 3a (the downlink plug-in vs the simulator mean) is known to fail:
// the fading density is positive at zero, so the true mean downlink delay
// diverges and the simulator estimate exceeds the plug-in by a factor of ~3
// that grows with trial count. The check is kept, red, as a measurement of
// that gap rather than being tuned away. See README, "Known limitations".

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "satrelay/satrelay.hpp"

namespace fs = std::filesystem;
using namespace satrelay;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  criterion-%d  %-24s %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

ScenarioConfig defaults() {
  std::istringstream empty;
  return parse_config(empty, "<defaults>");
}

// ---- criterion 1 + 3: one shared default campaign ----

void criteria_1_and_3(const ScenarioConfig& cfg) {
  const auto t0 = Clock::now();
  const DelayStats mc = run_campaign(cfg);
  const Theta2Distribution t2(cfg.theta_sep, cfg.geom, cfg.quad);
  const double ks1 = ks_statistic(mc.theta1, [&](double t) { return theta1_cdf(t, cfg.geom); });
  const double ksdd =
      ks_statistic(mc.d_down, [&](double d) { return downlink_distance_cdf(d, cfg.geom); });
  const double ksdu = ks_statistic(mc.d_up, [&](double d) { return uplink_distance_cdf(d, t2); });
  const double ks2 = ks_statistic(mc.theta2, [&](double b) { return t2.cdf(b); });
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass1 = ks1 < 0.01 && ksdd < 0.01 && ksdu < 0.01 && ks2 < 0.01 && secs < 60.0;
  report(1, "distribution-fidelity", pass1,
         fmt("ks: theta1=%.4f d_down=%.4f d_up=%.4f theta2=%.4f (< 0.01), runtime %.1fs (< 60)",
             ks1, ksdd, ksdu, ks2, secs));

  // 3a: downlink plug-in vs the uncensored simulator mean
  const double plugin = avg_delay_downlink(cfg.geom, cfg.downlink, cfg.srp, cfg.pkt_down());
  const double rel_down = std::abs(plugin - mc.mean_down) / mc.mean_down;

  // 3b: windowed uplink expectation vs the identically censored simulator mean
  const UplinkSnrPdf fsnr(cfg.theta_sep, cfg.geom, cfg.uplink, cfg.srp, cfg.quad);
  const auto up = avg_delay_uplink(fsnr, cfg.pkt_up(), cfg.delay_window);
  const double tau_hi = link_delay(cfg.delay_window.gamma_min, cfg.pkt_up());
  const double tau_lo = link_delay(up.gamma_max, cfg.pkt_up());
  double censored = 0.0;
  for (double t : mc.tau_up)
    if (t >= tau_lo && t <= tau_hi) censored += t;
  censored /= static_cast<double>(mc.tau_up.size());
  const double rel_up = std::abs(up.delay_s - censored) / censored;

  const bool pass3 = rel_down <= 0.10 && rel_up <= 0.05 && up.truncated_mass() < 1e-3;
  report(3, "delay-consistency", pass3,
         fmt("downlink plug-in %.1fs vs mc %.1fs, rel err %.2f (<= 0.10, diverging estimand); "
             "uplink windowed %.3fs vs censored mc %.3fs, rel err %.3f (<= 0.05); "
             "truncated mass %.1e (< 1e-3)",
             plugin, mc.mean_down, rel_down, up.delay_s, censored, rel_up, up.truncated_mass()));
}

// ---- criterion 2 ----

void criterion_2(const ScenarioConfig& cfg) {
  const auto& srp = cfg.srp;
  const double norm =
      integrate([&](double t) { return sr_pdf(t, srp); }, 0.0, 40.0, cfg.quad);
  const double mean =
      integrate([&](double t) { return t * sr_pdf(t, srp); }, 0.0, 60.0, cfg.quad);
  const double h = 1e-4;
  const double mgf_mean =
      -(-3.0 * sr_mgf(0.0, srp) + 4.0 * sr_mgf(h, srp) - sr_mgf(2 * h, srp)) / (2 * h);

  RandomStream rng(splitmix64(cfg.seed ^ 0x5eedfade5eedfadeULL));
  const int n = 100000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = sr_sample(rng, srp);
  std::sort(draws.begin(), draws.end());
  std::vector<double> cum(2049, 0.0);
  const double tmax = 25.0;
  for (std::size_t i = 1; i < cum.size(); ++i)
    cum[i] = cum[i - 1] + integrate([&](double t) { return sr_pdf(t, srp); },
                                    tmax * (i - 1) / 2048.0, tmax * i / 2048.0, cfg.quad);
  const double ks = ks_statistic(draws, [&](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= tmax) return cum.back();
    const double x = t / tmax * 2048.0;
    const auto i = static_cast<std::size_t>(x);
    return cum[i] + (x - i) * (cum[i + 1] - cum[i]);
  });

  const bool pass = std::abs(norm - 1.0) <= 1e-6 && std::abs(mean - 1.606) <= 1e-4 &&
                    ks < 0.005 && std::abs(mgf_mean - 1.606) <= 1e-6;
  report(2, "sr-fading-suite", pass,
         fmt("norm err %.1e (<= 1e-6), mean %.6f (1.606 +- 1e-4), sampler ks %.4f (< 0.005), "
             "mgf mean err %.1e (<= 1e-6)",
             std::abs(norm - 1.0), mean, ks, std::abs(mgf_mean - 1.606)));
}

// ---- criterion 4 ----

void criterion_4(const ScenarioConfig& cfg) {
  // oracle values from an independent 50-digit evaluation of the closed forms
  const double lm = l_max(cfg.geom);
  const double vis = visibility_angle(cfg.geom);
  const int hops = min_hops(15000.0, cfg.geom);
  const bool pass = std::abs(lm - 2430.5112231185310) <= 0.1 && hops == 7 &&
                    std::abs(vis - 0.38384819529001631) <= 1e-5;
  report(4, "geometry-constants", pass,
         fmt("l_max %.4f km (2430.5112 +- 0.1), min_hops(15000) = %d (= 7), "
             "visibility %.7f rad (0.3838482 +- 1e-5)",
             lm, hops, vis));
}

// ---- criterion 5 ----

void criterion_5(const ScenarioConfig& base) {
  struct Cell {
    double mean, ci;
  };
  auto run_cell = [&](int nsat, double alt) {
    ScenarioConfig c = base;
    c.geom.n_sats = nsat;
    c.geom.rs_km = c.geom.re_km + alt;
    const auto st = run_campaign(c);
    return Cell{st.mean_total, st.ci95_total};
  };
  const Cell n200 = run_cell(200, 500.0);
  const Cell n500 = run_cell(500, 500.0);
  const Cell n1000 = run_cell(1000, 500.0);
  const Cell a1000 = run_cell(500, 1000.0);
  const Cell a1500 = run_cell(500, 1500.0);
  auto above = [](const Cell& hi, const Cell& lo) {
    return hi.mean > lo.mean && hi.mean - hi.ci > lo.mean + lo.ci;
  };
  const bool pass = above(n200, n500) && above(n500, n1000) && above(a1000, n500) &&
                    above(a1500, a1000);
  report(5, "trend-reproduction", pass,
         fmt("mean total delay [s]: nsat 200/500/1000 -> %.0f/%.0f/%.0f (decreasing), "
             "altitude 500/1000/1500 km -> %.0f/%.0f/%.0f (increasing); all CI-separated",
             n200.mean, n500.mean, n1000.mean, n500.mean, a1000.mean, a1500.mean));
}

// ---- criterion 6 ----

void criterion_6(const ScenarioConfig& base) {
  ScenarioConfig cfg = base;
  cfg.n_trials = 200;  // the argmin column is analytic; the simulator columns are garnish
  const int steps = 32;
  std::vector<double> grid(steps + 1);
  for (int i = 0; i <= steps; ++i) grid[i] = cfg.theta_sep * i / steps;
  auto argmin_of = [&](const ScenarioConfig& c) {
    const CsvTable t = relay_sweep(c, grid);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      if (t.rows[i].back() == "1") return static_cast<int>(i);
    return -1;
  };
  const int asym = argmin_of(cfg);
  ScenarioConfig sym = cfg;
  sym.downlink = sym.uplink;
  const int symm = argmin_of(sym);
  const bool pass = asym >= 0 && asym <= steps / 5 && std::abs(symm - steps / 2) <= 1;
  report(6, "optimality-reproduction", pass,
         fmt("asymmetric argmin at grid index %d of %d (receiver-side 20%%), "
             "symmetric argmin at %d (center %d +- 1)",
             asym, steps, symm, steps / 2));
}

// ---- criterion 7 ----

std::string run_cli_csv(const std::string& args, const fs::path& dir, const std::string& csv) {
  fs::create_directories(dir);
  const std::string cmd = std::string("\"") + SATRELAY_CLI_PATH + "\" " + args + " --out " +
                          dir.string() + " > " + (dir / "log.txt").string() + " 2>&1";
  if (std::system(cmd.c_str()) != 0) return "<exec-failed>";
  std::ifstream in(dir / csv, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_7(const ScenarioConfig& base) {
  // in-process: worker count must not leak into the table
  ScenarioConfig a = base;
  a.n_trials = 5000;
  a.workers = 1;
  ScenarioConfig b = a;
  b.workers = 3;
  const std::string csv_a = sweep_nsat(a, {200, 500}, {500.0}).to_string();
  const std::string csv_b = sweep_nsat(b, {200, 500}, {500.0}).to_string();

  // end to end: the shipped binary, re-run and with a different worker count
  const fs::path td = fs::temp_directory_path() / ("satrelay_accept_" + std::to_string(::getpid()));
  fs::remove_all(td);
  const std::string args = "sweep-nsat --nsats 200,500 --altitudes-km 500 --trials 3000 --seed 11";
  const std::string r1 = run_cli_csv(args + " --workers 1", td / "r1", "sweep_nsat.csv");
  const std::string r2 = run_cli_csv(args + " --workers 1", td / "r2", "sweep_nsat.csv");
  const std::string r4 = run_cli_csv(args + " --workers 4", td / "r4", "sweep_nsat.csv");
  fs::remove_all(td);

  const bool pass = csv_a == csv_b && !r1.empty() && r1 != "<exec-failed>" && r1 == r2 && r1 == r4;
  report(7, "determinism", pass,
         fmt("in-process workers 1 vs 3: %s; cli rerun: %s; cli workers 1 vs 4: %s",
             csv_a == csv_b ? "identical" : "DIFFER", r1 == r2 ? "identical" : "DIFFER",
             r1 == r4 ? "identical" : "DIFFER"));
}

// ---- criterion 8 ----

struct LawCheck {
  bool monotone = true, boundaries = true, pdf_ok = true, derivative = true;
  bool all() const { return monotone && boundaries && pdf_ok && derivative; }
};

template <class Cdf, class Pdf>
LawCheck check_law(const Cdf& cdf, const Pdf& pdf, double lo, double hi, int grid, double h,
                   double norm, double norm_tol) {
  LawCheck r;
  double prev = -1e-300, peak = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = lo + (hi - lo) * i / grid;
    const double f = cdf(x);
    if (f < prev - 1e-12) r.monotone = false;
    prev = f;
    const double p = pdf(x);
    if (!(p >= 0.0)) r.pdf_ok = false;
    peak = std::max(peak, p);
  }
  if (std::abs(cdf(lo)) > 1e-9 || std::abs(cdf(hi) - 1.0) > 1e-3) r.boundaries = false;
  if (std::abs(norm - 1.0) > norm_tol) r.pdf_ok = false;
  for (int i = 1; i < 25; ++i) {
    const double x = lo + (hi - lo) * i / 25.0;
    const double p = pdf(x);
    if (p < 1e-6 * peak) continue;  // interior points only, where the density is resolved
    const double fd = (-cdf(x + 2 * h) + 8.0 * cdf(x + h) - 8.0 * cdf(x - h) + cdf(x - 2 * h)) /
                      (12.0 * h);
    if (std::abs(fd - p) > 1e-5 * std::max(p, 1.0)) r.derivative = false;
  }
  return r;
}

void criterion_8(const ScenarioConfig& cfg) {
  const auto& geom = cfg.geom;
  const double d_lo = geom.rs_km - geom.re_km, d_hi = geom.rs_km + geom.re_km;

  const double n1 = integrate([&](double t) { return theta1_pdf(t, geom); }, 0.0, kPi, cfg.quad);
  const LawCheck c1 = check_law([&](double t) { return theta1_cdf(t, geom); },
                                [&](double t) { return theta1_pdf(t, geom); }, 0.0, kPi, 1000,
                                1e-6, n1, 1e-6);

  const double n2 = integrate([&](double d) { return downlink_distance_pdf(d, geom); }, d_lo,
                              d_hi, cfg.quad);
  const LawCheck c2 = check_law([&](double d) { return downlink_distance_cdf(d, geom); },
                                [&](double d) { return downlink_distance_pdf(d, geom); }, d_lo,
                                d_hi, 1000, 1e-3, n2, 1e-6);

  // theta2 and the uplink distance: use the direct (non-tabulated) laws so the
  // finite-difference check measures the law, not the interpolation grid
  const double support_hi = cfg.theta_sep + visibility_angle(geom);
  const double n3 = integrate([&](double b) { return theta2_pdf(b, cfg.theta_sep, geom); }, 0.0,
                              support_hi, cfg.quad);
  const LawCheck c3 =
      check_law([&](double b) { return theta2_cdf(b, cfg.theta_sep, geom, cfg.quad); },
                [&](double b) { return theta2_pdf(b, cfg.theta_sep, geom); }, 0.0, support_hi,
                1000, 1e-3, n3, 1e-6);

  const double du_hi = chord_distance(std::min(kPi, support_hi), geom);
  const double n4 = integrate(
      [&](double d) { return uplink_distance_pdf(d, cfg.theta_sep, geom, cfg.quad); }, d_lo,
      du_hi, cfg.quad);
  const LawCheck c4 =
      check_law([&](double d) { return uplink_distance_cdf(d, cfg.theta_sep, geom, cfg.quad); },
                [&](double d) { return uplink_distance_pdf(d, cfg.theta_sep, geom, cfg.quad); },
                d_lo, du_hi, 1000, 1e-1, n4, 1e-6);

  RandomStream rng(4242);
  bool z_ok = true;
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.uniform(500.0, 13000.0);
    const double g = std::pow(10.0, rng.uniform(-4.0, 1.0));
    const double d_m = d * 1000.0;
    if (std::abs(snr(d, z_of_gamma(g, cfg.uplink) * d_m * d_m, cfg.uplink) - g) > 1e-10 * g)
      z_ok = false;
  }

  const bool pass = c1.all() && c2.all() && c3.all() && c4.all() && z_ok;
  report(8, "structural-suite", pass,
         fmt("laws ok: theta1=%d d_down=%d theta2=%d d_up=%d (monotone/boundary/norm/derivative), "
             "snr-z identity on 1000 pairs: %s",
             static_cast<int>(c1.all()), static_cast<int>(c2.all()), static_cast<int>(c3.all()),
             static_cast<int>(c4.all()), z_ok ? "ok" : "FAILED"));
}

}  // namespace

int main() {
  const ScenarioConfig cfg = defaults();
  std::printf("acceptance gate: reference defaults, seed %llu, %d trials, theta = %.3f rad\n",
              static_cast<unsigned long long>(cfg.seed), cfg.n_trials, cfg.theta_sep);
  criteria_1_and_3(cfg);
  criterion_2(cfg);
  criterion_4(cfg);
  criterion_5(cfg);
  criterion_6(cfg);
  criterion_7(cfg);
  criterion_8(cfg);
  if (g_failures)
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  else
    std::printf("acceptance: all criteria passed\n");
  return g_failures;
}
