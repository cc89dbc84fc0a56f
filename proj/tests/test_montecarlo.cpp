#include <doctest.h>

#include <cmath>
#include <vector>

#include "satrelay/config.hpp"
#include "satrelay/montecarlo.hpp"
#include "satrelay/stats.hpp"

using namespace satrelay;

namespace {

ScenarioConfig defaults() {
  std::istringstream empty;
  auto cfg = parse_config(empty, "<defaults>");
  cfg.workers = 1;
  return cfg;
}

}  // namespace

TEST_CASE("sample_constellation: cap counts, centroid, nearest-angle law") {
  const auto cfg = defaults();
  RandomStream rng(31);
  const int trials = 2000;  // x 500 satellites = 1e6 points
  const double theta0 = 0.6;
  const double p_cap = (1.0 - std::cos(theta0)) / 2.0;
  long in_cap = 0;
  double cx = 0, cy = 0, cz = 0;
  std::vector<double> nearest;
  nearest.reserve(trials);
  long total = 0;
  for (int t = 0; t < trials; ++t) {
    const auto pts = sample_constellation(rng, cfg.geom);
    REQUIRE(pts.size() == 500);
    double best = kPi;
    for (const auto& p : pts) {
      ++total;
      if (p.polar <= theta0) ++in_cap;
      cx += std::sin(p.polar) * std::cos(p.azimuth);
      cy += std::sin(p.polar) * std::sin(p.azimuth);
      cz += std::cos(p.polar);
      best = std::min(best, p.polar);
      CHECK(p.radius_km == cfg.geom.rs_km);
    }
    nearest.push_back(best);
  }
  const double n = static_cast<double>(total);
  const double se_cap = std::sqrt(p_cap * (1.0 - p_cap) / n);
  CHECK(std::abs(in_cap / n - p_cap) < 4.0 * se_cap);
  // component SE: sqrt(E[x^2]/n) with E[x^2] = 1/3 for a uniform unit sphere
  const double se_c = std::sqrt(1.0 / 3.0 / n);
  CHECK(std::abs(cx / n) < 4.0 * se_c);
  CHECK(std::abs(cy / n) < 4.0 * se_c);
  CHECK(std::abs(cz / n) < 4.0 * se_c);

  std::sort(nearest.begin(), nearest.end());
  const double ks = ks_statistic(nearest, [&](double t) { return theta1_cdf(t, cfg.geom); });
  CHECK(ks < 1.36 / std::sqrt(static_cast<double>(trials)) * 1.6);
}

TEST_CASE("select_relay handles hand-built constellations") {
  auto cfg = defaults();
  cfg.theta_sep = 0.2;
  const double vis = visibility_angle(cfg.geom);

  // one satellite right at the receiver zenith
  std::vector<SphericalPoint> one = {{0.0, 0.0, cfg.geom.rs_km}};
  auto sel = select_relay(one, cfg);
  CHECK(sel.found);
  CHECK(sel.index == 0);
  CHECK(sel.angle_rx == doctest::Approx(0.0));
  CHECK(sel.angle_tx == doctest::Approx(0.2).epsilon(1e-12));

  // one satellite on the far side of the sphere
  std::vector<SphericalPoint> far = {{kPi - 0.1, 1.0, cfg.geom.rs_km}};
  CHECK(!select_relay(far, cfg).found);

  // visible to the receiver but not the transmitter
  std::vector<SphericalPoint> oneside = {{vis - 1e-3, kPi, cfg.geom.rs_km}};
  CHECK(!select_relay(oneside, cfg).found);
}

TEST_CASE("select_relay agrees with a brute-force rescan") {
  auto cfg = defaults();
  cfg.geom.n_sats = 40;  // sparse enough that outages occur too
  const double vis = visibility_angle(cfg.geom);
  RandomStream rng(37);
  int outages = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto pts = sample_constellation(rng, cfg.geom);
    const auto sel = select_relay(pts, cfg);

    // independent scan written the dumb way
    int best = -1;
    double best_rx = 1e9, best_tx = 1e9;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      const double rx = pts[i].polar;
      const double tx = safe_acos(std::cos(pts[i].polar) * std::cos(cfg.theta_sep) +
                                  std::sin(pts[i].polar) * std::sin(cfg.theta_sep) *
                                      std::cos(pts[i].azimuth));
      if (rx > vis || tx > vis) continue;
      if (best < 0 || rx < best_rx || (rx == best_rx && tx < best_tx)) {
        best = i;
        best_rx = rx;
        best_tx = tx;
      }
    }
    CHECK(sel.found == (best >= 0));
    if (best >= 0) {
      CHECK(sel.index == best);
      CHECK(sel.angle_rx == doctest::Approx(best_rx));
    } else {
      ++outages;
    }
  }
  CHECK(outages > 0);  // the sparse shell must produce some
}

TEST_CASE("simulate_episode is internally consistent") {
  const auto cfg = defaults();
  for (std::uint64_t t = 0; t < 50; ++t) {
    auto rng = RandomStream::for_trial(cfg.seed, t);
    const auto ep = simulate_episode(rng, cfg);
    REQUIRE(ep.relay_found);
    CHECK(ep.d_up >= cfg.geom.rs_km - cfg.geom.re_km);
    CHECK(ep.d_up <= cfg.geom.rs_km + cfg.geom.re_km);
    CHECK(ep.d_down >= cfg.geom.rs_km - cfg.geom.re_km);
    CHECK(ep.d_up == doctest::Approx(chord_distance(ep.theta2, cfg.geom)).epsilon(1e-12));
    CHECK(ep.d_down == doctest::Approx(chord_distance(ep.theta1, cfg.geom)).epsilon(1e-12));
    CHECK(ep.snr_up == doctest::Approx(snr(ep.d_up, ep.w2_up, cfg.uplink)).epsilon(1e-14));
    CHECK(ep.snr_down == doctest::Approx(snr(ep.d_down, ep.w2_down, cfg.downlink)).epsilon(1e-14));
    CHECK(ep.tau_up == doctest::Approx(link_delay(ep.snr_up, cfg.pkt_up())).epsilon(1e-14));
    CHECK(ep.tau_down == doctest::Approx(link_delay(ep.snr_down, cfg.pkt_down())).epsilon(1e-14));
    CHECK(ep.tau_total == doctest::Approx(ep.tau_up + ep.tau_down).epsilon(1e-14));
    CHECK(ep.tau_total > 0.0);
  }
}

TEST_CASE("run_campaign determinism across reruns and worker counts") {
  auto cfg = defaults();
  cfg.n_trials = 4000;
  cfg.workers = 1;
  const auto a = run_campaign(cfg);
  const auto b = run_campaign(cfg);
  cfg.workers = 3;
  const auto c = run_campaign(cfg);
  CHECK(a.mean_total == b.mean_total);
  CHECK(a.tau_total == b.tau_total);
  CHECK(a.mean_total == c.mean_total);
  CHECK(a.tau_total == c.tau_total);
  CHECK(a.theta1 == c.theta1);
  CHECK(a.snr_up == c.snr_up);
  CHECK(a.count == 4000);
}

TEST_CASE("run_campaign with one trial equals the single episode") {
  auto cfg = defaults();
  cfg.n_trials = 1;
  const auto st = run_campaign(cfg);
  auto rng = RandomStream::for_trial(cfg.seed, 0);
  const auto ep = simulate_episode(rng, cfg);
  REQUIRE(st.count == 1);
  REQUIRE(st.tau_total.size() == 1);
  CHECK(st.tau_total[0] == ep.tau_total);
  CHECK(st.mean_total == ep.tau_total);
  CHECK(st.d_down[0] == ep.d_down);
}

TEST_CASE("independent seeds agree statistically") {
  auto cfg = defaults();
  cfg.n_trials = 20000;
  const auto a = run_campaign(cfg);
  cfg.seed = 987654321;
  const auto b = run_campaign(cfg);
  // d_down has light tails, so the joint CI is tight and stable
  const auto ca = mean_ci95(a.d_down);
  const auto cb = mean_ci95(b.d_down);
  const double joint = std::sqrt(ca.halfwidth95 * ca.halfwidth95 + cb.halfwidth95 * cb.halfwidth95);
  CHECK(std::abs(ca.mean - cb.mean) < 1.5 * joint);
}

TEST_CASE("outage at both ends") {
  auto dense = defaults();
  dense.n_trials = 20000;
  const auto st = run_campaign(dense);
  CHECK(st.outage_fraction < 1e-3);

  auto sparse = defaults();
  sparse.geom.n_sats = 1;
  sparse.theta_sep = 2.0 * visibility_angle(sparse.geom) - 1e-3;
  sparse.n_trials = 5000;
  const auto st1 = run_campaign(sparse);
  CHECK(st1.outage_fraction > 0.99);
}

TEST_CASE("more satellites pull the downlink distance in") {
  auto cfg = defaults();
  cfg.n_trials = 10000;
  double prev = 1e18;
  for (int n : {100, 500, 1000}) {
    cfg.geom.n_sats = n;
    const auto st = run_campaign(cfg);
    const double mean_dd = mean_ci95(st.d_down).mean;
    CHECK(mean_dd < prev);
    prev = mean_dd;
  }
}

TEST_CASE("simulate_multihop") {
  auto cfg = defaults();
  cfg.n_trials = 3000;
  const auto ms = simulate_multihop(15000.0, cfg);
  CHECK(ms.n_hops == 7);
  CHECK(ms.segment_chord == doctest::Approx(15000.0 / 7.0));
  CHECK(ms.theta_seg ==
        doctest::Approx(2.0 * std::asin(15000.0 / 7.0 / (2.0 * cfg.geom.re_km))).epsilon(1e-12));

  // one segment: identical to a plain campaign at that separation
  const double lm = l_max(cfg.geom);
  const auto one = simulate_multihop(lm * 0.9, cfg);
  CHECK(one.n_hops == 1);
  auto flat = cfg;
  flat.theta_sep = one.theta_seg;
  const auto direct = run_campaign(flat);
  CHECK(one.totals.mean_total == doctest::Approx(direct.mean_total).epsilon(1e-12));
  CHECK(one.totals.tau_total == direct.tau_total);

  // linearity of expectation across hops, loose because the totals are heavy-tailed
  auto seg = cfg;
  seg.theta_sep = ms.theta_seg;
  seg.n_trials = 21000;
  const auto single = run_campaign(seg);
  const auto tot_ci = mean_ci95(ms.totals.tau_total);
  CHECK(std::abs(ms.totals.mean_total - 7.0 * single.mean_total) <
        3.0 * (tot_ci.halfwidth95 + 7.0 * mean_ci95(single.tau_total).halfwidth95));

  CHECK_THROWS_AS(simulate_multihop(0.0, cfg), std::domain_error);
}

TEST_CASE("scenario validation") {
  auto cfg = defaults();
  CHECK_NOTHROW(cfg.validate());
  cfg.theta_sep = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  cfg = defaults();
  cfg.n_trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
}
