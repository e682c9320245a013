#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "remaug/modelbased.hpp"
#include "remaug/rng.hpp"

using namespace remaug;

namespace {

constexpr double kTruthX = 120.0, kTruthY = 80.0, kTruthPt = 43.0;

double model_power(const PropagationParams& prop, double p_t, double x, double y,
                   double rx_x, double rx_y) {
    const double d = std::hypot(x - rx_x, y - rx_y);
    return p_t - prop.intercept_db - 10.0 * prop.exponent * std::log10(d);
}

std::vector<ReceiverObservation> noiseless_receivers(const PropagationParams& prop, int n,
                                                     uint64_t seed, double noise_sigma = 0.0) {
    Rng rng(seed);
    std::vector<ReceiverObservation> obs;
    for (int k = 0; k < n; ++k) {
        ReceiverObservation o;
        o.x = rng.uniform(-250.0, 450.0);
        o.y = rng.uniform(-250.0, 450.0);
        if (std::hypot(o.x - kTruthX, o.y - kTruthY) < 5.0) {
            --k;
            continue;
        }
        o.p_avg_dbm = model_power(prop, kTruthPt, kTruthX, kTruthY, o.x, o.y) +
                      (noise_sigma > 0.0 ? noise_sigma * rng.normal() : 0.0);
        obs.push_back(o);
    }
    return obs;
}

std::vector<Eigen::Vector2cd> noiseless_snapshots(double theta_deg, double amplitude, int count,
                                                  uint64_t seed) {
    Rng rng(seed);
    const double s = std::sin(theta_deg * M_PI / 180.0);
    const Eigen::Vector2cd h(std::complex<double>(1.0, 0.0),
                             std::exp(std::complex<double>(0.0, M_PI / 2.0 * s)));
    std::vector<Eigen::Vector2cd> out;
    for (int k = 0; k < count; ++k) {
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        out.push_back(h * (amplitude * std::exp(std::complex<double>(0.0, phase))));
    }
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("modelbased");

TEST_CASE("rss localization recovers a noiseless instance exactly") {
    const PropagationParams prop{30.0, 3.0, 0.0, 100.0};
    const auto obs = noiseless_receivers(prop, 10, 1);
    const LocalizationEstimate est = localize_rss(obs, prop);
    CHECK(std::abs(est.x - kTruthX) <= 1e-6);
    CHECK(std::abs(est.y - kTruthY) <= 1e-6);
    REQUIRE(est.p_t_dbm.has_value());
    CHECK(std::abs(*est.p_t_dbm - kTruthPt) <= 1e-6);
}

TEST_CASE("rss needs four distinct non-collinear receivers") {
    const PropagationParams prop{30.0, 3.0, 0.0, 100.0};
    auto obs = noiseless_receivers(prop, 3, 2);
    CHECK_THROWS_AS(localize_rss(obs, prop), InvalidInput);

    // Duplicates collapse before the count check.
    auto dup = noiseless_receivers(prop, 3, 3);
    dup.push_back(dup[0]);
    dup.push_back(dup[1]);
    CHECK_THROWS_AS(localize_rss(dup, prop), InvalidInput);
}

TEST_CASE("rssd matches rss on the shared instance without a power estimate") {
    const PropagationParams prop{30.0, 3.0, 0.0, 100.0};
    const auto obs = noiseless_receivers(prop, 10, 1);
    const LocalizationEstimate est = localize_rssd(obs, prop);
    CHECK(std::abs(est.x - kTruthX) <= 1e-6);
    CHECK(std::abs(est.y - kTruthY) <= 1e-6);
    CHECK_FALSE(est.p_t_dbm.has_value());
}

TEST_CASE("rssd handles the equidistant ring (beta = 1 rows)") {
    const PropagationParams prop{30.0, 3.0, 0.0, 100.0};
    std::vector<ReceiverObservation> obs;
    for (int k = 0; k < 5; ++k) {
        const double ang = 2.0 * M_PI * k / 5.0;
        ReceiverObservation o;
        o.x = kTruthX + 200.0 * std::cos(ang);
        o.y = kTruthY + 200.0 * std::sin(ang);
        o.p_avg_dbm = model_power(prop, kTruthPt, kTruthX, kTruthY, o.x, o.y);
        obs.push_back(o);
    }
    const LocalizationEstimate est = localize_rssd(obs, prop);
    CHECK(std::abs(est.x - kTruthX) <= 1e-6);
    CHECK(std::abs(est.y - kTruthY) <= 1e-6);

    obs.resize(3);
    CHECK_THROWS_AS(localize_rssd(obs, prop), InvalidInput);
}

TEST_CASE("rssd is invariant to a constant power offset") {
    const PropagationParams prop{30.0, 3.0, 0.0, 100.0};
    auto obs = noiseless_receivers(prop, 8, 4, 1.0);
    const LocalizationEstimate base = localize_rssd(obs, prop);
    for (ReceiverObservation& o : obs) o.p_avg_dbm += 17.5;
    const LocalizationEstimate shifted = localize_rssd(obs, prop);
    CHECK(std::abs(base.x - shifted.x) <= 1e-9);
    CHECK(std::abs(base.y - shifted.y) <= 1e-9);
}

TEST_CASE("rss and rssd are exact across seeds with six receivers in general position") {
    const PropagationParams prop{30.0, 2.5, 0.0, 100.0};
    for (uint64_t seed = 10; seed < 40; ++seed) {
        const auto obs = noiseless_receivers(prop, 6, seed);
        const LocalizationEstimate rss = localize_rss(obs, prop);
        const LocalizationEstimate rssd = localize_rssd(obs, prop);
        CHECK(std::hypot(rss.x - kTruthX, rss.y - kTruthY) <= 1e-6);
        CHECK(std::abs(*rss.p_t_dbm - kTruthPt) <= 1e-6);
        CHECK(std::hypot(rssd.x - kTruthX, rssd.y - kTruthY) <= 1e-6);
    }
}

TEST_CASE("localization error grows with observation noise") {
    const PropagationParams prop{30.0, 3.0, 0.0, 100.0};
    const double sigmas[4] = {0.0, 1.0, 2.0, 4.0};
    double mean_err[4] = {0, 0, 0, 0};
    const int n_seeds = 50;
    for (int si = 0; si < 4; ++si) {
        for (uint64_t seed = 0; seed < n_seeds; ++seed) {
            const auto obs = noiseless_receivers(prop, 12, 100 + seed, sigmas[si]);
            const LocalizationEstimate est = localize_rss(obs, prop);
            mean_err[si] += std::hypot(est.x - kTruthX, est.y - kTruthY) / n_seeds;
        }
    }
    // Spearman rank correlation across the four noise levels; monotone
    // growth means correlation 1, and one adjacent inversion drops it to 0.8.
    int concordant = 0, total = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            ++total;
            if (mean_err[b] > mean_err[a]) ++concordant;
        }
    CHECK(static_cast<double>(concordant) / total >= 0.9);
}

TEST_CASE("music estimates on-grid bearings exactly") {
    const auto grid = aoa_candidate_grid(1.0);
    SUBCASE("30 degrees") {
        const auto snaps = noiseless_snapshots(30.0, 1.0, 16, 5);
        CHECK(estimate_aoa(snaps, grid) == doctest::Approx(30.0));
    }
    SUBCASE("boresight") {
        const auto snaps = noiseless_snapshots(0.0, 1.0, 16, 6);
        CHECK(estimate_aoa(snaps, grid) == doctest::Approx(0.0));
    }
    SUBCASE("grid domain is validated") {
        std::vector<double> bad = {-120.0, -119.5, -119.0};
        const auto snaps = noiseless_snapshots(0.0, 1.0, 16, 7);
        CHECK_THROWS_AS(estimate_aoa(snaps, bad), InvalidInput);
    }
    SUBCASE("all-zero snapshots error") {
        std::vector<Eigen::Vector2cd> zeros(4, Eigen::Vector2cd::Zero());
        CHECK_THROWS_AS(estimate_aoa(zeros, grid), InvalidInput);
    }
    SUBCASE("fewer than two snapshots error") {
        const auto snaps = noiseless_snapshots(10.0, 1.0, 1, 8);
        CHECK_THROWS_AS(estimate_aoa(snaps, grid), InvalidInput);
    }
}

TEST_CASE("aoa fusion intersects two perpendicular bearings exactly") {
    const PropagationParams prop{30.0, 2.0, 0.0, 100.0};
    const double p_t = 30.0;
    const double freq = 900.0;
    // Receiver A sees the transmitter due east (0 deg), receiver B due
    // north (90 deg); both bearings sit on the integer candidate grid.
    const double tx_x = 500.0, tx_y = 300.0;
    ReceiverObservation a;
    a.x = 100.0;
    a.y = 300.0;
    ReceiverObservation b;
    b.x = 500.0;
    b.y = -100.0;
    a.snapshots = noiseless_snapshots(0.0, 1e-4, 16, 11);
    b.snapshots = noiseless_snapshots(90.0, 1e-4, 16, 12);
    a.p_avg_dbm = -80.0;
    b.p_avg_dbm = -82.0;

    const LocalizationEstimate est = localize_aoa({a, b}, prop, p_t, freq);
    CHECK(std::abs(est.x - tx_x) <= 1e-6);
    CHECK(std::abs(est.y - tx_y) <= 1e-6);
    CHECK_FALSE(est.low_confidence);
}

TEST_CASE("single-receiver aoa falls back to the direct estimate, flagged") {
    const PropagationParams prop{30.0, 2.0, 0.0, 100.0};
    const double freq = 900.0;
    const double p_t = 30.0;
    ReceiverObservation a;
    a.x = 0.0;
    a.y = 0.0;
    a.snapshots = noiseless_snapshots(0.0, 1.0, 16, 13);
    // Make the inverted range exactly 250 m: alpha = gain0 * d^-p.
    const double gain0 = 299792458.0 / (4.0 * M_PI * freq * 1e6);
    const double alpha = gain0 * std::pow(250.0, -prop.exponent);
    a.p_avg_dbm = p_t + 10.0 * std::log10(alpha);

    const LocalizationEstimate est = localize_aoa({a}, prop, p_t, freq);
    CHECK(est.low_confidence);
    CHECK(est.x == doctest::Approx(250.0).epsilon(1e-6));
    CHECK(est.y == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("parallel bearings cannot be fused") {
    const PropagationParams prop{30.0, 2.0, 0.0, 100.0};
    ReceiverObservation a;
    a.x = 0.0;
    a.y = 0.0;
    a.snapshots = noiseless_snapshots(15.0, 1.0, 16, 14);
    ReceiverObservation b;
    b.x = 10.0;
    b.y = 10.0;
    b.snapshots = noiseless_snapshots(15.0, 1.0, 16, 15);
    CHECK_THROWS_AS(localize_aoa({a, b}, prop, 30.0, 900.0), ComputeError);
}

TEST_CASE("snr fusion") {
    std::vector<LocalizationEstimate> est(2);
    est[0].x = 0.0;
    est[0].y = 0.0;
    est[1].x = 4.0;
    est[1].y = 8.0;

    SUBCASE("3:1 weighting gives (1, 2)") {
        const LocalizationEstimate f = fuse_snr(est, {3.0, 1.0});
        CHECK(f.x == doctest::Approx(1.0));
        CHECK(f.y == doctest::Approx(2.0));
    }
    SUBCASE("equal weights average") {
        const LocalizationEstimate f = fuse_snr(est, {2.0, 2.0});
        CHECK(f.x == doctest::Approx(2.0));
        CHECK(f.y == doctest::Approx(4.0));
    }
    SUBCASE("degenerate weight picks one estimate exactly") {
        std::vector<LocalizationEstimate> three(3);
        three[0].x = -3.0;
        three[0].y = 5.0;
        const LocalizationEstimate f = fuse_snr(three, {1.0, 0.0, 0.0});
        CHECK(f.x == doctest::Approx(-3.0));
        CHECK(f.y == doctest::Approx(5.0));
    }
    SUBCASE("all-zero weights error") { CHECK_THROWS_AS(fuse_snr(est, {0.0, 0.0}), InvalidInput); }
    SUBCASE("output stays in the convex hull of the inputs") {
        Rng rng(16);
        for (int k = 0; k < 50; ++k) {
            const std::vector<double> g = {rng.uniform(), rng.uniform()};
            if (g[0] + g[1] <= 0.0) continue;
            const LocalizationEstimate f = fuse_snr(est, g);
            CHECK(f.x >= -1e-12);
            CHECK(f.x <= 4.0 + 1e-12);
            CHECK(f.y >= -1e-12);
            CHECK(f.y <= 8.0 + 1e-12);
        }
    }
}

TEST_CASE("stm_predict follows the calibrated model") {
    Transmitter tx;
    tx.x = 0.0;
    tx.y = 0.0;
    tx.height_m = 30.0;
    tx.freq_mhz = 900.0;
    StmParams p;
    p.p_t = 43.0;

    SUBCASE("doubling the distance with a1=20, a3=0 costs ~6.02 dB") {
        p.a1 = 20.0;
        p.a3 = 0.0;
        const double v1 = stm_predict(p, tx, {500.0, 0.0});
        const double v2 = stm_predict(p, tx, {1000.0, 0.0});
        CHECK(v1 - v2 == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));
    }
    SUBCASE("boresight 3gpp antenna adds (lambda_phi + lambda_theta) * g_max") {
        StmParams bare = p;
        StmParams with = p;
        AntennaPattern ant;
        ant.kind = AntennaPattern::Kind::ThreeGpp;
        ant.g_max_dbi = 15.0;
        ant.theta_azi_deg = 0.0;
        // Point the tilt at the actual vertical angle of the target.
        Transmitter tx2 = tx;
        const LinkGeometry geom = link_geometry(tx2, {500.0, 0.0});
        ant.phi_tilt_deg = geom.phi_u_deg;
        with.antenna = ant;
        const double delta = stm_predict(with, tx2, {500.0, 0.0}) - stm_predict(bare, tx2, {500.0, 0.0});
        CHECK(delta == doctest::Approx((ant.lambda_phi + ant.lambda_theta) * ant.g_max_dbi));
    }
    SUBCASE("targets mirrored about the azimuth get equal power") {
        StmParams with = p;
        AntennaPattern ant;
        ant.kind = AntennaPattern::Kind::ThreeGpp;
        ant.g_max_dbi = 12.0;
        ant.theta_azi_deg = 0.0;
        with.antenna = ant;
        const double v1 = stm_predict(with, tx, {400.0, 300.0});
        const double v2 = stm_predict(with, tx, {400.0, -300.0});
        CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
    }
}

TEST_CASE("stm_predict is continuous in the calibrated parameters") {
    Transmitter tx;
    tx.height_m = 25.0;
    tx.freq_mhz = 1800.0;
    Rng rng(17);
    for (int rep = 0; rep < 50; ++rep) {
        StmParams p;
        p.a0 = rng.uniform(50.0, 90.0);
        p.a1 = rng.uniform(20.0, 50.0);
        p.a2 = rng.uniform(0.0, 20.0);
        p.a3 = rng.uniform(0.0, 10.0);
        p.l_d = rng.uniform(0.0, 5.0);
        p.l_c = rng.uniform(0.0, 5.0);
        p.p_t = rng.uniform(30.0, 50.0);
        AntennaPattern ant;
        ant.kind = AntennaPattern::Kind::ThreeGpp;
        ant.g_max_dbi = 15.0;
        ant.theta_azi_deg = rng.uniform(-90.0, 90.0);
        ant.phi_tilt_deg = rng.uniform(-10.0, 0.0);
        p.antenna = ant;
        const Point2 target{rng.uniform(100.0, 2000.0), rng.uniform(-1000.0, 1000.0)};

        // Keep clear of the A_max clamp switch, where the model kinks.
        const LinkGeometry g = link_geometry(tx, target);
        const double att = 12.0 * std::pow(normalize_angle_deg(g.theta_u_deg - ant.theta_azi_deg) /
                                               ant.b_theta_deg,
                                           2.0);
        if (std::abs(att - ant.a_max_db) < 0.1) continue;

        const double base = stm_predict(p, tx, target);
        auto probe = [&](auto mutate) {
            StmParams q = p;
            mutate(q);
            CHECK(std::abs(stm_predict(q, tx, target) - base) <= 1e-3);
        };
        probe([](StmParams& q) { q.a0 += 1e-6; });
        probe([](StmParams& q) { q.a1 += 1e-6; });
        probe([](StmParams& q) { q.a2 += 1e-6; });
        probe([](StmParams& q) { q.a3 += 1e-6; });
        probe([](StmParams& q) { q.l_d += 1e-6; });
        probe([](StmParams& q) { q.p_t += 1e-6; });
        probe([](StmParams& q) { q.antenna->theta_azi_deg += 1e-6; });
        probe([](StmParams& q) { q.antenna->phi_tilt_deg += 1e-6; });
    }
}

TEST_CASE("stm calibration recovers in-bounds parameters" * doctest::timeout(120)) {
    Transmitter tx;
    tx.x = 150.0;
    tx.y = 210.0;
    tx.height_m = 30.0;
    tx.freq_mhz = 900.0;

    StmParams truth;
    truth.a0 = 72.0;
    truth.a1 = 38.0;
    truth.a2 = 10.0;
    truth.a3 = 4.0;
    truth.l_d = 0.0;
    truth.l_c = 0.0;
    truth.p_t = 41.0;

    Rng rng(18);
    std::vector<Sample> samples;
    for (int k = 0; k < 300; ++k) {
        const Point2 pos{rng.uniform(-1500.0, 1500.0), rng.uniform(-1500.0, 1500.0)};
        samples.push_back({pos.x, pos.y, std::nullopt, stm_predict(truth, tx, pos)});
    }
    const SampleSet set(std::move(samples));

    StmParams init = truth;
    init.a0 = 80.0;  // start away from the truth inside the box
    init.a1 = 44.9;
    init.a2 = 13.0;
    init.a3 = 6.0;
    init.p_t = 43.0;
    init.bounds.a0 = {truth.a0 * 0.8, truth.a0 * 1.2};
    init.bounds.a1 = {truth.a1 * 0.8, truth.a1 * 1.2};
    init.bounds.a2 = {truth.a2 * 0.8, truth.a2 * 1.2};
    init.bounds.a3 = {truth.a3 * 0.8, truth.a3 * 1.2};
    init.bounds.l_d = {0.0, 0.0};
    init.bounds.l_c = {0.0, 0.0};
    init.bounds.p_t = {truth.p_t * 0.8, truth.p_t * 1.2};

    const StmFit fit = stm_calibrate(set, tx, init);
    CHECK(fit.rmse < 0.5);
}

TEST_CASE("stm calibration edge cases") {
    Transmitter tx;
    tx.x = 0.0;
    tx.y = 0.0;
    StmParams init;
    init.pin_all_bounds();

    Rng rng(19);
    std::vector<Sample> samples;
    for (int k = 0; k < 10; ++k) {
        const Point2 pos{rng.uniform(100.0, 900.0), rng.uniform(100.0, 900.0)};
        samples.push_back({pos.x, pos.y, std::nullopt, stm_predict(init, tx, pos) + 1.0});
    }
    const SampleSet set(std::move(samples));

    SUBCASE("all-pinned bounds return the init with its residual") {
        const StmFit fit = stm_calibrate(set, tx, init);
        CHECK(fit.params.a0 == init.a0);
        CHECK(fit.rmse == doctest::Approx(1.0));
    }
    SUBCASE("too few samples error") {
        StmParams free = init;
        free.bounds.a0 = {50.0, 90.0};
        free.bounds.a1 = {20.0, 50.0};
        std::vector<Sample> few(set.samples().begin(), set.samples().begin() + 3);
        CHECK_THROWS_AS(stm_calibrate(SampleSet(few), tx, free), InvalidInput);
    }
    SUBCASE("inverted bounds error") {
        StmParams bad = init;
        bad.bounds.a0 = {90.0, 50.0};
        CHECK_THROWS_AS(stm_calibrate(set, tx, bad), InvalidInput);
    }
}

TEST_SUITE_END();
