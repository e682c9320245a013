#include <doctest.h>

#include <cmath>

#include "remaug/scenario.hpp"

using namespace remaug;

namespace {

Scenario basic_scenario() {
    Scenario s;
    s.grid = {0.0, 0.0, 10.0, 20, 20};
    Transmitter tx;
    tx.x = -45.0;  // bin (5,5) center (55, 55) sits exactly 100 m east
    tx.y = 55.0;
    tx.power_dbm = 40.0;
    s.transmitters = {tx};
    s.prop = {30.0, 3.0, 0.0, 100.0};
    s.seed = 7;
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("scenario");

TEST_CASE("truth value follows the log-distance formula") {
    const Scenario s = basic_scenario();
    const RadioMap m = generate_truth(s);
    // d = 100 m, p_t 40, L 30, p 3  ->  40 - 30 - 30*log10(100) = -50
    CHECK(m.values(5, 5) == doctest::Approx(-50.0).epsilon(1e-12));
    CHECK(m.fully_observed());
}

TEST_CASE("equidistant bins get equal values when shadowing is off") {
    Scenario s = basic_scenario();
    s.transmitters[0].x = 100.0;  // between columns: bins (i,9) and (i,10) symmetric
    s.transmitters[0].y = 55.0;
    const RadioMap m = generate_truth(s);
    CHECK(m.values(5, 9) == doctest::Approx(m.values(5, 10)).epsilon(1e-12));
}

TEST_CASE("same seed, same map; zero-sigma maps are seed-independent") {
    Scenario s = basic_scenario();
    s.prop.shadow_sigma_db = 5.0;
    s.prop.decorr_dist_m = 50.0;
    const RadioMap a = generate_truth(s);
    const RadioMap b = generate_truth(s);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);

    Scenario s0 = basic_scenario();
    const RadioMap c = generate_truth(s0);
    s0.seed = 12345;
    const RadioMap d = generate_truth(s0);
    CHECK((c.values - d.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("strongest transmitter wins per bin") {
    Scenario s = basic_scenario();
    Transmitter tx2 = s.transmitters[0];
    tx2.x = 300.0;
    tx2.y = 55.0;
    tx2.power_dbm = 70.0;
    s.transmitters.push_back(tx2);
    const RadioMap m = generate_truth(s);
    // Near tx2 the stronger transmitter dominates.
    const Point2 c = bin_center(s.grid, 5, 19);
    const double d2 = std::max(dist(c, {tx2.x, tx2.y}), s.grid.cell_size / 2.0);
    const double expect = 70.0 - 30.0 - 30.0 * std::log10(d2);
    CHECK(m.values(5, 19) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("uniform mask keeps everything at fraction 1") {
    const RadioMap truth = generate_truth(basic_scenario());
    const RadioMap masked = apply_mask(truth, MaskSpec::uniform(1.0, 3));
    CHECK((masked.values - truth.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uniform mask observed count stays within the binomial 3-sigma band") {
    Scenario s = basic_scenario();
    s.grid = {0.0, 0.0, 10.0, 100, 100};
    s.transmitters[0].x = 500.0;
    s.transmitters[0].y = 500.0;
    const RadioMap truth = generate_truth(s);
    const RadioMap masked = apply_mask(truth, MaskSpec::uniform(0.4, 99));
    const long n = masked.observed_count();
    CHECK(n >= 3500);  // 4000 +- 3*sqrt(10000*0.4*0.6) ~ 4000 +- 147
    CHECK(n <= 4500);
}

TEST_CASE("mask never alters retained values") {
    const RadioMap truth = generate_truth(basic_scenario());
    const RadioMap masked = apply_mask(truth, MaskSpec::uniform(0.35, 11));
    for (int i = 0; i < truth.grid.n_rows; ++i)
        for (int j = 0; j < truth.grid.n_cols; ++j)
            if (!masked.missing_at(i, j)) CHECK(masked.values(i, j) == truth.values(i, j));
    CHECK(masked.observed_count() >= 1);
}

TEST_CASE("cluster holes covering the whole grid still leave one bin") {
    const RadioMap truth = generate_truth(basic_scenario());
    const RadioMap masked = apply_mask(truth, MaskSpec::cluster_holes(1, 1000.0, 5));
    CHECK(masked.observed_count() >= 1);
}

TEST_CASE("path trace keeps a connected walk worth of bins") {
    const RadioMap truth = generate_truth(basic_scenario());
    const RadioMap masked = apply_mask(truth, MaskSpec::path_trace(40, 17));
    const long n = masked.observed_count();
    CHECK(n >= 1);
    CHECK(n <= 40);
}

TEST_CASE("shadowing field matches the exponential correlation profile") {
    // Smaller grid than the acceptance run, same statistical check.
    GridSpec grid{0.0, 0.0, 10.0, 24, 24};
    const double sigma = 6.0;
    const double decorr = 100.0;  // 10 cells
    const ShadowingSampler sampler(grid, sigma, decorr);

    double num[3] = {0, 0, 0}, den = 0.0;
    const int lags[3] = {1, 5, 10};
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        const Eigen::MatrixXd f = sampler.sample(seed);
        den += f.array().square().sum();
        for (int li = 0; li < 3; ++li) {
            const int h = lags[li];
            for (int i = 0; i < grid.n_rows; ++i)
                for (int j = 0; j + h < grid.n_cols; ++j) num[li] += f(i, j) * f(i, j + h);
            for (int i = 0; i + h < grid.n_rows; ++i)
                for (int j = 0; j < grid.n_cols; ++j) num[li] += f(i, j) * f(i + h, j);
        }
    }
    const double var = den / (50.0 * grid.bins());
    for (int li = 0; li < 3; ++li) {
        const int h = lags[li];
        const long pairs_per_seed = 2L * grid.n_rows * (grid.n_cols - h);
        const double corr = num[li] / (50.0 * pairs_per_seed) / var;
        const double expect = std::exp(-h * grid.cell_size / decorr);
        CHECK(std::abs(corr - expect) <= 0.1);
    }
}

TEST_CASE("shadowing sampler rejects oversized grids") {
    GridSpec grid{0.0, 0.0, 10.0, 200, 200};
    CHECK_THROWS_AS(ShadowingSampler(grid, 6.0, 100.0), InvalidInput);
    // Zero sigma needs no factorization and accepts any size.
    const ShadowingSampler trivial(grid, 0.0, 100.0);
    CHECK(trivial.trivial());
}

TEST_SUITE_END();
