#include <doctest.h>

#include "remaug/core.hpp"
#include "remaug/rng.hpp"

using namespace remaug;

TEST_SUITE_BEGIN("core");

TEST_CASE("bin_center basics") {
    GridSpec g{0.0, 0.0, 10.0, 4, 4};
    const Point2 c = bin_center(g, 0, 0);
    CHECK(c.x == doctest::Approx(5.0));
    CHECK(c.y == doctest::Approx(5.0));

    GridSpec g2{100.0, 200.0, 2.0, 3, 3};
    const Point2 c2 = bin_center(g2, 2, 1);
    CHECK(c2.x == doctest::Approx(103.0));
    CHECK(c2.y == doctest::Approx(205.0));

    CHECK_THROWS_AS(bin_center(g, 4, 0), InvalidInput);
}

TEST_CASE("bin_center is a bijection onto the cell-center lattice") {
    GridSpec g{-20.0, 35.0, 2.5, 7, 5};
    std::vector<std::pair<double, double>> seen;
    for (int i = 0; i < g.n_rows; ++i) {
        for (int j = 0; j < g.n_cols; ++j) {
            const Point2 c = bin_center(g, i, j);
            // invertible back to indices
            CHECK(static_cast<int>((c.y - g.origin_y) / g.cell_size) == i);
            CHECK(static_cast<int>((c.x - g.origin_x) / g.cell_size) == j);
            for (auto& [x, y] : seen) CHECK((x != c.x || y != c.y));
            seen.emplace_back(c.x, c.y);
        }
    }
}

TEST_CASE("angle normalization lands in (-180, 180]") {
    CHECK(normalize_angle_deg(180.0) == doctest::Approx(180.0));
    CHECK(normalize_angle_deg(-180.0) == doctest::Approx(180.0));
    CHECK(normalize_angle_deg(540.0) == doctest::Approx(180.0));
    CHECK(normalize_angle_deg(-90.0) == doctest::Approx(-90.0));
    CHECK(normalize_angle_deg(359.0) == doctest::Approx(-1.0));
}

TEST_CASE("3gpp antenna gain") {
    AntennaPattern a;
    a.kind = AntennaPattern::Kind::ThreeGpp;
    a.g_max_dbi = 15.0;
    a.b_theta_deg = 65.0;
    a.b_phi_deg = 10.0;
    a.a_max_db = 30.0;
    a.theta_azi_deg = 40.0;
    a.phi_tilt_deg = -6.0;

    SUBCASE("boresight reaches (lambda_phi + lambda_theta) * G_max") {
        const double g = antenna_gain(a, {100.0, 40.0, -6.0});
        CHECK(g == doctest::Approx((a.lambda_phi + a.lambda_theta) * a.g_max_dbi));
    }
    SUBCASE("off-axis attenuation clamps at A_max") {
        const double g = antenna_gain(a, {100.0, normalize_angle_deg(40.0 + 179.0), -6.0});
        CHECK(g == doctest::Approx(a.lambda_phi * a.g_max_dbi +
                                   a.lambda_theta * (a.g_max_dbi - a.a_max_db)));
    }
    SUBCASE("gain never falls below the clamp floor") {
        Rng rng(42);
        for (int k = 0; k < 500; ++k) {
            const LinkGeometry geom{rng.uniform(1.0, 5000.0), rng.uniform(-180.0, 180.0),
                                    rng.uniform(-90.0, 90.0)};
            const double g = antenna_gain(a, geom);
            const double floor = (a.lambda_phi + a.lambda_theta) * (a.g_max_dbi - a.a_max_db);
            CHECK(g >= floor - 1e-12);
        }
    }
}

TEST_CASE("cosine antenna gain peaks at boresight") {
    AntennaPattern a;
    a.kind = AntennaPattern::Kind::Cosine;
    a.g_max_dbi = 12.0;
    a.f_theta_db = 20.0;
    a.f_phi_db = 15.0;
    a.p1 = 2.0;
    a.p2 = 2.0;
    a.theta_azi_deg = 10.0;
    a.phi_tilt_deg = -4.0;
    CHECK(antenna_gain(a, {50.0, 10.0, -4.0}) == doctest::Approx(12.0));
    CHECK(antenna_gain(a, {50.0, 60.0, -4.0}) < 12.0);
}

TEST_CASE("sample_from_map") {
    GridSpec g{0.0, 0.0, 10.0, 2, 2};
    RadioMap m = RadioMap::all_missing(g);

    SUBCASE("fully observed 2x2 gives 4 samples at bin centers") {
        m.values << -50.0, -51.0, -52.0, -53.0;
        const SampleSet s = sample_from_map(m);
        REQUIRE(s.size() == 4);
        CHECK(s[0].x == doctest::Approx(5.0));
        CHECK(s[0].y == doctest::Approx(5.0));
        CHECK(s[0].value == doctest::Approx(-50.0));
    }
    SUBCASE("single observed bin") {
        m.values(1, 0) = -60.0;
        const SampleSet s = sample_from_map(m);
        REQUIRE(s.size() == 1);
        CHECK(s[0].x == doctest::Approx(5.0));
        CHECK(s[0].y == doctest::Approx(15.0));
    }
    SUBCASE("all-MISSING errors") { CHECK_THROWS_AS(sample_from_map(m), InvalidInput); }
}

TEST_CASE("SampleSet pre-averages duplicates and is idempotent") {
    SampleSet s({{1.0, 2.0, std::nullopt, -40.0},
                 {1.0, 2.0, std::nullopt, -50.0},
                 {3.0, 4.0, std::nullopt, -60.0}});
    REQUIRE(s.size() == 2);
    CHECK(s[0].value == doctest::Approx(-45.0));

    const SampleSet again(s.samples());
    REQUIRE(again.size() == s.size());
    for (size_t k = 0; k < s.size(); ++k) {
        CHECK(again[k].x == s[k].x);
        CHECK(again[k].value == s[k].value);
    }
}

TEST_CASE("invalid domain values are rejected") {
    CHECK_THROWS_AS(GridSpec({0, 0, 0.0, 4, 4}).validate(), InvalidInput);
    CHECK_THROWS_AS(GridSpec({0, 0, 1.0, 0, 4}).validate(), InvalidInput);
    Transmitter t;
    t.height_m = 0.0;
    CHECK_THROWS_AS(t.validate(), InvalidInput);
    PropagationParams p;
    p.exponent = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
}

TEST_SUITE_END();
