#include <doctest.h>

#include "remaug/io.hpp"

using namespace remaug;
namespace rio = remaug::io;

TEST_SUITE_BEGIN("io");

TEST_CASE("map CSV round trip is stable at 6 decimal places") {
    GridSpec g{0, 0, 10.0, 3, 4};
    RadioMap m = RadioMap::all_missing(g);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) m.values(i, j) = -40.1234567 - i * 3.3 - j * 0.77;
    m.values(1, 2) = kMissing;

    const std::string csv = rio::map_to_csv(m);
    CHECK(csv.find("nan") != std::string::npos);
    const RadioMap back = rio::map_from_csv(csv, g);
    CHECK(back.missing_at(1, 2));
    // quantized once, stable afterwards
    CHECK(rio::map_to_csv(back) == csv);
}

TEST_CASE("map CSV validates its shape") {
    GridSpec g{0, 0, 1.0, 2, 2};
    CHECK_THROWS_AS(rio::map_from_csv("1,2\n", g), InvalidInput);
    CHECK_THROWS_AS(rio::map_from_csv("1,2,3\n4,5,6\n", g), InvalidInput);
    CHECK_THROWS_AS(rio::map_from_csv("1,x\n3,4\n", g), InvalidInput);
}

TEST_CASE("samples CSV round trip, CRLF tolerance, and header checks") {
    SampleSet s({{1.5, 2.5, std::nullopt, -61.25}, {3.0, 4.0, std::nullopt, -72.5}});
    const std::string csv = rio::samples_to_csv(s);
    CHECK(csv.rfind("x_m,y_m,value_dbm\n", 0) == 0);
    const SampleSet back = rio::samples_from_csv(csv);
    REQUIRE(back.size() == 2);
    CHECK(back[0].value == doctest::Approx(-61.25));

    const SampleSet crlf = rio::samples_from_csv("x_m,y_m,value_dbm\r\n1.0,2.0,-50.0\r\n");
    REQUIRE(crlf.size() == 1);
    CHECK(crlf[0].x == doctest::Approx(1.0));

    CHECK_THROWS_AS(rio::samples_from_csv("x_m,y_m,rsrp\n1,2,3\n"), InvalidInput);
    CHECK_THROWS_AS(rio::samples_from_csv("x_m,y_m,value_dbm\n1,2\n"), InvalidInput);

    SampleSet with_z({{1.0, 2.0, 5.0, -60.0}});
    const std::string zcsv = rio::samples_to_csv(with_z);
    CHECK(zcsv.rfind("x_m,y_m,z_m,value_dbm\n", 0) == 0);
    const SampleSet zback = rio::samples_from_csv(zcsv);
    REQUIRE(zback[0].z.has_value());
    CHECK(*zback[0].z == doctest::Approx(5.0));
}

TEST_CASE("scenario and mask JSON round trips reject unknown keys") {
    Scenario s;
    s.grid = {0, 0, 10.0, 4, 4};
    Transmitter tx;
    tx.x = 5;
    tx.y = 5;
    tx.power_dbm = 40.0;
    AntennaPattern ant;
    ant.kind = AntennaPattern::Kind::ThreeGpp;
    ant.g_max_dbi = 15.0;
    tx.antenna = ant;
    s.transmitters = {tx};
    s.seed = 3;

    const auto j = rio::scenario_to_json(s);
    const Scenario back = rio::scenario_from_json(j);
    CHECK(back.grid == s.grid);
    CHECK(back.transmitters.size() == 1);
    CHECK(back.transmitters[0].antenna.has_value());
    CHECK(back.seed == 3);

    nlohmann::json bad = j;
    bad["surprise"] = 1;
    CHECK_THROWS_AS(rio::scenario_from_json(bad), InvalidInput);

    const MaskSpec mask = MaskSpec::cluster_holes(3, 2.5, 77);
    const MaskSpec mask_back = rio::mask_from_json(rio::mask_to_json(mask));
    CHECK(mask_back.kind == MaskSpec::Kind::ClusterHoles);
    CHECK(mask_back.n_holes == 3);
    CHECK(mask_back.seed == 77);
}

TEST_CASE("feature parsing lists valid keys on error") {
    nlohmann::json j{{"bogus", 1}};
    try {
        rio::features_from_json(j);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        CHECK(msg.find("bogus") != std::string::npos);
        CHECK(msg.find("new_unseen_scenario") != std::string::npos);
        CHECK(msg.find("targets_inside_hull") != std::string::npos);
    }

    const ScenarioFeatures f =
        rio::features_from_json(nlohmann::json{{"dimensionality", "high"}, {"correlated", true}});
    CHECK(f.dimensionality == Dimensionality::High);
    CHECK(f.correlated);
    CHECK_THROWS_AS(rio::features_from_json(nlohmann::json{{"dimensionality", "medium"}}),
                    InvalidInput);
}

TEST_CASE("recommendation JSON carries methods, advisory flags and the path") {
    ScenarioFeatures f;
    f.new_unseen_scenario = true;
    const auto j = rio::recommendation_to_json(select(f));
    CHECK(j["methods"][0] == "SIMULATOR");
    CHECK(j["advisory"].size() == 2);  // both leaves advisory here
    CHECK(j["path"][0]["node"] == "new_unseen_scenario");
    CHECK(j["path"][0]["answer"] == "yes");
}

TEST_CASE("method JSON parsing validates names and keys") {
    CHECK_THROWS_AS(rio::method_from_json(nlohmann::json{{"name", "gan"}}), InvalidInput);
    CHECK_THROWS_AS(rio::method_from_json(nlohmann::json{{"name", "idw"}, {"powr", 2}}),
                    InvalidInput);
    const ReconstructMethod m =
        rio::method_from_json(nlohmann::json{{"name", "idw"}, {"power", 3.0}, {"k_nearest", 12}});
    CHECK(m.idw.power == doctest::Approx(3.0));
    REQUIRE(std::holds_alternative<KNearest>(m.idw.neighborhood));
    CHECK(std::get<KNearest>(m.idw.neighborhood).n == 12);
}

TEST_CASE("meta path derivation") {
    CHECK(rio::meta_path_for("truth.csv") == "truth.meta.json");
    CHECK(rio::meta_path_for("/tmp/a/b.csv") == "/tmp/a/b.meta.json");
    CHECK(rio::meta_path_for("plain") == "plain.meta.json");
    CHECK(rio::meta_path_for("./dir.v1/file") == "./dir.v1/file.meta.json");
}

TEST_CASE("benchmark config parsing") {
    nlohmann::json j = {
        {"scenario",
         {{"grid", {{"cell_size", 10.0}, {"n_rows", 4}, {"n_cols", 4}}},
          {"transmitters", {{{"x", 20.0}, {"y", 20.0}, {"power_dbm", 40.0}}}},
          {"propagation", {{"exponent", 3.0}}},
          {"seed", 5}}},
        {"mask", {{"kind", "uniform_random"}, {"fraction", 0.5}, {"seed", 6}}},
        {"methods", {{{"name", "nearest"}}, {{"name", "idw"}, {"power", 2.0}}}},
        {"n_seeds", 3},
        {"assertions", {{{"metric", "rmse"}, {"order", {"idw", "nearest"}}}}}};
    const rio::BenchmarkRun run = rio::benchmark_run_from_json(j);
    CHECK(run.config.methods.size() == 2);
    CHECK(run.config.seeds.size() == 3);
    REQUIRE(run.assertions.size() == 1);
    CHECK(run.assertions[0].method_order.size() == 2);

    j["seeds"] = {1, 2};
    CHECK_THROWS_AS(rio::benchmark_run_from_json(j), InvalidInput);  // seeds xor n_seeds
}

TEST_SUITE_END();
