#include <stdexcept>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "fme/config.hpp"
#include "fme/io.hpp"

using namespace fme;

TEST_CASE("significant-digit formatting") {
    CHECK(format_sig(1.0 / 3.0) == "0.333333333333");
    CHECK(format_sig(0.0) == "0");
    CHECK(format_sig(-2.5) == "-2.5");
    CHECK(format_sig(1.23456789012345e-7) == "1.23456789012e-07");
}

TEST_CASE("surface csv round trip") {
    SurfaceGrid g(0.1, 5, 7);
    Surface f(g);
    for (std::size_t i = 0; i < g.n_s; ++i)
        for (std::size_t j = 0; j < g.n_z; ++j)
            f.at(i, j) = std::sin(double(i) * 1.7 + double(j) * 0.3) * 1e-3;
    const std::string path = "io_test_surface.csv";
    write_surface_csv(f, path);
    Surface back = read_surface_csv(path);
    CHECK(back.grid().same_as(g));
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(back.values()[k] == doctest::Approx(f.values()[k]).epsilon(1e-11));
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
    CHECK_THROWS(read_surface_csv("missing_file.csv"));
}

TEST_CASE("discount csv round trip") {
    DiscountCurve curve({0.0, 1.0, 2.5}, {0.01, 0.02, 0.015});
    const std::string path = "io_test_discount.csv";
    write_discount_csv(curve, path);
    DiscountCurve back = read_discount_csv(path);
    REQUIRE(back.times().size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.times()[i] == doctest::Approx(curve.times()[i]));
        CHECK(back.rates()[i] == doctest::Approx(curve.rates()[i]));
    }
    std::remove(path.c_str());
}

TEST_CASE("config loading") {
    const std::string path = "io_test_config.json";
    {
        std::ofstream out(path);
        out << R"({
          "schema_version": 1,
          "grid": {"h": 0.1, "n_s": 31, "n_z": 41},
          "driver": {"b": 1.0, "c": 1.0, "marks": [{"xi": 1.0, "w": 1.0}], "wiener_factors": 1},
          "mode": "improvements",
          "volatility": {"kind": "improvement", "type": "constant", "value": 1.0},
          "initial": {"type": "flat", "mu": 0.02},
          "dt": 0.1, "t_end": 1.0, "n_paths": 8, "seed": 42,
          "triples": [{"t": 0.5, "T": 0.7, "x": 0.0}],
          "cohorts": [0.0],
          "cohort": {"n_individuals": 100, "lln_t": 1.0}
        })";
    }
    RunConfig rc = load_config(path);
    CHECK(rc.scenario.grid.n_s == 31);
    CHECK(rc.scenario.mode == SimMode::improvements);
    CHECK(rc.scenario.driver.drift_b() == doctest::Approx(1.0));
    CHECK(rc.scenario.n_paths == 8);
    REQUIRE(rc.scenario.vol_scalar.has_value());
    CHECK(rc.scenario.vol_scalar->loading.at(3, 5) == doctest::Approx(1.0));
    REQUIRE(rc.cohort.has_value());
    CHECK(rc.cohort->n_individuals == 100);
    CHECK(prepare_scenario(rc.scenario).steps == 10);

    // malformed and wrong-version configs are rejected
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS(load_config(path));
    {
        std::ofstream out(path);
        out << R"({"schema_version": 99})";
    }
    CHECK_THROWS_AS(load_config(path), std::invalid_argument);

    std::uint64_t h1 = hash_file(path);
    CHECK(h1 != 0);
    std::remove(path.c_str());
    CHECK_THROWS(load_config("no_such_config.json"));
}
