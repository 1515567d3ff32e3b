#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mimpol/config.hpp"

using namespace mimpol;

namespace {

const char* sample = R"(# reference run
[cavity]
R1 = 0.99          # front mirror
R3 = 0.9995
membrane_n = 2.0245
membrane_d_m = 50e-9
L1_m = 5e-3
L2_m = 25e-3
gamma1 = 0.994
lambda_m = 795e-9

[detection]
lambda_m = 795e-9
eta = 0.88
alpha_rad = 0.6544985
input_power_W = 11.1e-6

[membrane]
stress_Pa = 1.0e9
density_kg_m3 = 3170
side_a_m = 1e-3
side_b_m = 1e-3
thickness_m = 50e-9
damping_rad_s = 6.4717e4
temperature_K = 300

[map]
axis1 = dz_m
axis1_start = 0
axis1_stop = 795e-9
axis1_points = 11
axis2 = dz_c
axis2_start = 0
axis2_stop = 397.5e-9
axis2_points = 7
)";

} // namespace

TEST_CASE("parse, serialize, parse is the identity") {
    const Config first = Config::parse(sample);
    const Config second = Config::parse(first.serialize());
    CHECK(first == second);
    CHECK(second.serialize() == Config::parse(second.serialize()).serialize());
}

TEST_CASE("typed getters") {
    const Config cfg = Config::parse(sample);
    CHECK(cfg.get_double("cavity", "R1") == 0.99);
    CHECK(cfg.get_double("cavity", "membrane_d_m") == 50e-9);
    CHECK(cfg.get_int("map", "axis1_points") == 11);
    CHECK(cfg.get_string("map", "axis1") == "dz_m");
    CHECK(cfg.get_double("cavity", "gamma2", 1.0) == 1.0);
    CHECK_THROWS_AS(cfg.get_double("cavity", "missing"), ConfigError);
    CHECK_THROWS_AS(cfg.get_double("map", "axis1"), ConfigError);
    CHECK_THROWS_AS(cfg.get_int("cavity", "R1"), ConfigError);
}

TEST_CASE("malformed text is rejected") {
    CHECK_THROWS_AS(Config::parse("key_without_section = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[unterminated\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[s]\nnot a pair\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[s]\n= value\n"), ConfigError);
}

TEST_CASE("cavity section") {
    const Config cfg = Config::parse(sample);
    const CavityConfig cavity = cavity_from_config(cfg);
    CHECK(cavity.R1 == 0.99);
    CHECK(cavity.R2 == doctest::Approx(0.2315875).epsilon(2e-4));
    CHECK(cavity.membrane_loss == doctest::Approx(1.6e-4));
    CHECK(cavity.gamma2 == 1.0);
    CHECK(cavity.dz_m == 0.0);

    SUBCASE("direct reflectance instead of film parameters") {
        Config direct = cfg;
        direct.set("cavity", "R2", "0.232");
        CHECK_THROWS_AS(cavity_from_config(direct), ConfigError);  // both given
    }
    SUBCASE("direct reflectance alone defaults to a lossless membrane") {
        Config direct = Config::parse(
            "[cavity]\nR2 = 0.232\nL1_m = 5e-3\nL2_m = 25e-3\nlambda_m = 795e-9\n");
        const CavityConfig c = cavity_from_config(direct);
        CHECK(c.R2 == 0.232);
        CHECK(c.membrane_loss == 0.0);
    }
    SUBCASE("invalid physics is reported as a config error") {
        Config bad = cfg;
        bad.set("cavity", "gamma1", "1.5");
        CHECK_THROWS_AS(cavity_from_config(bad), ConfigError);
    }
}

TEST_CASE("detection section derives the input flux from power") {
    const Config cfg = Config::parse(sample);
    const DetectionConfig det = detection_from_config(cfg);
    CHECK(det.S0_in == doctest::Approx(2.221178e13).epsilon(1e-5));
    CHECK(det.eta == 0.88);
}

TEST_CASE("membrane section") {
    const Config cfg = Config::parse(sample);
    const MembraneConfig mc = membrane_from_config(cfg);
    CHECK(mc.damping == doctest::Approx(6.4717e4));
    CHECK(mc.temperature == 300.0);
}

TEST_CASE("scan axes") {
    const Config cfg = Config::parse(sample);
    const ScanAxis a1 = scan_axis_from_config(cfg, "map", "axis1");
    CHECK(a1.variable == ScanVariable::membrane_position);
    CHECK(a1.points == 11);
    CHECK(a1.value_at(10) == doctest::Approx(795e-9));

    Config bad = cfg;
    bad.set("map", "axis1", "dz_q");
    CHECK_THROWS_WITH_AS(scan_axis_from_config(bad, "map", "axis1"),
                         doctest::Contains("unknown axis"), ConfigError);
}
