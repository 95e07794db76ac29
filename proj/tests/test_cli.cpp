#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "acceptance.hpp"
#include "helpers.hpp"
#include "omnoise/csv.hpp"

using namespace omnoise;
using Catch::Approx;
using testing::config_path;

namespace {

std::string write_temp(const std::string& body) {
    static int counter = 0;
    const auto path = std::filesystem::temp_directory_path() /
                      ("omnoise_test_" + std::to_string(counter++) + ".json");
    std::ofstream f(path);
    f << body;
    return path.string();
}

json minimal_config() {
    return json::parse(R"({
      "schema_version": 1,
      "system": {
        "optical": [
          {"wavelength_m": 1.064e-6, "detuning0_hz": 0.0,
           "kappa_hz": 119e3, "power_w": 3.8e-6},
          {"wavelength_m": 1.064e-6, "detuning0_hz": 240e3,
           "kappa_hz": 119e3, "power_w": 6.7e-5}
        ],
        "mechanical": [
          {"omega_m_hz": 226764.581, "gamma_m_hz": 1.44, "temperature_k": 300},
          {"omega_m_hz": 231887.32, "gamma_m_hz": 8.8, "temperature_k": 300}
        ],
        "couplings_g0_hz": [[0.0, 0.13], [0.0, 0.39]]
      },
      "grid": {"fmin_hz": 220e3, "fmax_hz": 238e3, "points": 101}
    })");
}

}  // namespace

TEST_CASE("bundled configurations load", "[cli]") {
    for (const char* name : {"fig4c.json", "fig5.json", "cancellation_a.json",
                             "cancellation_b.json"}) {
        const RunConfig rc = load_run_config(config_path(name));
        REQUIRE(rc.system.optical[1].power > 0.0);
        REQUIRE(rc.grid.fmax_hz > rc.grid.fmin_hz);
        REQUIRE_NOTHROW(rc.system.validate());
        // the configured system must have a solvable, stable steady state
        const SteadyState ss = solve_steady_state(rc.system);
        REQUIRE(steady_state_residual(rc.system, ss) < 1e-10);
    }
    const RunConfig fig4c = load_run_config(config_path("fig4c.json"));
    REQUIRE(fig4c.oracle.has_value());
    REQUIRE(fig4c.spectrum.quadrature == Quadrature::X);
    REQUIRE(fig4c.spectrum.mode_k == 1);
    const RunConfig ca = load_run_config(config_path("cancellation_a.json"));
    REQUIRE(ca.spectrum.quadrature == Quadrature::Y);
    REQUIRE(ca.spectrum.mode_k == 0);
    REQUIRE(ca.spectrum.mirror_l == 0);
}

TEST_CASE("configuration parsing", "[cli]") {
    SECTION("minimal config with defaults") {
        const RunConfig rc = parse_run_config(minimal_config());
        REQUIRE(rc.system.optical[0].kappa1 ==
                Approx(hz_to_rad(119e3) / 2.0));
        REQUIRE(rc.system.optical[0].kappa2 ==
                Approx(hz_to_rad(119e3) / 2.0));
        REQUIRE(rc.system.mechanical[0].n_th == Approx(27566527.0).epsilon(1e-4));
        REQUIRE(rc.spectrum.solver == Solver::Full);
        REQUIRE_FALSE(rc.oracle.has_value());
        REQUIRE_FALSE(rc.detection.enabled);
    }
    SECTION("unit suffixes convert to angular frequency") {
        const RunConfig rc = parse_run_config(minimal_config());
        REQUIRE(rc.system.mechanical[0].omega_m ==
                Approx(two_pi * 226764.581));
        REQUIRE(rc.system.couplings.g0[1][1] == Approx(two_pi * 0.39));
    }
    SECTION("unknown keys are rejected everywhere") {
        json j = minimal_config();
        j["surprise"] = 1;
        REQUIRE_THROWS_AS(parse_run_config(j), ConfigError);
        j = minimal_config();
        j["system"]["optical"][0]["kapa_hz"] = 1.0;
        REQUIRE_THROWS_AS(parse_run_config(j), ConfigError);
        j = minimal_config();
        j["grid"]["fstep_hz"] = 1.0;
        REQUIRE_THROWS_AS(parse_run_config(j), ConfigError);
    }
    SECTION("schema version is enforced") {
        json j = minimal_config();
        j["schema_version"] = 2;
        REQUIRE_THROWS_AS(parse_run_config(j), ConfigError);
        j.erase("schema_version");
        REQUIRE_THROWS_AS(parse_run_config(j), ConfigError);
    }
    SECTION("port names") {
        json j = minimal_config();
        j["spectrum"] = {{"port", "r1"}, {"quadrature", "y"}};
        const RunConfig rc = parse_run_config(j);
        REQUIRE(rc.spectrum.mode_k == 0);
        REQUIRE(rc.spectrum.mirror_l == 0);
        const QuadratureSelector sel = selector_from(rc);
        REQUIRE(sel.which == Quadrature::Y);
        REQUIRE(sel.mode_k == 0);
        j["spectrum"]["port"] = "t9";
        REQUIRE_THROWS_AS(parse_run_config(j), ConfigError);
    }
    SECTION("invalid physics is rejected at load time") {
        json j = minimal_config();
        j["system"]["optical"][0]["kappa_hz"] = -1.0;
        REQUIRE_THROWS_AS(parse_run_config(j), ConfigError);
        j = minimal_config();
        j["system"]["mechanical"][0]["gamma_m_hz"] = 0.0;
        REQUIRE_THROWS_AS(parse_run_config(j), ConfigError);
    }
    SECTION("missing file") {
        REQUIRE_THROWS_AS(load_run_config("/nonexistent/nope.json"),
                          ConfigError);
    }
    SECTION("malformed json") {
        const auto path = write_temp("{ not json");
        REQUIRE_THROWS_AS(load_run_config(path), ConfigError);
        std::remove(path.c_str());
    }
}

TEST_CASE("spectrum CSV round trip", "[cli]") {
    SpectrumResult s;
    s.omega = {hz_to_rad(220e3), hz_to_rad(226764.581), hz_to_rad(238e3)};
    s.values = {0.5, 1.2345678901234567e-3, 7.0e12};
    s.metadata["solver"] = "full";
    s.metadata["seed"] = "42";

    std::ostringstream first;
    write_spectrum_csv(s, first);
    REQUIRE(first.str().find("freq_hz,psd_value") != std::string::npos);
    REQUIRE(first.str().find("# seed=42") != std::string::npos);

    // writing the same result twice is byte-identical
    std::ostringstream again;
    write_spectrum_csv(s, again);
    REQUIRE(again.str() == first.str());

    std::istringstream in(first.str());
    const SpectrumResult back = read_spectrum_csv(in);
    REQUIRE(back.omega.size() == 3);
    REQUIRE(back.metadata.at("solver") == "full");
    for (std::size_t i = 0; i < 3; ++i) {
        // %.17g keeps the full double precision; the Hz <-> rad/s conversion
        // costs at most one ulp
        REQUIRE(back.omega[i] == Approx(s.omega[i]).epsilon(1e-15));
        REQUIRE(back.values[i] == s.values[i]);
    }

    std::istringstream bad("freq_hz,psd_value\nnot-a-row\n");
    REQUIRE_THROWS_AS(read_spectrum_csv(bad), Error);
}

TEST_CASE("acceptance report round trip", "[cli]") {
    acceptance::Report rep;
    rep.criteria.push_back({1, "calibration arithmetic", true, "ok"});
    rep.criteria.push_back({2, "calibration round-trip", false, "off by 2%"});

    const json j = acceptance::report_to_json(rep);
    REQUIRE(j.at("schema_version") == 1);
    REQUIRE(j.at("passed") == false);
    const acceptance::Report back = acceptance::report_from_json(j);
    REQUIRE(back.criteria.size() == 2);
    REQUIRE(back.criteria[0].passed);
    REQUIRE_FALSE(back.criteria[1].passed);
    REQUIRE(back.criteria[1].details == "off by 2%");
    REQUIRE(acceptance::report_to_json(back) == j);

    json stale = j;
    stale["schema_version"] = 9;
    REQUIRE_THROWS_AS(acceptance::report_from_json(stale), ConfigError);

    acceptance::Report empty;
    REQUIRE_FALSE(empty.passed());
}
