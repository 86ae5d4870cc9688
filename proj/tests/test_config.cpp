#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace mhdbox;

TEST_CASE("empty config fails only on the missing epsilon", "[config]") {
    try {
        parse_config(std::string(""));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key_name == "init.epsilon");
    }
}

TEST_CASE("minimal config gets all documented defaults", "[config]") {
    const RunConfig cfg = parse_config(std::string("init.epsilon = 0.05\n"));
    CHECK(cfg.n == 32);
    CHECK(cfg.dynamics.nu == 1.0);
    CHECK(cfg.dynamics.dt == 2e-3);
    CHECK(cfg.dynamics.dealias == DealiasRule::TwoThirds);
    CHECK_FALSE(cfg.dynamics.enforce_parity);
    CHECK_FALSE(cfg.dynamics.exp_filter);
    CHECK(cfg.init.epsilon == 0.05);
    CHECK(cfg.init.s == 5);
    CHECK(cfg.energy.sigma == 0.5);
    CHECK(cfg.energy.s == 5);
    CHECK(cfg.t_end == 10.0);
    CHECK(cfg.mode == RunMode::Single);
}

TEST_CASE("invalid values name the violated invariant", "[config]") {
    try {
        parse_config(std::string("init.epsilon = 0.05\ndynamics.dt = -0.1\n"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key_name == "dynamics.dt");
    }
    try {
        parse_config(std::string("init.epsilon = 0.05\nenergy.sigma = 1.5\n"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key_name == "energy.sigma");
    }
    try {
        parse_config(std::string("init.epsilon = 0.05\ninit.k_max = 20\n"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key_name == "init.k_max");
    }
    CHECK_THROWS_AS(parse_config(std::string("init.epsilon = 0.05\ngrid.n = 7\n")),
                    ValidationError);
    // CFL guard: dt too large for N = 32 with the unit background speed
    CHECK_THROWS_AS(parse_config(std::string("init.epsilon = 0.05\ndynamics.dt = 0.05\n"
                                             "run.t_end = 1\n")),
                    ValidationError);
}

TEST_CASE("parse errors carry line numbers", "[config]") {
    try {
        parse_config(std::string("# comment\ninit.epsilon = 0.05\nbogus line\n"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 3);
    }
    try {
        parse_config(std::string("unknown.key = 1\n"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 1);
    }
    try {
        parse_config(std::string("init.epsilon = zero\n"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 1);
    }
}

TEST_CASE("sweep mode requires and parses the epsilon list", "[config]") {
    CHECK_THROWS_AS(parse_config(std::string("run.mode = sweep\n")), ValidationError);
    const RunConfig cfg = parse_config(
        std::string("run.mode = sweep\nrun.sweep_epsilons = 0.005, 0.01, 0.02\n"));
    REQUIRE(cfg.sweep_epsilons.size() == 3);
    CHECK(cfg.sweep_epsilons[1] == 0.01);
}

TEST_CASE("comments, spacing and full documents parse", "[config]") {
    const std::string text =
        "# full example\n"
        "grid.n = 16\n"
        "dynamics.nu = 1.0\n"
        "dynamics.dt = 0.004   # CFL-safe at N = 16\n"
        "dynamics.dealias = two_thirds\n"
        "dynamics.parity_enforcement = off\n"
        "init.seed = 7\n"
        "init.epsilon = 0.01\n"
        "init.s = 5\n"
        "init.spectrum = low_modes\n"
        "init.k_max = 2\n"
        "energy.sigma = 0.25\n"
        "energy.sample_stride = 10\n"
        "run.t_end = 2\n"
        "run.snapshot_times = 0, 1, 2\n"
        "run.output_dir = /tmp/mhdbox-test\n";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.n == 16);
    CHECK(cfg.init.seed == 7);
    CHECK(cfg.energy.sigma == 0.25);
    CHECK(cfg.snapshot_times.size() == 3);
    CHECK(cfg.output_dir == "/tmp/mhdbox-test");
    CHECK(cfg.steps() == 500);
}

TEST_CASE("linearized mode validates the driven mode", "[config]") {
    CHECK_THROWS_AS(
        parse_config(std::string("init.epsilon = 1\nrun.mode = linearized\n"
                                 "run.linear_mode = 1,0,0\n")),
        ValidationError);
    const RunConfig cfg = parse_config(std::string(
        "init.epsilon = 1\nrun.mode = linearized\nrun.linear_mode = 0,0,2\nrun.t_end = 2\n"
        "dynamics.dt = 0.001\n"));
    CHECK(cfg.linear_mode[2] == 2);
}

TEST_CASE("config echo materializes every default", "[config]") {
    const RunConfig cfg = parse_config(std::string("init.epsilon = 0.05\n"));
    const auto echo = echo_config(cfg);
    auto find = [&](const std::string& key) {
        for (const auto& [k, v] : echo)
            if (k == key) return v;
        return std::string("<missing>");
    };
    CHECK(find("grid.n") == "32");
    CHECK(find("dynamics.dealias") == "two_thirds");
    CHECK(find("init.epsilon") == "0.05");
    CHECK(find("run.mode") == "single");
}
