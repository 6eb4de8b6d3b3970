#include <doctest.h>

#include "csum/config.hpp"
#include "csum/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace csum;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CSUM_CLI_PATH) + " " + args + " 2>/dev/null";
    return std::system(cmd.c_str());
}

} // namespace

TEST_CASE("config: risk model round trip") {
    const ParsedConfig cfg = parse_config_text(
        "# comment\nmodel = risk\nX = exp(2.0)\nY = exp(1.0)\nc = 2.0\n");
    const auto& r = as_risk(config_basis(cfg));
    CHECK(std::get<Exponential>(r.x_dist).rate == 2.0);
    CHECK(std::get<Exponential>(r.y_dist).rate == 1.0);
    CHECK(r.premium_c == 2.0);
    CHECK(cfg.hash == fnv1a_hash(cfg.raw_text));
}

TEST_CASE("config: direct model with first-interval modes") {
    const ParsedConfig c1 =
        parse_config_text("model = direct\nT = uniform(0,1)\nX = det(1)\nfirst = equilibrium\n");
    const auto& d = as_direct(config_basis(c1));
    CHECK(std::holds_alternative<Equilibrium>(d.first_interval));
    const ParsedConfig c2 =
        parse_config_text("model = direct\nT = gamma(2,1)\nX = exp(1)\nfirst = modified det(0.5)\n");
    const auto& d2 = as_direct(config_basis(c2));
    CHECK(std::get<Deterministic>(std::get<Modified>(d2.first_interval).first).value == 0.5);
}

TEST_CASE("config: modular model") {
    const ParsedConfig cfg = parse_config_text(
        "model = modular\nstates = 2\ninitial = 0\nreference = 0\n"
        "P[0] = 0.5 0.5\nP[1] = 0.5 0.5\n"
        "T[0][0] = exp(1)\nT[0][1] = exp(1)\nT[1][0] = exp(2)\nT[1][1] = exp(2)\n"
        "X[0][0] = exp(2)\nX[0][1] = exp(2)\nX[1][0] = exp(1)\nX[1][1] = exp(1)\n");
    const auto& m = config_modulated(cfg);
    CHECK(m.n_states == 2);
    CHECK(m.p(1, 0) == 0.5);
}

TEST_CASE("config: malformed inputs carry precise errors") {
    CHECK_THROWS_AS(parse_config_text("model = risk\nX = exp(2)\nc = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("model = risk\nX = exp(0)\nY = exp(1)\nc = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("model = waffle\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("model = risk\nX = exp(2)\nY = exp(1)\nc = 1\nz = 3\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("model = direct\nT = pareto(2)\nX = det(1)\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("model = direct\nT = exp(1)\nT = exp(2)\nX = det(1)\n"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config_text("model = modular\nstates = 2\ninitial = 0\nreference = 0\n"
                          "P[0] = 0.7 0.7\nP[1] = 0.5 0.5\n"
                          "T[0][0] = exp(1)\nT[0][1] = exp(1)\nT[1][0] = exp(2)\nT[1][1] = exp(2)\n"
                          "X[0][0] = exp(2)\nX[0][1] = exp(2)\nX[1][0] = exp(1)\nX[1][1] = exp(1)\n"),
        ConfigError);
}

TEST_CASE("shipped example configs parse") {
    const std::string dir = CSUM_CONFIG_DIR;
    CHECK(std::holds_alternative<BasisSpec>(load_config(dir + "/risk_exp.cfg").model));
    CHECK(std::holds_alternative<BasisSpec>(load_config(dir + "/renewal_uniform.cfg").model));
    CHECK(std::holds_alternative<MarkovModulatedBasis>(
        load_config(dir + "/modular_twostate.cfg").model));
}

TEST_CASE("cli: same seed and config produce byte-identical output") {
    const std::string dir = CSUM_CONFIG_DIR;
    const std::string base = " simulate --config " + dir +
                             "/risk_exp.cfg --level 10 --paths 2000 --seed 42 --cap 20000";
    REQUIRE(run_cli(base + " --workers 1 --out /tmp/csum_det_a.csv") == 0);
    REQUIRE(run_cli(base + " --workers 4 --out /tmp/csum_det_b.csv") == 0);
    CHECK(slurp("/tmp/csum_det_a.csv") == slurp("/tmp/csum_det_b.csv"));

    const std::string sweep = " sweep --config " + dir +
                              "/risk_exp.cfg --c 1.5:2.5:5 --level 10 --horizon 200 "
                              "--methods exact,ig,normal,qnormal --seed 7";
    REQUIRE(run_cli(sweep + " --out /tmp/csum_sw_a.csv") == 0);
    REQUIRE(run_cli(sweep + " --out /tmp/csum_sw_b.csv") == 0);
    const std::string a = slurp("/tmp/csum_sw_a.csv");
    CHECK(a == slurp("/tmp/csum_sw_b.csv"));
    CHECK(a.rfind("# config_hash=0x", 0) == 0); // preamble carries hash + seed
    CHECK(a.find("seed=7") != std::string::npos);
    CHECK(a.find("c,exact,ig,normal,qnormal") != std::string::npos);
}

TEST_CASE("cli: regime and precondition errors exit nonzero") {
    const std::string dir = CSUM_CONFIG_DIR;
    // edgeworth needs a regular-summation basis, not the risk form
    CHECK(run_cli(" approx --config " + dir +
                  "/risk_exp.cfg --method edgeworth --t 30 --x 30 --out /tmp/csum_e.csv") != 0);
    // normal approximation demands the proper regime; risk_exp.cfg sits at c = c*
    CHECK(run_cli(" approx --config " + dir +
                  "/risk_exp.cfg --method normal --level 10 --x 100 --out /tmp/csum_e.csv") != 0);
    CHECK(run_cli(" exact --config " + dir + "/renewal_uniform.cfg --level 10 --horizon 100") != 0);
    CHECK(run_cli(" exact --config /nonexistent.cfg --level 10 --horizon 100") != 0);
}

TEST_CASE("cli: edgeworth on a direct model reports coefficients") {
    const std::string dir = CSUM_CONFIG_DIR;
    REQUIRE(run_cli(" approx --config " + dir +
                    "/renewal_uniform.cfg --method edgeworth --t 40 --x 75:85:3 "
                    "--out /tmp/csum_edge.csv") == 0);
    const std::string out = slurp("/tmp/csum_edge.csv");
    CHECK(out.find("kappa30=") != std::string::npos);
    CHECK(out.find("t,x,edgeworth,normal,std_x") != std::string::npos);
}
