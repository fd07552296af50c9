#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "parawolff/config.hpp"
#include "parawolff/csv.hpp"
#include "parawolff/run.hpp"

using namespace parawolff;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path;
}

const char* kGoodConfig = R"(# comment line
out_dir = "unused"

[[scenario]]
name = "demo"
n = 1
p = 3.0
lambda = 0.5
kappa = 0.1
k_cutoff = 5.0
side_length = 1.0
t_final = 0.4
cells_per_axis = 32
dt = 0.008
initial = "constant"
initial_value = 0.0
boundary = 0.0
atom = { x = [0.5], mass = 1.0 }   # trailing comment
atom = { x = [0.25], mass = 0.5 }
rung = { cells_per_axis = 32, dt = 0.008 }
rung = { cells_per_axis = 48, dt = 0.004 }
point = { y = [0.5], s = 0.2, rho = 0.2 }
wolff_query = { x = [0.5], R = 0.4 }
)";

}  // namespace

TEST_CASE("a well-formed config maps onto a scenario") {
    const auto path = write_temp("parawolff_good.cfg", kGoodConfig);
    const auto cfg = load_config(path.string());
    CHECK(cfg.out_dir == "unused");
    REQUIRE(cfg.scenarios.size() == 1);
    const Scenario& scn = cfg.scenarios.front();
    CHECK(scn.name == "demo");
    CHECK(scn.params.n == 1);
    CHECK(scn.params.p == 3.0);
    REQUIRE(scn.measure.atoms.size() == 2);
    CHECK(scn.measure.atoms[1].mass == 0.5);
    REQUIRE(scn.rungs.size() == 2);
    CHECK(scn.rungs[1].cells_per_axis == 48);
    REQUIRE(scn.points.size() == 1);
    CHECK(scn.points[0].rho == 0.2);
    REQUIRE(scn.wolff_queries.size() == 1);
    CHECK(scn.wolff_queries[0].R == 0.4);
    std::filesystem::remove(path);
}

TEST_CASE("unknown keys are named in the diagnostic") {
    const auto path = write_temp("parawolff_badkey.cfg",
                                 "[[scenario]]\nname = \"x\"\nbogus_key = 3\n");
    try {
        load_config(path.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
        CHECK(e.line == 3);
    }
    std::filesystem::remove(path);
}

TEST_CASE("malformed values carry their line number") {
    const auto path =
        write_temp("parawolff_badval.cfg", "[[scenario]]\nname = \"x\"\np = oops\n");
    try {
        load_config(path.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
    }
    std::filesystem::remove(path);
}

TEST_CASE("incomplete inline tables are rejected") {
    const auto path = write_temp("parawolff_badatom.cfg",
                                 "[[scenario]]\nname = \"x\"\natom = { x = [0.5] }\n");
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("parameter violations are reported with the scenario name") {
    const auto path = write_temp("parawolff_badparam.cfg",
                                 "[[scenario]]\nname = \"bad\"\np = 1.5\n");
    try {
        load_config(path.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("bad") != std::string::npos);
        CHECK(msg.find("p >= 2") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("points violating containment are rejected at load time") {
    const auto path = write_temp(
        "parawolff_badpoint.cfg",
        "[[scenario]]\nname = \"x\"\nn = 1\nt_final = 0.4\ndt = 0.008\ncells_per_axis = 32\n"
        "point = { y = [0.1], s = 0.2, rho = 0.2 }\n");
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("float formatting carries 17 significant digits") {
    CHECK(fmt17(1.0 / 3.0) == "0.33333333333333331");
    CHECK(fmt17(0.0) == "0");
    CHECK(fmt17(2.0) == "2");
}

TEST_CASE("verify on an empty scenario list exits zero with a bare header") {
    const auto path = write_temp("parawolff_empty.cfg", "# nothing here\n");
    const auto out = std::filesystem::temp_directory_path() / "parawolff_empty_out";
    std::filesystem::remove_all(out);
    RunOptions opt;
    opt.out_dir = out.string();
    CHECK(run_verify(path.string(), opt) == 0);
    std::ifstream verdict(out / "verdict.csv");
    REQUIRE(verdict.good());
    std::string header, extra;
    std::getline(verdict, header);
    CHECK(header.rfind("scenario,", 0) == 0);
    CHECK_FALSE(std::getline(verdict, extra));
    std::filesystem::remove(path);
    std::filesystem::remove_all(out);
}

TEST_CASE("malformed configs exit nonzero through the run layer") {
    const auto path = write_temp("parawolff_broken.cfg", "[[scenario]\n");
    RunOptions opt;
    opt.out_dir = (std::filesystem::temp_directory_path() / "parawolff_broken_out").string();
    try {
        run_verify(path.string(), opt);
        FAIL("expected ConfigError");
    } catch (const ConfigError&) {
        SUCCEED();
    }
    std::filesystem::remove(path);
}

TEST_CASE("wolff subcommand emits DIVERGENT for a centered atom at p = n") {
    const auto path = write_temp("parawolff_wolffdiv.cfg",
                                 "[[scenario]]\nname = \"div\"\nn = 2\np = 2.0\nlambda = 0.5\n"
                                 "t_final = 0.1\ndt = 0.005\ncells_per_axis = 16\n"
                                 "atom = { x = [0.5, 0.5], mass = 1.0 }\n"
                                 "wolff_query = { x = [0.5, 0.5], R = 0.2 }\n"
                                 "wolff_query = { x = [0.7, 0.5], R = 0.2 }\n");
    const auto out = std::filesystem::temp_directory_path() / "parawolff_wolffdiv_out";
    std::filesystem::remove_all(out);
    RunOptions opt;
    opt.out_dir = out.string();
    REQUIRE(run_wolff(path.string(), opt) == 0);
    std::ifstream csv(out / "wolff_div.csv");
    REQUIRE(csv.good());
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,R,p,n,value");
    std::getline(csv, line);
    CHECK(line.find("DIVERGENT") != std::string::npos);
    std::getline(csv, line);
    CHECK(line.find("DIVERGENT") == std::string::npos);
    std::filesystem::remove(path);
    std::filesystem::remove_all(out);
}
