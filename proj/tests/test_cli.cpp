#include "csma/scenario.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

const std::string kCli = CSMA_CLI_PATH;
const std::string kDir = CSMA_TEST_DIR;

std::string scenario_path() {
    static std::string path = [] {
        json sc = {
            {"b", 3.0},
            {"noise_ratio", 0.0},
            {"t0", 1},
            {"rts_len", 0.2},
            {"nodes",
             json::array({{{"period", 10},
                           {"demand", 3.125 / 7.25},
                           {"frame_success", {{"kind", "one"}}}},
                          {{"period", 10},
                           {"demand", 3.125 / 7.25},
                           {"frame_success", {{"kind", "one"}}}}})}};
        std::string p = kDir + "/symmetric2.json";
        std::ofstream(p) << sc.dump(2);
        return p;
    }();
    return path;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args, const std::string& tag) {
    std::string out_file = kDir + "/out_" + tag + ".txt";
    std::string cmd = kCli + " " + args + " > " + out_file + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

}  // namespace

TEST_CASE("solve emits the symmetric equilibrium") {
    auto res = run("solve " + scenario_path(), "solve");
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    CHECK(out["better"]["p"][0].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-9));
    CHECK(out["better"]["residual"].get<double>() < 1e-10);
    CHECK(out["better"]["branch"] == "better");
}

TEST_CASE("grant and perf round-trip as JSON") {
    auto g = run("grant --p 0.5,0.5 " + scenario_path(), "grant");
    REQUIRE(g.exit_code == 0);
    json gj = json::parse(g.out);
    CHECK(gj["grants"][0].get<double>() == doctest::Approx(0.3125));

    auto p = run("perf --p 0.5,0.5 " + scenario_path(), "perf");
    REQUIRE(p.exit_code == 0);
    json pj = json::parse(p.out);
    CHECK(pj["throughput"][0].get<double>() ==
          doctest::Approx(3.125 / 7.25).epsilon(1e-12));
}

TEST_CASE("csv output is well formed") {
    auto res = run("grant --p 0.5,0.5 --format csv " + scenario_path(),
                   "grant_csv");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.substr(0, 5) == "g0,g1");
}

TEST_CASE("bound at the regime seam") {
    // M = 10 needs t0-scaled periods; reuse scenario with t0=1, T=10
    auto res = run("bound --beta 0.75 " + scenario_path(), "bound");
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    CHECK(out["bound"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out["tightness"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("zeta csv table") {
    auto res = run("zeta --imin 2 --imax 4 --format csv", "zeta");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.substr(0, 7) == "i,zeta\n");
    int lines = 0;
    for (char c : res.out)
        if (c == '\n') ++lines;
    CHECK(lines == 4);
}

TEST_CASE("lemma1 oracle output") {
    auto res = run("lemma1 --n 2 --b 3 --C 1.3333333333333333 --grid 300",
                   "lemma1");
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    CHECK(out["min"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
    CHECK(out["max"].get<double>() == doctest::Approx(5.0 / 6.0).epsilon(1e-5));
}

TEST_CASE("simulate with --compare reports small z-scores") {
    auto res = run("simulate --seed 42 --handshakes 2e5 --compare " +
                       scenario_path(),
                   "sim");
    REQUIRE(res.exit_code == 0);
    json out = json::parse(res.out);
    for (const auto& key : {"grants", "throughput", "power"})
        for (const auto& z : out["z"][key])
            CHECK(std::abs(z.get<double>()) < 4.0);
}

TEST_CASE("identical argv and seed give byte-identical output") {
    auto a = run("simulate --seed 7 --handshakes 1e4 " + scenario_path(), "da");
    auto b = run("simulate --seed 7 --handshakes 1e4 " + scenario_path(), "db");
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
}

TEST_CASE("sweep emits the documented csv layout") {
    auto res = run("sweep --var beta --from 0.1 --to 0.9 --steps 3 " +
                       scenario_path(),
                   "sweep");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.substr(0, 22) == "beta,feasible,sum_p,p0");
    int lines = 0;
    for (char c : res.out)
        if (c == '\n') ++lines;
    CHECK(lines == 4);
}

TEST_CASE("exit codes distinguish invalid and infeasible input") {
    auto bad = run("solve /nonexistent/file.json", "bad");
    CHECK(bad.exit_code == 1);

    json sc = json::parse(std::ifstream(scenario_path()));
    sc["nodes"][0]["demand"] = 0.7;
    sc["nodes"][1]["demand"] = 0.7;  // rho_t > 1
    std::string overload = kDir + "/overload.json";
    std::ofstream(overload) << sc.dump();
    auto inf = run("solve " + overload, "inf");
    CHECK(inf.exit_code == 2);

    sc["nodes"][0]["demand"] = 0.45;
    sc["nodes"][1]["demand"] = 0.45;  // rho_t < 1 but outside the region
    std::string outside = kDir + "/outside.json";
    std::ofstream(outside) << sc.dump();
    auto out = run("solve " + outside, "outside");
    CHECK(out.exit_code == 2);
}

TEST_CASE("scenario directory env var resolves bare names") {
    std::string cmd = "CSMA_SCENARIO_DIR=" + kDir + " " + kCli +
                      " feasible symmetric2.json > " + kDir +
                      "/out_env.txt 2>/dev/null";
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    json out = json::parse(std::ifstream(kDir + "/out_env.txt"));
    CHECK(out["feasible"].get<bool>());
}
