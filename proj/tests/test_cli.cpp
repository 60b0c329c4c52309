#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef SUBLEVEL_CLI_PATH
#define SUBLEVEL_CLI_PATH "sublevel"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const fs::path outfile = fs::temp_directory_path() / "sublevel_cli_test_out.txt";
    const std::string cmd =
        std::string(SUBLEVEL_CLI_PATH) + " " + args + " > " + outfile.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream in(outfile);
    r.out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return r;
}

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

const std::string kCircle = R"({"n":2,"d":2,"terms":[[[2,0],1.0],[[0,2],1.0]]})";
const std::string kEllipse = R"({"n":2,"d":2,"terms":[[[2,0],1.0],[[0,2],4.0]]})";

} // namespace

TEST_CASE("volume subcommand reproduces the disk value") {
    const fs::path poly = write_temp("cli_circle.json", kCircle);
    const RunResult r = run_cli("volume --poly " + poly.string() +
                                " --j 1 --alpha 1 --seed 7 --outer 256 --inner 64");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    CHECK(std::abs(doc["result"]["value"].get<double>() - M_PI) < 1e-9);
    CHECK(doc["manifest"]["command"] == "volume");
    CHECK(doc["manifest"]["inputs"].contains("poly"));
    CHECK(doc["manifest"]["inputs"]["poly"].contains("fnv1a64"));
}

TEST_CASE("same argv and seed give byte-identical output") {
    const fs::path poly = write_temp("cli_ellipse.json", kEllipse);
    const std::string args =
        "dual-volume --poly " + poly.string() + " --j 1 --seed 11 --outer 512 --inner 32";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());

    const RunResult c = run_cli(args + "0"); // different seed: different bytes
    REQUIRE(c.exit_code == 0);
    CHECK(a.out != c.out);
}

TEST_CASE("estimates do not depend on the worker count") {
    const fs::path poly = write_temp("cli_ellipse.json", kEllipse);
    const std::string base =
        "volume --poly " + poly.string() + " --j 1 --seed 3 --outer 256 --inner 32";
    const RunResult w1 = run_cli(base + " --workers 1");
    const RunResult w2 = run_cli(base + " --workers 2");
    REQUIRE(w1.exit_code == 0);
    const json a = json::parse(w1.out), b = json::parse(w2.out);
    CHECK(a["result"]["value"] == b["result"]["value"]);
}

TEST_CASE("count and csv output") {
    const fs::path poly = write_temp("cli_circle.json", kCircle);
    const RunResult r = run_cli("count --poly " + poly.string() + " --alpha 100");
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["result"]["count"] == 317);

    const RunResult csv =
        run_cli("count --poly " + poly.string() + " --alpha 100 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out == "alpha,count\n100,317\n");
}

TEST_CASE("exit code taxonomy") {
    SUBCASE("usage errors exit 1") {
        CHECK(run_cli("volume --nonsense").exit_code == 1);
        CHECK(run_cli("no-such-subcommand").exit_code == 1);
    }

    SUBCASE("precondition errors exit 2") {
        const fs::path odd = write_temp("cli_odd.json",
                                        R"({"n":2,"d":3,"terms":[[[2,1],1.0]]})");
        CHECK(run_cli("count --poly " + odd.string() + " --alpha 10").exit_code == 2);

        const fs::path indef = write_temp("cli_indef.json",
                                          R"({"n":2,"d":2,"terms":[[[2,0],1.0],[[0,2],-1.0]]})");
        CHECK(run_cli("count --poly " + indef.string() + " --alpha 10").exit_code == 2);
    }

    SUBCASE("numerical failures exit 3") {
        const fs::path poly = write_temp("cli_circle.json", kCircle);
        const fs::path outfile = fs::temp_directory_path() / "sublevel_cli_budget.txt";
        const std::string cmd = std::string("SUBLEVEL_MAX_ENUM=10 ") + SUBLEVEL_CLI_PATH +
                                " count --poly " + poly.string() + " --alpha 1000 > " +
                                outfile.string() + " 2>/dev/null";
        CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
    }
}

TEST_CASE("theta subcommand reports a certified tail") {
    const fs::path poly = write_temp("cli_circle.json", kCircle);
    const RunResult r = run_cli("theta --poly " + poly.string() + " --t 0.05");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    const double value = doc["result"]["value"].get<double>();
    const double tail = doc["result"]["tail_bound"].get<double>();
    CHECK(value >= 1.0);
    CHECK(tail <= 1e-12 * value);
}

TEST_CASE("output lands in --out when requested") {
    const fs::path poly = write_temp("cli_circle.json", kCircle);
    const fs::path target = fs::temp_directory_path() / "sublevel_cli_redirect.json";
    std::error_code ec;
    fs::remove(target, ec);
    const RunResult r = run_cli("full-volume --poly " + poly.string() +
                                " --outer 32 --inner 256 --out " + target.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    std::ifstream in(target);
    REQUIRE(in.good());
    const json doc = json::parse(in);
    CHECK(std::abs(doc["result"]["value"].get<double>() - M_PI) < 1e-6);
}
