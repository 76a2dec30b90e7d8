#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "oracles.hpp"

using Catch::Matchers::WithinAbs;

namespace {

struct CliResult {
    int status = -1;
    std::string out; // stdout and stderr merged
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = "UAI_THREADS=1 " UAI_CLI_PATH " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

std::string temp_csv(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream f(path);
    f << body;
    return path.string();
}

double extract_number(const std::string& json, const std::string& key) {
    const std::string needle = "\"" + key + "\":";
    const auto pos = json.find(needle);
    REQUIRE(pos != std::string::npos);
    return std::strtod(json.c_str() + pos + needle.size(), nullptr);
}

} // namespace

TEST_CASE("ce with a gaussian law matches the closed form", "[cli]") {
    CliResult r = run_cli("ce --utility exp --gamma 1 --gaussian 0.08,0.2");
    REQUIRE(r.status == 0);
    REQUIRE(r.out.rfind("{\"mu\":", 0) == 0); // documented key comes first
    REQUIRE(r.out.back() == '\n');
    REQUIRE_THAT(extract_number(r.out, "mu"), WithinAbs(-0.06, 1e-15));
    REQUIRE(r.out.find("\"command\":\"ce\"") != std::string::npos);
    REQUIRE(r.out.find("\"config\":") != std::string::npos);
}

TEST_CASE("ce from csv input", "[cli]") {
    const std::string csv = temp_csv("uai_cli_sym.csv", "-1\n1\n");
    CliResult r = run_cli("ce --utility exp --gamma 1 --input " + csv);
    REQUIRE(r.status == 0);
    // mu is the risk-measure orientation: ln cosh 1 > 0 for the fair bet
    REQUIRE_THAT(extract_number(r.out, "mu"), WithinAbs(oracles::ln_cosh_1, 1e-12));
}

TEST_CASE("index reports a nonnegative position as infinite", "[cli]") {
    const std::string csv = temp_csv("uai_cli_pos.csv", "0.5\n1.0\n2.0\n");
    CliResult r = run_cli("index --input " + csv);
    REQUIRE(r.status == 0);
    REQUIRE(r.out.find("\"alpha\":\"inf\",\"diagnostic\":\"nonneg_position\"") != std::string::npos);
}

TEST_CASE("simulate then index round trip", "[cli]") {
    const auto out_path =
        (std::filesystem::temp_directory_path() / "uai_cli_sim.csv").string();
    CliResult sim = run_cli("simulate --model iid --mean 0.08 --sigma 0.2 --n 64 --seed 5 --out " +
                            out_path);
    REQUIRE(sim.status == 0);
    REQUIRE(std::filesystem::exists(out_path));
    CliResult idx = run_cli("index --input " + out_path + " --benchmark-rate 0.02");
    REQUIRE(idx.status == 0);
    REQUIRE(idx.out.rfind("{\"alpha\":", 0) == 0);
}

TEST_CASE("usage problems exit 2 with a usage message", "[cli]") {
    CliResult missing = run_cli("ce --utility exp");
    REQUIRE(missing.status == 2);
    REQUIRE(missing.out.find("usage error") != std::string::npos);

    REQUIRE(run_cli("nosuchcommand").status == 2);
    REQUIRE(run_cli("index").status == 2); // --input is required
    REQUIRE(run_cli("").status == 2);      // a subcommand is required
}

TEST_CASE("computation failures exit 1 with an error document", "[cli]") {
    CliResult r = run_cli("ce --utility exp --gamma 1 --input /nonexistent_uai_file.csv");
    REQUIRE(r.status == 1);
    REQUIRE(r.out.rfind("{\"error\":", 0) == 0);
    REQUIRE(r.out.find("\"command\":\"ce\"") != std::string::npos);
}

TEST_CASE("regularity certificate for a non-shipped family", "[cli]") {
    CliResult r = run_cli("regularity --utility iterexp");
    REQUIRE(r.status == 0);
    REQUIRE(r.out.find("\"verdict\":\"regular_on_grid\"") != std::string::npos);

    // the index command certifies such a family on the fly
    const std::string csv = temp_csv("uai_cli_mixed.csv", "-1\n2\n-0.5\n1.5\n");
    CliResult idx = run_cli("index --utility iterexp --input " + csv);
    REQUIRE(idx.status == 0);
    REQUIRE(idx.out.find("\"certification\":\"grid\"") != std::string::npos);
}

TEST_CASE("help exits zero", "[cli]") {
    CliResult r = run_cli("--help");
    REQUIRE(r.status == 0);
    REQUIRE(r.out.find("longrun") != std::string::npos);
}

TEST_CASE("repeated runs are byte identical", "[cli]") {
    const std::string cmd =
        "longrun --model iid --mean 0.08 --sigma 0.2 --lambda 0.02 --tgrid 8,16 "
        "--paths 1200 --seed 3 --method mc";
    CliResult a = run_cli(cmd);
    CliResult b = run_cli(cmd);
    REQUIRE(a.status == 0);
    REQUIRE(a.out == b.out);
}
