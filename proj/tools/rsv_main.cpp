#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "rsv/checks.hpp"

namespace {

std::string now_string() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario-driven verification workbench for kernel and vessel identities "
                 "on compact real Riemann surfaces"};
    app.require_subcommand(1);

    // run ------------------------------------------------------------------
    std::string scenario_path, out_path, csv_dir;
    unsigned seed = 0;
    bool seed_given = false;
    double tol_scale = 1.0;
    auto* run = app.add_subcommand("run", "run every check of a scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON (schema = 1)")->required();
    run->add_option("--seed", seed, "seed for the randomized samples (default: scenario)")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--out", out_path, "write the report JSON here");
    run->add_option("--csv-dir", csv_dir, "directory for grid dumps");
    run->add_option("--tol-scale", tol_scale, "global tolerance multiplier")
        ->check(CLI::PositiveNumber);

    // list-checks ------------------------------------------------------------
    auto* list = app.add_subcommand("list-checks", "print the verification catalog");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& c : rsv::check_catalog()) {
            std::cout << c.name << "\n    identity: " << c.identity
                      << "\n    modules:  " << c.modules
                      << "\n    default tolerance: " << std::scientific
                      << std::setprecision(0) << c.default_tol << "\n";
        }
        return 0;
    }

    try {
        const std::string started = now_string();
        const rsv::Scenario sc = rsv::Scenario::from_file(scenario_path);
        const unsigned effective_seed = seed_given ? seed : sc.seed();
        const rsv::RunReport report =
            rsv::run_scenario(sc, effective_seed, tol_scale, csv_dir);

        for (const auto& c : report.checks) {
            std::cout << (c.passed ? "PASS" : "FAIL") << "  " << c.name
                      << "  (worst residual " << std::scientific << std::setprecision(2)
                      << c.worst() << ", tol " << c.tolerance << ")";
            if (!c.witness.empty()) std::cout << "  [" << c.witness << "]";
            std::cout << "\n";
        }
        std::cout << (report.passed ? "all checks passed" : "FAILURES present") << "\n";

        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "cannot write " << out_path << "\n";
                return 2;
            }
            out << report.full_json(started, now_string()) << "\n";
        }
        return report.passed ? 0 : 1;
    } catch (const rsv::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const rsv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
