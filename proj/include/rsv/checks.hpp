#pragma once

#include <functional>
#include <random>

#include "rsv/scenario.hpp"

namespace rsv {

struct CheckSpec {
    std::string name;
    std::string identity;  // the mathematical statement being verified
    std::string modules;
    double default_tol = 1e-8;
    std::function<CheckResult(const Scenario&, const CheckRequest&, std::mt19937_64&,
                              double /*tol*/)>
        run;
};

/// Deterministically ordered catalog of every available verification.
const std::vector<CheckSpec>& check_catalog();

const CheckSpec* find_check(const std::string& name);

/// Execute all requested checks of a scenario.  Check errors are recorded as
/// failures with a witness, never propagated.
RunReport run_scenario(const Scenario& sc, unsigned seed_override, double tol_scale,
                       const std::string& csv_dir = "");

}  // namespace rsv
