#pragma once

#include <map>
#include <memory>
#include <optional>

#include "rsv/transfer.hpp"
#include "rsv/vessel.hpp"

namespace rsv {

/// One requested verification with its arguments and tolerance override.
struct CheckRequest {
    std::string name;
    std::map<std::string, std::string> args;  // role -> declared function name
    std::optional<double> tol;
};

/// Declarative description of a verification run: a curve, multiplier
/// points, named functions, a model-space basis, transfer zeros and the
/// check list.  Parsed from JSON (schema = 1).
class Scenario {
  public:
    static Scenario from_json_text(const std::string& text, const std::string& origin);
    static Scenario from_file(const std::string& path);

    const std::string& name() const { return name_; }
    unsigned seed() const { return seed_; }
    const RealCurve& curve() const { return *curve_; }
    const KernelContext& ctx() const { return ctx_; }          // zeta_tilde context
    const KernelContext& ctx_in() const { return ctx_in_; }    // zeta context
    const std::vector<SurfacePoint>& basis() const { return basis_; }
    const std::vector<SurfacePoint>& transfer_zeros() const { return transfer_zeros_; }
    const std::vector<CheckRequest>& checks() const { return checks_; }

    const MeromorphicFn& fn(const std::string& name) const;
    bool has_fn(const std::string& name) const { return fns_.count(name) > 0; }

    ModelSpace model_space() const;
    BlaschkeProduct transfer() const;

  private:
    std::string name_;
    unsigned seed_ = 0;
    std::shared_ptr<RealCurve> curve_;
    KernelContext ctx_, ctx_in_;
    std::vector<SurfacePoint> basis_;
    std::vector<SurfacePoint> transfer_zeros_;
    std::map<std::string, MeromorphicFn> fns_;
    std::vector<CheckRequest> checks_;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double tolerance = 0.0;
    // residual name -> value, deterministic order
    std::vector<std::pair<std::string, double>> residuals;
    // non-residual numbers (sample counts, determinant floors)
    std::vector<std::pair<std::string, double>> diagnostics;
    std::string witness;  // failure diagnostics, empty when green
    double wall_ms = 0.0;

    double worst() const {
        double w = 0.0;
        for (const auto& [k, v] : residuals) w = std::max(w, v);
        return w;
    }
};

struct RunReport {
    std::string scenario;
    unsigned seed = 0;
    double tol_scale = 1.0;
    std::vector<CheckResult> checks;
    double gram_cond = 0.0;
    bool passed = false;

    /// Deterministic payload (no wall times, no timestamps).
    std::string payload_json() const;
    /// Full report: payload plus the volatile timing section.
    std::string full_json(const std::string& started, const std::string& finished) const;
};

}  // namespace rsv
