#include "rsv/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rsv {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(where + ": expected [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

std::vector<Complex> parse_complex_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<Complex> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), path);
}

Scenario Scenario::from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!j.contains("schema") || j["schema"].get<int>() != 1)
        throw ConfigError(origin + ": missing or unsupported schema (expected 1)");

    Scenario sc;
    sc.name_ = j.value("name", std::string("unnamed"));
    sc.seed_ = j.value("seed", 0u);

    // -- curve ---------------------------------------------------------
    if (!j.contains("curve")) throw ConfigError(origin + ": missing curve");
    const auto& jc = j["curve"];
    const std::string backend = jc.value("backend", std::string());
    if (backend == "genus0") {
        sc.curve_ = std::make_shared<RealCurve>(RealCurve::genus0());
    } else if (backend == "genus1") {
        if (!jc.contains("tau")) throw ConfigError(origin + ": genus1 curve needs tau");
        sc.curve_ = std::make_shared<RealCurve>(
            RealCurve::genus1(parse_complex(jc["tau"], origin + ": curve.tau")));
    } else if (backend == "generic") {
        if (!jc.contains("gamma")) throw ConfigError(origin + ": generic curve needs gamma");
        const auto& jg = jc["gamma"];
        const int g = static_cast<int>(jg.size());
        Eigen::MatrixXcd gamma(g, g);
        for (int r = 0; r < g; ++r)
            for (int c = 0; c < g; ++c)
                gamma(r, c) = parse_complex(jg[r][c], origin + ": curve.gamma");
        sc.curve_ = std::make_shared<RealCurve>(RealCurve::generic(
            PeriodMatrix::make(gamma), jc.value("components", 1), jc.value("dividing", false)));
    } else {
        throw ConfigError(origin + ": curve.backend must be genus0, genus1 or generic");
    }

    // -- multiplier points ----------------------------------------------
    auto parse_zeta = [&](const char* key) -> KernelContext {
        if (sc.curve_->genus() == 0 || !j.contains(key))
            return sc.curve_->genus() == 0
                       ? KernelContext::trivial(*sc.curve_)
                       : KernelContext::make(
                             *sc.curve_,
                             torii_point(*sc.curve_,
                                         std::vector<int>(sc.curve_->component_count() - 1, 0),
                                         Eigen::VectorXd::Constant(sc.curve_->genus(), 0.23)));
        const auto& jz = j[key];
        std::vector<int> nu;
        if (jz.contains("nu"))
            for (const auto& v : jz["nu"]) nu.push_back(v.get<int>());
        Eigen::VectorXd a = Eigen::VectorXd::Zero(sc.curve_->genus());
        if (jz.contains("a")) {
            if (static_cast<int>(jz["a"].size()) != sc.curve_->genus())
                throw ConfigError(origin + ": " + key + ".a has wrong length");
            for (int i = 0; i < a.size(); ++i) a[i] = jz["a"][i].get<double>();
        }
        if (static_cast<int>(nu.size()) != sc.curve_->component_count() - 1)
            throw ConfigError(origin + ": " + key + ".nu must have k-1 entries");
        return KernelContext::make(*sc.curve_, torii_point(*sc.curve_, nu, a));
    };
    sc.ctx_ = parse_zeta("zeta_tilde");
    sc.ctx_in_ = parse_zeta("zeta");

    // -- functions -------------------------------------------------------
    if (j.contains("functions")) {
        for (const auto& jf : j["functions"]) {
            const std::string name = jf.value("name", std::string());
            const std::string kind = jf.value("kind", std::string());
            if (name.empty()) throw ConfigError(origin + ": function without a name");
            const std::string where = origin + ": function " + name;
            if (sc.fns_.count(name)) throw ConfigError(where + " declared twice");
            auto ref = [&](const char* key) -> const MeromorphicFn& {
                const std::string target = jf.value(key, std::string());
                auto it = sc.fns_.find(target);
                if (it == sc.fns_.end())
                    throw ConfigError(where + ": unresolved reference '" + target + "'");
                return it->second;
            };
            if (kind == "zeta_pair") {
                sc.fns_.emplace(name, MeromorphicFn::zeta_pair(
                                          *sc.curve_,
                                          SurfacePoint::at(parse_complex(jf.at("a"), where)),
                                          SurfacePoint::at(parse_complex(jf.at("b"), where))));
            } else if (kind == "conj_pair") {
                sc.fns_.emplace(name, MeromorphicFn::conj_pair(
                                          *sc.curve_,
                                          SurfacePoint::at(parse_complex(jf.at("p"), where))));
            } else if (kind == "double_pole") {
                sc.fns_.emplace(name, MeromorphicFn::double_pole(
                                          *sc.curve_,
                                          SurfacePoint::at(parse_complex(jf.at("a"), where))));
            } else if (kind == "rational") {
                sc.fns_.emplace(name, MeromorphicFn::rational(
                                          *sc.curve_,
                                          parse_complex_list(jf.at("num"), where + ".num"),
                                          parse_complex_list(jf.at("den"), where + ".den")));
            } else if (kind == "constant") {
                sc.fns_.emplace(name, MeromorphicFn::constant(
                                          *sc.curve_, parse_complex(jf.at("value"), where)));
            } else if (kind == "sum") {
                sc.fns_.emplace(name, MeromorphicFn::sum(ref("lhs"), ref("rhs")));
            } else if (kind == "product") {
                sc.fns_.emplace(name, MeromorphicFn::product(ref("lhs"), ref("rhs")));
            } else if (kind == "mobius") {
                const auto co = parse_complex_list(jf.at("coeffs"), where + ".coeffs");
                if (co.size() != 4) throw ConfigError(where + ": mobius needs 4 coefficients");
                sc.fns_.emplace(name,
                                MeromorphicFn::mobius(ref("of"), co[0], co[1], co[2], co[3]));
            } else {
                throw ConfigError(where + ": unknown kind '" + kind + "'");
            }
        }
    }

    // -- geometry --------------------------------------------------------
    if (j.contains("basis"))
        for (const auto& jb : j["basis"])
            sc.basis_.push_back(SurfacePoint::at(parse_complex(jb, origin + ": basis")));
    if (j.contains("transfer_zeros"))
        for (const auto& jz : j["transfer_zeros"])
            sc.transfer_zeros_.push_back(
                SurfacePoint::at(parse_complex(jz, origin + ": transfer_zeros")));

    // basis points must be distinct
    for (size_t i = 0; i < sc.basis_.size(); ++i)
        for (size_t k = i + 1; k < sc.basis_.size(); ++k)
            if (points_equal(*sc.curve_, sc.basis_[i], sc.basis_[k], 1e-8))
                throw ConfigError(origin + ": basis points must be distinct");

    // -- checks ------------------------------------------------------------
    if (j.contains("checks")) {
        for (const auto& jk : j["checks"]) {
            CheckRequest req;
            req.name = jk.value("name", std::string());
            if (req.name.empty()) throw ConfigError(origin + ": check without a name");
            if (jk.contains("tol")) {
                req.tol = jk["tol"].get<double>();
                if (*req.tol <= 0.0)
                    throw ConfigError(origin + ": tolerance of " + req.name +
                                      " must be positive");
            }
            if (jk.contains("args"))
                for (const auto& [k, v] : jk["args"].items())
                    req.args[k] = v.get<std::string>();
            sc.checks_.push_back(std::move(req));
        }
    }
    return sc;
}

const MeromorphicFn& Scenario::fn(const std::string& name) const {
    auto it = fns_.find(name);
    if (it == fns_.end()) throw ConfigError("unresolved function name '" + name + "'");
    return it->second;
}

ModelSpace Scenario::model_space() const {
    if (basis_.empty()) throw ConfigError("scenario declares no model-space basis");
    return ModelSpace::make(ctx_, basis_);
}

BlaschkeProduct Scenario::transfer() const {
    return BlaschkeProduct::make(*curve_, transfer_zeros_,
                                 curve_->genus() == 0 ? Eigen::VectorXcd(0)
                                                      : ctx_in_.zeta());
}

namespace {

nlohmann::ordered_json result_json(const CheckResult& r) {
    nlohmann::ordered_json res;
    res["name"] = r.name;
    res["passed"] = r.passed;
    res["tolerance"] = r.tolerance;
    nlohmann::ordered_json rr;
    for (const auto& [k, v] : r.residuals) rr[k] = v;
    res["residuals"] = rr;
    if (!r.diagnostics.empty()) {
        nlohmann::ordered_json dd;
        for (const auto& [k, v] : r.diagnostics) dd[k] = v;
        res["diagnostics"] = dd;
    }
    if (!r.witness.empty()) res["witness"] = r.witness;
    return res;
}

}  // namespace

std::string RunReport::payload_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["tol_scale"] = tol_scale;
    nlohmann::ordered_json env;
    env["theta_default_tol"] = 1e-12;
    env["truncation_cap"] = 200;
    env["gram_cond"] = gram_cond;
    j["environment"] = env;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) arr.push_back(result_json(c));
    j["checks"] = arr;
    j["passed"] = passed;
    return j.dump(2);
}

std::string RunReport::full_json(const std::string& started,
                                 const std::string& finished) const {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(payload_json());
    nlohmann::ordered_json timing;
    timing["started"] = started;
    timing["finished"] = finished;
    nlohmann::ordered_json per;
    for (const auto& c : checks) per[c.name] = c.wall_ms;
    timing["check_wall_ms"] = per;
    j["timing"] = timing;
    return j.dump(2);
}

}  // namespace rsv
