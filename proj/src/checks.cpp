#include "rsv/checks.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>

namespace rsv {

namespace {

SurfacePoint sample_plus(const RealCurve& c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (c.genus() == 0)
        return SurfacePoint::at(Complex(3.0 * unif(rng) - 1.5, 0.12 + 1.7 * unif(rng)));
    return SurfacePoint::at(Complex(unif(rng), (0.05 + 0.9 * unif(rng)) * 0.25 * c.t0()));
}

SurfacePoint sample_anywhere(const RealCurve& c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (c.genus() == 0)
        return SurfacePoint::at(Complex(3.0 * unif(rng) - 1.5, 3.2 * unif(rng) - 1.6));
    return SurfacePoint::at(Complex(unif(rng), c.t0() * unif(rng)));
}

bool clears(const RealCurve& c, const SurfacePoint& p, const MeromorphicFn& y,
            double gap = 5e-2) {
    for (const auto& pole : y.poles()) {
        if (points_equal(c, p, pole.point, gap)) return false;
        if (points_equal(c, p, involution(c, pole.point), gap)) return false;
    }
    return true;
}

const MeromorphicFn& arg_fn(const Scenario& sc, const CheckRequest& req,
                            const std::string& role, const std::string& fallback) {
    auto it = req.args.find(role);
    if (it != req.args.end()) return sc.fn(it->second);
    return sc.fn(fallback);
}

using Clock = std::chrono::steady_clock;

struct ResidualSet {
    std::vector<std::pair<std::string, double>> values;
    void add(const std::string& k, double v) { values.push_back({k, v}); }
};

// ---------------------------------------------------------------------------
// individual check runners
// ---------------------------------------------------------------------------

CheckResult run_theta_identities(const Scenario& sc, const CheckRequest&,
                                 std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> shift(-3, 3);

    std::vector<PeriodMatrix> pms;
    if (sc.curve().genus() >= 1) pms.push_back(sc.curve().period_matrix());
    Eigen::MatrixXcd g2(2, 2);
    g2 << Complex(0.5, 1.0), Complex(0.2, 0.3), Complex(0.2, 0.3), Complex(-0.5, 1.2);
    pms.push_back(PeriodMatrix::make(g2));

    double quasi = 0.0, parity = 0.0;
    for (const auto& pm : pms) {
        const int g = pm.genus();
        for (int t = 0; t < 250; ++t) {
            Eigen::VectorXcd lam(g);
            for (int i = 0; i < g; ++i) lam[i] = Complex(unif(rng), 0.6 * unif(rng));
            Eigen::VectorXcd nv(g), mv(g);
            for (int i = 0; i < g; ++i) {
                nv[i] = static_cast<double>(shift(rng));
                mv[i] = static_cast<double>(shift(rng));
            }
            const Eigen::VectorXcd shifted = lam + mv + pm.gamma() * nv;
            Complex expo = -kI * kPi * (nv.transpose() * pm.gamma() * nv)(0);
            for (int i = 0; i < g; ++i) expo -= 2.0 * kPi * kI * nv[i] * lam[i];
            const Complex lhs = theta(pm, shifted);
            const Complex rhs = std::exp(expo) * theta(pm, lam);
            quasi = std::max(quasi, std::abs(lhs - rhs) / std::abs(rhs));
            parity = std::max(parity,
                              std::abs(theta(pm, lam) - theta(pm, (-lam).eval())) /
                                  (1.0 + std::abs(theta(pm, lam))));
        }
    }
    ResidualSet rs;
    rs.add("quasi_periodicity", quasi);
    rs.add("parity", parity);
    res.residuals = rs.values;
    res.passed = quasi < tol && parity < tol;
    return res;
}

CheckResult run_theta_truncation(const Scenario& sc, const CheckRequest&, std::mt19937_64&,
                                 double tol) {
    CheckResult res;
    res.tolerance = tol;
    const PeriodMatrix pm = sc.curve().genus() >= 1
                                ? sc.curve().period_matrix()
                                : PeriodMatrix::genus1(Complex(0.0, 1.0));
    double worst = 0.0;
    for (double x : {0.13, 0.47, 0.81}) {
        Eigen::VectorXcd z = Eigen::VectorXcd::Constant(pm.genus(), Complex(x, 0.3 * x));
        const Complex loose = theta(pm, z, 1e-9);
        const Complex tight = theta(pm, z, 1e-12);
        worst = std::max(worst, std::abs(loose - tight));
    }
    res.residuals = {{"refinement_shift", worst}};
    res.passed = worst < 1e-9 * (sc.curve().genus() == 0 ? 1.0 : 1.0);
    return res;
}

CheckResult run_prime_form(const Scenario& sc, const CheckRequest&, std::mt19937_64& rng,
                           double tol) {
    CheckResult res;
    res.tolerance = tol;
    const RealCurve& c = sc.curve();
    if (c.genus() == 0) {
        res.residuals = {{"difference_form", 0.0}};
        res.passed = true;
        return res;
    }
    double zero = 0.0, antisym = 0.0, expans = 0.0;
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const auto u = sample_anywhere(c, rng);
        const auto v = sample_anywhere(c, rng);
        zero = std::max(zero, std::abs(prime_form(c, u, u)));
        const Complex a = prime_form(c, u, v);
        const Complex b = prime_form(c, v, u);
        antisym = std::max(antisym, std::abs(a + b) / (1.0 + std::abs(a)));
    }
    const auto u = SurfacePoint::at(Complex(0.21, 0.17));
    const double h = 1e-4;
    const Complex ratio = prime_form(c, u, SurfacePoint::at(u.u + h)) / Complex(h);
    expans = std::abs(ratio - 1.0);
    res.residuals = {{"zero_locus", zero}, {"antisymmetry", antisym},
                     {"local_expansion", expans}};
    res.passed = zero < tol && antisym < tol && expans < 1e-3;
    return res;
}

CheckResult run_kernel_hermitian(const Scenario& sc, const CheckRequest&,
                                 std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const RealCurve& c = sc.curve();
    double herm = 0.0, closed = 0.0;
    for (int t = 0; t < 200; ++t) {
        const auto u = sample_anywhere(c, rng);
        const auto v = sample_anywhere(c, rng);
        if (std::abs(std::conj(v.u) - u.u) < 2e-2) continue;
        Complex a, b;
        try {
            a = cauchy_kernel(sc.ctx(), u, v);
            b = cauchy_kernel(sc.ctx(), v, u);
        } catch (const PoleHit&) {
            continue;
        }
        herm = std::max(herm, std::abs(a - std::conj(b)) / (1.0 + std::abs(a)));
        if (c.genus() == 0)
            closed = std::max(closed,
                              std::abs(a - 1.0 / (-kI * (u.u - std::conj(v.u)))));
    }
    res.residuals = {{"hermitian", herm}};
    if (c.genus() == 0) res.residuals.push_back({"closed_form", closed});
    res.passed = herm < tol && closed < 1e-14;
    return res;
}

CheckResult run_kernel_sign_law(const Scenario& sc, const CheckRequest&,
                                std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const RealCurve& c = sc.curve();
    double asym = 0.0;
    bool signs_ok = true;
    for (int t = 0; t < 200; ++t) {
        const auto q = sample_plus(c, rng);
        const Complex kp = cauchy_kernel(sc.ctx(), q, q);
        asym = std::max(asym, std::abs(kp.imag()) / (1.0 + std::abs(kp)));
        if (kp.real() <= 0.0) signs_ok = false;
        if (c.genus() == 1) {
            const auto qm = involution(c, q);
            if (cauchy_kernel(sc.ctx(), qm, qm).real() >= 0.0) signs_ok = false;
        }
    }
    res.residuals = {{"diagonal_imag", asym}, {"sign_violations", signs_ok ? 0.0 : 1.0}};
    res.passed = signs_ok && asym < tol;
    if (!signs_ok) res.witness = "diagonal kernel value with the wrong sign";
    return res;
}

CheckResult run_kernel_psd(const Scenario& sc, const CheckRequest&, std::mt19937_64& rng,
                           double tol) {
    CheckResult res;
    res.tolerance = tol;
    const RealCurve& c = sc.curve();
    double worst = 0.0;
    for (int batch = 0; batch < 5; ++batch) {
        std::vector<SurfacePoint> pts;
        while (pts.size() < 6) {
            const auto p = sample_plus(c, rng);
            bool ok = true;
            for (const auto& q : pts)
                if (points_equal(c, p, q, 5e-2)) ok = false;
            if (ok) pts.push_back(p);
        }
        const Eigen::MatrixXcd g = gram_matrix(sc.ctx(), pts);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
        worst = std::min(worst, es.eigenvalues().minCoeff() / g.norm());
    }
    res.residuals = {{"min_eig_over_norm", -worst}};
    res.passed = worst > -tol;
    return res;
}

CheckResult run_collection_formula(const Scenario& sc, const CheckRequest& req,
                                   std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto& y = arg_fn(sc, req, "y", "y1");
    std::uniform_real_distribution<double> unif(-1.2, 1.2);
    double worst_inf = 0.0, worst_chain = 0.0, worst_diag = 0.0;
    int done = 0;
    for (int t = 0; t < 200 && done < 50; ++t) {
        const Complex l1(unif(rng), 1.2 + unif(rng));
        const Complex l2(unif(rng), 1.4 + unif(rng));
        const Complex l3(unif(rng), -1.3 + unif(rng));
        try {
            const auto k12 = collection_matrix(sc.ctx(), y, l1, l2).entries;
            const auto k13 = collection_matrix(sc.ctx(), y, l1, l3).entries;
            const auto k32 = collection_matrix(sc.ctx(), y, l3, l2).entries;
            const auto k1inf = collection_matrix(sc.ctx(), y, l1, std::nullopt).entries;
            const auto kinf2 = collection_matrix(sc.ctx(), y, std::nullopt, l2).entries;
            worst_inf = std::max(worst_inf, (k1inf * kinf2 - k12).cwiseAbs().maxCoeff());
            worst_chain = std::max(worst_chain, (k13 * k32 - k12).cwiseAbs().maxCoeff());
            const auto kdiag = collection_matrix(sc.ctx(), y, l1, l1).entries;
            worst_diag = std::max(
                worst_diag,
                (kdiag - Eigen::MatrixXcd::Identity(y.degree(), y.degree())).norm());
            ++done;
        } catch (const Error&) {
        }
    }
    res.residuals = {{"infinity_split", worst_inf},
                     {"three_point_chain", worst_chain},
                     {"coincidence_identity", worst_diag}};
    res.diagnostics = {{"fibers_used", static_cast<double>(done)}};
    res.passed = done >= 40 && worst_inf < tol && worst_chain < tol && worst_diag < 1e-12;
    return res;
}

CheckResult run_generalized_collection(const Scenario& sc, const CheckRequest& req,
                                       std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const RealCurve& c = sc.curve();
    double worst_simple = 0.0, worst_high = 0.0;
    const auto& ys = arg_fn(sc, req, "y", "y1");
    for (int t = 0; t < 40; ++t) {
        const auto v = sample_anywhere(c, rng);
        const auto w = sample_anywhere(c, rng);
        if (!clears(c, v, ys) || !clears(c, w, ys)) continue;
        if (points_equal(c, v, w, 2e-2)) continue;
        worst_simple = std::max(worst_simple, generalized_collection_check(sc.ctx(), ys, v, w));
    }
    auto ith = req.args.find("higher");
    if (ith != req.args.end()) {
        const auto& yh = sc.fn(ith->second);
        for (int t = 0; t < 40; ++t) {
            const auto v = sample_anywhere(c, rng);
            const auto w = sample_anywhere(c, rng);
            if (!clears(c, v, yh) || !clears(c, w, yh)) continue;
            if (points_equal(c, v, w, 2e-2)) continue;
            worst_high = std::max(worst_high, generalized_collection_check(sc.ctx(), yh, v, w));
        }
    }
    res.residuals = {{"simple_poles", worst_simple}, {"higher_order", worst_high}};
    res.passed = worst_simple < tol && worst_high < 10.0 * tol;
    return res;
}

CheckResult run_model_pointwise_vs_matrix(const Scenario& sc, const CheckRequest& req,
                                          std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto ms = sc.model_space();
    const RealCurve& c = sc.curve();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXcd coeffs(ms.dim());
    for (int j = 0; j < ms.dim(); ++j) coeffs[j] = Complex(unif(rng), unif(rng));
    double worst = 0.0;
    for (const char* role : {"y1", "y2"}) {
        auto it = req.args.find(role);
        const auto& y = it != req.args.end() ? sc.fn(it->second) : sc.fn(role);
        const Section pw = apply_model_pointwise(ms, y, ms.section(coeffs));
        const Eigen::VectorXcd mc = model_operator(ms, y).mat * coeffs;
        int used = 0;
        for (int t = 0; t < 60 && used < 20; ++t) {
            const auto u = sample_plus(c, rng);
            if (!clears(c, u, y, 6e-2)) continue;
            const Complex a = pw.eval(u);
            const Complex b = ms.eval(mc, u);
            worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(b)));
            ++used;
        }
    }
    res.residuals = {{"pointwise_vs_matrix", worst}};
    res.passed = worst < tol;
    return res;
}

CheckResult run_model_algebra(const Scenario& sc, const CheckRequest& req,
                              std::mt19937_64&, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto ms = sc.model_space();
    const auto rep =
        algebra_check(ms, arg_fn(sc, req, "y1", "y1"), arg_fn(sc, req, "y2", "y2"));
    res.residuals = {{"sum_matrix", rep.add_matrix},
                     {"product_matrix", rep.mul_matrix},
                     {"commutator", rep.commutator},
                     {"sum_pointwise", rep.add_pointwise},
                     {"product_pointwise", rep.mul_pointwise},
                     {"pointwise_vs_matrix", rep.pointwise_vs_matrix}};
    res.passed = rep.add_matrix < tol && rep.mul_matrix < tol && rep.commutator < tol &&
                 rep.add_pointwise < 10 * tol && rep.mul_pointwise < 10 * tol &&
                 rep.pointwise_vs_matrix < 10 * tol;
    return res;
}

CheckResult run_resolvent_laws(const Scenario& sc, const CheckRequest& req,
                               std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto ms = sc.model_space();
    const auto& y = arg_fn(sc, req, "y", "y1");
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double inv = 0.0, resid = 0.0;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(ms.dim(), ms.dim());
    const Eigen::MatrixXcd m = model_operator(ms, y).mat;
    int done = 0;
    for (int t = 0; t < 120 && done < 30; ++t) {
        const Complex alpha(1.5 * unif(rng), 1.1 + 0.8 * unif(rng));
        const Complex beta(1.5 * unif(rng), 1.2 + 0.7 * unif(rng));
        if (std::abs(alpha - beta) < 0.1) continue;
        try {
            const Eigen::MatrixXcd ra = resolvent(ms, y, alpha).mat;
            const Eigen::MatrixXcd rb = resolvent(ms, y, beta).mat;
            inv = std::max(inv, ms.op_norm((m - alpha * id) * ra - id));
            resid = std::max(resid, ms.op_norm(ra - rb - (alpha - beta) * ra * rb));
            ++done;
        } catch (const Error&) {
        }
    }
    res.residuals = {{"inverse_law", inv}, {"resolvent_identity", resid}};
    res.diagnostics = {{"pairs_used", static_cast<double>(done)}};
    res.passed = done >= 25 && inv < tol && resid < tol;
    return res;
}

CheckResult run_structure_identity(const Scenario& sc, const CheckRequest& req,
                                   std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto ms = sc.model_space();
    const auto& y = arg_fn(sc, req, "y", "y1");
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0, worst_limit = 0.0;
    int done = 0;
    for (int t = 0; t < 60 && done < 12; ++t) {
        Eigen::VectorXcd f(ms.dim()), g(ms.dim());
        for (int j = 0; j < ms.dim(); ++j) {
            f[j] = Complex(unif(rng), unif(rng));
            g[j] = Complex(unif(rng), unif(rng));
        }
        const Complex alpha(unif(rng), 1.0 + 0.5 * unif(rng));
        const Complex beta(unif(rng), 1.0 + 0.5 * unif(rng));
        try {
            worst = std::max(worst, structure_identity_residual(ms, y, alpha, beta, f, g));
            ++done;
        } catch (const Error&) {
        }
    }
    // limit convention at a real spectral parameter
    Eigen::VectorXcd f0 = Eigen::VectorXcd::Ones(ms.dim());
    try {
        worst_limit = structure_identity_residual(ms, y, Complex(2.4, 0.0),
                                                  Complex(2.4, 0.0), f0, f0);
    } catch (const Error& e) {
        res.witness = e.what();
        worst_limit = 1e300;
    }
    res.residuals = {{"random_pairs", worst}, {"real_limit", worst_limit}};
    res.diagnostics = {{"pairs_used", static_cast<double>(done)}};
    res.passed = done >= 8 && worst < tol && worst_limit < 10 * tol;
    return res;
}

CheckResult run_colligation(const Scenario& sc, const CheckRequest& req, std::mt19937_64&,
                            double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto ms = sc.model_space();
    ResidualSet rs;
    bool ok = true;
    for (const auto& [role, fname] : req.args) {
        const auto rep = colligation_report(ms, sc.fn(fname));
        rs.add(role, rep.residual);
        ok = ok && rep.residual < tol;
    }
    if (req.args.empty()) {
        const auto rep = colligation_report(ms, sc.fn("y1"));
        rs.add("y1", rep.residual);
        ok = rep.residual < tol;
    }
    res.residuals = rs.values;
    res.passed = ok;
    return res;
}

CheckResult run_vessel_conditions(const Scenario& sc, const CheckRequest& req,
                                  std::mt19937_64&, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto v = build_model_vessel(sc.model_space(), arg_fn(sc, req, "y1", "y1"),
                                      arg_fn(sc, req, "y2", "y2"));
    const auto rep = verify_vessel(v);
    res.residuals = {{"colligation_1", rep.colligation1}, {"colligation_2", rep.colligation2},
                     {"commutation", rep.commutation},   {"input", rep.input},
                     {"output", rep.output},             {"linkage", rep.linkage},
                     {"selfadjoint", rep.selfadjoint}};
    res.diagnostics = {{"pencil_det", rep.pencil_det}};
    res.passed = rep.worst() < tol && rep.pencil_det > 1e-6;
    return res;
}

CheckResult run_discriminant_match(const Scenario& sc, const CheckRequest& req,
                                   std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto v = build_model_vessel(sc.model_space(), arg_fn(sc, req, "y1", "y1"),
                                      arg_fn(sc, req, "y2", "y2"));
    const auto pg = discriminant(v, false);
    const auto pt = discriminant(v, true);
    const double match =
        (pg.coeffs - pt.coeffs).cwiseAbs().maxCoeff() / pg.coeff_scale();
    double oncurve = 0.0;
    int done = 0;
    for (int t = 0; t < 120 && done < 50; ++t) {
        const auto u = sample_anywhere(sc.curve(), rng);
        if (!clears(sc.curve(), u, v.y1) || !clears(sc.curve(), u, v.y2)) continue;
        oncurve = std::max(
            oncurve, std::abs(pg.eval(v.y1.eval(u), v.y2.eval(u))) / pg.coeff_scale());
        ++done;
    }
    // matrix polynomial annihilation
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(v.inner_dim(), v.inner_dim());
    for (int i = 0; i <= pg.degree; ++i)
        for (int j = 0; i + j <= pg.degree; ++j) {
            Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(v.inner_dim(), v.inner_dim());
            for (int r = 0; r < i; ++r) term *= v.A1;
            for (int r = 0; r < j; ++r) term *= v.A2;
            acc += pg.coeffs(i, j) * term;
        }
    const double ch = acc.norm() / pg.coeff_scale();
    res.residuals = {{"gamma_vs_gamma_tilde", match},
                     {"curve_points", oncurve},
                     {"matrix_annihilation", ch}};
    res.diagnostics = {{"points_used", static_cast<double>(done)}};
    res.passed = done >= 40 && match < tol && oncurve < 10 * tol && ch < 10 * tol;
    return res;
}

CheckResult run_ccf_metric(const Scenario& sc, const CheckRequest& req, std::mt19937_64& rng,
                           double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto v = build_model_vessel(sc.model_space(), arg_fn(sc, req, "y1", "y1"),
                                      arg_fn(sc, req, "y2", "y2"));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double iso = 0.0, expans = 0.0, decay = 0.0;
    int done = 0;
    for (int t = 0; t < 40 && done < 10; ++t) {
        const Complex xi1(1.0 + 0.2 * unif(rng), 0.0);
        const Complex xi2(0.5 * unif(rng), 0.0);
        try {
            iso = std::max(
                iso, ccf_metric_defect(v, xi1, xi2, Complex(2.0 * unif(rng), 0.0)).norm());
            const Eigen::MatrixXcd d =
                ccf_metric_defect(v, xi1, xi2, Complex(unif(rng), 0.4 + std::abs(unif(rng))));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (d + d.adjoint().eval()));
            expans = std::min(expans, es.eigenvalues().minCoeff());
            decay = std::max(decay, (ccf(v, xi1, xi2, Complex(1e6, 0.0)) -
                                     Eigen::MatrixXcd::Identity(v.external_dim(),
                                                                v.external_dim()))
                                        .norm());
            ++done;
        } catch (const SpectrumHit&) {
        }
    }
    res.residuals = {{"real_axis_isometry", iso},
                     {"upper_halfplane_floor", -expans},
                     {"infinity_decay", decay}};
    res.diagnostics = {{"directions_used", static_cast<double>(done)}};
    res.passed = done >= 8 && iso < tol && expans > -tol && decay < 1e-4;
    return res;
}

CheckResult run_jcf_consistency(const Scenario& sc, const CheckRequest& req,
                                std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto v = build_model_vessel(sc.model_space(), arg_fn(sc, req, "y1", "y1"),
                                      arg_fn(sc, req, "y2", "y2"));
    double spread = 0.0, map = 0.0;
    int done = 0;
    for (int t = 0; t < 40 && done < 8; ++t) {
        const auto u = sample_plus(sc.curve(), rng);
        if (!clears(sc.curve(), u, v.y1) || !clears(sc.curve(), u, v.y2)) continue;
        try {
            const auto r = jcf(v, v.y1.eval(u), v.y2.eval(u), 5, sc.seed());
            spread = std::max(spread, r.xi_spread);
            map = std::max(map, r.map_residual);
            ++done;
        } catch (const Error&) {
        }
    }
    res.residuals = {{"direction_spread", spread}, {"kernel_line_map", map}};
    res.diagnostics = {{"points_used", static_cast<double>(done)}};
    res.passed = done >= 5 && spread < tol && map < 10 * tol;
    return res;
}

CheckResult run_model_map(const Scenario& sc, const CheckRequest& req, std::mt19937_64& rng,
                          double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto v = build_model_vessel(sc.model_space(), arg_fn(sc, req, "y1", "y1"),
                                      arg_fn(sc, req, "y2", "y2"));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0, spread = 0.0;
    int done = 0;
    for (int t = 0; t < 40 && done < 8; ++t) {
        const auto z = sample_plus(sc.curve(), rng);
        if (!clears(sc.curve(), z, v.y1) || !clears(sc.curve(), z, v.y2)) continue;
        Eigen::VectorXcd h(v.inner_dim());
        for (int j = 0; j < v.inner_dim(); ++j) h[j] = Complex(unif(rng), unif(rng));
        try {
            const double r10 = model_map_identity_check(v, z, h, 1.0, 0.0);
            const double r01 = model_map_identity_check(v, z, h, 0.0, 1.0);
            const double rmx = model_map_identity_check(v, z, h, 1.0, 0.37);
            worst = std::max({worst, r10, r01, rmx});
            spread = std::max(spread, std::abs(r10 - r01));
            ++done;
        } catch (const SpectrumHit&) {
        }
    }
    res.residuals = {{"identity", worst}, {"direction_agreement", spread}};
    res.diagnostics = {{"points_used", static_cast<double>(done)}};
    res.passed = done >= 5 && worst < tol;
    return res;
}

CheckResult run_kernel_via_jcf(const Scenario& sc, const CheckRequest& req,
                               std::mt19937_64& rng, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto v = build_model_vessel(sc.model_space(), arg_fn(sc, req, "y1", "y1"),
                                      arg_fn(sc, req, "y2", "y2"));
    double worst = 0.0;
    int done = 0;
    for (int t = 0; t < 60 && done < 20; ++t) {
        const auto p = sample_plus(sc.curve(), rng);
        const auto q = sample_plus(sc.curve(), rng);
        if (!clears(sc.curve(), p, v.y1) || !clears(sc.curve(), q, v.y1)) continue;
        if (!clears(sc.curve(), p, v.y2) || !clears(sc.curve(), q, v.y2)) continue;
        try {
            const Complex direct = span_kernel(v.ms, p, q);
            const Complex route = kernel_via_jcf(v, p, q, 1.0, 0.41);
            worst = std::max(worst, std::abs(direct - route) / (1.0 + std::abs(direct)));
            ++done;
        } catch (const Error&) {
        }
    }
    res.residuals = {{"two_route_kernel", worst}};
    res.diagnostics = {{"pairs_used", static_cast<double>(done)}};
    res.passed = done >= 15 && worst < tol;
    return res;
}

CheckResult run_transfer_inner(const Scenario& sc, const CheckRequest&, std::mt19937_64& rng,
                               double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto t = sc.transfer();
    const RealCurve& c = sc.curve();
    double boundary = 0.0, sym = 0.0, shift = 0.0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        SurfacePoint u;
        if (c.genus() == 0)
            u = SurfacePoint::at(Complex(std::tan(kPi * (unif(rng) - 0.5)), 0.0));
        else
            u = SurfacePoint::at(Complex(unif(rng), (k % 2) * 0.5 * c.t0()));
        bool bad = false;
        for (const auto& z : t.zeros())
            if (points_equal(c, u, z, 5e-2) ||
                points_equal(c, u, involution(c, z), 5e-2))
                bad = true;
        if (bad) continue;
        boundary = std::max(boundary, std::abs(std::abs(t.eval(u)) - 1.0));
        const auto p = sample_plus(c, rng);
        bool badp = false;
        for (const auto& z : t.zeros())
            if (points_equal(c, p, involution(c, z), 5e-2) || points_equal(c, p, z, 5e-2))
                badp = true;
        if (!badp)
            sym = std::max(sym,
                           std::abs(t.eval(p) * std::conj(t.eval(tau_lift(c, p))) - 1.0));
    }
    if (c.genus() == 1) {
        Complex s = 0.0;
        for (const auto& z : t.zeros()) s += z.u - tau_lift(c, z).u;
        shift = std::abs(t.zeta_out()[0] - t.zeta_in()[0] - s);
    }
    res.residuals = {{"boundary_modulus", boundary},
                     {"tau_symmetry", sym},
                     {"multiplier_shift", shift}};
    res.passed = boundary < tol && sym < 10 * tol && shift < 1e-9;
    return res;
}

std::string g_csv_dir;  // set per run by run_scenario

CheckResult run_transfer_contractivity(const Scenario& sc, const CheckRequest& req,
                                       std::mt19937_64&, double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto t = sc.transfer();
    double scale = 1.0;
    auto it = req.args.find("scale");
    if (it != req.args.end()) scale = std::stod(it->second);
    const auto rep = contractivity_report(t, 24, 4, 6, sc.seed(), scale);
    res.residuals = {{"max_abs_minus_one", std::max(0.0, rep.max_abs - 1.0)},
                     {"gram_floor", std::max(0.0, -rep.min_gram_eig / rep.gram_scale)}};
    res.passed = rep.contractive && rep.kernel_psd;
    if (!res.passed)
        res.witness = "max|T| = " + std::to_string(rep.max_abs) +
                      ", min Gram eigenvalue = " + std::to_string(rep.min_gram_eig);
    if (!g_csv_dir.empty()) {
        std::ofstream csv(g_csv_dir + "/" + sc.name() + "_contractivity.csv");
        csv << "x,y,abs_T\n";
        const RealCurve& c = sc.curve();
        for (int i = 0; i < 24; ++i)
            for (int j = 1; j < 24; ++j) {
                SurfacePoint p;
                if (c.genus() == 0)
                    p = SurfacePoint::at(Complex(-3.0 + 6.0 * i / 23.0, 2.4 * j / 23.0));
                else
                    p = SurfacePoint::at(Complex(i / 24.0, 0.5 * c.t0() * j / 24.0));
                bool bad = false;
                for (const auto& z : t.zeros())
                    if (points_equal(c, p, involution(c, z), 5e-2)) bad = true;
                if (bad) continue;
                csv << p.u.real() << "," << p.u.imag() << ","
                    << scale * std::abs(t.eval(p)) << "\n";
            }
    }
    return res;
}

CheckResult run_njcf_consistency(const Scenario& sc, const CheckRequest&, std::mt19937_64&,
                                 double tol) {
    CheckResult res;
    res.tolerance = tol;
    const double worst = njcf_consistency(sc.transfer(), 12, sc.seed());
    res.residuals = {{"two_route_kernel", worst}};
    res.passed = worst < tol;
    return res;
}

CheckResult run_beurling(const Scenario& sc, const CheckRequest& req, std::mt19937_64&,
                         double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto t = sc.transfer();
    const auto& y = arg_fn(sc, req, "y", "y1");
    const auto coarse = beurling_orthogonality(t, y, Complex(0.4, 1.2), 2048);
    const auto fine = beurling_orthogonality(t, y, Complex(0.4, 1.2), 8192);
    res.residuals = {{"orthogonality_2048", coarse.orthogonality},
                     {"duality_2048", coarse.duality},
                     {"reproducing_2048", coarse.reproducing},
                     {"orthogonality_8192", fine.orthogonality},
                     {"duality_8192", fine.duality}};
    res.passed = coarse.orthogonality < tol && coarse.duality < tol &&
                 coarse.reproducing < tol &&
                 fine.orthogonality <= std::max(coarse.orthogonality, 0.01 * tol) &&
                 fine.duality <= std::max(coarse.duality, 0.01 * tol);
    return res;
}

CheckResult run_hankel_inverse(const Scenario&, const CheckRequest&, std::mt19937_64& rng,
                               double tol) {
    CheckResult res;
    res.tolerance = tol;
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 1; s <= 6; ++s)
        for (int rep = 0; rep < 20; ++rep) {
            HankelBlock h;
            h.size = s;
            for (int j = 0; j < s; ++j) h.coeffs.push_back(Complex(unif(rng), unif(rng)));
            if (std::abs(h.coeff(-s)) < 0.1) h.coeffs.back() += 1.0;
            const auto m = hankel_matrix(h);
            const auto inv = hankel_inverse(h);
            worst = std::max(worst, (m * inv - Eigen::MatrixXcd::Identity(s, s))
                                        .cwiseAbs()
                                        .maxCoeff());
        }
    res.residuals = {{"product_identity", worst}};
    res.passed = worst < tol;
    return res;
}

CheckResult run_taylor_delta(const Scenario&, const CheckRequest&, std::mt19937_64& rng,
                             double tol) {
    CheckResult res;
    res.tolerance = tol;
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;
    for (int d = 1; d <= 5; ++d)
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> c(d + 1);
            for (auto& v : c) v = unif(rng);
            if (std::abs(c[0]) < 0.2) c[0] += 1.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    const Complex got = taylor_delta_check(d, a, b, c);
                    worst = std::max(worst, std::abs(got - ((a == b) ? 1.0 : 0.0)));
                }
        }
    res.residuals = {{"kronecker_delta", worst}};
    res.passed = worst < tol;
    return res;
}

CheckResult run_dividing(const Scenario& sc, const CheckRequest& req, std::mt19937_64&,
                         double tol) {
    CheckResult res;
    res.tolerance = tol;
    const auto& y = arg_fn(sc, req, "y", "y1");
    const auto rep = is_dividing(y, 150);
    res.residuals = {{"violations", static_cast<double>(rep.violations.size())},
                     {"residue_condition", rep.residue_condition ? 0.0 : 1.0}};
    bool expect = true;
    auto it = req.args.find("expect");
    if (it != req.args.end()) expect = it->second == "true";
    res.passed = rep.dividing == expect &&
                 (!expect || rep.residue_condition);
    if (!rep.violations.empty() && expect) {
        const auto& v = rep.violations.front();
        res.witness = "violation at (" + std::to_string(v.point.u.real()) + ", " +
                      std::to_string(v.point.u.imag()) + "): " + v.reason;
    }
    return res;
}

}  // namespace

const std::vector<CheckSpec>& check_catalog() {
    static const std::vector<CheckSpec> catalog = {
        {"theta_identities", "quasi-periodicity and parity of the theta function",
         "theta_core", 1e-10, run_theta_identities},
        {"theta_truncation", "tolerance refinement changes theta by less than tol",
         "theta_core", 1e-9, run_theta_truncation},
        {"prime_form", "zero locus, antisymmetry and first-order expansion of E(u,v)",
         "surface", 1e-10, run_prime_form},
        {"kernel_hermitian", "Hermitian symmetry of the Cauchy kernel on real torii",
         "kernels", 1e-9, run_kernel_hermitian},
        {"kernel_sign_law", "diagonal kernel sign on the two sides of the real locus",
         "kernels", 1e-9, run_kernel_sign_law},
        {"kernel_psd", "positive semidefiniteness of kernel Gram matrices on X_+",
         "kernels", 1e-8, run_kernel_psd},
        {"collection_formula", "multiplicative collection relations of spectral matrices",
         "kernels, meromorphic", 1e-8, run_collection_formula},
        {"generalized_collection",
         "pole-form collection identity with Laurent Hankel weights", "kernels", 1e-8,
         run_generalized_collection},
        {"model_pointwise_vs_matrix",
         "pointwise compressed multiplication equals its kernel-basis matrix", "model_ops",
         1e-8, run_model_pointwise_vs_matrix},
        {"model_algebra", "compressed multiplication is an algebra homomorphism",
         "model_ops", 1e-7, run_model_algebra},
        {"resolvent_laws", "inverse law and the resolvent identity", "model_ops", 1e-9,
         run_resolvent_laws},
        {"structure_identity",
         "quadratic resolvent identity with the fiber-sum right-hand side", "model_ops",
         1e-8, run_structure_identity},
        {"colligation", "imaginary part of the model operator factors through the poles",
         "model_ops, vessel", 1e-8, run_colligation},
        {"vessel_conditions", "colligation, input, output and linkage conditions",
         "vessel", 1e-8, run_vessel_conditions},
        {"discriminant_match",
         "determinantal polynomial agreement and annihilation on the inner space",
         "vessel", 1e-8, run_discriminant_match},
        {"ccf_metric", "characteristic-function isometry and expansivity", "vessel", 1e-8,
         run_ccf_metric},
        {"jcf_consistency", "direction independence of the joint characteristic function",
         "vessel", 1e-7, run_jcf_consistency},
        {"model_map", "the half-curve map to the model space is the identity", "vessel",
         1e-8, run_model_map},
        {"kernel_via_jcf",
         "reproducing kernel through the characteristic-function sandwich", "vessel", 1e-7,
         run_kernel_via_jcf},
        {"transfer_inner", "unimodular boundary values and multiplier bookkeeping",
         "transfer", 1e-8, run_transfer_inner},
        {"transfer_contractivity", "contractivity and kernel positivity move together",
         "transfer", 1e-8, run_transfer_contractivity},
        {"njcf_consistency", "span kernel equals the transfer-function kernel", "transfer",
         1e-6, run_njcf_consistency},
        {"beurling_orthogonality",
         "boundary-quadrature orthogonality of the model span to the shifted Hardy space",
         "transfer", 1e-5, run_beurling},
        {"hankel_inverse", "skew-triangular Hankel inversion through series reciprocals",
         "model_ops", 1e-10, run_hankel_inverse},
        {"taylor_delta", "Kronecker-delta limit of the bivariate Taylor expression",
         "model_ops", 1e-10, run_taylor_delta},
        {"dividing_classification", "boundary-reality sampling and oriented residue signs",
         "meromorphic", 1e-9, run_dividing},
    };
    return catalog;
}

const CheckSpec* find_check(const std::string& name) {
    for (const auto& c : check_catalog())
        if (c.name == name) return &c;
    return nullptr;
}

RunReport run_scenario(const Scenario& sc, unsigned seed_override, double tol_scale,
                       const std::string& csv_dir) {
    RunReport report;
    report.scenario = sc.name();
    report.seed = seed_override;
    report.tol_scale = tol_scale;
    g_csv_dir = csv_dir;
    if (!csv_dir.empty()) std::filesystem::create_directories(csv_dir);

    try {
        report.gram_cond = sc.basis().empty() ? 0.0 : sc.model_space().cond();
    } catch (const Error&) {
        report.gram_cond = -1.0;
    }

    bool all = true;
    for (const auto& req : sc.checks()) {
        const CheckSpec* spec = find_check(req.name);
        if (!spec)
            throw ConfigError("unknown check '" + req.name + "' (see list-checks)");
        const double tol = tol_scale * req.tol.value_or(spec->default_tol);
        std::mt19937_64 rng(seed_override);
        CheckResult result;
        const auto start = Clock::now();
        try {
            result = spec->run(sc, req, rng, tol);
        } catch (const Error& e) {
            result.tolerance = tol;
            result.passed = false;
            result.witness = std::string("check error: ") + e.what();
        }
        result.name = req.name;
        result.wall_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        all = all && result.passed;
        report.checks.push_back(std::move(result));
    }
    report.passed = all;
    g_csv_dir.clear();
    return report;
}

}  // namespace rsv
