#include "rsv/vessel.hpp"

#include <Eigen/Eigenvalues>
#include <random>

#include "json.hpp"

namespace rsv {

namespace {

// union pole set of a simple-pole pair, canonical order (real first,
// conjugate pairs adjacent), with per-function Laurent entries
std::vector<VesselPole> union_poles(const ModelSpace& ms, const MeromorphicFn& y1,
                                    const MeromorphicFn& y2) {
    const RealCurve& c = ms.ctx().curve();
    std::vector<VesselPole> out;
    auto add = [&](const Pole& p, bool from_y1) {
        if (p.order != 1)
            throw PoleCollision("full vessel assembly needs simple poles");
        for (auto& vp : out)
            if (points_equal(c, vp.point, p.point, 1e-8)) {
                if (from_y1) {
                    vp.a1_res = p.coeff(-1);
                    vp.a1_const = p.coeff(0);
                } else {
                    vp.a2_res = p.coeff(-1);
                    vp.a2_const = p.coeff(0);
                }
                return;
            }
        VesselPole vp;
        vp.point = p.point;
        if (from_y1) {
            vp.a1_res = p.coeff(-1);
            vp.a1_const = p.coeff(0);
        } else {
            vp.a2_res = p.coeff(-1);
            vp.a2_const = p.coeff(0);
        }
        out.push_back(vp);
    };
    for (const auto& p : y1.poles()) add(p, true);
    for (const auto& p : y2.poles()) add(p, false);

    // constant Laurent entries at regular points are plain values
    for (auto& vp : out) {
        bool p1 = false, p2 = false;
        for (const auto& p : y1.poles())
            if (points_equal(c, vp.point, p.point, 1e-8)) p1 = true;
        for (const auto& p : y2.poles())
            if (points_equal(c, vp.point, p.point, 1e-8)) p2 = true;
        if (!p1) {
            vp.a1_res = 0.0;
            vp.a1_const = y1.eval(vp.point);
        }
        if (!p2) {
            vp.a2_res = 0.0;
            vp.a2_const = y2.eval(vp.point);
        }
    }

    // canonical order: real poles first, conjugate pairs adjacent
    std::vector<VesselPole> ordered;
    std::vector<int> used(out.size(), 0);
    auto partner_of = [&](size_t i) {
        const SurfacePoint ti = involution(c, out[i].point);
        if (points_equal(c, ti, out[i].point, 1e-8)) return static_cast<int>(i);
        for (size_t j = 0; j < out.size(); ++j)
            if (j != i && points_equal(c, ti, out[j].point, 1e-8))
                return static_cast<int>(j);
        throw OrderingMismatch("pole set is not closed under the involution");
    };
    for (size_t i = 0; i < out.size(); ++i)
        if (partner_of(i) == static_cast<int>(i) && !used[i]) {
            ordered.push_back(out[i]);
            ordered.back().partner = -1;
            used[i] = 1;
        }
    for (size_t i = 0; i < out.size(); ++i) {
        if (used[i]) continue;
        const int j = partner_of(i);
        if (used[j]) throw OrderingMismatch("inconsistent conjugate pairing");
        const int base = static_cast<int>(ordered.size());
        ordered.push_back(out[i]);
        ordered.back().partner = base + 1;
        ordered.push_back(out[static_cast<size_t>(j)]);
        ordered.back().partner = base;
        // align the partner lift with the exact conjugate so no multiplier
        // appears inside the pair
        ordered.back().point = SurfacePoint::at(std::conj(out[i].point.u));
        used[i] = used[j] = 1;
    }
    return ordered;
}

int pidx(const VesselPole& p, int self) { return p.partner < 0 ? self : p.partner; }

// section multiplier picked up when the evaluation lift moves by the lattice
// vector lam; exactly unimodular, measured off one kernel ratio
Complex lift_multiplier(const KernelContext& ctx, Complex lam) {
    if (std::abs(lam) < 1e-12) return 1.0;
    if (ctx.curve().genus() == 0) return 1.0;
    if (lattice_distance(ctx.curve().period_matrix(),
                         (Eigen::VectorXcd(1) << lam).finished()) > 1e-9)
        throw Error("lift displacement is not a lattice vector");
    const Complex s0(0.31730, 0.172441);
    const Complex chi = ctx.h(s0 + lam) / ctx.h(s0);
    if (std::abs(std::abs(chi) - 1.0) > 1e-10)
        throw Error("lift multiplier is not unimodular");
    return chi;
}

}  // namespace

Eigen::MatrixXcd Vessel::phi_star() const { return ms.gram_solve(Phi.adjoint()); }

Vessel build_model_vessel(const ModelSpace& ms, const MeromorphicFn& y1,
                          const MeromorphicFn& y2, const std::vector<int>& mu_signs) {
    const RealCurve& c = ms.ctx().curve();
    Vessel v{ms, y1, y2, union_poles(ms, y1, y2), {}, {}, {}, {}, {}, {}, {}};
    const int n = static_cast<int>(v.poles.size());
    const int m = ms.dim();
    if (!mu_signs.empty() && static_cast<int>(mu_signs.size()) != n)
        throw Error("mu_signs must have one entry per union pole");

    for (const auto& vp : v.poles)
        for (const auto& w : ms.basis())
            if (points_equal(c, vp.point, w, 1e-6))
                throw PoleCollision("basis point collides with a pole");

    v.A1 = model_operator(ms, y1).mat;
    v.A2 = model_operator(ms, y2).mat;

    v.Phi.resize(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            v.Phi(i, j) = cauchy_kernel(ms.ctx(), v.poles[i].point, ms.basis()[j]);

    auto sign = [&](int i) {
        return mu_signs.empty() ? 1.0 : ((mu_signs[i] % 2 == 0) ? 1.0 : -1.0);
    };
    // conjugation multipliers: the identities pair the row at pole i with the
    // conjugated evaluation at conj(lift_i), which is the partner's stored
    // lift displaced by a lattice vector
    for (int i = 0; i < n; ++i) {
        const int pi = pidx(v.poles[i], i);
        v.poles[i].chi = lift_multiplier(
            ms.ctx(), std::conj(v.poles[i].point.u) - v.poles[pi].point.u);
    }

    v.sigma1 = Eigen::MatrixXcd::Zero(n, n);
    v.sigma2 = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int pi = pidx(v.poles[i], i);
        // row block of the partner, column block of the pole itself
        const Complex w = sign(i) * std::conj(v.poles[i].chi);
        v.sigma1(pi, i) = w * v.poles[i].a1_res;
        v.sigma2(pi, i) = w * v.poles[i].a2_res;
    }

    // output data: gamma_tilde from the Laurent windows and the kernel section
    v.gamma_tilde = Eigen::MatrixXcd::Zero(n, n);
    for (int mrow = 0; mrow < n; ++mrow) {
        const int pm = pidx(v.poles[mrow], mrow);
        const auto& src = v.poles[pm];
        const Complex w = std::conj(v.poles[pm].chi);
        for (int l = 0; l < n; ++l) {
            if (l == pm) {
                v.gamma_tilde(mrow, l) =
                    w * (src.a1_res * src.a2_const - src.a2_res * src.a1_const);
            } else {
                const Complex cross =
                    src.a1_res * v.poles[l].a2_res - src.a2_res * v.poles[l].a1_res;
                if (cross != Complex(0.0))
                    v.gamma_tilde(mrow, l) =
                        w * kI * cross * ms.ctx().h(v.poles[l].point.u - src.point.u);
            }
        }
    }

    // gamma via the linkage condition
    const Eigen::MatrixXcd kx = v.Phi * v.phi_star();
    v.gamma = v.gamma_tilde -
              kI * (v.sigma1 * kx * v.sigma2 - v.sigma2 * kx * v.sigma1);
    return v;
}

VesselReport verify_vessel(const Vessel& v) {
    VesselReport rep;
    const Eigen::MatrixXcd phis = v.phi_star();
    const Eigen::MatrixXcd a1s = v.ms.adjoint(v.A1);
    const Eigen::MatrixXcd a2s = v.ms.adjoint(v.A2);
    const Eigen::MatrixXcd kx = v.Phi * phis;

    rep.colligation1 = ((v.A1 - a1s) / kI - phis * v.sigma1 * v.Phi).norm();
    rep.colligation2 = ((v.A2 - a2s) / kI - phis * v.sigma2 * v.Phi).norm();
    rep.commutation = (v.A1 * v.A2 - v.A2 * v.A1).norm();
    rep.input = (v.sigma1 * v.Phi * a2s - v.sigma2 * v.Phi * a1s - v.gamma * v.Phi).norm();
    rep.output =
        (v.sigma1 * v.Phi * v.A2 - v.sigma2 * v.Phi * v.A1 - v.gamma_tilde * v.Phi).norm();
    rep.linkage = (kI * (v.sigma1 * kx * v.sigma2 - v.sigma2 * kx * v.sigma1) -
                   (v.gamma_tilde - v.gamma))
                      .norm();
    rep.selfadjoint = std::max({(v.sigma1 - v.sigma1.adjoint().eval()).norm(),
                                (v.sigma2 - v.sigma2.adjoint().eval()).norm(),
                                (v.gamma - v.gamma.adjoint().eval()).norm(),
                                (v.gamma_tilde - v.gamma_tilde.adjoint().eval()).norm()});
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        const Complex xi1(unif(rng), unif(rng));
        const Complex xi2(unif(rng), unif(rng));
        rep.pencil_det = std::max(
            rep.pencil_det, std::abs((xi1 * v.sigma1 + xi2 * v.sigma2).determinant()));
    }
    return rep;
}

ColligationReport colligation_report(const ModelSpace& ms, const MeromorphicFn& y) {
    const RealCurve& c = ms.ctx().curve();
    const int m = ms.dim();
    const auto& poles = y.poles();
    int n = 0;
    for (const auto& p : poles) n += p.order;

    std::vector<int> row0(poles.size());
    int acc = 0;
    for (size_t i = 0; i < poles.size(); ++i) {
        row0[i] = acc;
        acc += poles[i].order;
    }

    ColligationReport rep;
    rep.phi = Eigen::MatrixXcd::Zero(n, m);
    for (size_t i = 0; i < poles.size(); ++i) {
        for (int j = 0; j < m; ++j) {
            const Complex tw = tau_lift(c, ms.basis()[j]).u;
            const Series hs = ms.ctx().h_series(tw - poles[i].point.u, poles[i].order - 1);
            for (int d = 0; d < poles[i].order; ++d) {
                const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
                rep.phi(row0[i] + d, j) = sgn * hs[d];  // Taylor rows of the sections
            }
        }
    }

    rep.sigma = Eigen::MatrixXcd::Zero(n, n);
    for (size_t i = 0; i < poles.size(); ++i) {
        // row block of the conjugate partner, column block of pole i
        size_t rowblk = i;
        if (poles[i].partner >= 0) rowblk = static_cast<size_t>(poles[i].partner);
        if (poles[rowblk].order != poles[i].order)
            throw OrderingMismatch("conjugate poles with mismatched orders");
        const Complex chi = std::conj(lift_multiplier(
            ms.ctx(), std::conj(poles[i].point.u) - poles[rowblk].point.u));
        for (int g = 0; g < poles[i].order; ++g)
            for (int d = 0; g + d < poles[i].order; ++d)
                rep.sigma(row0[rowblk] + g, row0[i] + d) =
                    chi * poles[i].coeff(-(g + d + 1));
    }

    const Eigen::MatrixXcd mm = model_operator(ms, y).mat;
    const Eigen::MatrixXcd lhs = (mm - ms.adjoint(mm)) / kI;
    const Eigen::MatrixXcd rhs = ms.gram_solve(rep.phi.adjoint()) * rep.sigma * rep.phi;
    rep.residual = (lhs - rhs).norm();
    return rep;
}

Eigen::MatrixXcd ccf(const Vessel& v, Complex xi1, Complex xi2, Complex z) {
    const int n = v.external_dim();
    const Eigen::MatrixXcd pencil =
        xi1 * v.A1 + xi2 * v.A2 - z * Eigen::MatrixXcd::Identity(v.inner_dim(), v.inner_dim());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
    if (svd.singularValues().minCoeff() < 1e-8)
        throw SpectrumHit("z lies on the spectrum of xi1 A1 + xi2 A2");
    return Eigen::MatrixXcd::Identity(n, n) -
           kI * v.Phi * pencil.inverse() * v.phi_star() * (xi1 * v.sigma1 + xi2 * v.sigma2);
}

Eigen::MatrixXcd ccf_metric_defect(const Vessel& v, Complex xi1, Complex xi2, Complex z) {
    if (std::abs(xi1.imag()) > 1e-12 || std::abs(xi2.imag()) > 1e-12)
        throw Error("metric identities need a real direction (xi1, xi2)");
    const int n = v.external_dim();
    const Eigen::MatrixXcd pencil =
        xi1 * v.A1 + xi2 * v.A2 - z * Eigen::MatrixXcd::Identity(v.inner_dim(), v.inner_dim());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
    if (svd.singularValues().minCoeff() < 1e-8)
        throw SpectrumHit("z lies on the spectrum of xi1 A1 + xi2 A2");
    const Eigen::MatrixXcd xs = xi1 * v.sigma1 + xi2 * v.sigma2;
    const Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(n, n) -
                               kI * xs * v.Phi * pencil.inverse() * v.phi_star();
    return w * xs * w.adjoint() - xs;
}

namespace {

// smallest singular vector with deterministic phase (largest entry real > 0)
Eigen::VectorXcd kernel_vector(const Eigen::MatrixXcd& m, double* smin, double* s2) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (smin) *smin = s(s.size() - 1);
    if (s2) *s2 = s.size() > 1 ? s(s.size() - 2) : 1.0;
    Eigen::VectorXcd vker = svd.matrixV().col(s.size() - 1);
    int imax = 0;
    for (int i = 1; i < vker.size(); ++i)
        if (std::abs(vker[i]) > std::abs(vker[imax])) imax = i;
    const Complex ph = vker[imax] / std::abs(vker[imax]);
    return vker / ph;
}

}  // namespace

JcfResult jcf(const Vessel& v, Complex lambda1, Complex lambda2, int directions,
              unsigned seed) {
    const Eigen::MatrixXcd pin = lambda1 * v.sigma2 - lambda2 * v.sigma1 + v.gamma;
    const Eigen::MatrixXcd pout = lambda1 * v.sigma2 - lambda2 * v.sigma1 + v.gamma_tilde;
    const double scale = 1.0 + pin.norm();
    double smin, s2, smin_t, s2_t;
    const Eigen::VectorXcd u = kernel_vector(pin, &smin, &s2);
    const Eigen::VectorXcd ut = kernel_vector(pout, &smin_t, &s2_t);
    if (smin > 1e-8 * scale) throw OffCurve("(lambda1, lambda2) is off the discriminant curve");
    if (s2 < 1e-6 * scale || s2_t < 1e-6 * scale)
        throw SingularCurvePoint("kernel dimension exceeds one");

    JcfResult res;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    bool have = false;
    Complex vmin{0.0}, vmax{0.0};
    for (int t = 0; t < directions; ++t) {
        const Complex xi1(1.0 + 0.3 * unif(rng), 0.3 * unif(rng));
        const Complex xi2(0.7 * unif(rng), 1.0 + 0.3 * unif(rng));
        Eigen::MatrixXcd w;
        try {
            w = ccf(v, xi1, xi2, xi1 * lambda1 + xi2 * lambda2);
        } catch (const SpectrumHit&) {
            continue;
        }
        const Eigen::VectorXcd img = w * u;
        const Complex s = ut.dot(img) / ut.dot(ut);  // Eigen dot conjugates the left factor
        res.map_residual = std::max(res.map_residual, (img - s * ut).norm());
        if (!have) {
            vmin = vmax = s;
            res.value = s;
            have = true;
        } else {
            res.xi_spread = std::max(res.xi_spread, std::abs(s - res.value));
        }
    }
    if (!have) throw SpectrumHit("no admissible direction found");
    return res;
}

Complex DiscriminantPoly::eval(Complex l1, Complex l2) const {
    Complex acc = 0.0;
    for (int i = 0; i <= degree; ++i)
        for (int j = 0; j <= degree; ++j)
            if (i + j <= degree) acc += coeffs(i, j) * std::pow(l1, i) * std::pow(l2, j);
    return acc;
}

DiscriminantPoly discriminant(const Vessel& v, bool use_gamma_tilde) {
    const int n = v.external_dim();
    const Eigen::MatrixXcd& g = use_gamma_tilde ? v.gamma_tilde : v.gamma;

    // magnitude scale for the Chebyshev grid
    const double scale =
        std::max(1.0, std::max(v.sigma1.norm(), std::max(v.sigma2.norm(), g.norm())));
    std::vector<double> nodes(n + 1);
    for (int i = 0; i <= n; ++i) nodes[i] = scale * std::cos(kPi * (i + 0.5) / (n + 1));

    // least-squares fit of the total-degree-n coefficient set
    std::vector<std::pair<int, int>> monos;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) monos.push_back({i, j});
    const int rows = (n + 1) * (n + 1);
    Eigen::MatrixXcd vand(rows, monos.size());
    Eigen::VectorXcd rhs(rows);
    int r = 0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b, ++r) {
            const Complex l1 = nodes[a], l2 = nodes[b];
            rhs[r] = (l1 * v.sigma2 - l2 * v.sigma1 + g).determinant();
            for (size_t k = 0; k < monos.size(); ++k)
                vand(r, k) = std::pow(l1, monos[k].first) * std::pow(l2, monos[k].second);
        }
    const Eigen::VectorXcd sol = vand.colPivHouseholderQr().solve(rhs);

    DiscriminantPoly poly;
    poly.degree = n;
    poly.coeffs = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    for (size_t k = 0; k < monos.size(); ++k)
        poly.coeffs(monos[k].first, monos[k].second) = sol[k];
    if (poly.coeff_scale() < 1e-12)
        throw DegenerateDet("discriminant polynomial is identically zero");
    return poly;
}

double model_map_identity_check(const Vessel& v, const SurfacePoint& z,
                                const Eigen::VectorXcd& h, Complex xi1, Complex xi2) {
    const int n = v.external_dim();
    const Complex yz = xi1 * v.y1.eval(z) + xi2 * v.y2.eval(z);
    const Eigen::MatrixXcd pencil =
        xi1 * v.A1 + xi2 * v.A2 -
        yz * Eigen::MatrixXcd::Identity(v.inner_dim(), v.inner_dim());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
    if (svd.singularValues().minCoeff() < 1e-8)
        throw SpectrumHit("(y1(z), y2(z)) touches the joint spectrum");

    Eigen::RowVectorXcd ul(n);  // row of Cauchy kernels at the poles
    for (int j = 0; j < n; ++j)
        ul[j] = cauchy_kernel(v.ms.ctx(), z, v.poles[j].point);
    // the kernel-row normalisation used here puts a factor i in front of the
    // half-curve map
    const Complex mapped =
        kI * (ul * (xi1 * v.sigma1 + xi2 * v.sigma2) * v.Phi * pencil.inverse() * h)(0);
    return std::abs(mapped - v.ms.eval(h, z));
}

Complex kernel_via_jcf(const Vessel& v, const SurfacePoint& p, const SurfacePoint& q,
                       Complex xi1, Complex xi2) {
    if (std::abs(xi1.imag()) > 1e-12 || std::abs(xi2.imag()) > 1e-12)
        throw Error("the kernel sandwich identity needs a real direction");
    const int n = v.external_dim();
    const Eigen::MatrixXcd xs = xi1 * v.sigma1 + xi2 * v.sigma2;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

    auto ul_at = [&](const SurfacePoint& x) {
        Eigen::RowVectorXcd ul(n);
        for (int j = 0; j < n; ++j) ul[j] = cauchy_kernel(v.ms.ctx(), x, v.poles[j].point);
        return ul;
    };
    auto s_at = [&](const SurfacePoint& x) {
        const Complex yx = xi1 * v.y1.eval(x) + xi2 * v.y2.eval(x);
        const Eigen::MatrixXcd pencil =
            xi1 * v.A1 + xi2 * v.A2 -
            yx * Eigen::MatrixXcd::Identity(v.inner_dim(), v.inner_dim());
        return (id - kI * xs * v.Phi * pencil.inverse() * v.phi_star()).eval();
    };

    const Eigen::RowVectorXcd up = ul_at(p);
    const Eigen::RowVectorXcd uq = ul_at(q);
    const Eigen::MatrixXcd sp = s_at(p);
    const Eigen::MatrixXcd sq = s_at(q);
    const Complex yp = xi1 * v.y1.eval(p) + xi2 * v.y2.eval(p);
    const Complex yq = xi1 * v.y1.eval(q) + xi2 * v.y2.eval(q);
    // kernel-row normalisation: the sandwich identity holds with +i in the
    // denominator
    const Complex denom = kI * (yp - std::conj(yq));
    const Complex first = (up * xs * uq.adjoint())(0) / denom;
    const Complex second = (up * sp * xs * sq.adjoint() * uq.adjoint())(0) / denom;
    return first - second;
}

std::string vessel_to_json(const Vessel& v) {
    using nlohmann::ordered_json;
    auto mat = [](const Eigen::MatrixXcd& m) {
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < m.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (int j = 0; j < m.cols(); ++j)
                row.push_back({m(i, j).real(), m(i, j).imag()});
            rows.push_back(row);
        }
        return rows;
    };
    ordered_json j;
    j["schema"] = 1;
    j["inner_dim"] = v.inner_dim();
    j["external_dim"] = v.external_dim();
    ordered_json poles = ordered_json::array();
    for (const auto& p : v.poles)
        poles.push_back({{"point", {p.point.u.real(), p.point.u.imag()}},
                         {"partner", p.partner},
                         {"chart", v.ms.ctx().curve().genus() == 0 ? "standard" : "flat"}});
    j["poles"] = poles;
    j["A1"] = mat(v.A1);
    j["A2"] = mat(v.A2);
    j["Phi"] = mat(v.Phi);
    j["sigma1"] = mat(v.sigma1);
    j["sigma2"] = mat(v.sigma2);
    j["gamma"] = mat(v.gamma);
    j["gamma_tilde"] = mat(v.gamma_tilde);
    return j.dump(2);
}

void vessel_matrices_from_json(const std::string& text, Eigen::MatrixXcd& a1,
                               Eigen::MatrixXcd& a2, Eigen::MatrixXcd& phi,
                               Eigen::MatrixXcd& sigma1, Eigen::MatrixXcd& sigma2,
                               Eigen::MatrixXcd& gamma, Eigen::MatrixXcd& gamma_tilde) {
    const auto j = nlohmann::json::parse(text);
    auto mat = [&](const char* key) {
        const auto& rows = j.at(key);
        Eigen::MatrixXcd m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t k = 0; k < rows[i].size(); ++k)
                m(i, k) = Complex(rows[i][k][0].get<double>(), rows[i][k][1].get<double>());
        return m;
    };
    a1 = mat("A1");
    a2 = mat("A2");
    phi = mat("Phi");
    sigma1 = mat("sigma1");
    sigma2 = mat("sigma2");
    gamma = mat("gamma");
    gamma_tilde = mat("gamma_tilde");
}

}  // namespace rsv
