#include "rsv/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace rsv {

namespace {

double binom(int n, int k) {
    double c = 1.0;
    for (int r = 0; r < k; ++r) c = c * (n - r) / (r + 1);
    return c;
}

}  // namespace

ModelSpace ModelSpace::make(KernelContext ctx, std::vector<SurfacePoint> basis) {
    if (basis.empty()) throw Error("empty model-space basis");
    ModelSpace ms;
    ms.ctx_ = std::move(ctx);
    ms.basis_ = std::move(basis);
    const int m = ms.dim();
    ms.gram_.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            ms.gram_(i, j) = cauchy_kernel(ms.ctx_, ms.basis_[i], ms.basis_[j]);
    const double dev = (ms.gram_ - ms.gram_.adjoint().eval()).cwiseAbs().maxCoeff();
    if (dev > 1e-10 * (1.0 + ms.gram_.cwiseAbs().maxCoeff()))
        throw Error("model-space gram is not Hermitian");
    ms.gram_ = 0.5 * (ms.gram_ + ms.gram_.adjoint().eval());

    if (std::abs(ms.gram_.determinant()) < 1e-12)
        throw Error("kernel basis is numerically dependent");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ms.gram_);
    const Eigen::VectorXd ev = es.eigenvalues();
    ms.cond_ = ev.cwiseAbs().maxCoeff() / ev.cwiseAbs().minCoeff();
    if (ms.cond_ > 1e10) throw IllConditioned("gram condition number exceeds 1e10");
    ms.gram_inv_ = ms.gram_.inverse();
    if (ev.minCoeff() > 0.0) {
        // Cholesky-compatible branch: build G^(1/2) for the operator norm
        ms.sqrt_ = es.operatorSqrt();
        ms.sqrt_inv_ = ms.sqrt_.inverse();
    }
    return ms;
}

Complex ModelSpace::inner(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const {
    return (y.adjoint() * gram_ * x)(0);
}

double ModelSpace::norm(const Eigen::VectorXcd& x) const {
    const Complex q = inner(x, x);
    return std::sqrt(std::max(0.0, q.real()));
}

Eigen::MatrixXcd ModelSpace::adjoint(const Eigen::MatrixXcd& a) const {
    return gram_inv_ * a.adjoint() * gram_;
}

Eigen::MatrixXcd ModelSpace::gram_solve(const Eigen::MatrixXcd& rhs) const {
    return gram_inv_ * rhs;
}

double ModelSpace::op_norm(const Eigen::MatrixXcd& a) const {
    if (sqrt_.size() == 0) return a.norm();  // indefinite metric: Frobenius fallback
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sqrt_ * a * sqrt_inv_);
    return svd.singularValues().maxCoeff();
}

Complex ModelSpace::eval(const Eigen::VectorXcd& coeffs, const SurfacePoint& u) const {
    Complex v = 0.0;
    for (int j = 0; j < dim(); ++j)
        v += coeffs[j] * cauchy_kernel(ctx_, u, basis_[j]);
    return v;
}

Section ModelSpace::section(const Eigen::VectorXcd& coeffs) const {
    const KernelContext ctx = ctx_;
    std::vector<Complex> taus;
    for (const auto& w : basis_) taus.push_back(tau_lift(ctx_.curve(), w).u);
    return Section{[ctx, taus, coeffs](Complex u0, int K) {
        Series out(K + 1, Complex(0.0));
        for (size_t j = 0; j < taus.size(); ++j) {
            // K(u, w_j) = h(tau(w_j) - u); Taylor coefficient k carries (-1)^k
            const Series hs = ctx.h_series(taus[j] - u0, K);
            for (int k = 0; k <= K; ++k)
                out[k] += coeffs[j] * ((k % 2 == 0) ? hs[k] : -hs[k]);
        }
        return out;
    }};
}

OperatorMatrix model_operator(const ModelSpace& ms, const MeromorphicFn& y) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ms.dim(), ms.dim());
    for (int j = 0; j < ms.dim(); ++j) {
        for (const auto& p : y.poles()) {
            if (points_equal(y.curve(), ms.basis()[j], p.point, 1e-6))
                throw PoleCollision("basis point sits on a pole of y");
        }
        m(j, j) = std::conj(y.eval(ms.basis()[j]));
    }
    return {"M^y", m};
}

Section apply_model_pointwise(const ModelSpace& ms, const MeromorphicFn& y,
                              const Section& f) {
    const KernelContext ctx = ms.ctx();
    // pole data and section Taylor rows, frozen at construction
    struct Corr {
        Complex point;
        std::vector<Complex> beta;  // weight of the (l-1)-th kernel derivative
    };
    std::vector<Corr> corr;
    for (const auto& pole : y.poles()) {
        const int s = pole.order;
        const Series tf = f.taylor(pole.point.u, s - 1);
        Corr c{pole.point.u, std::vector<Complex>(s, Complex(0.0))};
        for (int l = 1; l <= s; ++l) {
            Complex acc = 0.0;
            for (int j = l; j <= s; ++j) acc += pole.coeff(-j) * tf[j - l];
            c.beta[l - 1] = kI * acc;
        }
        corr.push_back(std::move(c));
    }
    auto ftay = f.taylor;
    const MeromorphicFn yc = y;
    return Section{[ctx, corr, ftay, yc](Complex u0, int K) {
        Series out = series_mul(yc.taylor(SurfacePoint::at(u0), K), ftay(u0, K), K);
        for (const auto& c : corr) {
            const int s = static_cast<int>(c.beta.size());
            const Series hs = ctx.h_series(c.point - u0, s - 1 + K);
            // D_r(u) = (1/r!) d^r/dw^r h(w - u) at w = p: Taylor coefficient k
            // in u is (-1)^k C(r+k, k) h_series[r+k]
            for (int r = 0; r < s; ++r)
                for (int k = 0; k <= K; ++k) {
                    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                    out[k] += c.beta[r] * sign * binom(r + k, k) * hs[r + k];
                }
        }
        return out;
    }};
}

OperatorMatrix resolvent(const ModelSpace& ms, const MeromorphicFn& y, Complex alpha) {
    solve_fiber(y, alpha);  // regularity validation
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ms.dim(), ms.dim());
    for (int j = 0; j < ms.dim(); ++j) {
        const Complex d = std::conj(y.eval(ms.basis()[j])) - alpha;
        if (std::abs(d) < 1e-10) throw SpectrumHit("alpha lies on the model spectrum");
        m(j, j) = 1.0 / d;
    }
    return {"R^y_alpha", m};
}

Section apply_resolvent_pointwise(const ModelSpace& ms, const MeromorphicFn& y,
                                  Complex alpha, const Section& f) {
    return apply_resolvent_pointwise(ms.ctx(), y, alpha, f);
}

Section apply_resolvent_pointwise(const KernelContext& ctx_in, const MeromorphicFn& y,
                                  Complex alpha, const Section& f) {
    const KernelContext ctx = ctx_in;
    const Fiber fib = solve_fiber(y, alpha);
    std::vector<Complex> weights, pts;
    for (size_t j = 0; j < fib.points.size(); ++j) {
        weights.push_back(f.eval(fib.points[j]) / fib.dy[j]);
        pts.push_back(fib.points[j].u);
    }
    auto ftay = f.taylor;
    const MeromorphicFn yc = y;
    return Section{[ctx, weights, pts, ftay, yc, alpha](Complex u0, int K) {
        Series den = yc.taylor(SurfacePoint::at(u0), K);
        den[0] -= alpha;
        Series out = series_div(ftay(u0, K), den, K);
        for (size_t j = 0; j < pts.size(); ++j) {
            const Series hs = ctx.h_series(pts[j] - u0, K);
            for (int k = 0; k <= K; ++k) {
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                out[k] += kI * weights[j] * sign * hs[k];
            }
        }
        return out;
    }};
}

namespace {

// max |f(u) - g(u)| over a sample set avoiding the given special points
double section_distance(const RealCurve& c, const Section& f, const Section& g,
                        const std::vector<Complex>& avoid) {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double x = std::fmod(0.137 + 0.61803398875 * t, 1.0);
        const double yy = 0.07 + 0.017 * t;
        const Complex u = c.genus() == 0 ? Complex(2.0 * x - 1.0, 0.3 + yy)
                                         : Complex(x, (0.1 + 0.35 * yy / 0.5) * c.t0() * 0.5);
        bool bad = false;
        for (const Complex& a : avoid)
            if (points_equal(c, SurfacePoint::at(u), SurfacePoint::at(a), 5e-2)) bad = true;
        if (bad) continue;
        worst = std::max(worst, std::abs(f.eval(SurfacePoint::at(u)) -
                                         g.eval(SurfacePoint::at(u))));
    }
    return worst;
}

std::vector<Complex> pole_points(const MeromorphicFn& y) {
    std::vector<Complex> v;
    for (const auto& p : y.poles()) v.push_back(p.point.u);
    return v;
}

}  // namespace

AlgebraReport algebra_check(const ModelSpace& ms, const MeromorphicFn& y1,
                            const MeromorphicFn& y2) {
    AlgebraReport rep;
    const auto ysum = MeromorphicFn::sum(y1, y2);
    const auto yprod = MeromorphicFn::product(y1, y2);

    const Eigen::MatrixXcd m1 = model_operator(ms, y1).mat;
    const Eigen::MatrixXcd m2 = model_operator(ms, y2).mat;
    const Eigen::MatrixXcd msum = model_operator(ms, ysum).mat;
    const Eigen::MatrixXcd mprod = model_operator(ms, yprod).mat;

    rep.add_matrix = ms.op_norm(msum - m1 - m2);
    rep.mul_matrix = ms.op_norm(mprod - m1 * m2);
    rep.commutator = ms.op_norm(m1 * m2 - m2 * m1);

    std::vector<Complex> avoid = pole_points(ysum);
    for (const auto& p : yprod.poles()) avoid.push_back(p.point.u);

    // random-ish coefficient section
    Eigen::VectorXcd coeffs(ms.dim());
    for (int j = 0; j < ms.dim(); ++j)
        coeffs[j] = Complex(0.4 + 0.3 * std::cos(1.7 * j), 0.2 * std::sin(2.3 * j + 0.4));
    const Section f = ms.section(coeffs);

    const Section s1 = apply_model_pointwise(ms, y1, f);
    const Section s2 = apply_model_pointwise(ms, y2, f);
    const Section ssum = apply_model_pointwise(ms, ysum, f);
    const Section sprod = apply_model_pointwise(ms, yprod, f);
    const Section s12 = apply_model_pointwise(ms, y1, apply_model_pointwise(ms, y2, f));
    const Section s21 = apply_model_pointwise(ms, y2, apply_model_pointwise(ms, y1, f));

    const Section sum_direct{[&](Complex u0, int K) {
        return series_add(s1.taylor(u0, K), s2.taylor(u0, K));
    }};
    rep.add_pointwise = section_distance(y1.curve(), ssum, sum_direct, avoid);
    rep.mul_pointwise = std::max(section_distance(y1.curve(), sprod, s12, avoid),
                                 section_distance(y1.curve(), s12, s21, avoid));

    // pointwise vs matrix on the generators
    double cross = 0.0;
    for (const auto* y : {&y1, &y2}) {
        const Section pw = apply_model_pointwise(ms, *y, f);
        const Section mt = ms.section(model_operator(ms, *y).mat * coeffs);
        cross = std::max(cross, section_distance(y1.curve(), pw, mt, pole_points(*y)));
    }
    rep.pointwise_vs_matrix = cross;
    return rep;
}

double structure_identity_residual(const ModelSpace& ms, const MeromorphicFn& y,
                                   Complex alpha, Complex beta,
                                   const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) {
    const auto rhs_at = [&](Complex a, Complex b) {
        const Fiber fa = solve_fiber(y, a);
        const Fiber fb = solve_fiber(y, b);
        const Section fs = ms.section(f);
        const Section gs = ms.section(g);
        Complex acc = 0.0;
        for (size_t l = 0; l < fa.points.size(); ++l)
            for (size_t t = 0; t < fb.points.size(); ++t) {
                const SurfacePoint tb = tau_lift(ms.ctx().curve(), fb.points[t]);
                acc += fs.eval(fa.points[l]) * std::conj(gs.eval(fb.points[t])) /
                       (fa.dy[l] * std::conj(fb.dy[t])) *
                       si_ratio(ms.ctx(), fa.points[l], tb);
            }
        return -kI * (a - std::conj(b)) * acc;
    };
    const auto lhs_at = [&](Complex a, Complex b) {
        const Eigen::MatrixXcd ra = resolvent(ms, y, a).mat;
        const Eigen::MatrixXcd rb = resolvent(ms, y, b).mat;
        return ms.inner(ra * f, g) - ms.inner(f, rb * g) -
               (a - std::conj(b)) * ms.inner(ra * f, rb * g);
    };

    if (std::abs(alpha - std::conj(beta)) < 1e-8) {
        // limit convention: regularise beta upward and extrapolate
        const double eps = 1e-4;
        const Complex b1 = beta + kI * eps, b2 = beta + kI * (eps / 2.0);
        const Complex lhs = 2.0 * lhs_at(alpha, b2) - lhs_at(alpha, b1);
        const Complex rhs = 2.0 * rhs_at(alpha, b2) - rhs_at(alpha, b1);
        return std::abs(lhs - rhs);
    }
    return std::abs(lhs_at(alpha, beta) - rhs_at(alpha, beta));
}

Complex span_kernel(const ModelSpace& ms, const SurfacePoint& p, const SurfacePoint& q) {
    Eigen::VectorXcd ep(ms.dim()), eq(ms.dim());
    for (int j = 0; j < ms.dim(); ++j) {
        ep[j] = cauchy_kernel(ms.ctx(), p, ms.basis()[j]);
        eq[j] = cauchy_kernel(ms.ctx(), q, ms.basis()[j]);
    }
    return (ep.transpose() * ms.gram_solve(eq.conjugate()))(0);
}

Eigen::MatrixXcd hankel_matrix(const HankelBlock& h) {
    const int s = h.size;
    if (static_cast<int>(h.coeffs.size()) != s) throw Error("hankel block size mismatch");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(s, s);
    for (int g = 0; g < s; ++g)
        for (int d = 0; d + g < s; ++d) m(g, d) = h.coeff(-(g + d + 1));
    return m;
}

Eigen::MatrixXcd hankel_inverse(const HankelBlock& h) {
    const int s = h.size;
    if (static_cast<int>(h.coeffs.size()) != s) throw Error("hankel block size mismatch");
    if (std::abs(h.coeff(-s)) < 1e-14)
        throw SingularBlock("leading Laurent coefficient vanishes");
    // q = Taylor coefficients of 1/(a_{-s} + a_{-s+1} x + ... + a_{-1} x^(s-1))
    Series den(s);
    for (int j = 0; j < s; ++j) den[j] = h.coeff(-s + j);
    Series num(1, Complex(1.0));
    const Series q = series_div(num, den, s - 1);
    Eigen::MatrixXcd inv = Eigen::MatrixXcd::Zero(s, s);
    for (int i = 0; i < s; ++i)
        for (int l = 0; l < s; ++l)
            if (i + l >= s - 1) inv(i, l) = q[i + l - s + 1];
    return inv;
}

Complex taylor_delta_check(int d, int a, int b, const std::vector<double>& c) {
    if (d < 1 || a < 0 || b < 0 || a >= d || b >= d) throw Error("need 0 <= a,b < d");
    if (static_cast<int>(c.size()) != d + 1) throw Error("need d+1 coefficients");
    if (std::abs(c[0]) < 1e-14) throw Error("c_0 must be nonzero");

    // u = 1/f with f(x) = sum c_p x^p, truncated at order d-1
    Series f(d + 1);
    for (int p = 0; p <= d; ++p) f[p] = c[p];
    const Series u = series_div(Series{Complex(1.0)}, f, std::max(a, b) + d);

    // N(x, y) = sum_{q=0}^{d-1} c_q sum_{t=1}^{d-q} x^(q+t-1) y^(d-t)
    std::vector<std::vector<Complex>> ncoef(2 * d, std::vector<Complex>(2 * d, Complex(0.0)));
    for (int q = 0; q <= d - 1; ++q)
        for (int t = 1; t <= d - q; ++t) ncoef[q + t - 1][d - t] += c[q];

    Complex value = 0.0;
    for (int j = 0; j <= d - 1 - a; ++j) {
        // coefficient of x^j y^b in N * u(x) * u(y)
        Complex co = 0.0;
        for (int al = 0; al <= j && al < 2 * d; ++al)
            for (int be = 0; be <= b && be < 2 * d; ++be)
                co += ncoef[al][be] * u[j - al] * u[b - be];
        value += c[d - (j + a + 1)] * co;
    }
    return value;
}

}  // namespace rsv
