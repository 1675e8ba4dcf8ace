#include "rsv/kernels.hpp"

#include <cmath>

namespace rsv {

KernelContext KernelContext::make(const RealCurve& c, const ToriiPoint& zeta) {
    return make_raw(c, zeta.zeta);
}

KernelContext KernelContext::make_raw(const RealCurve& c, const Eigen::VectorXcd& zeta) {
    KernelContext ctx;
    ctx.curve_ = &c;
    if (c.genus() == 0) {
        if (zeta.size() != 0) throw Error("genus-0 context takes an empty zeta");
        return ctx;
    }
    ctx.zeta_ = zeta;
    ctx.chi_ = jacobian_to_char(c.period_matrix(), zeta);
    ctx.theta0_ = theta_char(c.period_matrix(), ctx.chi_,
                             Eigen::VectorXcd::Zero(c.genus()));
    if (std::abs(ctx.theta0_) <= 1e-8)
        throw ThetaVanishes("theta(zeta) vanishes; kernel undefined");
    return ctx;
}

KernelContext KernelContext::trivial(const RealCurve& c) {
    if (c.genus() != 0) throw Error("trivial context is genus 0 only");
    KernelContext ctx;
    ctx.curve_ = &c;
    return ctx;
}

Series KernelContext::h_series(Complex s, int K) const {
    Series out(K + 1);
    if (curve_->genus() == 0) {
        if (std::abs(s) < 1e-12) throw PoleHit("kernel pole: coincident arguments");
        // -i/(s+x): coefficients -i (-1)^k / s^(k+1)
        Complex c = -kI / s;
        for (int k = 0; k <= K; ++k) {
            out[k] = c;
            c *= -1.0 / s;
        }
        return out;
    }
    const auto& pm = curve_->period_matrix();
    const Series num = theta_taylor1(pm, chi_, s, K, 1e-14);
    Series den = theta_taylor1(pm, curve_->odd_char(), s, K, 1e-14);
    if (std::abs(den[0]) < 1e-12 * std::abs(curve_->prime_deriv0()))
        throw PoleHit("kernel pole: arguments coincide mod the lattice");
    Series q = series_div(num, den, K);
    const Complex scale = curve_->prime_deriv0() / (kI * theta0_);
    for (auto& v : q) v *= scale;
    return q;
}

Complex section(const KernelContext& ctx, const SurfacePoint& a, const SurfacePoint& b) {
    return ctx.h(b.u - a.u);
}

Complex section_deriv(const KernelContext& ctx, const SurfacePoint& a,
                      const SurfacePoint& b, int m, int n) {
    if (m < 0 || n < 0 || m + n > 6) throw OrderTooHigh("section derivative order exceeds 6");
    const Series s = ctx.h_series(b.u - a.u, m + n);
    double fact = 1.0;
    for (int j = 2; j <= m + n; ++j) fact *= j;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * fact * s[m + n];
}

Complex cauchy_kernel(const KernelContext& ctx, const SurfacePoint& u,
                      const SurfacePoint& v) {
    return section(ctx, u, tau_lift(ctx.curve(), v));
}

Complex cauchy_kernel_deriv(const KernelContext& ctx, const SurfacePoint& u,
                            const SurfacePoint& v, int du, int dv) {
    return section_deriv(ctx, u, tau_lift(ctx.curve(), v), du, dv);
}

Eigen::MatrixXcd gram_matrix(const KernelContext& ctx,
                             const std::vector<SurfacePoint>& points) {
    const int m = static_cast<int>(points.size());
    Eigen::MatrixXcd g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = cauchy_kernel(ctx, points[j], points[i]);
    const double dev = (g - g.adjoint().eval()).cwiseAbs().maxCoeff();
    if (dev > 1e-10 * (1.0 + g.cwiseAbs().maxCoeff()))
        throw Error("gram matrix failed the Hermitian check (zeta off the real torus?)");
    return 0.5 * (g + g.adjoint().eval());
}

namespace {

// k(u,v) = -i F(u,v): normalised so the coincidence limit of the collection
// matrix is the identity.
Complex kfun(const KernelContext& ctx, Complex u, Complex v) {
    return -kI * ctx.h(v - u);
}

struct FiberData {
    std::vector<Complex> pts;
    std::vector<Complex> inv_sqrt_dy;  // principal branch, one value per point
};

FiberData fiber_data(const MeromorphicFn& y, Complex lambda) {
    const Fiber f = solve_fiber(y, lambda);
    FiberData d;
    for (size_t j = 0; j < f.points.size(); ++j) {
        d.pts.push_back(f.points[j].u);
        d.inv_sqrt_dy.push_back(1.0 / std::sqrt(f.dy[j]));
    }
    return d;
}

}  // namespace

CollectionMatrix collection_matrix(const KernelContext& ctx, const MeromorphicFn& y,
                                   std::optional<Complex> lambda1,
                                   std::optional<Complex> lambda2) {
    const int n = y.degree();
    CollectionMatrix out;
    out.lambda1_infinite = !lambda1.has_value();
    out.lambda2_infinite = !lambda2.has_value();
    out.lambda1 = lambda1.value_or(0.0);
    out.lambda2 = lambda2.value_or(0.0);

    if (lambda1 && lambda2 && std::abs(*lambda1 - *lambda2) < 1e-13) {
        out.entries = Eigen::MatrixXcd::Identity(n, n);
        return out;
    }

    // pole data for the infinity forms: c_j = -a_{-1,j}, simple poles only
    std::vector<Complex> pole_pts, sqrt_c;
    if (!lambda1 || !lambda2) {
        if (static_cast<int>(y.poles().size()) != n)
            throw PoleCollision("infinity collection forms need n simple poles");
        for (const auto& p : y.poles()) {
            if (p.order != 1) throw PoleCollision("infinity collection forms need simple poles");
            pole_pts.push_back(p.point.u);
            sqrt_c.push_back(std::sqrt(-p.residue()));
        }
    }

    Eigen::MatrixXcd m(n, n);
    if (lambda1 && lambda2) {
        const FiberData u = fiber_data(y, *lambda1);
        const FiberData v = fiber_data(y, *lambda2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = (*lambda1 - *lambda2) * u.inv_sqrt_dy[i] *
                          kfun(ctx, u.pts[i], v.pts[j]) * v.inv_sqrt_dy[j];
    } else if (lambda1 && !lambda2) {
        const FiberData u = fiber_data(y, *lambda1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = -u.inv_sqrt_dy[i] * kfun(ctx, u.pts[i], pole_pts[j]) * sqrt_c[j];
    } else if (!lambda1 && lambda2) {
        const FiberData v = fiber_data(y, *lambda2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = sqrt_c[i] * kfun(ctx, pole_pts[i], v.pts[j]) * v.inv_sqrt_dy[j];
    } else {
        m = Eigen::MatrixXcd::Identity(n, n);
    }
    out.entries = m;
    return out;
}

double generalized_collection_check(const KernelContext& ctx, const MeromorphicFn& y,
                                    const SurfacePoint& v, const SurfacePoint& w) {
    // at v = w the simple pole of F cancels the vanishing of y(v)-y(w);
    // the limit of the product is i dy(v)
    const Complex lhs = points_equal(ctx.curve(), v, w)
                            ? kI * y.deriv(v)
                            : (y.eval(v) - y.eval(w)) * ctx.h(w.u - v.u);
    Complex rhs = 0.0;
    for (const auto& pole : y.poles()) {
        const int s = pole.order;
        const Series left = ctx.h_series(pole.point.u - v.u, s - 1);   // T_g F(v, .) at p
        const Series right = ctx.h_series(w.u - pole.point.u, s - 1);  // +- T_d F(., w) at p
        for (int g = 0; g < s; ++g)
            for (int d = 0; d + g < s; ++d) {
                const double sign = (d % 2 == 0) ? 1.0 : -1.0;
                rhs += -kI * left[g] * pole.coeff(-(g + d + 1)) * sign * right[d];
            }
    }
    return std::abs(lhs - rhs);
}

Complex si_ratio(const KernelContext& ctx, const SurfacePoint& a, const SurfacePoint& b) {
    // theta[zeta](a-b)/(theta[zeta](0) E(a,b)) in terms of h (E is odd)
    return -kI * ctx.h(a.u - b.u);
}

}  // namespace rsv
