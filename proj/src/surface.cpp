#include "rsv/surface.hpp"

#include <cmath>

namespace rsv {

RealCurve RealCurve::genus0() {
    RealCurve c;
    c.backend_ = Backend::Genus0;
    c.genus_ = 0;
    c.k_ = 1;
    c.dividing_ = true;
    c.p0_ = SurfacePoint::at(0.0);
    return c;
}

RealCurve RealCurve::genus1(Complex tau) {
    const double re = tau.real();
    const bool rect = std::abs(re) < 1e-12;
    const bool half = std::abs(re - 0.5) < 1e-12;
    if (!rect && !half)
        throw Error("genus-1 modulus must have Re = 0 or Re = 1/2");
    if (tau.imag() <= 0.0) throw NonPositiveImGamma("modulus must have positive imaginary part");

    RealCurve c;
    c.backend_ = Backend::Genus1;
    c.genus_ = 1;
    c.k_ = rect ? 2 : 1;
    c.dividing_ = rect;
    c.pm_.push_back(PeriodMatrix::genus1(tau));
    c.delta_ = ThetaChar::half(1);
    c.p0_ = SurfacePoint::at(0.0);
    c.prime_deriv0_ = theta_deriv1(c.pm_[0], c.delta_, 0.0, 1);
    if (std::abs(c.prime_deriv0_) < 1e-10)
        throw Error("odd characteristic is singular");
    return c;
}

RealCurve RealCurve::generic(PeriodMatrix pm, int component_count, bool dividing) {
    RealCurve c;
    c.backend_ = Backend::Generic;
    c.genus_ = pm.genus();
    c.k_ = component_count;
    c.dividing_ = dividing;
    c.pm_.push_back(std::move(pm));
    c.delta_ = ThetaChar::half(c.genus_);
    c.p0_ = SurfacePoint::at(0.0);
    return c;
}

const PeriodMatrix& RealCurve::period_matrix() const {
    if (pm_.empty()) throw UnsupportedBackend("genus-0 curve has no period matrix");
    return pm_[0];
}

bool RealCurve::is_rectangular() const {
    return backend_ == Backend::Genus1 && std::abs(period_matrix().gamma()(0, 0).real()) < 1e-12;
}

double RealCurve::t0() const {
    if (backend_ != Backend::Genus1) throw UnsupportedBackend("t0 needs a genus-1 curve");
    return period_matrix().gamma()(0, 0).imag();
}

SurfacePoint tau_lift(const RealCurve&, const SurfacePoint& p) {
    if (p.infinity) return p;
    return SurfacePoint::at(std::conj(p.u));
}

SurfacePoint involution(const RealCurve& c, const SurfacePoint& p) {
    if (p.infinity) return p;
    if (c.backend() == Backend::Genus0) return SurfacePoint::at(std::conj(p.u));
    Eigen::VectorXcd v(1);
    v[0] = std::conj(p.u);
    return SurfacePoint::at(lattice_reduce(c.period_matrix(), v).z[0]);
}

bool points_equal(const RealCurve& c, const SurfacePoint& p, const SurfacePoint& q, double tol) {
    if (p.infinity || q.infinity) return p.infinity == q.infinity;
    if (c.genus() == 0) return std::abs(p.u - q.u) < tol;
    if (c.genus() == 1) {
        const Complex tau = c.period_matrix().gamma()(0, 0);
        const Complex d = p.u - q.u;
        const double ac = d.imag() / tau.imag();
        const double bc = d.real() - tau.real() * ac;
        const double fa = std::abs(ac - std::round(ac));
        const double fb = std::abs(bc - std::round(bc));
        return std::max(fa, fb) < tol;
    }
    Eigen::VectorXcd d(1);
    d[0] = p.u - q.u;
    return lattice_distance(c.period_matrix(), d) < tol;
}

std::vector<ComponentDesc> real_components(const RealCurve& c) {
    switch (c.backend()) {
        case Backend::Genus0:
            return {{0, "real line with infinity", 0.0}};
        case Backend::Genus1: {
            if (c.is_rectangular())
                return {{0, "circle Im u = 0", 0.0},
                        {1, "circle Im u = t0/2", 0.5 * c.t0()}};
            return {{0, "circle Im u = 0", 0.0}};
        }
        case Backend::Generic:
            throw UnsupportedBackend("generic backend carries no component charts");
    }
    return {};
}

double distance_to_real(const RealCurve& c, const SurfacePoint& p) {
    if (p.infinity) return 0.0;
    if (c.genus() == 0) return std::abs(p.u.imag());
    const double t0 = c.t0();
    // fold Im into [0, t0)
    double y = std::fmod(p.u.imag(), t0);
    if (y < 0) y += t0;
    if (c.is_rectangular()) {
        const double d0 = std::min(y, t0 - y);
        const double d1 = std::abs(y - 0.5 * t0);
        return std::min(d0, d1);
    }
    return std::min(y, t0 - y);
}

bool on_real_locus(const RealCurve& c, const SurfacePoint& p, double tol) {
    return distance_to_real(c, p) < tol;
}

int nearest_component(const RealCurve& c, const SurfacePoint& p) {
    if (c.genus() == 0 || !c.is_rectangular()) return 0;
    const double t0 = c.t0();
    double y = std::fmod(p.u.imag(), t0);
    if (y < 0) y += t0;
    const double d0 = std::min(y, t0 - y);
    const double d1 = std::abs(y - 0.5 * t0);
    return d0 <= d1 ? 0 : 1;
}

bool in_plus(const RealCurve& c, const SurfacePoint& p) {
    if (p.infinity) return false;
    if (c.genus() == 0) return p.u.imag() > 0.0;
    if (!c.dividing()) throw UnsupportedBackend("X_+ needs a dividing curve");
    const double t0 = c.t0();
    double y = std::fmod(p.u.imag(), t0);
    if (y < 0) y += t0;
    return y > 0.0 && y < 0.5 * t0;
}

Complex prime_form(const RealCurve& c, const SurfacePoint& u, const SurfacePoint& v) {
    if (c.genus() == 0) {
        if (u.infinity || v.infinity)
            throw UnsupportedBackend("prime form at infinity is chart-dependent");
        return v.u - u.u;
    }
    const auto& pm = c.period_matrix();
    return theta_char1(pm, c.odd_char(), v.u - u.u) / c.prime_deriv0();
}

Eigen::VectorXcd abel_jacobi(const RealCurve& c, const SurfacePoint& p) {
    if (c.genus() == 0) return Eigen::VectorXcd(0);
    if (c.backend() == Backend::Generic)
        throw UnsupportedBackend("generic backend has no Abel-Jacobi chart");
    Eigen::VectorXcd v(1);
    v[0] = p.u - c.basepoint().u;
    return v;
}

ToriiPoint torii_point(const RealCurve& c, const std::vector<int>& nu,
                       const Eigen::VectorXd& a) {
    const auto& pm = c.period_matrix();
    const int g = pm.genus();
    const int k = c.component_count();
    if (static_cast<int>(nu.size()) != k - 1) throw Error("nu must have length k-1");
    if (a.size() != g) throw Error("torus parameter vector must have length g");

    Eigen::VectorXcd zeta = Eigen::VectorXcd::Zero(g);
    for (int j = 0; j < g; ++j) zeta[j] = 0.25 * pm.twist()(j, j);
    for (int j = 1; j <= k - 1; ++j) {
        const int coord = g - k + j;  // e_{g-k+1+j}, zero-based
        if (coord < 0 || coord >= g) throw Error("component index out of range for T_nu");
        zeta[coord] += 0.5 * nu[j - 1];
    }
    for (int j = 0; j < g; ++j)
        zeta += kI * a[j] * pm.im().col(j).cast<Complex>();

    const Complex th = theta(pm, zeta);
    if (std::abs(th) <= 1e-8)
        throw ThetaVanishes("theta vanishes at the requested torus point");
    ToriiPoint tp;
    tp.zeta = zeta;
    tp.nu = nu;
    tp.a = a;
    return tp;
}

ThetaChar jacobian_to_char(const PeriodMatrix& pm, const Eigen::VectorXcd& zeta) {
    ThetaChar chi{Eigen::VectorXd(pm.genus()), Eigen::VectorXd(pm.genus())};
    chi.a = pm.im_inv() * zeta.imag();
    chi.b = zeta.real() - pm.gamma().real() * chi.a;
    return chi;
}

}  // namespace rsv
