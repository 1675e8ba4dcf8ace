#include "rsv/theta.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace rsv {

namespace {
constexpr int kRadiusCap = 200;
constexpr int kOrderCap = 6;
}  // namespace

PeriodMatrix PeriodMatrix::make(const Eigen::MatrixXcd& gamma,
                                std::optional<Eigen::MatrixXi> twist) {
    if (gamma.rows() != gamma.cols() || gamma.rows() < 1)
        throw Error("period matrix must be square and nonempty");
    const double sym_dev = (gamma - gamma.transpose()).cwiseAbs().maxCoeff();
    if (sym_dev > 1e-12)
        throw Error("period matrix not symmetric (deviation " + std::to_string(sym_dev) + ")");

    PeriodMatrix pm;
    pm.g_ = static_cast<int>(gamma.rows());
    pm.gamma_ = gamma;
    pm.im_ = gamma.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pm.im_);
    pm.im_min_eig_ = es.eigenvalues().minCoeff();
    if (pm.im_min_eig_ <= 0.0)
        throw NonPositiveImGamma("Im(Gamma) is not positive definite");
    pm.im_inv_ = pm.im_.inverse();

    if (twist) {
        if (twist->rows() != pm.g_ || twist->cols() != pm.g_)
            throw Error("twist matrix has wrong shape");
        const Eigen::MatrixXcd recon =
            twist->cast<double>().cast<Complex>() * 0.5 + kI * pm.im_.cast<Complex>();
        if ((recon - gamma).cwiseAbs().maxCoeff() > 1e-12)
            throw Error("Gamma != H/2 + i*Im(Gamma) for the provided twist");
        pm.twist_ = *twist;
    } else {
        // Recover H = 2 Re(Gamma) when it is integral; otherwise zero.
        Eigen::MatrixXd h2 = 2.0 * gamma.real();
        Eigen::MatrixXi h = h2.array().round().matrix().cast<int>();
        if ((h2 - h.cast<double>()).cwiseAbs().maxCoeff() < 1e-12)
            pm.twist_ = h;
        else
            pm.twist_ = Eigen::MatrixXi::Zero(pm.g_, pm.g_);
    }
    return pm;
}

PeriodMatrix PeriodMatrix::genus1(Complex tau) {
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = tau;
    return make(g);
}

ThetaChar ThetaChar::zero(int g) {
    return {Eigen::VectorXd::Zero(g), Eigen::VectorXd::Zero(g)};
}

ThetaChar ThetaChar::half(int g) {
    return {Eigen::VectorXd::Constant(g, 0.5), Eigen::VectorXd::Constant(g, 0.5)};
}

bool ThetaChar::is_odd_half() const {
    const double q = 4.0 * a.dot(b);
    const long r = std::lround(q);
    if (std::abs(q - static_cast<double>(r)) > 1e-9) return false;
    return (r % 2 + 2) % 2 == 1;
}

LatticeReduction lattice_reduce(const PeriodMatrix& pm, const Eigen::VectorXcd& z) {
    // z = b + Gamma a with real coordinate vectors a, b.
    const Eigen::VectorXd acoord = pm.im_inv() * z.imag();
    const Eigen::VectorXd bcoord = z.real() - pm.gamma().real() * acoord;
    LatticeReduction out;
    out.n = acoord.array().floor().matrix().cast<int>();
    out.m = bcoord.array().floor().matrix().cast<int>();
    out.z = z - out.m.cast<double>().cast<Complex>().matrix() -
            pm.gamma() * out.n.cast<double>().cast<Complex>().matrix();
    return out;
}

double lattice_distance(const PeriodMatrix& pm, const Eigen::VectorXcd& z) {
    const Eigen::VectorXd acoord = pm.im_inv() * z.imag();
    const Eigen::VectorXd bcoord = z.real() - pm.gamma().real() * acoord;
    double d = 0.0;
    for (int j = 0; j < pm.genus(); ++j) {
        const double fa = std::abs(acoord[j] - std::round(acoord[j]));
        const double fb = std::abs(bcoord[j] - std::round(bcoord[j]));
        d = std::max(d, std::max(fa, fb));
    }
    return d;
}

namespace {

// One lattice term of the derivative series.
Complex term(const Eigen::MatrixXcd& gamma, const Eigen::VectorXd& a,
             const Eigen::VectorXd& b, const Eigen::VectorXcd& z,
             const Eigen::VectorXd& n, const std::vector<int>& order) {
    const Eigen::VectorXd na = n + a;
    const Eigen::VectorXcd nac = na.cast<Complex>();
    Complex expo = kI * kPi * (nac.transpose() * gamma * nac)(0);
    for (int j = 0; j < z.size(); ++j)
        expo += 2.0 * kPi * kI * na[j] * (z[j] + b[j]);
    Complex factor = 1.0;
    for (size_t j = 0; j < order.size(); ++j)
        for (int r = 0; r < order[j]; ++r)
            factor *= 2.0 * kPi * kI * na[static_cast<int>(j)];
    return factor * std::exp(expo);
}

// Truncation radius from the Gaussian tail: terms at box distance r from the
// quadratic-form center decay like exp(-pi mu (r - r0)^2) up to a polynomial
// shell factor.  r0 absorbs the center offset rounding, mu = lambda_min(Im Gamma).
int pick_radius(const PeriodMatrix& pm, int total_order, double scale, double tol) {
    const double mu = pm.im_min_eig();
    const int g = pm.genus();
    for (int R = 2; R <= kRadiusCap; ++R) {
        const double shell = 2.0 * g * std::pow(2.0 * R + 3.0, g - 1);
        const double poly = std::pow(2.0 * kPi * (R + 2.0), total_order);
        const double decay = std::exp(-kPi * mu * R * R);
        // geometric-style closure of the remaining shells
        const double closure = 1.0 / std::max(1e-3, 1.0 - std::exp(-kPi * mu * (2.0 * R + 1.0)));
        if (scale * shell * poly * decay * closure < tol) return R;
    }
    throw TruncationOverflow("theta truncation radius exceeds cap 200");
}

Complex theta_series(const PeriodMatrix& pm, const ThetaChar& chi,
                     const Eigen::VectorXcd& z, const std::vector<int>& order,
                     double tol) {
    const int g = pm.genus();
    // Center of the Gaussian envelope: n ~ -a - Im(Gamma)^{-1} Im(z).
    const Eigen::VectorXd center = -chi.a - pm.im_inv() * z.imag();
    // Value scale exp(pi y^t B^{-1} y) with y = Im z.
    const Eigen::VectorXd y = z.imag();
    const double scale = std::exp(kPi * y.dot(pm.im_inv() * y)) + 1.0;

    int total_order = 0;
    for (int k : order) total_order += k;
    const int R = pick_radius(pm, total_order, scale, tol);

    Eigen::VectorXi lo(g), hi(g);
    for (int j = 0; j < g; ++j) {
        lo[j] = static_cast<int>(std::floor(center[j])) - R;
        hi[j] = static_cast<int>(std::ceil(center[j])) + R;
    }
    Complex sum = 0.0;
    Eigen::VectorXd n = lo.cast<double>();
    // odometer over the integer box
    Eigen::VectorXi idx = lo;
    while (true) {
        for (int j = 0; j < g; ++j) n[j] = idx[j];
        sum += term(pm.gamma(), chi.a, chi.b, z, n, order);
        int j = 0;
        while (j < g) {
            if (++idx[j] <= hi[j]) break;
            idx[j] = lo[j];
            ++j;
        }
        if (j == g) break;
    }
    return sum;
}

}  // namespace

Complex theta_char(const PeriodMatrix& pm, const ThetaChar& chi,
                   const Eigen::VectorXcd& z, double tol) {
    return theta_deriv(pm, chi, z, std::vector<int>(pm.genus(), 0), tol);
}

Complex theta(const PeriodMatrix& pm, const Eigen::VectorXcd& z, double tol) {
    return theta_char(pm, ThetaChar::zero(pm.genus()), z, tol);
}

namespace {
Complex theta_deriv_impl(const PeriodMatrix& pm, const ThetaChar& chi,
                         const Eigen::VectorXcd& z, const std::vector<int>& order,
                         double tol) {

    // Evaluate at the reduced argument and unfold with the exact
    // quasi-periodicity factor
    //   theta[a;b](z + m + Gamma n)
    //     = exp(2 pi i a^t m - i pi n^t Gamma n - 2 pi i n^t (z + b)) theta[a;b](z),
    // differentiated via Leibniz (the factor is exp-linear in z).
    const LatticeReduction red = lattice_reduce(pm, z);
    const Eigen::VectorXd nvec = red.n.cast<double>();
    const Eigen::VectorXd mvec = red.m.cast<double>();

    const Eigen::VectorXcd nc = nvec.cast<Complex>();
    Complex expo = 2.0 * kPi * kI * chi.a.dot(mvec) -
                   kI * kPi * (nc.transpose() * pm.gamma() * nc)(0);
    for (int j = 0; j < pm.genus(); ++j)
        expo += -2.0 * kPi * kI * nvec[j] * (red.z[j] + chi.b[j]);
    const Complex fac = std::exp(expo);

    // Leibniz over the multi-index: sum_{j <= order} C(order, j)
    // (-2 pi i n)^(order - j) theta^{(j)}(z_red).
    const int g = pm.genus();
    std::vector<int> sub(g, 0);
    Complex acc = 0.0;
    while (true) {
        double binom = 1.0;
        Complex pow_fac = 1.0;
        for (int j = 0; j < g; ++j) {
            // C(order_j, sub_j)
            double c = 1.0;
            for (int r = 0; r < sub[j]; ++r)
                c = c * static_cast<double>(order[j] - r) / static_cast<double>(r + 1);
            binom *= c;
            for (int r = 0; r < order[j] - sub[j]; ++r) pow_fac *= -2.0 * kPi * kI * nvec[j];
        }
        if (binom != 0.0)
            acc += binom * pow_fac * theta_series(pm, chi, red.z, sub, tol / (1.0 + std::abs(fac)));
        int j = 0;
        while (j < g) {
            if (++sub[j] <= order[j]) break;
            sub[j] = 0;
            ++j;
        }
        if (j == g) break;
    }
    return fac * acc;
}
}  // namespace

Complex theta_deriv(const PeriodMatrix& pm, const ThetaChar& chi,
                    const Eigen::VectorXcd& z, const std::vector<int>& order,
                    double tol) {
    if (tol <= 0.0 || tol > 1e-3) throw Error("theta tol must lie in (0, 1e-3]");
    if (static_cast<int>(order.size()) != pm.genus())
        throw Error("derivative multi-index has wrong length");
    int total = 0;
    for (int k : order) {
        if (k < 0) throw Error("negative derivative order");
        total += k;
    }
    if (total > kOrderCap) throw OrderTooHigh("theta derivative order exceeds 6");
    if (!chi.a.allFinite() || !chi.b.allFinite() || !z.allFinite())
        throw Error("non-finite theta input");
    return theta_deriv_impl(pm, chi, z, order, tol);
}

std::vector<Complex> theta_taylor1(const PeriodMatrix& pm, const ThetaChar& chi,
                                   Complex z, int K, double tol) {
    if (pm.genus() != 1) throw Error("theta_taylor1 needs genus 1");
    if (K < 0 || K > 12) throw OrderTooHigh("taylor window capped at 12");

    // scalar fast path: one box pass accumulates every derivative order
    const Complex tau = pm.gamma()(0, 0);
    const double imt = tau.imag();
    const double a = chi.a[0], b = chi.b[0];

    // z = z0 + m + tau n with reduced z0
    const double acoord = z.imag() / imt;
    const int n = static_cast<int>(std::floor(acoord));
    const int m = static_cast<int>(std::floor(z.real() - tau.real() * acoord));
    const Complex z0 = z - static_cast<double>(m) - tau * static_cast<double>(n);
    const Complex fac =
        std::exp(2.0 * kPi * kI * (a * m) - kI * kPi * (double(n) * n) * tau -
                 2.0 * kPi * kI * (double(n) * (z0 + b)));

    const double center = -a - z0.imag() / imt;
    const double scale = std::exp(kPi * z0.imag() * z0.imag() / imt) + 1.0;
    const int R = pick_radius(pm, K, scale, tol / (1.0 + std::abs(fac)));

    std::vector<Complex> der(K + 1, Complex(0.0));  // derivatives at z0
    const int lo = static_cast<int>(std::floor(center)) - R;
    const int hi = static_cast<int>(std::ceil(center)) + R;
    for (int nn = lo; nn <= hi; ++nn) {
        const double na = nn + a;
        const Complex e =
            std::exp(kI * kPi * (na * na) * tau + 2.0 * kPi * kI * na * (z0 + b));
        Complex p = e;
        const Complex step = 2.0 * kPi * kI * na;
        for (int k = 0; k <= K; ++k) {
            der[k] += p;
            p *= step;
        }
    }

    // unfold the reduction: theta^{(k)}(z) = fac sum_j C(k,j) (-2 pi i n)^{k-j} der[j]
    std::vector<Complex> out(K + 1, Complex(0.0));
    const Complex w = -2.0 * kPi * kI * static_cast<double>(n);
    double kfact = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) kfact *= k;
        Complex acc = 0.0;
        double binom = 1.0;
        Complex wp = 1.0;
        for (int j = k; j >= 0; --j) {
            // binom = C(k, j), wp = w^(k-j)
            acc += binom * wp * der[j];
            binom = binom * j / (k - j + 1.0);
            wp *= w;
        }
        out[k] = fac * acc / kfact;  // Taylor normalisation
    }
    return out;
}

Complex theta_char1(const PeriodMatrix& pm, const ThetaChar& chi, Complex z, double tol) {
    Eigen::VectorXcd v(1);
    v[0] = z;
    return theta_char(pm, chi, v, tol);
}

Complex theta_deriv1(const PeriodMatrix& pm, const ThetaChar& chi, Complex z,
                     int order, double tol) {
    Eigen::VectorXcd v(1);
    v[0] = z;
    return theta_deriv(pm, chi, v, {order}, tol);
}

}  // namespace rsv
