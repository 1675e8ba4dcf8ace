#include "rsv/transfer.hpp"

#include <Eigen/Eigenvalues>
#include <random>

namespace rsv {

Complex blaschke_factor(const RealCurve& c, const SurfacePoint& a, const SurfacePoint& u) {
    if (c.genus() == 0) {
        if (std::abs(u.u - std::conj(a.u)) < 1e-12)
            throw PoleHit("evaluation at the reflected zero");
        return (u.u - a.u) / (u.u - std::conj(a.u));
    }
    const SurfacePoint ta = tau_lift(c, a);
    const Complex en = prime_form(c, u, a);
    const Complex ed = prime_form(c, u, ta);
    if (std::abs(ed) < 1e-12) throw PoleHit("evaluation at the reflected zero");
    const double y = 1.0 / c.t0();  // Y from Gamma = H/2 + i Y^{-1}
    return en / ed * std::exp(-2.0 * kPi * (a.u - ta.u) * y * u.u);
}

BlaschkeProduct BlaschkeProduct::make(const RealCurve& c, std::vector<SurfacePoint> zeros,
                                      const Eigen::VectorXcd& zeta_in) {
    BlaschkeProduct t;
    t.curve_ = &c;
    for (const auto& z : zeros)
        if (!in_plus(c, z)) throw Error("transfer zeros must lie in X_+");
    t.zeros_ = std::move(zeros);
    t.zin_ = zeta_in;
    if (c.genus() == 0) {
        if (zeta_in.size() != 0) throw Error("genus-0 multiplier data must be empty");
        t.ctx_in_ = KernelContext::trivial(c);
        t.ctx_out_ = KernelContext::trivial(c);
        return t;
    }
    // multiplier bookkeeping in the h-convention used here: each factor
    // shifts the flat-bundle point by (a - tau a)
    Eigen::VectorXcd shift = Eigen::VectorXcd::Zero(c.genus());
    for (const auto& z : t.zeros_) shift[0] += z.u - tau_lift(c, z).u;
    t.zout_ = zeta_in + shift;
    t.ctx_in_ = KernelContext::make_raw(c, t.zin_);
    t.ctx_out_ = KernelContext::make_raw(c, t.zout_);
    // both multiplier points must sit on a real torus (Hermitian kernels)
    for (const auto* ctx : {&t.ctx_in_, &t.ctx_out_}) {
        const Complex s(0.2331, 0.1217);
        const Complex delta = std::conj(ctx->h(s)) - ctx->h(-std::conj(s));
        if (std::abs(delta) > 1e-9 * (1.0 + std::abs(ctx->h(s))))
            throw Error("multiplier point left the real torus");
    }
    return t;
}

Complex BlaschkeProduct::eval(const SurfacePoint& u) const {
    Complex prod = 1.0;
    for (const auto& z : zeros_) prod *= blaschke_factor(*curve_, z, u);
    return prod;
}

Complex kernel_KT(const BlaschkeProduct& t, const SurfacePoint& p, const SurfacePoint& q,
                  double scale) {
    const Complex tp = scale * t.eval(p);
    const Complex tq = scale * t.eval(q);
    return cauchy_kernel(t.ctx_out(), p, q) -
           tp * cauchy_kernel(t.ctx_in(), p, q) * std::conj(tq);
}

namespace {

SurfacePoint sample_plus(const RealCurve& c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (c.genus() == 0)
        return SurfacePoint::at(Complex(3.0 * unif(rng) - 1.5, 0.15 + 1.6 * unif(rng)));
    return SurfacePoint::at(
        Complex(unif(rng), (0.06 + 0.88 * unif(rng)) * 0.25 * c.t0()));
}

}  // namespace

ContractivityReport contractivity_report(const BlaschkeProduct& t, int grid, int batches,
                                         int batch_size, unsigned seed, double scale) {
    const RealCurve& c = t.curve();
    ContractivityReport rep;
    // |T| over an X_+ grid
    for (int i = 0; i < grid; ++i)
        for (int j = 1; j < grid; ++j) {
            SurfacePoint p;
            if (c.genus() == 0)
                p = SurfacePoint::at(
                    Complex(-3.0 + 6.0 * i / (grid - 1.0), 2.4 * j / (grid - 1.0)));
            else
                p = SurfacePoint::at(
                    Complex(i / static_cast<double>(grid), 0.5 * c.t0() * j / grid));
            bool near_zero_refl = false;
            for (const auto& z : t.zeros())
                if (points_equal(c, p, involution(c, z), 5e-2)) near_zero_refl = true;
            if (near_zero_refl) continue;
            rep.max_abs = std::max(rep.max_abs, scale * std::abs(t.eval(p)));
        }

    std::mt19937_64 rng(seed);
    rep.min_gram_eig = 1e300;
    for (int b = 0; b < batches; ++b) {
        std::vector<SurfacePoint> pts;
        while (static_cast<int>(pts.size()) < batch_size) {
            const SurfacePoint p = sample_plus(c, rng);
            bool ok = true;
            for (const auto& q : pts)
                if (points_equal(c, p, q, 5e-2)) ok = false;
            for (const auto& z : t.zeros())
                if (points_equal(c, p, involution(c, z), 5e-2)) ok = false;
            if (ok) pts.push_back(p);
        }
        Eigen::MatrixXcd g(batch_size, batch_size);
        for (int i = 0; i < batch_size; ++i)
            for (int j = 0; j < batch_size; ++j)
                g(i, j) = kernel_KT(t, pts[j], pts[i], scale);
        g = 0.5 * (g + g.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
        rep.min_gram_eig = std::min(rep.min_gram_eig, es.eigenvalues().minCoeff());
        rep.gram_scale = std::max(rep.gram_scale, g.norm());
    }
    rep.contractive = rep.max_abs <= 1.0 + 1e-8;
    rep.kernel_psd = rep.min_gram_eig >= -1e-8 * rep.gram_scale;
    return rep;
}

double njcf_consistency(const BlaschkeProduct& t, int samples, unsigned seed) {
    const RealCurve& c = t.curve();
    // H(T) as the finite kernel span at the zeros
    const auto ms = ModelSpace::make(t.ctx_out(), t.zeros());
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    int done = 0;
    while (done < samples) {
        const SurfacePoint p = sample_plus(c, rng);
        const SurfacePoint q = sample_plus(c, rng);
        bool ok = true;
        for (const auto& z : t.zeros()) {
            if (points_equal(c, p, involution(c, z), 5e-2)) ok = false;
            if (points_equal(c, q, involution(c, z), 5e-2)) ok = false;
        }
        if (!ok) continue;
        const Complex direct = span_kernel(ms, p, q);
        const Complex transfer = kernel_KT(t, p, q);
        worst = std::max(worst, std::abs(direct - transfer));
        ++done;
    }
    return worst;
}

Complex h2_inner(const RealCurve& c, const KernelContext& bundle, const Section& f,
                 const Section& g, int nodes) {
    Complex acc = 0.0;
    auto bad = [](Complex v) {
        return !std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > 1e8;
    };
    if (c.genus() == 0) {
        // x = tan(theta/2) maps the circle to the line; dx = (1+x^2)/2 dtheta
        for (int k = 0; k < nodes; ++k) {
            const double th = -kPi + 2.0 * kPi * (k + 0.5) / nodes;
            const double x = std::tan(0.5 * th);
            const SurfacePoint u = SurfacePoint::at(Complex(x, 0.0));
            const Complex val = std::conj(g.eval(u)) * f.eval(u) * (1.0 + x * x) / 2.0;
            if (bad(val)) throw QuadratureDivergence("boundary node hit a singularity");
            acc += val * (2.0 * kPi / nodes);
        }
        return acc / (2.0 * kPi);
    }
    if (!c.dividing()) throw UnsupportedBackend("Hardy pairing needs a dividing curve");
    const double t0 = c.t0();
    // The flat lift of the top circle sits a period away from its conjugate,
    // so the conjugated section picks up the bundle multiplier there; the
    // boundary orientation weight absorbs it.
    const Complex s0(0.2331, 0.1217);
    const Complex chi_m = bundle.h(s0 - Complex(0.0, t0)) / bundle.h(s0);
    const Complex top_weight = -std::conj(chi_m);
    for (int k = 0; k < nodes; ++k) {
        const double x = (k + 0.5) / nodes;
        const SurfacePoint bot = SurfacePoint::at(Complex(x, 0.0));
        const SurfacePoint top = SurfacePoint::at(Complex(x, 0.5 * t0));
        const Complex vb = std::conj(g.eval(bot)) * f.eval(bot);
        const Complex vt = std::conj(g.eval(top)) * f.eval(top);
        if (bad(vb) || bad(vt)) throw QuadratureDivergence("boundary node hit a singularity");
        acc += (vb + top_weight * vt) / static_cast<double>(nodes);
    }
    return acc / (2.0 * kPi);
}

namespace {

Section kernel_section(const KernelContext& ctx, const SurfacePoint& w) {
    const Complex tw = tau_lift(ctx.curve(), w).u;
    const KernelContext c = ctx;
    return Section{[c, tw](Complex u0, int K) {
        const Series hs = c.h_series(tw - u0, K);
        Series out(K + 1);
        for (int k = 0; k <= K; ++k) out[k] = (k % 2 == 0) ? hs[k] : -hs[k];
        return out;
    }};
}

Section scaled_section(const Section& f, std::function<Series(Complex, int)> mul) {
    auto ft = f.taylor;
    return Section{[ft, mul](Complex u0, int K) {
        return series_mul(ft(u0, K), mul(u0, K), K);
    }};
}

}  // namespace

BeurlingReport beurling_orthogonality(const BlaschkeProduct& t, const MeromorphicFn& y,
                                      Complex alpha, int nodes) {
    const RealCurve& c = t.curve();
    BeurlingReport rep;

    // reproducing sanity of the quadrature on the output Hardy space
    const SurfacePoint v0 = c.genus() == 0 ? SurfacePoint::at(Complex(0.4, 0.8))
                                           : SurfacePoint::at(Complex(0.37, 0.11 * c.t0()));
    const SurfacePoint w0 = c.genus() == 0 ? SurfacePoint::at(Complex(-0.6, 1.1))
                                           : SurfacePoint::at(Complex(0.71, 0.17 * c.t0()));
    const Section kv = kernel_section(t.ctx_out(), v0);
    const Section kw = kernel_section(t.ctx_out(), w0);
    rep.reproducing = std::abs(h2_inner(c, t.ctx_out(), kv, kw, nodes) -
                               cauchy_kernel(t.ctx_out(), w0, v0));

    // orthogonality of the H(T) span against T * (input kernels)
    const BlaschkeProduct& tt = t;
    for (const auto& a : t.zeros()) {
        const Section f = kernel_section(t.ctx_out(), a);
        for (const auto& w : {v0, w0}) {
            const Section kin = kernel_section(t.ctx_in(), w);
            const Section th = scaled_section(kin, [&tt](Complex u0, int K) {
                // local Taylor series of T by divided products of factors
                Series out(K + 1, Complex(0.0));
                out[0] = tt.eval(SurfacePoint::at(u0));
                if (K > 0) {
                    // finite differences are enough for the low orders used here
                    const double h = 1e-5;
                    const Complex tp = tt.eval(SurfacePoint::at(u0 + h));
                    const Complex tm = tt.eval(SurfacePoint::at(u0 - h));
                    out[1] = (tp - tm) / (2.0 * h);
                    if (K > 1) out[2] = (tp - 2.0 * out[0] + tm) / (2.0 * h * h);
                }
                return out;
            });
            rep.orthogonality = std::max(
                rep.orthogonality, std::abs(h2_inner(c, t.ctx_out(), f, th, nodes)));
        }
    }

    // multiplication duality <R_alpha f, g> = <f, g / (y - conj alpha)>
    const Section f = kernel_section(t.ctx_out(), v0);
    const Section g = kernel_section(t.ctx_out(), w0);
    const Section rf = apply_resolvent_pointwise(t.ctx_out(), y, alpha, f);
    const MeromorphicFn yc = y;
    const Complex ac = std::conj(alpha);
    const Section gdiv = scaled_section(g, [yc, ac](Complex u0, int K) {
        Series den = yc.taylor(SurfacePoint::at(u0), K);
        den[0] -= ac;
        Series num(K + 1, Complex(0.0));
        num[0] = 1.0;
        return series_div(num, den, K);
    });
    rep.duality = std::abs(h2_inner(c, t.ctx_out(), rf, g, nodes) -
                           h2_inner(c, t.ctx_out(), f, gdiv, nodes));
    return rep;
}

}  // namespace rsv
