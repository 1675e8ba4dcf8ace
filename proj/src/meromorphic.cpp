#include "rsv/meromorphic.hpp"

#include <algorithm>
#include <cmath>

namespace rsv {

namespace {

constexpr int kLaurentWindow = 6;  // positive orders kept alongside the principal part

// Taylor series of theta[delta]'(s+x)/theta[delta](s+x), orders 0..K.
Series logd_series(const RealCurve& c, Complex s, int K) {
    const auto& pm = c.period_matrix();
    // tight tolerance: the division below amplifies the theta tail near the
    // lattice zeros of theta[delta]
    Series th = theta_taylor1(pm, c.odd_char(), s, K + 1, 1e-14);
    Series d(K + 1);
    for (int j = 0; j <= K; ++j) d[j] = static_cast<double>(j + 1) * th[j + 1];
    th.resize(K + 1);
    return series_div(d, th, K);
}

// Polynomial helpers for the genus-0 rational backend (ascending coefficients).
std::vector<Complex> poly_trim(std::vector<Complex> p) {
    while (p.size() > 1 && std::abs(p.back()) < 1e-13) p.pop_back();
    if (p.empty()) p.push_back(0.0);
    return p;
}

std::vector<Complex> poly_add(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> r(std::max(a.size(), b.size()), Complex(0.0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return poly_trim(r);
}

std::vector<Complex> poly_mul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> r(a.size() + b.size() - 1, Complex(0.0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return poly_trim(r);
}

std::vector<Complex> poly_scale(std::vector<Complex> a, Complex c) {
    for (auto& v : a) v *= c;
    return poly_trim(std::move(a));
}

Series poly_taylor(const std::vector<Complex>& p, Complex u, int K) {
    // shift p(u + x): repeated synthetic evaluation
    Series r(K + 1, Complex(0.0));
    std::vector<Complex> work(p);
    for (int j = 0; j <= K; ++j) {
        // evaluate j-th derivative / j! via Horner on the shifted polynomial
        Complex acc = 0.0;
        for (size_t i = work.size(); i-- > 0;) acc = acc * u + work[i];
        r[j] = acc;
        // divide synthetically: work <- derivative / (j+1)
        std::vector<Complex> d;
        for (size_t i = 1; i < work.size(); ++i)
            d.push_back(work[i] * static_cast<double>(i) / static_cast<double>(j + 1));
        if (d.empty()) d.push_back(0.0);
        work = std::move(d);
    }
    return r;
}

/// Durand-Kerner root finder for small degrees.
std::vector<Complex> poly_roots(std::vector<Complex> p) {
    p = poly_trim(std::move(p));
    const int n = static_cast<int>(p.size()) - 1;
    if (n <= 0) return {};
    for (auto& c : p) c /= p.back();
    std::vector<Complex> r(n);
    Complex seed(0.4, 0.9);
    r[0] = seed;
    for (int i = 1; i < n; ++i) r[i] = r[i - 1] * seed;
    for (int iter = 0; iter < 400; ++iter) {
        double step = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex num = 0.0;
            for (int j = n; j >= 0; --j) num = num * r[i] + p[j];
            Complex den = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) den *= r[i] - r[j];
            if (std::abs(den) < 1e-300) den = 1e-300;
            const Complex d = num / den;
            r[i] -= d;
            step = std::max(step, std::abs(d));
        }
        if (step < 1e-14) break;
    }
    return r;
}

}  // namespace

Complex MeromorphicFn::eval(const SurfacePoint& u) const { return series_(u.u, 0)[0]; }

Complex MeromorphicFn::deriv(const SurfacePoint& u, int order) const {
    Series s = series_(u.u, order);
    double fact = 1.0;
    for (int j = 2; j <= order; ++j) fact *= j;
    return s[order] * fact;
}

Series MeromorphicFn::taylor(const SurfacePoint& u, int K) const { return series_(u.u, K); }

double MeromorphicFn::min_pole_gap() const {
    double gap = 0.5;
    if (curve_->genus() == 1) gap = std::min(gap, 0.5 * std::min(1.0, curve_->t0()));
    for (size_t i = 0; i < poles_.size(); ++i)
        for (size_t j = i + 1; j < poles_.size(); ++j) {
            double d;
            if (curve_->genus() == 0)
                d = std::abs(poles_[i].point.u - poles_[j].point.u);
            else {
                Eigen::VectorXcd w(1);
                w[0] = poles_[i].point.u - poles_[j].point.u;
                d = lattice_distance(curve_->period_matrix(), w);
            }
            gap = std::min(gap, d);
        }
    return gap;
}

std::vector<Complex> laurent_by_contour(const MeromorphicFn& y, const SurfacePoint& p,
                                        int order, int K, double radius) {
    const int N = 256;
    std::vector<Complex> window(order + K + 1, Complex(0.0));
    for (int m = 0; m < N; ++m) {
        const double th = 2.0 * kPi * m / N;
        const Complex t = radius * std::exp(kI * th);
        const Complex val = y.eval(SurfacePoint::at(p.u + t));
        for (int k = -order; k <= K; ++k)
            window[k + order] += val * std::exp(-kI * (static_cast<double>(k) * th)) /
                                 (std::pow(radius, k) * static_cast<double>(N));
    }
    return window;
}

void MeromorphicFn::finalize(bool extract_laurent) {
    // Laurent windows by contour integration, with order trimming.
    if (extract_laurent) {
        const double gap = min_pole_gap();
        const double radius = std::min(0.05, gap / 4.0);
        for (auto& pole : poles_) {
            pole.laurent = laurent_by_contour(*this, pole.point, pole.order,
                                              kLaurentWindow, radius);
            // scale of y on the sampling circle
            double sc = 0.0;
            for (int k = -pole.order; k <= kLaurentWindow; ++k)
                sc = std::max(sc, std::abs(pole.laurent[k + pole.order]) *
                                      std::pow(radius, k));
            while (pole.order > 0) {
                const double lead = std::abs(pole.laurent.front()) *
                                    std::pow(radius, -pole.order);
                if (lead > 1e-8 * std::max(1.0, sc)) break;
                pole.laurent.erase(pole.laurent.begin());
                --pole.order;
            }
        }
        std::erase_if(poles_, [](const Pole& p) { return p.order == 0; });
    }

    // tau-partner detection
    for (auto& p : poles_) p.partner = -1;
    for (size_t i = 0; i < poles_.size(); ++i) {
        const SurfacePoint ti = involution(*curve_, poles_[i].point);
        if (points_equal(*curve_, ti, poles_[i].point, 1e-8)) continue;
        for (size_t j = 0; j < poles_.size(); ++j)
            if (j != i && points_equal(*curve_, ti, poles_[j].point, 1e-8))
                poles_[i].partner = static_cast<int>(j);
    }

    // canonical ordering: real poles first, conjugate pairs adjacent
    std::vector<Pole> ordered;
    std::vector<bool> used(poles_.size(), false);
    for (size_t i = 0; i < poles_.size(); ++i)
        if (poles_[i].partner < 0) {
            ordered.push_back(poles_[i]);
            used[i] = true;
        }
    for (size_t i = 0; i < poles_.size(); ++i) {
        if (used[i]) continue;
        const int j = poles_[i].partner;
        ordered.push_back(poles_[i]);
        ordered.push_back(poles_[j]);
        used[i] = used[j] = true;
    }
    poles_ = std::move(ordered);
    // rebuild partner indices after reordering
    for (size_t i = 0; i < poles_.size(); ++i) {
        const SurfacePoint ti = involution(*curve_, poles_[i].point);
        poles_[i].partner = -1;
        if (points_equal(*curve_, ti, poles_[i].point, 1e-8)) continue;
        for (size_t j = 0; j < poles_.size(); ++j)
            if (j != i && points_equal(*curve_, ti, poles_[j].point, 1e-8))
                poles_[i].partner = static_cast<int>(j);
    }
}

MeromorphicFn MeromorphicFn::zeta_pair(const RealCurve& c, const SurfacePoint& a,
                                       const SurfacePoint& b) {
    if (c.backend() != Backend::Genus1) throw UnsupportedBackend("zeta_pair needs genus 1");
    if (points_equal(c, a, b, 1e-8)) throw CoincidentPoles("zeta_pair poles coincide");
    MeromorphicFn y;
    y.curve_ = &c;
    y.degree_ = 2;
    const Complex ua = a.u, ub = b.u;
    const RealCurve* cp = &c;
    y.series_ = [cp, ua, ub](Complex u, int K) {
        return series_add(logd_series(*cp, u - ua, K),
                          series_scale(logd_series(*cp, u - ub, K), -1.0));
    };
    // When the poles sit on different real components the raw difference of
    // log-derivatives is real only up to a constant in i*pi*Z (the lattice
    // defect of the log-derivative).  Remove it by sampling a real point.
    double xs = 0.345;
    while (std::min(std::abs(Complex(xs, 0.0) - ua), std::abs(Complex(xs, 0.0) - ub)) < 0.1)
        xs += 0.17;
    const Complex defect = y.series_(Complex(xs, 0.0), 0)[0];
    if (std::abs(defect.imag()) > 1e-12) {
        const Complex shift = -kI * defect.imag();
        auto base = y.series_;
        y.series_ = [base, shift](Complex u, int K) {
            Series s = base(u, K);
            s[0] += shift;
            return s;
        };
    }
    y.poles_ = {Pole{a, 1, {}, -1}, Pole{b, 1, {}, -1}};
    y.finalize();
    return y;
}

MeromorphicFn MeromorphicFn::conj_pair(const RealCurve& c, const SurfacePoint& p) {
    if (c.backend() != Backend::Genus1) throw UnsupportedBackend("conj_pair needs genus 1");
    const SurfacePoint q = tau_lift(c, p);
    if (points_equal(c, p, q, 1e-8)) throw CoincidentPoles("conj_pair needs a non-real pole");
    MeromorphicFn y;
    y.curve_ = &c;
    y.degree_ = 2;
    const Complex up = p.u, uq = q.u;
    const RealCurve* cp = &c;
    y.series_ = [cp, up, uq](Complex u, int K) {
        return series_scale(series_add(logd_series(*cp, u - up, K),
                                       series_scale(logd_series(*cp, u - uq, K), -1.0)),
                            kI);
    };
    y.poles_ = {Pole{p, 1, {}, 1}, Pole{q, 1, {}, 0}};
    y.finalize();
    return y;
}

MeromorphicFn MeromorphicFn::double_pole(const RealCurve& c, const SurfacePoint& a) {
    if (c.backend() != Backend::Genus1) throw UnsupportedBackend("double_pole needs genus 1");
    MeromorphicFn y;
    y.curve_ = &c;
    y.degree_ = 2;
    const Complex ua = a.u;
    const RealCurve* cp = &c;
    y.series_ = [cp, ua](Complex u, int K) {
        Series s = logd_series(*cp, u - ua, K + 1);
        Series d(K + 1);
        for (int j = 0; j <= K; ++j) d[j] = -static_cast<double>(j + 1) * s[j + 1];
        return d;
    };
    y.poles_ = {Pole{a, 2, {}, -1}};
    y.finalize();
    return y;
}

MeromorphicFn MeromorphicFn::rational(const RealCurve& c, std::vector<Complex> num,
                                      std::vector<Complex> den) {
    if (c.genus() != 0) throw UnsupportedBackend("rational backend is genus 0");
    num = poly_trim(std::move(num));
    den = poly_trim(std::move(den));
    if (den.size() == 1 && std::abs(den[0]) < 1e-300)
        throw Error("zero denominator");
    MeromorphicFn y;
    y.curve_ = &c;
    y.num_ = num;
    y.den_ = den;
    const int dn = static_cast<int>(num.size()) - 1;
    const int dd = static_cast<int>(den.size()) - 1;
    y.infinite_pole_ = dn > dd;
    y.series_ = [num, den](Complex u, int K) {
        return series_div(poly_taylor(num, u, K), poly_taylor(den, u, K), K);
    };
    // finite poles from denominator roots, clustered for multiplicity
    std::vector<Complex> roots = poly_roots(den);
    std::vector<std::pair<Complex, int>> clusters;
    for (const Complex& r : roots) {
        bool found = false;
        for (auto& cl : clusters)
            if (std::abs(cl.first - r) < 1e-7) {
                cl.second++;
                found = true;
            }
        if (!found) clusters.push_back({r, 1});
    }
    for (const auto& cl : clusters)
        y.poles_.push_back(Pole{SurfacePoint::at(cl.first), cl.second, {}, -1});
    y.degree_ = std::max(dn, dd);
    y.finalize();
    return y;
}

MeromorphicFn MeromorphicFn::constant(const RealCurve& c, Complex value) {
    MeromorphicFn y;
    y.curve_ = &c;
    y.degree_ = 0;
    y.series_ = [value](Complex, int K) {
        Series s(K + 1, Complex(0.0));
        s[0] = value;
        return s;
    };
    if (c.genus() == 0) {
        y.num_ = {value};
        y.den_ = {Complex(1.0)};
    }
    y.finalize(false);
    return y;
}

MeromorphicFn MeromorphicFn::sum(const MeromorphicFn& f, const MeromorphicFn& g) {
    if (f.curve_ != g.curve_) throw Error("algebra on different curves");
    if (f.curve_->genus() == 0 && !f.num_.empty() && !g.num_.empty()) {
        return rational(*f.curve_,
                        poly_add(poly_mul(f.num_, g.den_), poly_mul(g.num_, f.den_)),
                        poly_mul(f.den_, g.den_));
    }
    MeromorphicFn y;
    y.curve_ = f.curve_;
    auto fs = f.series_, gs = g.series_;
    y.series_ = [fs, gs](Complex u, int K) { return series_add(fs(u, K), gs(u, K)); };
    // candidate poles: union, order max
    y.poles_ = f.poles_;
    for (const auto& pg : g.poles_) {
        bool merged = false;
        for (auto& pf : y.poles_)
            if (points_equal(*f.curve_, pf.point, pg.point, 1e-8)) {
                pf.order = std::max(pf.order, pg.order);
                merged = true;
            }
        if (!merged) y.poles_.push_back(pg);
    }
    y.infinite_pole_ = f.infinite_pole_ || g.infinite_pole_;
    y.finalize();
    int deg = 0;
    for (const auto& p : y.poles_) deg += p.order;
    y.degree_ = deg;
    return y;
}

MeromorphicFn MeromorphicFn::product(const MeromorphicFn& f, const MeromorphicFn& g) {
    if (f.curve_ != g.curve_) throw Error("algebra on different curves");
    if (f.curve_->genus() == 0 && !f.num_.empty() && !g.num_.empty()) {
        return rational(*f.curve_, poly_mul(f.num_, g.num_), poly_mul(f.den_, g.den_));
    }
    MeromorphicFn y;
    y.curve_ = f.curve_;
    auto fs = f.series_, gs = g.series_;
    y.series_ = [fs, gs](Complex u, int K) {
        return series_mul(fs(u, K), gs(u, K), K);
    };
    y.poles_ = f.poles_;
    for (const auto& pg : g.poles_) {
        bool merged = false;
        for (auto& pf : y.poles_)
            if (points_equal(*f.curve_, pf.point, pg.point, 1e-8)) {
                pf.order += pg.order;
                merged = true;
            }
        if (!merged) y.poles_.push_back(pg);
    }
    y.infinite_pole_ = f.infinite_pole_ || g.infinite_pole_;
    y.finalize();
    int deg = 0;
    for (const auto& p : y.poles_) deg += p.order;
    y.degree_ = deg;
    return y;
}

MeromorphicFn MeromorphicFn::scale(const MeromorphicFn& f, Complex c) {
    return product(f, constant(*f.curve_, c));
}

MeromorphicFn MeromorphicFn::add_const(const MeromorphicFn& f, Complex c) {
    return sum(f, constant(*f.curve_, c));
}

MeromorphicFn MeromorphicFn::mobius(const MeromorphicFn& f, Complex a, Complex b,
                                    Complex c, Complex d) {
    if (std::abs(a * d - b * c) < 1e-14) throw Error("degenerate mobius coefficients");
    if (f.curve_->genus() == 0 && !f.num_.empty()) {
        return rational(*f.curve_,
                        poly_add(poly_scale(f.num_, a), poly_scale(f.den_, b)),
                        poly_add(poly_scale(f.num_, c), poly_scale(f.den_, d)));
    }
    MeromorphicFn y;
    y.curve_ = f.curve_;
    auto fs = f.series_;
    y.series_ = [fs, a, b, c, d](Complex u, int K) {
        Series s = fs(u, K);
        Series numer = series_scale(s, a);
        numer[0] += b;
        Series denom = series_scale(s, c);
        denom[0] += d;
        return series_div(numer, denom, K);
    };
    if (std::abs(c) < 1e-14) {
        y.poles_ = f.poles_;  // same pole set, orders unchanged
    } else {
        const Fiber fib = solve_fiber(f, -d / c);
        for (const auto& p : fib.points) y.poles_.push_back(Pole{p, 1, {}, -1});
    }
    y.finalize();
    y.degree_ = f.degree_;
    return y;
}

void MeromorphicFn::validate() const {
    if (curve_->genus() == 1) {
        Complex rsum = 0.0;
        for (const auto& p : poles_) rsum += p.residue();
        if (std::abs(rsum) > 1e-9)
            throw Error("residue sum " + std::to_string(std::abs(rsum)) + " violates the residue theorem");
    }
    // reality: y(p) = conj(y(tau p)) on a small sample
    for (int t = 0; t < 8; ++t) {
        const double x = 0.123 + 0.11 * t;
        const Complex u = curve_->genus() == 0
                              ? Complex(x, 0.37 + 0.05 * t)
                              : Complex(x - std::floor(x), 0.31 * curve_->t0());
        bool near_pole = false;
        for (const auto& p : poles_)
            if (points_equal(*curve_, SurfacePoint::at(u), p.point, 1e-2)) near_pole = true;
        if (near_pole) continue;
        const Complex v1 = eval(SurfacePoint::at(u));
        const Complex v2 = std::conj(eval(tau_lift(*curve_, SurfacePoint::at(u))));
        if (std::abs(v1 - v2) > 1e-9 * (1.0 + std::abs(v1)))
            throw Error("function is not real with respect to tau");
    }
}

Fiber solve_fiber(const MeromorphicFn& y, Complex alpha) {
    const RealCurve& c = y.curve();
    Fiber fib;
    fib.alpha = alpha;

    if (c.genus() == 0) {
        // roots of num - alpha den
        std::vector<Complex> p = poly_add(y.num_.empty() ? std::vector<Complex>{0.0} : y.num_,
                                          poly_scale(y.den_, -alpha));
        std::vector<Complex> roots = poly_roots(p);
        if (static_cast<int>(roots.size()) != y.degree())
            throw FiberIncomplete("fiber hit infinity (degree drop)");
        for (const Complex& r : roots) {
            fib.points.push_back(SurfacePoint::at(r));
            fib.dy.push_back(y.deriv(SurfacePoint::at(r)));
        }
    } else {
        const double t0 = c.t0();
        const int grid = 40;
        std::vector<SurfacePoint> found;
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                Complex u((i + 0.5) / grid, (j + 0.5) / grid * t0);
                bool bad = false;
                for (int it = 0; it < 50; ++it) {
                    Series s;
                    try {
                        s = y.taylor(SurfacePoint::at(u), 1);
                    } catch (const Error&) {
                        bad = true;
                        break;
                    }
                    const Complex r = s[0] - alpha;
                    if (!std::isfinite(std::abs(r)) || std::abs(s[1]) < 1e-14) {
                        bad = true;
                        break;
                    }
                    const Complex step = r / s[1];
                    u -= step;
                    if (std::abs(step) < 1e-14) break;
                }
                if (bad) continue;
                Complex val;
                try {
                    val = y.eval(SurfacePoint::at(u));
                } catch (const Error&) {
                    continue;
                }
                if (std::abs(val - alpha) > 1e-10 * std::max(1.0, std::abs(alpha))) continue;
                Eigen::VectorXcd w(1);
                w[0] = u;
                const Complex ured = lattice_reduce(c.period_matrix(), w).z[0];
                bool dup = false;
                for (const auto& q : found)
                    if (points_equal(c, q, SurfacePoint::at(ured), 1e-5)) dup = true;
                if (!dup) found.push_back(SurfacePoint::at(ured));
            }
        if (static_cast<int>(found.size()) != y.degree())
            throw FiberIncomplete("found " + std::to_string(found.size()) + " of " +
                                  std::to_string(y.degree()) + " fiber points");
        for (const auto& q : found) {
            fib.points.push_back(q);
            fib.dy.push_back(y.deriv(q));
        }
    }
    for (const Complex& d : fib.dy)
        if (std::abs(d) <= 1e-8) throw RamifiedFiber("fiber point with |dy| <= 1e-8");
    // nearly-merged roots mean alpha sits next to a critical value
    for (size_t i = 0; i < fib.points.size(); ++i)
        for (size_t j = i + 1; j < fib.points.size(); ++j) {
            const double d = c.genus() == 0
                                 ? std::abs(fib.points[i].u - fib.points[j].u)
                                 : [&] {
                                       Eigen::VectorXcd w(1);
                                       w[0] = fib.points[i].u - fib.points[j].u;
                                       return lattice_distance(c.period_matrix(), w);
                                   }();
            if (d < 1e-4) throw RamifiedFiber("fiber points nearly coincide");
        }
    return fib;
}

DividingReport is_dividing(const MeromorphicFn& y, int samples) {
    const RealCurve& c = y.curve();
    DividingReport rep;
    rep.dividing = true;

    auto near_pole = [&](const SurfacePoint& p) {
        for (const auto& pole : y.poles())
            if (points_equal(c, p, pole.point, 5e-2)) return true;
        return false;
    };

    // boundary samples must be real
    const auto comps = real_components(c);
    for (const auto& comp : comps) {
        for (int i = 0; i < samples; ++i) {
            const double t = (i + 0.5) / samples;
            SurfacePoint p;
            if (c.genus() == 0) {
                p = SurfacePoint::at(Complex(std::tan(kPi * (t - 0.5)), 0.0));
            } else {
                p = SurfacePoint::at(Complex(t, comp.height));
            }
            if (near_pole(p)) continue;
            const Complex v = y.eval(p);
            if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v))) {
                rep.dividing = false;
                rep.violations.push_back({p, v, "boundary value not real"});
            }
        }
    }
    // interior samples must map to the upper half-plane
    for (int i = 0; i < samples; ++i) {
        const double t = (i + 0.5) / samples;
        SurfacePoint p;
        if (c.genus() == 0)
            p = SurfacePoint::at(Complex(3.0 * std::tan(kPi * (t - 0.5)) / kPi, 0.15 + 1.7 * t));
        else
            p = SurfacePoint::at(Complex(std::fmod(7.3 * t, 1.0),
                                         (0.05 + 0.40 * t) * 0.5 * c.t0()));
        if (near_pole(p)) continue;
        const Complex v = y.eval(p);
        if (v.imag() < -1e-9) {
            rep.dividing = false;
            rep.violations.push_back({p, v, "X_+ value below the real axis"});
        }
    }

    // residue-sign cross-check: real simple poles with oriented residues < 0
    rep.residue_condition = true;
    for (const auto& pole : y.poles()) {
        if (!pole.is_real() || pole.order != 1) {
            rep.residue_condition = false;
            break;
        }
        double orient = 1.0;
        if (c.genus() == 1 && c.is_rectangular() && nearest_component(c, pole.point) == 1)
            orient = -1.0;  // the top circle is negatively oriented as boundary of X_+
        const Complex res = pole.residue() * orient;
        if (std::abs(res.imag()) > 1e-8 * (1.0 + std::abs(res)) || res.real() >= 0.0)
            rep.residue_condition = false;
    }
    return rep;
}

}  // namespace rsv
