#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rsv/series.hpp"
#include "rsv/surface.hpp"

namespace rsv {

/// Pole with a Laurent window in the fixed chart (flat chart on genus 1,
/// standard chart on genus 0).  laurent[j] holds the coefficient of
/// t^(j - order), so laurent[0] = a_{-order} and laurent[order] = a_0.
struct Pole {
    SurfacePoint point;
    int order = 1;
    std::vector<Complex> laurent;
    int partner = -1;  // index of the tau-conjugate pole; own index if real

    Complex coeff(int k) const {  // coefficient of t^k, zero outside the window
        const int idx = k + order;
        if (idx < 0 || idx >= static_cast<int>(laurent.size())) return 0.0;
        return laurent[idx];
    }
    Complex residue() const { return coeff(-1); }
    bool is_real() const { return partner < 0; }
};

struct Fiber {
    Complex alpha;
    std::vector<SurfacePoint> points;
    std::vector<Complex> dy;
};

struct DividingViolation {
    SurfacePoint point;
    Complex value;
    std::string reason;
};

struct DividingReport {
    bool dividing = false;
    std::vector<DividingViolation> violations;
    bool residue_condition = false;  // real simple poles, oriented residues < 0
};

/// Real meromorphic function on the curve.  Evaluation is through local
/// Taylor series in the fixed chart; Laurent windows at the poles are
/// extracted once by contour integration and validated against eval.
class MeromorphicFn {
  public:
    using SeriesAt = std::function<Series(Complex u, int K)>;

    const RealCurve& curve() const { return *curve_; }
    int degree() const { return degree_; }
    const std::vector<Pole>& poles() const { return poles_; }
    bool has_infinite_pole() const { return infinite_pole_; }

    Complex eval(const SurfacePoint& u) const;
    Complex deriv(const SurfacePoint& u, int order = 1) const;
    /// Taylor coefficients of y at u (u off the pole set), orders 0..K.
    Series taylor(const SurfacePoint& u, int K) const;

    double min_pole_gap() const;

    // -- constructors ------------------------------------------------------
    /// Genus 1: logarithmic-derivative difference with simple poles at a
    /// (residue +1) and b (residue -1); real when a, b lie on X_R.
    static MeromorphicFn zeta_pair(const RealCurve& c, const SurfacePoint& a,
                                   const SurfacePoint& b);
    /// Genus 1: i * (zeta-type difference) with conjugate simple poles p, tau(p).
    static MeromorphicFn conj_pair(const RealCurve& c, const SurfacePoint& p);
    /// Genus 1: double pole at a (Weierstrass-type), real for real a.
    static MeromorphicFn double_pole(const RealCurve& c, const SurfacePoint& a);
    /// Genus 0 rational function num/den (coefficients ascending).  Finite
    /// poles only enter the pole list; a pole at infinity is flagged.
    static MeromorphicFn rational(const RealCurve& c, std::vector<Complex> num,
                                  std::vector<Complex> den);
    static MeromorphicFn constant(const RealCurve& c, Complex value);

    // -- algebra -----------------------------------------------------------
    static MeromorphicFn sum(const MeromorphicFn& f, const MeromorphicFn& g);
    static MeromorphicFn product(const MeromorphicFn& f, const MeromorphicFn& g);
    static MeromorphicFn scale(const MeromorphicFn& f, Complex c);
    static MeromorphicFn add_const(const MeromorphicFn& f, Complex c);
    /// (a y + b) / (c y + d).  For c != 0 the poles move to the fiber of
    /// -d/c, which must be regular.
    static MeromorphicFn mobius(const MeromorphicFn& f, Complex a, Complex b,
                                Complex c, Complex d);

    /// Residue sum and tau-symmetry diagnostics (throws on violation).
    void validate() const;

  private:
    MeromorphicFn() = default;
    void finalize(bool extract_laurent = true);
    const RealCurve* curve_ = nullptr;
    int degree_ = 0;
    bool infinite_pole_ = false;
    std::vector<Pole> poles_;
    SeriesAt series_;
    std::vector<Complex> num_, den_;  // genus-0 rational representation

    friend Fiber solve_fiber(const MeromorphicFn&, Complex);
};

/// All n = degree solutions of y(u) = alpha, Newton from a dense seed grid
/// on genus 1, polynomial root finding on genus 0.
Fiber solve_fiber(const MeromorphicFn& y, Complex alpha);

/// Sampling classification of dividing type with a certificate.
DividingReport is_dividing(const MeromorphicFn& y, int samples = 200);

/// Contour-extracted Laurent coefficients a_{-order}..a_{+K} of y at p.
std::vector<Complex> laurent_by_contour(const MeromorphicFn& y, const SurfacePoint& p,
                                        int order, int K, double radius);

}  // namespace rsv
