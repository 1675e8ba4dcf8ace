#pragma once

#include "rsv/meromorphic.hpp"

namespace rsv {

/// Evaluation context: a curve together with a multiplier point zeta on a
/// real torus (or a raw Jacobian point) with theta(zeta) != 0.
///
/// Everything in this module is expressed through the holomorphic two-point
/// section
///     F(a,b) = theta[zeta](b-a) / (i theta[zeta](0) E(a,b)),
/// which on genus 1 collapses to a one-variable function h with
/// F(a,b) = h(b-a).  The Cauchy kernel is K(u,v) = F(u, tau v) with the
/// plain conjugate lift; it is Hermitian for zeta in a real torus and has its
/// pole on the locus u = tau v.
class KernelContext {
  public:
    static KernelContext make(const RealCurve& c, const ToriiPoint& zeta);
    static KernelContext make_raw(const RealCurve& c, const Eigen::VectorXcd& zeta);
    static KernelContext trivial(const RealCurve& c);  // genus 0

    const RealCurve& curve() const { return *curve_; }
    const Eigen::VectorXcd& zeta() const { return zeta_; }
    Complex theta0() const { return theta0_; }

    /// Taylor coefficients of h at s, orders 0..K (genus 0: h(s) = -i/s).
    Series h_series(Complex s, int K) const;
    Complex h(Complex s) const { return h_series(s, 0)[0]; }

  private:
    const RealCurve* curve_ = nullptr;
    Eigen::VectorXcd zeta_;
    ThetaChar chi_{Eigen::VectorXd(), Eigen::VectorXd()};
    Complex theta0_{1.0, 0.0};
};

/// F(a,b), the section with a simple pole at a = b.
Complex section(const KernelContext& ctx, const SurfacePoint& a, const SurfacePoint& b);

/// d^m/da^m d^n/db^n F(a,b).
Complex section_deriv(const KernelContext& ctx, const SurfacePoint& a,
                      const SurfacePoint& b, int m, int n);

/// Cauchy kernel K(u,v) = F(u, tau v).
Complex cauchy_kernel(const KernelContext& ctx, const SurfacePoint& u,
                      const SurfacePoint& v);

/// Mixed partials of the Cauchy kernel: du in the holomorphic slot, dv in
/// the conjugated slot (i.e. the holomorphic derivative in w = tau v).
Complex cauchy_kernel_deriv(const KernelContext& ctx, const SurfacePoint& u,
                            const SurfacePoint& v, int du, int dv);

/// Gram matrix with the documented convention G[i][j] = K(p_j, p_i);
/// Hermitian by construction (symmetrised after a deviation check).
Eigen::MatrixXcd gram_matrix(const KernelContext& ctx,
                             const std::vector<SurfacePoint>& points);

struct CollectionMatrix {
    Eigen::MatrixXcd entries;
    bool lambda1_infinite = false;
    bool lambda2_infinite = false;
    Complex lambda1{0.0};
    Complex lambda2{0.0};
};

/// The n x n collection matrices built from the fibers of y (simple poles
/// required for the infinity forms).  Square roots take the principal
/// branch, evaluated once per fiber point and reused across both
/// occurrences.
CollectionMatrix collection_matrix(const KernelContext& ctx, const MeromorphicFn& y,
                                   std::optional<Complex> lambda1,
                                   std::optional<Complex> lambda2);

/// Residual |LHS - RHS| of the pole-form collection identity
///   (y(v) - y(w)) F(v,w) =
///       -i sum_r sum_{g+d < s_r} T_g F(v,.)|_{p_r} a_{r,-(g+d+1)} T_d F(.,w)|_{p_r}
/// with Taylor-coefficient normalisation in the fixed chart.
double generalized_collection_check(const KernelContext& ctx, const MeromorphicFn& y,
                                    const SurfacePoint& v, const SurfacePoint& w);

/// theta[zeta](a-b) / (theta[zeta](0) E(a,b)) - the ratio appearing verbatim
/// in the structure-identity right-hand side (equals -i F(b,a)).
Complex si_ratio(const KernelContext& ctx, const SurfacePoint& a, const SurfacePoint& b);

}  // namespace rsv
