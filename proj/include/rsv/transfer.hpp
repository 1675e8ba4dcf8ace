#pragma once

#include "rsv/model.hpp"

namespace rsv {

/// Finite product of elementary inner factors with zeros in X_+.  The output
/// multiplier point is derived from the input one by the zero set:
/// zeta_out = zeta_in + sum (tau a_i - a_i) mod the lattice.
class BlaschkeProduct {
  public:
    static BlaschkeProduct make(const RealCurve& c, std::vector<SurfacePoint> zeros,
                                const Eigen::VectorXcd& zeta_in);

    const RealCurve& curve() const { return *curve_; }
    const std::vector<SurfacePoint>& zeros() const { return zeros_; }
    const Eigen::VectorXcd& zeta_in() const { return zin_; }
    const Eigen::VectorXcd& zeta_out() const { return zout_; }
    const KernelContext& ctx_in() const { return ctx_in_; }
    const KernelContext& ctx_out() const { return ctx_out_; }

    Complex eval(const SurfacePoint& u) const;

  private:
    const RealCurve* curve_ = nullptr;
    std::vector<SurfacePoint> zeros_;
    Eigen::VectorXcd zin_, zout_;
    KernelContext ctx_in_, ctx_out_;
};

/// Elementary factor b_a(u) = E(u,a)/E(u,tau a) * exp(-2 pi (a - tau a)^t Y u);
/// on genus 0 the classical (u-a)/(u-conj a).
Complex blaschke_factor(const RealCurve& c, const SurfacePoint& a, const SurfacePoint& u);

/// K_T(p,q) = K_out(p,q) - T(p) K_in(p,q) conj(T(q)), optionally with T
/// scaled (scale != 1 breaks innerness, used for injected-failure checks).
Complex kernel_KT(const BlaschkeProduct& t, const SurfacePoint& p, const SurfacePoint& q,
                  double scale = 1.0);

struct ContractivityReport {
    double max_abs = 0.0;        // max |T| over the X_+ grid
    double min_gram_eig = 0.0;   // worst Gram eigenvalue of K_T over the batches
    double gram_scale = 1.0;
    bool contractive = false;    // max |T| <= 1 + tol
    bool kernel_psd = false;     // min eig >= -tol * scale
};

ContractivityReport contractivity_report(const BlaschkeProduct& t, int grid = 24,
                                         int batches = 4, int batch_size = 6,
                                         unsigned seed = 0, double scale = 1.0);

/// Worst deviation between the finite H(T) span kernel (Gram route through
/// the kernels at the zeros) and the transfer-function kernel K_T, sampled
/// over point pairs in X_+.
double njcf_consistency(const BlaschkeProduct& t, int samples = 12, unsigned seed = 0);

/// Hardy-space boundary pairing (1/2pi) sum_j int_{X_j} conj(g) f along the
/// positively oriented boundary of X_+, trapezoidal with `nodes` points per
/// component (genus 0: circle substitution x = tan(theta/2)).  The bundle
/// context of the paired sections fixes the conjugation multiplier on the
/// component whose flat lift is displaced by a period.
Complex h2_inner(const RealCurve& c, const KernelContext& bundle, const Section& f,
                 const Section& g, int nodes = 2048);

struct BeurlingReport {
    double orthogonality = 0.0;   // max |<f_i, T h_j>| over the tested pairs
    double duality = 0.0;         // worst resolvent-multiplication duality defect
    double reproducing = 0.0;     // quadrature vs exact kernel reproducing check
};

/// Desk-scale Beurling verification: H(T) span elements against T * (input
/// Hardy kernels) under the boundary quadrature, plus the multiplication
/// duality <R_alpha f, g> = <f, g/(y - conj alpha)>.
BeurlingReport beurling_orthogonality(const BlaschkeProduct& t, const MeromorphicFn& y,
                                      Complex alpha, int nodes = 2048);

}  // namespace rsv
