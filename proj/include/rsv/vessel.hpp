#pragma once

#include <optional>

#include "rsv/model.hpp"

namespace rsv {

/// Union pole of the generating pair with per-function Laurent data in the
/// fixed chart.  a1/a0 entries are zero-padded when the point is regular for
/// that function (then a0 is the function value).
struct VesselPole {
    SurfacePoint point;
    Complex a1_res{0.0}, a1_const{0.0};  // y1: a_{-1}, a_0
    Complex a2_res{0.0}, a2_const{0.0};  // y2
    int partner = -1;                    // conjugate partner index, -1 = real
    // section multiplier from the partner's stored lift to conj(own lift);
    // -1 on components whose lifts are displaced by a period (kernel-sign
    // twist across real components), 1 elsewhere
    Complex chi{1.0, 0.0};
};

struct VesselReport {
    double colligation1 = 0.0;  // (1/i)(A_k - A_k*) - Phi* sigma_k Phi
    double colligation2 = 0.0;
    double commutation = 0.0;   // A1 A2 - A2 A1
    double input = 0.0;         // sigma1 Phi A2* - sigma2 Phi A1* - gamma Phi
    double output = 0.0;        // sigma1 Phi A2  - sigma2 Phi A1  - gamma_tilde Phi
    double linkage = 0.0;       // i(sigma1 Phi Phi* sigma2 - sigma2 Phi Phi* sigma1) - (gt - g)
    double selfadjoint = 0.0;   // worst deviation among sigma1, sigma2, gamma, gamma_tilde
    double pencil_det = 0.0;    // max |det(xi1 sigma1 + xi2 sigma2)| over sampled xi

    double worst() const {
        double w = std::max({colligation1, colligation2, commutation, input, output,
                             linkage, selfadjoint});
        return w;
    }
};

/// Commutative two-operator vessel over a finite kernel span.
class Vessel {
  public:
    ModelSpace ms;
    MeromorphicFn y1, y2;
    std::vector<VesselPole> poles;
    Eigen::MatrixXcd A1, A2;        // m x m in the kernel basis
    Eigen::MatrixXcd Phi;           // n x m evaluation at the union poles
    Eigen::MatrixXcd sigma1, sigma2, gamma, gamma_tilde;  // n x n

    int inner_dim() const { return static_cast<int>(A1.rows()); }
    int external_dim() const { return static_cast<int>(sigma1.rows()); }

    /// Phi* = G^{-1} Phi^H (the Gram-metric adjoint H <- E).
    Eigen::MatrixXcd phi_star() const;
};

/// Assemble the model vessel for a pair of real simple-pole functions.
/// mu_signs (one per union pole, default all zero) multiplies the sigma
/// entries by (-1)^mu for curves where the kernel flips sign across real
/// components; the flat-chart construction keeps them zero on T_0 data.
Vessel build_model_vessel(const ModelSpace& ms, const MeromorphicFn& y1,
                          const MeromorphicFn& y2,
                          const std::vector<int>& mu_signs = {});

VesselReport verify_vessel(const Vessel& v);

struct ColligationReport {
    Eigen::MatrixXcd phi;    // derivative-row evaluation operator
    Eigen::MatrixXcd sigma;  // Hankel-block matrix of Laurent coefficients
    double residual = 0.0;   // ||(1/i)(M - M*) - Phi* sigma Phi||
};

/// Single-function colligation with derivative rows: supports arbitrary pole
/// orders (Hankel blocks) and conjugate pairs (off-diagonal blocks).
ColligationReport colligation_report(const ModelSpace& ms, const MeromorphicFn& y);

/// Complete characteristic function W(xi1, xi2, z) in the form that
/// restricts to the discriminant-curve kernel lines (JCF).
Eigen::MatrixXcd ccf(const Vessel& v, Complex xi1, Complex xi2, Complex z);

/// Metric defect W (xi sigma) W* - (xi sigma) for the companion form of the
/// characteristic function (the weight on the multiplication side), which is
/// the orientation in which the isometry/expansivity laws hold:
/// zero on the real axis, positive semidefinite in the upper half-plane.
Eigen::MatrixXcd ccf_metric_defect(const Vessel& v, Complex xi1, Complex xi2, Complex z);

struct JcfResult {
    Complex value{0.0};
    double xi_spread = 0.0;      // variation across sampled directions
    double map_residual = 0.0;   // ||W u - value * u_tilde||
};

/// Joint characteristic function at a nonsingular point of the discriminant
/// curve, reported as the scalar mapping the phase-fixed kernel vector of
/// E(lambda) to its E~(lambda) coordinate.
JcfResult jcf(const Vessel& v, Complex lambda1, Complex lambda2, int directions = 5,
              unsigned seed = 0);

struct DiscriminantPoly {
    int degree = 0;
    Eigen::MatrixXcd coeffs;  // coeffs(i, j) multiplies lambda1^i lambda2^j

    Complex eval(Complex l1, Complex l2) const;
    double coeff_scale() const { return coeffs.cwiseAbs().maxCoeff(); }
};

/// det(lambda1 sigma2 - lambda2 sigma1 + gamma) by tensor-Chebyshev
/// interpolation; gamma_tilde variant selectable.
DiscriminantPoly discriminant(const Vessel& v, bool use_gamma_tilde = false);

/// Step-4 identity: the half-curve map applied to h returns h(z).
double model_map_identity_check(const Vessel& v, const SurfacePoint& z,
                                const Eigen::VectorXcd& h, Complex xi1, Complex xi2);

/// Reproducing kernel of the span through the joint characteristic function
/// route (normalized-section sandwich), for cross-checking against the
/// direct Gram kernel.
Complex kernel_via_jcf(const Vessel& v, const SurfacePoint& p, const SurfacePoint& q,
                       Complex xi1, Complex xi2);

// JSON round trip for regression baselines.
std::string vessel_to_json(const Vessel& v);
void vessel_matrices_from_json(const std::string& text, Eigen::MatrixXcd& a1,
                               Eigen::MatrixXcd& a2, Eigen::MatrixXcd& phi,
                               Eigen::MatrixXcd& sigma1, Eigen::MatrixXcd& sigma2,
                               Eigen::MatrixXcd& gamma, Eigen::MatrixXcd& gamma_tilde);

}  // namespace rsv
