#pragma once

#include "rsv/kernels.hpp"

namespace rsv {

/// Analytic section represented by its local Taylor expansions in the fixed
/// chart.  Pointwise operator formulas produce and consume these.
struct Section {
    std::function<Series(Complex u0, int K)> taylor;

    Complex eval(const SurfacePoint& u) const { return taylor(u.u, 0)[0]; }
    Complex deriv(const SurfacePoint& u, int k) const {
        Series s = taylor(u.u, k);
        double f = 1.0;
        for (int j = 2; j <= k; ++j) f *= j;
        return f * s[k];
    }
};

/// Finite span of Cauchy kernels K(., w_1..w_m) with the Gram inner product.
/// gram()(i,j) = K(w_i, w_j) is simultaneously the Gram matrix
/// <e_j, e_i> and the basis evaluation matrix e_j(w_i); reproducing
/// evaluations at basis points read (gram * coeffs).
class ModelSpace {
  public:
    static ModelSpace make(KernelContext ctx, std::vector<SurfacePoint> basis);

    const KernelContext& ctx() const { return ctx_; }
    const std::vector<SurfacePoint>& basis() const { return basis_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const Eigen::MatrixXcd& gram() const { return gram_; }
    double cond() const { return cond_; }

    Complex inner(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const;
    double norm(const Eigen::VectorXcd& x) const;
    /// Gram-twisted adjoint A* = G^{-1} A^H G.
    Eigen::MatrixXcd adjoint(const Eigen::MatrixXcd& a) const;
    Eigen::MatrixXcd gram_solve(const Eigen::MatrixXcd& rhs) const;
    /// Operator norm in the Gram metric (requires positive-definite gram).
    double op_norm(const Eigen::MatrixXcd& a) const;

    Complex eval(const Eigen::VectorXcd& coeffs, const SurfacePoint& u) const;
    Section section(const Eigen::VectorXcd& coeffs) const;

  private:
    KernelContext ctx_;
    std::vector<SurfacePoint> basis_;
    Eigen::MatrixXcd gram_, gram_inv_;
    Eigen::MatrixXcd sqrt_, sqrt_inv_;  // gram^(1/2) when PSD, empty otherwise
    double cond_ = 1.0;
};

struct OperatorMatrix {
    std::string label;
    Eigen::MatrixXcd mat;
};

/// Matrix of the compressed multiplication operator in the kernel basis:
/// diagonal with entries conj(y(w_i)) (kernels are eigenvectors).  The
/// pointwise form lives in apply_model_pointwise.
OperatorMatrix model_operator(const ModelSpace& ms, const MeromorphicFn& y);

/// Pointwise compressed multiplication: y f plus the kernel correction that
/// cancels the principal parts at the poles of y (Laurent-window driven,
/// works for arbitrary pole orders up to the derivative cap).
Section apply_model_pointwise(const ModelSpace& ms, const MeromorphicFn& y,
                              const Section& f);

/// Resolvent matrix diag 1/(conj(y(w_i)) - alpha); SpectrumHit when alpha
/// touches the diagonal spectrum, fiber regularity validated.
OperatorMatrix resolvent(const ModelSpace& ms, const MeromorphicFn& y, Complex alpha);

/// Pointwise resolvent: f/(y - alpha) minus the fiber sum of kernel terms.
Section apply_resolvent_pointwise(const KernelContext& ctx, const MeromorphicFn& y,
                                  Complex alpha, const Section& f);
Section apply_resolvent_pointwise(const ModelSpace& ms, const MeromorphicFn& y,
                                  Complex alpha, const Section& f);

struct AlgebraReport {
    double add_matrix = 0.0;       // ||M^{y1+y2} - M^{y1} - M^{y2}||
    double mul_matrix = 0.0;       // ||M^{y1 y2} - M^{y1} M^{y2}||
    double commutator = 0.0;       // ||[M^{y1}, M^{y2}]||
    double add_pointwise = 0.0;    // same identities through the pointwise formulas
    double mul_pointwise = 0.0;
    double pointwise_vs_matrix = 0.0;  // cross-validation of the two forms
};

AlgebraReport algebra_check(const ModelSpace& ms, const MeromorphicFn& y1,
                            const MeromorphicFn& y2);

/// |LHS - RHS| of the structure identity for coefficient vectors f, g at
/// spectral parameters alpha, beta.  alpha = conj(beta) is evaluated as the
/// stated limit (Richardson extrapolation in the regularising offset).
double structure_identity_residual(const ModelSpace& ms, const MeromorphicFn& y,
                                   Complex alpha, Complex beta,
                                   const Eigen::VectorXcd& f, const Eigen::VectorXcd& g);

/// Reproducing kernel of the finite span.
Complex span_kernel(const ModelSpace& ms, const SurfacePoint& p, const SurfacePoint& q);

// -- Hankel utilities ------------------------------------------------------

struct HankelBlock {
    int size = 1;
    std::vector<Complex> coeffs;  // a_{-1} .. a_{-size}
    Complex coeff(int k) const {  // a_k for k in [-size, -1]
        return coeffs.at(static_cast<size_t>(-k - 1));
    }
};

/// Upper-skew-triangular Hankel matrix: entry (g,d) = a_{-(g+d+1)} for
/// g + d < size, zero below the antidiagonal.
Eigen::MatrixXcd hankel_matrix(const HankelBlock& h);

/// Its lower-skew-triangular inverse via the Taylor coefficients of
/// 1/(a_{-s} + a_{-s+1} x + ... + a_{-1} x^{s-1}).
Eigen::MatrixXcd hankel_inverse(const HankelBlock& h);

/// Evaluates the Kronecker-delta limit expression by truncated bivariate
/// Taylor arithmetic; returns delta_{b,a} when the identity holds.
Complex taylor_delta_check(int d, int a, int b, const std::vector<double>& c);

}  // namespace rsv
