#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "rsv/common.hpp"

namespace rsv {

/// Genus-g period matrix with the real-structure decomposition
/// Gamma = H/2 + i*Y^{-1}.  Gamma must be symmetric with positive definite
/// imaginary part; both are validated on construction.
class PeriodMatrix {
  public:
    static PeriodMatrix make(const Eigen::MatrixXcd& gamma,
                             std::optional<Eigen::MatrixXi> twist = std::nullopt);

    // Genus-1 convenience: Gamma = [tau].
    static PeriodMatrix genus1(Complex tau);

    int genus() const { return g_; }
    const Eigen::MatrixXcd& gamma() const { return gamma_; }
    const Eigen::MatrixXd& im() const { return im_; }
    const Eigen::MatrixXd& im_inv() const { return im_inv_; }
    const Eigen::MatrixXi& twist() const { return twist_; }
    double im_min_eig() const { return im_min_eig_; }

  private:
    PeriodMatrix() = default;
    int g_ = 0;
    Eigen::MatrixXcd gamma_;
    Eigen::MatrixXd im_, im_inv_;
    Eigen::MatrixXi twist_;
    double im_min_eig_ = 0.0;
};

/// Theta characteristic [a; b], a,b real g-vectors.  Not reduced mod 1
/// implicitly; reduction changes the function by a unimodular factor and is
/// an explicit operation.
struct ThetaChar {
    Eigen::VectorXd a;
    Eigen::VectorXd b;

    static ThetaChar zero(int g);
    static ThetaChar half(int g);  // a = b = (1/2,...,1/2), odd for g=1

    // For half-integer characteristics: parity of 4 a^t b decides odd/even.
    bool is_odd_half() const;
};

struct LatticeReduction {
    Eigen::VectorXcd z;  // representative with lattice coordinates in [0,1)
    Eigen::VectorXi m;   // z_in = z + m + Gamma n
    Eigen::VectorXi n;
};

/// Fundamental-domain representative of z modulo Z^g + Gamma Z^g.
LatticeReduction lattice_reduce(const PeriodMatrix& pm, const Eigen::VectorXcd& z);

/// Distance of z to the lattice (max-norm of the reduced coordinates,
/// folded so that values near 1 count as near 0).
double lattice_distance(const PeriodMatrix& pm, const Eigen::VectorXcd& z);

/// theta[a;b](z) = sum_n exp(i pi (n+a)^t Gamma (n+a) + 2 i pi (n+a)^t (z+b)),
/// truncated over a box |n - center| <= R with R picked from the Gaussian
/// tail bound so the absolute error is below tol.  R is capped at 200.
Complex theta_char(const PeriodMatrix& pm, const ThetaChar& chi,
                   const Eigen::VectorXcd& z, double tol = 1e-12);

/// theta with zero characteristic.
Complex theta(const PeriodMatrix& pm, const Eigen::VectorXcd& z, double tol = 1e-12);

/// Termwise partial derivative; order is a multi-index over the g
/// coordinates, |order| <= 6.
Complex theta_deriv(const PeriodMatrix& pm, const ThetaChar& chi,
                    const Eigen::VectorXcd& z, const std::vector<int>& order,
                    double tol = 1e-12);

// Scalar (genus 1) wrappers.
Complex theta_char1(const PeriodMatrix& pm, const ThetaChar& chi, Complex z,
                    double tol = 1e-12);
Complex theta_deriv1(const PeriodMatrix& pm, const ThetaChar& chi, Complex z,
                     int order, double tol = 1e-12);

/// Taylor coefficients of theta[chi](z + x) in x, orders 0..K (genus 1).
/// Series backend for the kernel and Laurent machinery; K capped at 12.
std::vector<Complex> theta_taylor1(const PeriodMatrix& pm, const ThetaChar& chi,
                                   Complex z, int K, double tol = 1e-12);

}  // namespace rsv
