#pragma once

#include <string>
#include <vector>

#include "rsv/theta.hpp"

namespace rsv {

/// A point of the curve, stored as a lifted representative: the standard
/// coordinate on genus 0 (with an infinity flag), the flat coordinate of the
/// universal cover on genus 1.
struct SurfacePoint {
    Complex u{0.0, 0.0};
    bool infinity = false;

    static SurfacePoint at(Complex z) { return {z, false}; }
    static SurfacePoint inf() { return {0.0, true}; }
};

enum class Backend { Genus0, Genus1, Generic };

struct ComponentDesc {
    int index = 0;
    std::string description;
    double height = 0.0;  // genus 1: Im of the component circle in the flat chart
};

/// Compact real Riemann surface with a fixed anti-holomorphic involution.
/// Genus 0 is the half-plane picture, genus 1 a real elliptic curve
/// (rectangular lattice = dividing, Re tau = 1/2 = non-dividing), Generic
/// stores user period data for theta/kernel evaluation only.
class RealCurve {
  public:
    static RealCurve genus0();
    static RealCurve genus1(Complex tau_modulus);
    static RealCurve generic(PeriodMatrix pm, int component_count, bool dividing);

    Backend backend() const { return backend_; }
    int genus() const { return genus_; }
    int component_count() const { return k_; }
    bool dividing() const { return dividing_; }
    const PeriodMatrix& period_matrix() const;
    const ThetaChar& odd_char() const { return delta_; }
    const SurfacePoint& basepoint() const { return p0_; }

    /// theta[delta]'(0), the prime-form normalisation (genus 1).
    Complex prime_deriv0() const { return prime_deriv0_; }

    bool is_rectangular() const;  // genus 1, purely imaginary modulus
    double t0() const;            // genus 1: Im tau

  private:
    RealCurve() = default;
    Backend backend_ = Backend::Genus0;
    int genus_ = 0;
    int k_ = 1;
    bool dividing_ = true;
    std::vector<PeriodMatrix> pm_;  // empty for genus 0
    ThetaChar delta_{Eigen::VectorXd(), Eigen::VectorXd()};
    SurfacePoint p0_;
    Complex prime_deriv0_{1.0, 0.0};
};

/// Anti-holomorphic involution. Genus 0: conjugation; genus 1: conjugation of
/// the lift followed by lattice reduction.
SurfacePoint involution(const RealCurve& c, const SurfacePoint& p);

/// Plain conjugate of the lift, no reduction.  Kernel formulas need this to
/// keep section multipliers consistent across an identity.
SurfacePoint tau_lift(const RealCurve& c, const SurfacePoint& p);

bool points_equal(const RealCurve& c, const SurfacePoint& p, const SurfacePoint& q,
                  double tol = 1e-9);

std::vector<ComponentDesc> real_components(const RealCurve& c);

/// Distance from p to the fixed locus of tau (sampling helper for tests).
double distance_to_real(const RealCurve& c, const SurfacePoint& p);

bool on_real_locus(const RealCurve& c, const SurfacePoint& p, double tol = 1e-9);

/// Index of the real component nearest to p (genus 1) or 0 (genus 0).
int nearest_component(const RealCurve& c, const SurfacePoint& p);

/// True if p lies in X_+ (upper half-plane / bottom half-strip of the torus).
bool in_plus(const RealCurve& c, const SurfacePoint& p);

/// Prime form E(u,v).  Genus 0 returns v-u; genus 1 evaluates
/// theta[delta](v-u)/theta[delta]'(0) in the flat chart.
Complex prime_form(const RealCurve& c, const SurfacePoint& u, const SurfacePoint& v);

/// Abel-Jacobi image of p with respect to the curve basepoint.
Eigen::VectorXcd abel_jacobi(const RealCurve& c, const SurfacePoint& p);

struct ToriiPoint {
    Eigen::VectorXcd zeta;
    std::vector<int> nu;
    Eigen::VectorXd a;
};

/// Point of the real torus T_nu:
///   zeta = diag(H)/4 + sum_j nu_j/2 e_{g-k+1+j} + i sum_j a_j Im(Gamma_j).
/// Validates theta(zeta) != 0.
ToriiPoint torii_point(const RealCurve& c, const std::vector<int>& nu,
                       const Eigen::VectorXd& a);

/// Characteristic [a;b] of a Jacobian point zeta = b + Gamma a.
ThetaChar jacobian_to_char(const PeriodMatrix& pm, const Eigen::VectorXcd& zeta);

}  // namespace rsv
