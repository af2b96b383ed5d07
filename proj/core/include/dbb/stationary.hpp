#pragma once

#include <utility>

#include "dbb/angular_momentum.hpp"
#include "dbb/spinor.hpp"
#include "dbb/units.hpp"

namespace dbb {

/// Velocity in polar components, nm/ns.
struct PolarVelocity {
    double r;
    double phi;
};

/// Improper energy/angular-momentum eigenstate regular at the origin:
///   h1(r) = i c p J_{j-1/2}(p r / hbar)
///   h2(r) = -(hbar omega_p - m c^2) J_{j+1/2}(p r / hbar)
/// with phases e^{i(j -/+ 1/2) phi} e^{-i omega_p t}.
class StationaryState {
public:
    /// Throws DomainError unless p > 0 and m >= 0.
    StationaryState(AngularMomentum j, double p, double m = 0.0, PhysicalConstants k = kGraphene);

    AngularMomentum j() const { return j_; }
    double p() const { return p_; }
    double m() const { return m_; }
    double omega() const { return omega_; }
    const PhysicalConstants& constants() const { return k_; }

    /// Dimensionless Bessel argument p r / hbar.
    double argument(double r) const { return p_ * r / k_.hbar(); }

    /// c p and hbar omega - m c^2, the weights of the two components.
    double upper_weight() const { return k_.c() * p_; }
    double lower_weight() const { return lower_weight_; }

private:
    AngularMomentum j_;
    double p_;
    double m_;
    PhysicalConstants k_;
    double omega_;
    double lower_weight_;
};

/// (h1, h2) at radius r >= 0.
std::pair<Complex, Complex> radial_functions(const StationaryState& s, double r);

/// Full spinor including angular and time phases.
Spinor spinor_at(const StationaryState& s, double r, double phi, double t);

/// c^2 p^2 J_{j-1/2}^2 + (hbar omega - m c^2)^2 J_{j+1/2}^2.
double density_stat(const StationaryState& s, double r);

/// (0, v_phi). Throws SingularPointError where the density vanishes.
PolarVelocity velocity_stat(const StationaryState& s, double r);

/// Position of the first maximum of density_stat; 0 when the density is
/// maximal at the origin (j = 1/2). Found by a scan with step 0.01 in p r/hbar
/// followed by golden-section refinement.
double most_probable_radius(const StationaryState& s);

/// alpha_j = p rhat / hbar for a massless state (independent of p).
double alpha_coefficient(AngularMomentum j);

}  // namespace dbb
