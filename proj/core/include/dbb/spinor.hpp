#pragma once

#include <complex>

#include "dbb/units.hpp"

namespace dbb {

using Complex = std::complex<double>;

/// Two-component spinor psi = (psi1, psi2) at one space-time point.
///
/// Dirac matrices are fixed to gamma^0 = beta = sigma_z, alpha^1 = sigma_x and
/// alpha^2 = sigma_y, so that
///   rho   = psi^dagger psi
///   j^i   = c psi^dagger alpha^i psi
///   sigma = (1/2) psi^dagger beta psi
/// and rho^2 - (j/c)^2 = (2 sigma)^2 for every spinor.
struct Spinor {
    Complex psi1;
    Complex psi2;

    friend bool operator==(const Spinor&, const Spinor&) = default;
};

struct Flux {
    double x;
    double y;
};

struct PolarFlux {
    double r;
    double phi;
};

/// rho, jx, jy and sigma of one spinor.
struct CurrentBundle {
    double rho;
    double jx;
    double jy;
    double sigma;
};

double density(const Spinor& s);
Flux flux(const Spinor& s, const PhysicalConstants& k = kGraphene);
double scalar_density(const Spinor& s);
CurrentBundle currents(const Spinor& s, const PhysicalConstants& k = kGraphene);

/// Radial and azimuthal components of a Cartesian vector at polar angle phi.
PolarFlux polar_flux(double jx, double jy, double phi);

}  // namespace dbb
