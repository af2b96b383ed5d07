#include "dbb/spinor.hpp"

#include <cmath>

namespace dbb {

double density(const Spinor& s) { return std::norm(s.psi1) + std::norm(s.psi2); }

Flux flux(const Spinor& s, const PhysicalConstants& k) {
    // psi1^* psi2 carries both components: jx = 2c Re, jy = 2c Im.
    const Complex cross = std::conj(s.psi1) * s.psi2;
    return {2.0 * k.c() * cross.real(), 2.0 * k.c() * cross.imag()};
}

double scalar_density(const Spinor& s) { return 0.5 * (std::norm(s.psi1) - std::norm(s.psi2)); }

CurrentBundle currents(const Spinor& s, const PhysicalConstants& k) {
    const auto j = flux(s, k);
    return {density(s), j.x, j.y, scalar_density(s)};
}

PolarFlux polar_flux(double jx, double jy, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {c * jx + s * jy, -s * jx + c * jy};
}

}  // namespace dbb
