#include "dbb/units.hpp"

#include <cmath>

#include "dbb/errors.hpp"

namespace dbb {

double energy_mev(double p, double m, const PhysicalConstants& k) {
    if (!(p >= 0.0) || !(m >= 0.0)) {
        throw DomainError("energy_of_momentum: p and m must be non-negative");
    }
    const double pc = p * k.c();
    if (m == 0.0) {
        return pc;
    }
    const double mc2 = m * k.c() * k.c();
    return std::hypot(mc2, pc);
}

double energy_of_momentum(double p, double m, const PhysicalConstants& k) {
    return energy_mev(p, m, k) / k.hbar();
}

}  // namespace dbb
