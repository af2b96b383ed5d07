#pragma once

namespace dbb {

/// Unit system adapted to graphene: lengths in nm, times in ns, energies in
/// meV. Momenta are stored in meV*ns/nm, so that E = p*c for a massless
/// particle (p = 1e-4 corresponds to E = 100 meV). Masses are stored as
/// meV*ns^2/nm^2, i.e. m*c^2 is in meV.
class PhysicalConstants {
public:
    /// Critical ("light") velocity c = 1e6 nm/ns and hbar = 6.5821e-4 meV*ns.
    static constexpr PhysicalConstants graphene() { return {1.0e6, 6.5821e-4}; }

    /// Alternate constants; only meant for tests probing unit dependence.
    static constexpr PhysicalConstants for_testing(double c, double hbar) { return {c, hbar}; }

    constexpr double c() const { return c_; }
    constexpr double hbar() const { return hbar_; }

    friend constexpr bool operator==(const PhysicalConstants&, const PhysicalConstants&) = default;

private:
    constexpr PhysicalConstants(double c, double hbar) : c_(c), hbar_(hbar) {}

    double c_;
    double hbar_;
};

inline constexpr PhysicalConstants kGraphene = PhysicalConstants::graphene();

/// Energy sqrt(m^2 c^4 + p^2 c^2) in meV. Exactly c*p when m == 0.
double energy_mev(double p, double m, const PhysicalConstants& k = kGraphene);

/// Angular frequency omega_p = energy_mev(p, m) / hbar, in 1/ns.
double energy_of_momentum(double p, double m, const PhysicalConstants& k = kGraphene);

}  // namespace dbb
