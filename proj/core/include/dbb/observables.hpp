#pragma once

#include "dbb/packet.hpp"

namespace dbb {

struct EnergyMoments {
    double mean;   // meV
    double delta;  // meV
};

/// Quantum mean values of a packet.
struct MeanValues {
    double norm_sq;
    double mean_e;   // meV
    double delta_e;  // meV
    double mean_s;   // units of hbar
    double r_l;      // nm; NaN for m > 0
    double tau_min;  // ns
    double z;
};

/// ||psi||^2 = 2 pi hbar^2 int dp a^2(p)/p (c^2 p^2 + (hbar omega_p - m c^2)^2),
/// by Gauss-Legendre over the packet window.
double norm_sq(const PacketSpec& spec);

/// <E> and Delta E weighted by the same momentum density as norm_sq.
EnergyMoments mean_energy(const PacketSpec& spec);

/// <S> / hbar = (1/2) int a^2/p (c^2 p^2 - (hbar omega - m c^2)^2) / int a^2/p (...),
/// i.e. the expectation of beta / 2 in the packet. Zero for m = 0.
double mean_spin(const PacketSpec& spec);

/// r_L = c hbar j / <E>. Throws UnsupportedError for m > 0.
double l_radius(const PacketSpec& spec);

/// hbar / (2 Delta E). Throws DegenerateError when Delta E == 0.
double tau_min(double delta_e, const PhysicalConstants& k = kGraphene);
double tau_min(const PacketSpec& spec);

/// Momentum-plane density rho~(p) = hbar^2 a^2 (c^2 p^2 + (hbar omega - m c^2)^2) / (p^2 ||psi||^2),
/// normalized as int 2 pi p rho~(p) dp = 1.
double momentum_density(const PacketSpec& spec, double p);

MeanValues mean_values(const PacketSpec& spec);

/// Closed forms for m = 0, valid for the full momentum half-line.
double massless_norm_sq(const PacketSpec& spec);
EnergyMoments massless_mean_energy(const PacketSpec& spec);

}  // namespace dbb
