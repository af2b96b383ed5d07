#include "dbb/observables.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dbb/errors.hpp"
#include "dbb/quadrature.hpp"
#include "dbb/special.hpp"

namespace dbb {
namespace {

// a^2(p) / p without the 0/0 at p = 0.
double amplitude_sq_over_p(const PacketSpec& spec, double p) {
    const double u = (p - spec.p0) / spec.sigma_p;
    return spec.amplitude_scale * spec.amplitude_scale * std::exp(-u * u);
}

struct Moments {
    long double w0 = 0.0L;    // int a^2/p (c^2p^2 + L^2)
    long double w1 = 0.0L;    // ... (E - E_ref)
    long double w2 = 0.0L;    // ... (E - E_ref)^2
    long double spin = 0.0L;  // int a^2/p (c^2p^2 - L^2)
    double e_ref = 0.0;
};

Moments moments(const PacketSpec& spec) {
    spec.validate();
    const auto& k = spec.constants;
    const double rest = spec.m * k.c() * k.c();
    const auto rule = quad::gauss_legendre(spec.quad.n_nodes, spec.window_lo(), spec.window_hi());
    Moments m;
    m.e_ref = energy_mev(spec.p0, spec.m, k);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double p = rule.nodes[i];
        const double e = energy_mev(p, spec.m, k);
        const double up = k.c() * p;
        const double lo = e - rest;
        const long double w = static_cast<long double>(rule.weights[i]) * amplitude_sq_over_p(spec, p);
        const long double weight = w * (static_cast<long double>(up) * up + static_cast<long double>(lo) * lo);
        const long double de = static_cast<long double>(e) - m.e_ref;
        m.w0 += weight;
        m.w1 += weight * de;
        m.w2 += weight * de * de;
        m.spin += w * (static_cast<long double>(up) * up - static_cast<long double>(lo) * lo);
    }
    return m;
}

}  // namespace

double norm_sq(const PacketSpec& spec) {
    const auto m = moments(spec);
    const double hbar = spec.constants.hbar();
    return static_cast<double>(2.0L * std::numbers::pi_v<long double> * hbar * hbar * m.w0);
}

EnergyMoments mean_energy(const PacketSpec& spec) {
    const auto m = moments(spec);
    const long double shift = m.w1 / m.w0;
    const long double var = m.w2 / m.w0 - shift * shift;
    return {static_cast<double>(m.e_ref + shift), static_cast<double>(std::sqrt(std::max(0.0L, var)))};
}

double mean_spin(const PacketSpec& spec) {
    const auto m = moments(spec);
    return static_cast<double>(0.5L * m.spin / m.w0);
}

double l_radius(const PacketSpec& spec) {
    if (spec.m != 0.0) {
        throw UnsupportedError("l_radius is only defined for massless packets");
    }
    const auto& k = spec.constants;
    return k.c() * k.hbar() * spec.j.value() / mean_energy(spec).mean;
}

double tau_min(double delta_e, const PhysicalConstants& k) {
    if (!(delta_e > 0.0)) {
        throw DegenerateError("tau_min: energy spread must be positive");
    }
    return k.hbar() / (2.0 * delta_e);
}

double tau_min(const PacketSpec& spec) { return tau_min(mean_energy(spec).delta, spec.constants); }

double momentum_density(const PacketSpec& spec, double p) {
    if (!(p > 0.0)) {
        throw DomainError("momentum_density: p must be positive");
    }
    const auto& k = spec.constants;
    const double up = k.c() * p;
    const double lo = energy_mev(p, spec.m, k) - spec.m * k.c() * k.c();
    const double hbar = k.hbar();
    return hbar * hbar * amplitude_sq_over_p(spec, p) * (up * up + lo * lo) / (p * norm_sq(spec));
}

MeanValues mean_values(const PacketSpec& spec) {
    const auto m = moments(spec);
    const auto& k = spec.constants;
    const double hbar = k.hbar();
    MeanValues v{};
    v.norm_sq = static_cast<double>(2.0L * std::numbers::pi_v<long double> * hbar * hbar * m.w0);
    const long double shift = m.w1 / m.w0;
    v.mean_e = static_cast<double>(m.e_ref + shift);
    v.delta_e = static_cast<double>(std::sqrt(std::max(0.0L, m.w2 / m.w0 - shift * shift)));
    v.mean_s = static_cast<double>(0.5L * m.spin / m.w0);
    v.r_l = spec.m == 0.0 ? k.c() * hbar * spec.j.value() / v.mean_e : std::numeric_limits<double>::quiet_NaN();
    v.tau_min = tau_min(v.delta_e, k);
    v.z = spec.z();
    return v;
}

double massless_norm_sq(const PacketSpec& spec) {
    const auto& k = spec.constants;
    const double z = spec.z();
    const double s = spec.sigma_p;
    const double e = 1.0 + special::erf(z);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    const double a2 = spec.amplitude_scale * spec.amplitude_scale;
    return a2 * std::numbers::pi * k.hbar() * k.hbar() * k.c() * k.c() * s * s * s *
           (sqrt_pi * (1.0 + 2.0 * z * z) * e + 2.0 * z * std::exp(-z * z));
}

EnergyMoments massless_mean_energy(const PacketSpec& spec) {
    const double z = spec.z();
    const double cp0 = spec.constants.c() * spec.p0;
    const double e = 1.0 + special::erf(z);
    const double g = std::exp(-z * z);
    const double pi = std::numbers::pi;
    const double sqrt_pi = std::sqrt(pi);
    const double z2 = z * z;

    const double mean = cp0 * (sqrt_pi * z * (3.0 + 2.0 * z2) * e + 2.0 * (1.0 + z2) * g) /
                        (z * (sqrt_pi * (1.0 + 2.0 * z2) * e + 2.0 * z * g));

    const double num = pi * (3.0 + 4.0 * z2 * z2) * e * e + 8.0 * sqrt_pi * z * (z2 - 1.0) * e * g +
                       4.0 * (z2 - 2.0) * g * g;
    const double den = 2.0 * z2 *
                       (pi * (1.0 + 2.0 * z2) * (1.0 + 2.0 * z2) * e * e +
                        4.0 * sqrt_pi * z * (1.0 + 2.0 * z2) * e * g + 4.0 * z2 * g * g);
    return {mean, cp0 * std::sqrt(num / den)};
}

}  // namespace dbb
