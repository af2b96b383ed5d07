#pragma once

#include <utility>
#include <vector>

#include "dbb/angular_momentum.hpp"
#include "dbb/spinor.hpp"
#include "dbb/stationary.hpp"
#include "dbb/units.hpp"

namespace dbb {

/// Discretization of the momentum integral: Gauss-Legendre with n_nodes on
/// [max(0, p0 - k Sigma), p0 + k Sigma], k = window_halfwidth.
struct QuadratureConfig {
    int n_nodes = 256;
    double window_halfwidth = 8.0;

    friend bool operator==(const QuadratureConfig&, const QuadratureConfig&) = default;
};

/// Gaussian packet of positive-energy stationary states with fixed j and
/// amplitude a(p) = sqrt(p) exp(-(p - p0)^2 / (2 Sigma^2)).
struct PacketSpec {
    AngularMomentum j;
    double p0;
    double sigma_p;
    double m = 0.0;
    QuadratureConfig quad{};
    /// Overall constant multiplying a(p). Fields scale with it; velocities
    /// and mean values do not.
    double amplitude_scale = 1.0;
    PhysicalConstants constants = kGraphene;

    /// z = p0 / Sigma.
    double z() const { return p0 / sigma_p; }
    double window_lo() const;
    double window_hi() const;

    /// Throws DomainError on invalid parameters.
    void validate() const;

    friend bool operator==(const PacketSpec&, const PacketSpec&) = default;
};

/// a(p) including amplitude_scale.
double amplitude(const PacketSpec& spec, double p);

/// rho, j_r, j_phi at one (r, t); independent of phi.
struct FieldSample {
    double rho;
    double j_r;
    double j_phi;
};

struct RadialFields {
    Complex f1;
    Complex f2;
};

class GaussianPacket;

/// Bessel values of every quadrature node at one fixed radius, so that the
/// fields at that radius can be evaluated for many times cheaply.
class RadialSlice {
public:
    double radius() const { return r_; }
    RadialFields radial_fields(double t) const;
    FieldSample field_sample(double t) const;

private:
    friend class GaussianPacket;
    RadialSlice(const GaussianPacket& packet, double r);

    const GaussianPacket* packet_;
    double r_;
    std::vector<double> upper_;  // c1_k J_{j-1/2}(p_k r / hbar)
    std::vector<double> lower_;  // c2_k J_{j+1/2}(p_k r / hbar)
};

/// Quadrature realization of a PacketSpec. Immutable after construction;
/// every evaluation is pure and may run concurrently.
class GaussianPacket {
public:
    struct Node {
        double p;
        double omega;      // 1/ns
        double upper;      // w_k a(p_k) c p_k            (f1 = i sum upper J_a e^{-i omega t})
        double lower;      // -w_k a(p_k) (E_k - m c^2)   (f2 = sum lower J_b e^{-i omega t})
        double weighted_amplitude;  // w_k a(p_k)
    };

    explicit GaussianPacket(PacketSpec spec);

    const PacketSpec& spec() const { return spec_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const PhysicalConstants& constants() const { return spec_.constants; }

    /// (f1, f2): the momentum integral of a(p) e^{-i omega_p t} h^p(r).
    RadialFields radial_fields(double r, double t) const;
    FieldSample field_sample(double r, double t) const;
    double density(double r, double t) const { return field_sample(r, t).rho; }

    /// Guidance velocity (j_r / rho, j_phi / rho). Throws LowDensityError
    /// below density_floor().
    PolarVelocity velocity(double r, double t) const;

    /// 1e-30 (c p0)^2 (sum_k w_k a_k)^2: scales with the amplitude like rho.
    double density_floor() const { return floor_; }

    /// Spread (p_hi - p_lo)(r + c t) / hbar of the Bessel and time phases
    /// across the quadrature window.
    double phase_span(double r, double t) const;
    /// False once phase_span exceeds kMaxPhasePerNode * n_nodes; past that
    /// the fixed rule aliases the incoming wave.
    bool resolves(double r, double t) const;
    static constexpr double kMaxPhasePerNode = 2.5;

    /// Precomputed Bessel values at radius r.
    RadialSlice slice(double r) const;

    /// First local maximum of rho(r, 0) (0 if the maximum sits at r = 0),
    /// refined to 1e-3 nm.
    double initial_peak_radius() const;

private:
    friend class RadialSlice;

    PacketSpec spec_;
    std::vector<Node> nodes_;
    double floor_;
};

FieldSample field_from(const RadialFields& f, const PhysicalConstants& k);

}  // namespace dbb
