#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dbb/packet.hpp"

namespace dbb {

/// Circular detector of radius R centred at the origin.
struct DetectorSpec {
    double radius;  // nm

    void validate() const;
};

struct FlightOptions {
    double tol = 1e-9;
    /// Width (ns) below which the crossing bracket stops shrinking.
    double t_tol = 1e-13;
    double origin_offset = 1e-3;
};

struct FlightTime {
    std::optional<double> t;  // ns; empty if no crossing before t_max
    bool stalled = false;
    std::string reason;
};

/// First t with r_B(r0, t) = R, located by step-wise event detection on the
/// radial equation dr/dt = v_r(r, t) and bisection on the dense output.
FlightTime time_of_flight(const GaussianPacket& packet, double r0, const DetectorSpec& det, double t_max,
                          const FlightOptions& opt = {});

/// n geometrically spaced radii on [0.05 R, 0.99 R]. With max_spacing set,
/// the geometric run stops once a step would exceed it and the rest of the
/// interval is filled uniformly, so large R gets more than n points.
std::vector<double> default_r0_grid(const DetectorSpec& det, int n = 64, std::optional<double> max_spacing = std::nullopt);

/// pi hbar / p0: spacing of the Bessel oscillations of rho(r, 0).
double density_period(const GaussianPacket& packet);

/// n uniform points spanning [min t, max t] of the given flight times.
std::vector<double> default_tau_grid(const std::vector<double>& t_flight, int n = 512);

/// Flight times for every r0 (parallel over r0). Throws DomainError naming
/// the first r0 that stalls or misses the detector before t_max.
std::vector<double> flight_times(const GaussianPacket& packet, const DetectorSpec& det, const std::vector<double>& r0_grid,
                                 double t_max, int threads, const FlightOptions& opt = {});

struct Density {
    std::vector<double> values;  // normalized: trapezoid integral over tau = 1
    double normalization;        // N
};

/// N 2 pi r0 rho(r0, 0) / |d t_flight / d r0| at r0 = r0(R, tau), with
/// t_flight a monotone cubic in sqrt(R - r0) through the sampled pairs.
/// Throws MultiBranchError if the sampled curve is not strictly monotone.
Density arrival_density_traj(const GaussianPacket& packet, const DetectorSpec& det, const std::vector<double>& r0_grid,
                             const std::vector<double>& t_flight, const std::vector<double>& tau_grid);

/// N 2 pi R j_r(R, tau). Throws PositivityError on negative flux.
Density arrival_density_flux(const GaussianPacket& packet, const DetectorSpec& det, const std::vector<double>& tau_grid);

struct ArrivalOptions {
    int n_r0 = 64;
    /// Minimum r0 samples per density_period.
    double r0_per_period = 10.0;
    int n_tau = 512;
    double t_max = 0.1;
    int threads = 1;
    FlightOptions flight;
};

struct ArrivalRecord {
    DetectorSpec detector;
    std::vector<double> r0_grid;
    std::vector<double> t_flight;
    std::vector<double> tau_grid;
    std::vector<double> pi_traj;
    std::vector<double> pi_flux;
    double normalization_traj = 0.0;
    double normalization_flux = 0.0;

    /// sup |pi_traj - pi_flux| / max pi_flux.
    double discrepancy() const;
    /// tau at the maximum of pi_flux.
    double peak_tau() const;
};

ArrivalRecord arrival(const GaussianPacket& packet, const DetectorSpec& det, const ArrivalOptions& opt = {});

}  // namespace dbb
