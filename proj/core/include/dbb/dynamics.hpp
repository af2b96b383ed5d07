#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dbb/packet.hpp"

namespace dbb {

struct TrajectorySample {
    double t;    // ns
    double r;    // nm
    double phi;  // rad, unwrapped
    double v_r;  // nm/ns
    double v_phi;
};

enum class TrajectoryStatus { Completed, Stalled };

/// One integral curve x_B(r0, t) of the guidance field, starting at (r0, 0).
struct Trajectory {
    PacketSpec spec;
    double r0;
    /// Actual starting radius (r0, or the origin offset when r0 == 0).
    double r_start;
    std::vector<TrajectorySample> samples;
    TrajectoryStatus status = TrajectoryStatus::Completed;
    std::string stall_reason;
    long steps = 0;
    long evaluations = 0;

    double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
};

struct IntegrateOptions {
    /// Relative and absolute local error tolerance of the Runge-Kutta pair.
    double tol = 1e-9;
    /// Number of uniformly spaced output samples on [0, t_end].
    int n_samples = 2000;
    /// Starting radius used in place of r0 = 0, where d(phi)/dt is singular.
    double origin_offset = 1e-3;
};

/// Integrates dr/dt = v_r, dphi/dt = v_phi / r from (r0, 0) up to t_end.
/// A low-density stall, or leaving the region the quadrature resolves, ends the integration early with status Stalled; step
/// underflow throws ConvergenceError.
Trajectory integrate(const GaussianPacket& packet, double r0, double t_end, const IntegrateOptions& opt = {});

/// floor(|phi(up_to) - phi(0)| / 2 pi); up_to defaults to the last sample.
int count_loops(const Trajectory& traj, std::optional<double> up_to = std::nullopt);

struct DecayOptions {
    /// Fraction of the plateau angular velocity that marks the decay.
    double eta = 0.5;
    /// Leading fraction of the samples averaged for the plateau.
    double plateau_fraction = 0.1;
    /// Moving-median window (odd).
    int median_window = 11;
};

/// Angular velocity d(phi)/dt = v_phi / r at each sample, median-smoothed.
std::vector<double> smoothed_angular_velocity(const Trajectory& traj, int window);

/// First time after which the smoothed angular velocity stays below
/// eta * plateau; nullopt if it never decays.
std::optional<double> decay_time(const Trajectory& traj, const DecayOptions& opt = {});

/// (E / c^2) r(t) v_phi(t) in meV*ns, compared against hbar j.
double classical_l(const Trajectory& traj, double mean_e, double t);

struct SpeedSample {
    double t;
    double speed;
};

std::vector<SpeedSample> speed_profile(const Trajectory& traj);

/// True if r never decreases by more than rel_tol * r between samples.
bool radius_monotone(const Trajectory& traj, double rel_tol = 1e-9);

struct TrajectoryDiagnostics {
    int n_loops = 0;
    std::optional<double> tau_obs;
    double final_speed = 0.0;
    std::map<double, double> l_class_at;
};

TrajectoryDiagnostics diagnose(const Trajectory& traj, double mean_e, const std::vector<double>& l_times,
                               const DecayOptions& decay = {});

}  // namespace dbb
