#include "dbb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dbb/errors.hpp"
#include "dbb/ode.hpp"

namespace dbb {

namespace {
struct Unresolved {};
}  // namespace

Trajectory integrate(const GaussianPacket& packet, double r0, double t_end, const IntegrateOptions& opt) {
    if (!(r0 >= 0.0)) {
        throw DomainError("integrate: r0 must be non-negative");
    }
    if (!(t_end > 0.0)) {
        throw DomainError("integrate: t_end must be positive");
    }
    if (!(opt.tol > 0.0)) {
        throw DomainError("integrate: tol must be positive");
    }
    if (opt.n_samples < 2) {
        throw DomainError("integrate: need at least two samples");
    }

    Trajectory traj{packet.spec(), r0, r0 > 0.0 ? r0 : opt.origin_offset, {}, TrajectoryStatus::Completed, {}, 0, 0};
    traj.samples.reserve(static_cast<std::size_t>(opt.n_samples));

    using Solver = ode::DormandPrince<2>;
    const auto rhs = [&packet](double t, const Solver::State& y) -> Solver::State {
        if (!(y[0] > 0.0)) {
            throw SingularPointError("trajectory reached the origin");
        }
        if (!packet.resolves(y[0], t)) {
            throw Unresolved();
        }
        const auto v = packet.velocity(y[0], t);
        return {v.r, v.phi / y[0]};
    };
    const auto sample_time = [&](int i) {
        return i == opt.n_samples - 1 ? t_end : t_end * static_cast<double>(i) / (opt.n_samples - 1);
    };
    const auto emit = [&](double t, double r, double phi) {
        const auto v = packet.velocity(r, t);
        traj.samples.push_back({t, r, phi, v.r, v.phi});
    };

    int next = 0;
    try {
        ode::Options o;
        o.rtol = opt.tol;
        o.atol = opt.tol;
        Solver solver(rhs, 0.0, {traj.r_start, 0.0}, t_end, o);
        emit(0.0, traj.r_start, 0.0);
        next = 1;
        while (!solver.done()) {
            solver.step();
            while (next < opt.n_samples && sample_time(next) <= solver.t()) {
                const double ts = sample_time(next);
                const auto y = ts == solver.t() ? solver.state() : solver.dense(ts);
                emit(ts, y[0], y[1]);
                ++next;
            }
            traj.steps = solver.steps();
            traj.evaluations = solver.evaluations();
        }
    } catch (const LowDensityError& e) {
        traj.status = TrajectoryStatus::Stalled;
        traj.stall_reason = e.what();
    } catch (const SingularPointError& e) {
        traj.status = TrajectoryStatus::Stalled;
        traj.stall_reason = e.what();
    } catch (const Unresolved&) {
        traj.status = TrajectoryStatus::Stalled;
        traj.stall_reason = "momentum quadrature no longer resolves the field; raise the node count";
    }
    return traj;
}

namespace {

double phi_at(const Trajectory& traj, double t) {
    const auto& s = traj.samples;
    if (t <= s.front().t) {
        return s.front().phi;
    }
    if (t >= s.back().t) {
        return s.back().phi;
    }
    const auto it = std::lower_bound(s.begin(), s.end(), t,
                                     [](const TrajectorySample& a, double v) { return a.t < v; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    return a.phi + w * (b.phi - a.phi);
}

}  // namespace

int count_loops(const Trajectory& traj, std::optional<double> up_to) {
    if (traj.samples.empty()) {
        return 0;
    }
    const double end = up_to.value_or(traj.samples.back().t);
    if (end > traj.samples.back().t * (1.0 + 1e-12)) {
        throw DomainError("count_loops: trajectory does not reach the requested time");
    }
    const double dphi = std::abs(phi_at(traj, end) - traj.samples.front().phi);
    return static_cast<int>(std::floor(dphi / (2.0 * std::numbers::pi)));
}

std::vector<double> smoothed_angular_velocity(const Trajectory& traj, int window) {
    const auto& s = traj.samples;
    std::vector<double> omega(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        omega[i] = s[i].v_phi / s[i].r;
    }
    const int half = std::max(0, window / 2);
    std::vector<double> out(s.size());
    std::vector<double> buf;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
        const std::size_t hi = std::min(s.size() - 1, i + half);
        buf.assign(omega.begin() + static_cast<std::ptrdiff_t>(lo), omega.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
        std::nth_element(buf.begin(), mid, buf.end());
        out[i] = *mid;
    }
    return out;
}

std::optional<double> decay_time(const Trajectory& traj, const DecayOptions& opt) {
    const auto& s = traj.samples;
    if (s.size() < 3) {
        return std::nullopt;
    }
    const auto omega = smoothed_angular_velocity(traj, opt.median_window);
    const auto n_plateau = std::max<std::size_t>(1, static_cast<std::size_t>(opt.plateau_fraction * s.size()));
    double plateau = 0.0;
    for (std::size_t i = 0; i < n_plateau; ++i) {
        plateau += omega[i];
    }
    plateau /= static_cast<double>(n_plateau);
    const double sign = plateau < 0.0 ? -1.0 : 1.0;
    const double threshold = opt.eta * std::abs(plateau);
    if (sign * omega.back() >= threshold) {
        return std::nullopt;
    }
    std::size_t i = s.size() - 1;
    while (i > 0 && sign * omega[i - 1] < threshold) {
        --i;
    }
    return s[i].t;
}

double classical_l(const Trajectory& traj, double mean_e, double t) {
    const auto& s = traj.samples;
    if (s.empty() || t < s.front().t || t > s.back().t * (1.0 + 1e-12)) {
        throw DomainError("classical_l: t outside the trajectory span");
    }
    const double c = traj.spec.constants.c();
    const auto it = std::lower_bound(s.begin(), s.end(), t,
                                     [](const TrajectorySample& a, double v) { return a.t < v; });
    double rv = 0.0;
    if (it == s.end()) {
        rv = s.back().r * s.back().v_phi;
    } else if (it->t == t || it == s.begin()) {
        rv = it->r * it->v_phi;
    } else {
        const auto& a = *(it - 1);
        const auto& b = *it;
        const double w = (t - a.t) / (b.t - a.t);
        rv = (1.0 - w) * a.r * a.v_phi + w * b.r * b.v_phi;
    }
    return mean_e / (c * c) * rv;
}

std::vector<SpeedSample> speed_profile(const Trajectory& traj) {
    std::vector<SpeedSample> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        out.push_back({s.t, std::hypot(s.v_r, s.v_phi)});
    }
    return out;
}

bool radius_monotone(const Trajectory& traj, double rel_tol) {
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        if (traj.samples[i].r < traj.samples[i - 1].r * (1.0 - rel_tol)) {
            return false;
        }
    }
    return true;
}

TrajectoryDiagnostics diagnose(const Trajectory& traj, double mean_e, const std::vector<double>& l_times,
                               const DecayOptions& decay) {
    TrajectoryDiagnostics d;
    d.n_loops = count_loops(traj);
    d.tau_obs = decay_time(traj, decay);
    if (!traj.samples.empty()) {
        d.final_speed = std::hypot(traj.samples.back().v_r, traj.samples.back().v_phi);
    }
    for (double t : l_times) {
        if (!traj.samples.empty() && t >= traj.samples.front().t && t <= traj.samples.back().t * (1.0 + 1e-12)) {
            d.l_class_at[t] = classical_l(traj, mean_e, t);
        }
    }
    return d;
}

}  // namespace dbb
