#include "dbb/arrival.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

// Boost 1.74 pchip calls unqualified isnan.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "dbb/errors.hpp"
#include "dbb/ode.hpp"
#include "dbb/parallel.hpp"
#include "dbb/quadrature.hpp"

namespace dbb {

namespace {
struct Unresolved {};
}  // namespace

void DetectorSpec::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw DomainError("detector radius R must be positive");
    }
}

FlightTime time_of_flight(const GaussianPacket& packet, double r0, const DetectorSpec& det, double t_max,
                          const FlightOptions& opt) {
    det.validate();
    const double R = det.radius;
    if (!(r0 >= 0.0) || !(r0 < R)) {
        throw DomainError("time_of_flight: need 0 <= r0 < R");
    }
    if (!(t_max > 0.0)) {
        throw DomainError("time_of_flight: t_max must be positive");
    }

    using Solver = ode::DormandPrince<1>;
    const auto rhs = [&packet](double t, const Solver::State& y) -> Solver::State {
        if (!(y[0] > 0.0)) {
            throw SingularPointError("trajectory reached the origin");
        }
        if (!packet.resolves(y[0], t)) {
            throw Unresolved();
        }
        return {packet.velocity(y[0], t).r};
    };

    FlightTime out;
    try {
        ode::Options o;
        o.rtol = opt.tol;
        o.atol = opt.tol;
        Solver solver(rhs, 0.0, {r0 > 0.0 ? r0 : opt.origin_offset}, t_max, o);
        while (!solver.done()) {
            solver.step();
            if (solver.state()[0] < R) {
                continue;
            }
            double lo = solver.t_prev();
            double hi = solver.t();
            while (hi - lo > opt.t_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    break;
                }
                (solver.dense(mid)[0] < R ? lo : hi) = mid;
            }
            out.t = hi;
            return out;
        }
    } catch (const LowDensityError& e) {
        out.stalled = true;
        out.reason = e.what();
    } catch (const SingularPointError& e) {
        out.stalled = true;
        out.reason = e.what();
    } catch (const Unresolved&) {
        out.stalled = true;
        out.reason = "momentum quadrature no longer resolves the field";
    }
    return out;
}

std::vector<double> default_r0_grid(const DetectorSpec& det, int n, std::optional<double> max_spacing) {
    det.validate();
    if (n < 4) {
        throw DomainError("r0 grid needs at least 4 points");
    }
    if (max_spacing && !(*max_spacing > 0.0)) {
        throw DomainError("r0 grid spacing cap must be positive");
    }
    const double lo = 0.05 * det.radius;
    const double hi = 0.99 * det.radius;
    const double ratio = std::pow(hi / lo, 1.0 / (n - 1));
    // the geometric run can land a rounding error short of hi
    const double end = hi * (1.0 - 1e-12);
    std::vector<double> g{lo};
    while (g.back() < end) {
        const double step = g.back() * (ratio - 1.0);
        if (max_spacing && step > *max_spacing) {
            break;
        }
        g.push_back(std::min(hi, g.back() * ratio));
    }
    if (g.back() < end) {
        const double start = g.back();
        const auto m = static_cast<int>(std::ceil((hi - start) / *max_spacing));
        for (int i = 1; i <= m; ++i) {
            g.push_back(start + (hi - start) * i / m);
        }
    }
    if (std::abs(g.back() - hi) < 1e-12 * hi) {
        g.back() = hi;
    }
    return g;
}

double density_period(const GaussianPacket& packet) {
    return std::numbers::pi * packet.constants().hbar() / packet.spec().p0;
}

std::vector<double> default_tau_grid(const std::vector<double>& t_flight, int n) {
    if (t_flight.empty() || n < 2) {
        throw DomainError("tau grid needs flight times and n >= 2");
    }
    const auto [lo, hi] = std::minmax_element(t_flight.begin(), t_flight.end());
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = *lo + (*hi - *lo) * static_cast<double>(i) / (n - 1);
    }
    g.back() = *hi;
    return g;
}

std::vector<double> flight_times(const GaussianPacket& packet, const DetectorSpec& det, const std::vector<double>& r0_grid,
                                 double t_max, int threads, const FlightOptions& opt) {
    std::vector<FlightTime> raw(r0_grid.size());
    parallel_for(r0_grid.size(), threads,
                 [&](std::size_t i) { raw[i] = time_of_flight(packet, r0_grid[i], det, t_max, opt); });
    std::vector<double> t(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!raw[i].t) {
            throw DomainError("no detector crossing for r0 = " + std::to_string(r0_grid[i]) +
                              (raw[i].stalled ? " (" + raw[i].reason + ")" : " before t_max"));
        }
        t[i] = *raw[i].t;
    }
    return t;
}

namespace {

Density normalized(const std::vector<double>& tau, std::vector<double> raw) {
    const double area = quad::trapezoid(tau, raw);
    if (!(area > 0.0)) {
        throw DegenerateError("arrival density has zero mass on the tau grid");
    }
    for (auto& v : raw) {
        v /= area;
    }
    return {std::move(raw), 1.0 / area};
}

// Three-point end slope, clipped to keep the cubic monotone. Second order,
// where Boost's default end slope is first order and showed up as a 1%
// grid dependence next to the detector.
double end_slope(double h1, double h2, double d1, double d2) {
    double s = ((2 * h1 + h2) * d1 - h1 * d2) / (h1 + h2);
    if (std::signbit(s) != std::signbit(d1)) {
        s = 0.0;
    } else if (std::signbit(d1) != std::signbit(d2) && std::abs(s) > 3 * std::abs(d1)) {
        s = 3 * d1;
    }
    return s;
}

}  // namespace

Density arrival_density_traj(const GaussianPacket& packet, const DetectorSpec& det, const std::vector<double>& r0_grid,
                             const std::vector<double>& t_flight, const std::vector<double>& tau_grid) {
    det.validate();
    const double R = det.radius;
    const std::size_t n = r0_grid.size();
    if (n < 4 || t_flight.size() != n) {
        throw DomainError("arrival_density_traj: need at least 4 (r0, t_flight) pairs");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(r0_grid[i] < R) || (i > 0 && !(r0_grid[i] > r0_grid[i - 1]))) {
            throw DomainError("arrival_density_traj: r0 grid must be increasing and inside R");
        }
    }
    // Non-crossing trajectories make t_flight decreasing in r0; anything else
    // means several r0 share a tau.
    for (std::size_t i = 1; i < n; ++i) {
        if (!(t_flight[i] < t_flight[i - 1])) {
            throw MultiBranchError("t_flight(r0) is not strictly decreasing near r0 = " + std::to_string(r0_grid[i]));
        }
    }

    // v_r(r, 0) = 0, so t_flight ~ sqrt(R - r0) next to the detector. In
    // u = sqrt(R - r0) the curve is regular and t increases with u.
    std::vector<double> u(n);
    std::vector<double> tu(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::sqrt(R - r0_grid[n - 1 - i]);
        tu[i] = t_flight[n - 1 - i];
    }
    const std::vector<double> knots_u = u;
    const auto slope = [&](std::size_t a, std::size_t b, std::size_t c) {
        const double h1 = u[b] - u[a];
        const double h2 = u[c] - u[b];
        return end_slope(h1, h2, (tu[b] - tu[a]) / h1, (tu[c] - tu[b]) / h2);
    };
    const double left = slope(0, 1, 2);
    // mirrored: walk inward from the right end
    const double right = [&] {
        const double h1 = u[n - 1] - u[n - 2];
        const double h2 = u[n - 2] - u[n - 3];
        return end_slope(h1, h2, (tu[n - 1] - tu[n - 2]) / h1, (tu[n - 2] - tu[n - 3]) / h2);
    }();
    const boost::math::interpolators::pchip<std::vector<double>> curve{std::move(u), std::vector<double>(tu), left,
                                                                       right};

    std::vector<double> raw(tau_grid.size(), 0.0);
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
        const double tau = tau_grid[k];
        if (tau < tu.front() || tau > tu.back()) {
            continue;
        }
        // Bracket on the knots, then bisect the interpolant inside it.
        const auto j = static_cast<std::size_t>(std::distance(tu.begin(), std::lower_bound(tu.begin(), tu.end(), tau)));
        double a = knots_u[j == 0 ? 0 : j - 1];
        double b = knots_u[j == 0 ? 1 : j];
        for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
            const double mid = 0.5 * (a + b);
            (curve(mid) < tau ? a : b) = mid;
        }
        const double uk = 0.5 * (a + b);
        const double r0 = R - uk * uk;
        const double dt_du = curve.prime(uk);
        if (!(dt_du > 0.0)) {
            throw MultiBranchError("t_flight interpolant is flat at r0 = " + std::to_string(r0));
        }
        // |dt/dr0| = (dt/du) / (2u)
        raw[k] = 2.0 * std::numbers::pi * r0 * packet.density(r0, 0.0) * 2.0 * uk / dt_du;
    }
    return normalized(tau_grid, std::move(raw));
}

Density arrival_density_flux(const GaussianPacket& packet, const DetectorSpec& det, const std::vector<double>& tau_grid) {
    det.validate();
    const auto slice = packet.slice(det.radius);
    std::vector<double> raw(tau_grid.size());
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
        const double jr = slice.field_sample(tau_grid[k]).j_r;
        if (jr < 0.0) {
            throw PositivityError("negative radial flux at the detector, tau = " + std::to_string(tau_grid[k]));
        }
        raw[k] = 2.0 * std::numbers::pi * det.radius * jr;
    }
    return normalized(tau_grid, std::move(raw));
}

double ArrivalRecord::discrepancy() const {
    const double peak = *std::max_element(pi_flux.begin(), pi_flux.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < pi_flux.size(); ++i) {
        worst = std::max(worst, std::abs(pi_traj[i] - pi_flux[i]));
    }
    return worst / peak;
}

double ArrivalRecord::peak_tau() const {
    return tau_grid[static_cast<std::size_t>(std::distance(pi_flux.begin(), std::max_element(pi_flux.begin(), pi_flux.end())))];
}

ArrivalRecord arrival(const GaussianPacket& packet, const DetectorSpec& det, const ArrivalOptions& opt) {
    ArrivalRecord rec;
    rec.detector = det;
    rec.r0_grid = default_r0_grid(det, opt.n_r0, density_period(packet) / opt.r0_per_period);
    rec.t_flight = flight_times(packet, det, rec.r0_grid, opt.t_max, opt.threads, opt.flight);
    rec.tau_grid = default_tau_grid(rec.t_flight, opt.n_tau);
    auto traj = arrival_density_traj(packet, det, rec.r0_grid, rec.t_flight, rec.tau_grid);
    auto flux = arrival_density_flux(packet, det, rec.tau_grid);
    rec.pi_traj = std::move(traj.values);
    rec.pi_flux = std::move(flux.values);
    rec.normalization_traj = traj.normalization;
    rec.normalization_flux = flux.normalization;
    return rec;
}

}  // namespace dbb
