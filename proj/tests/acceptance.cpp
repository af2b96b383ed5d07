// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is non-zero if any criterion fails for a reason other than a
// recorded known deviation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dbb/arrival.hpp"
#include "dbb/dynamics.hpp"
#include "dbb/goldens.hpp"
#include "dbb/observables.hpp"
#include "dbb/packet.hpp"
#include "dbb/parallel.hpp"
#include "dbb/quadrature.hpp"
#include "dbb/special.hpp"
#include "dbb/spinor.hpp"

using namespace dbb;

namespace {

struct Outcome {
    bool pass = true;
    bool known = false;  // every failure is a recorded known deviation
    std::string detail;
};

int hard_failures = 0;

void criterion(int n, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %d  %-34s %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str(), s,
                !o.pass && o.known ? "  [known deviation]" : "");
    std::fflush(stdout);
    if (!o.pass && !o.known) {
        ++hard_failures;
    }
}

const std::vector<GoldenRow>& suite() {
    static const auto rows = load_goldens(default_goldens_path());
    return rows;
}

// Runs the golden rows selected by pick and folds them into one outcome.
Outcome golden_rows(const std::function<bool(const GoldenRow&)>& pick, double budget_s) {
    std::vector<GoldenRow> rows;
    for (const auto& r : suite()) {
        if (pick(r)) rows.push_back(r);
    }
    CheckOptions opt;
    opt.include_slow = true;
    opt.threads = resolve_threads();
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = check_all(rows, opt);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome o;
    std::ostringstream os;
    int ok = 0;
    bool only_known = true;
    std::ostringstream bad;
    for (const auto& r : rep.rows) {
        if (r.pass()) {
            ++ok;
            continue;
        }
        only_known = only_known && !r.known_deviation.empty();
        bad << "; " << r.id;
        if (!r.error.empty()) {
            bad << " error " << r.error;
        }
        for (const auto& c : r.checks) {
            if (!c.pass) bad << " " << c.key << "=" << c.computed << " vs " << c.expected << " " << c.tolerance.str();
        }
    }
    os << ok << "/" << rep.rows.size() << " rows within tolerance" << bad.str();
    if (s > budget_s) {
        os << "; runtime " << s << " s over budget " << budget_s << " s";
        o.pass = false;
        only_known = false;
    }
    o.pass = o.pass && ok == static_cast<int>(rep.rows.size());
    o.known = !o.pass && only_known;
    o.detail = os.str();
    return o;
}

bool has_prefix(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

PacketSpec spec(int twice_j, double p0, double sigma, double m = 0.0) {
    return PacketSpec{AngularMomentum(twice_j), p0, sigma, m};
}

const double kBlocks[][2] = {{1e-5, 1e-8}, {1e-5, 1e-6}, {1e-4, 1e-7}, {1e-4, 1e-5}};

// j = 5/2 most-probable trajectory for p0 = 1e-4, Sigma = 1e-7, to 0.030 ns.
const Trajectory& most_probable() {
    static const Trajectory traj = [] {
        const GaussianPacket pk(spec(5, 1e-4, 1e-7));
        return integrate(pk, pk.initial_peak_radius(), 0.030, {.tol = 1e-9, .n_samples = 6000});
    }();
    return traj;
}

Outcome criterion2() {
    auto o = golden_rows([](const GoldenRow& r) { return r.kind == "mean_values"; }, 5.0);
    double worst_cf = 0.0;
    double worst_j = 0.0;
    for (const auto& b : kBlocks) {
        const auto s = spec(5, b[0], b[1]);
        const auto q = mean_energy(s);
        const auto cf = massless_mean_energy(s);
        worst_cf = std::max({worst_cf, std::abs(q.mean / cf.mean - 1), std::abs(q.delta / cf.delta - 1),
                             std::abs(norm_sq(s) / massless_norm_sq(s) - 1)});
        for (int tj : {1, 11, 99}) {
            const auto other = mean_energy(spec(tj, b[0], b[1]));
            worst_j = std::max({worst_j, std::abs(other.mean / q.mean - 1), std::abs(other.delta / q.delta - 1)});
        }
    }
    std::ostringstream os;
    os << "; quadrature vs closed form " << worst_cf << " (<= 1e-6); j spread " << worst_j;
    o.detail += os.str();
    if (worst_cf > 1e-6 || worst_j > 1e-12) {
        o.pass = false;
        o.known = false;
    }
    return o;
}

Outcome criterion5() {
    const auto tau = decay_time(most_probable());
    const double floor = 0.8 * tau_min(spec(5, 1e-4, 1e-7));
    std::ostringstream os;
    if (!tau) {
        return {false, false, "no decay detected"};
    }
    os << "tau_obs = " << *tau << " ns, want [0.004, 0.009] and > " << floor;
    return {*tau >= 0.004 && *tau <= 0.009 && *tau > floor, false, os.str()};
}

Outcome criterion6() {
    const auto& traj = most_probable();
    if (traj.status != TrajectoryStatus::Completed) {
        return {false, false, "trajectory stalled: " + traj.stall_reason};
    }
    const double l = classical_l(traj, mean_energy(spec(5, 1e-4, 1e-7)).mean, 0.030);
    const double rel = std::abs(l / (2.5 * kGraphene.hbar()) - 1);
    std::ostringstream os;
    os << "L_class / (hbar 5/2) - 1 = " << rel << " (<= 1e-4)";
    return {rel <= 1e-4, false, os.str()};
}

Outcome criterion7() {
    const GaussianPacket pk(spec(5, 1e-4, 1e-7));
    ArrivalOptions opt;
    opt.threads = resolve_threads();
    Outcome o;
    std::ostringstream os;
    for (double R : {30.0, 500.0}) {
        const auto rec = arrival(pk, {R}, opt);
        const double nt = quad::trapezoid(rec.tau_grid, rec.pi_traj);
        const double nf = quad::trapezoid(rec.tau_grid, rec.pi_flux);
        double min_flux = INFINITY;
        for (double v : rec.pi_flux) min_flux = std::min(min_flux, v);
        const bool ok = rec.discrepancy() <= 0.05 && std::abs(nt - 1) <= 1e-3 && std::abs(nf - 1) <= 1e-3 && min_flux >= 0;
        o.pass = o.pass && ok;
        os << "R=" << R << ": sup diff " << rec.discrepancy() << " of peak (<= 0.05), norms " << nt << ", " << nf
           << ", min flux " << min_flux << "; ";
    }
    o.detail = os.str();
    return o;
}

Outcome criterion8() {
    std::ostringstream os;
    bool ok = true;
    const auto note = [&](const char* what, double v, double lim) {
        os << what << " " << v << (v <= lim ? "" : " (FAIL)") << "; ";
        ok = ok && v <= lim;
    };

    // current identity
    std::mt19937_64 gen(20240611);
    std::normal_distribution<double> g;
    double ident = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
        const Spinor psi{Complex(g(gen), g(gen)), Complex(g(gen), g(gen))};
        const auto b = currents(psi);
        const double c = kGraphene.c();
        const double lhs = b.rho * b.rho - (b.jx * b.jx + b.jy * b.jy) / (c * c);
        ident = std::max(ident, std::abs(lhs - 4 * b.sigma * b.sigma) / (b.rho * b.rho));
    }
    note("current identity", ident, 1e-12);

    // speed bound on a field grid and along the reference trajectory
    double speed = 0.0;
    for (int tj : {1, 5, 99}) {
        const GaussianPacket pk(spec(tj, 1e-4, 1e-5, tj == 5 ? 2e-11 : 0.0));
        for (double t : {0.0, 5e-6, 5e-5}) {
            for (double r = 0.3; r < 600.0; r += 7.1) {
                const auto f = pk.field_sample(r, t);
                if (f.rho > pk.density_floor()) speed = std::max(speed, std::hypot(f.j_r, f.j_phi) / f.rho);
            }
        }
    }
    for (const auto& s : speed_profile(most_probable())) speed = std::max(speed, s.speed);
    note("max |v|/c - 1", speed / kGraphene.c() - 1, 1e-6);

    // continuity, scaled by max |d rho / dt| on the grid
    {
        const GaussianPacket pk(spec(5, 1e-4, 1e-5));
        double worst = 0.0, scale = 0.0;
        for (double t : {0.0, 2e-6, 2e-5}) {
            for (double r = 5.0; r < 250.0; r += 13.3) {
                const double hr = 1e-3, ht = hr / kGraphene.c();
                const double dt = (pk.density(r, t + ht) - pk.density(r, t - ht)) / (2 * ht);
                const auto up = pk.field_sample(r + hr, t);
                const auto dn = pk.field_sample(r - hr, t);
                const double div = ((r + hr) * up.j_r - (r - hr) * dn.j_r) / (2 * hr * r);
                worst = std::max(worst, std::abs(dt + div));
                scale = std::max(scale, std::abs(dt));
            }
        }
        note("continuity residual", worst / scale, 1e-4);
    }

    double spin = 0.0, jspread = 0.0;
    for (const auto& b : kBlocks) {
        spin = std::max(spin, std::abs(mean_spin(spec(5, b[0], b[1]))));
        const auto a = mean_energy(spec(1, b[0], b[1]));
        const auto c = mean_energy(spec(99, b[0], b[1]));
        jspread = std::max({jspread, std::abs(a.mean - c.mean) / a.mean, std::abs(a.delta - c.delta) / a.delta});
    }
    note("|<S>| (m=0)", spin, 1e-10);
    note("j spread of <E>, dE", jspread, 1e-12);

    {
        // 1024 scales every term exactly; 1e7 leaves rounding, amplified
        // where the node sum cancels.
        auto sa = spec(5, 1e-4, 1e-6);
        auto sb = sa;
        auto sc = sa;
        sb.amplitude_scale = 1024.0;
        sc.amplitude_scale = 1e7;
        const GaussianPacket a(sa), b(sb), c(sc);
        double exact = 0.0, d = 0.0;
        for (double t : {0.0, 1e-4, 3e-3}) {
            for (double r : {3.0, 22.7, 400.0}) {
                const auto va = a.velocity(r, t), vb = b.velocity(r, t), vc = c.velocity(r, t);
                exact = std::max(exact, std::hypot(va.r - vb.r, va.phi - vb.phi));
                d = std::max(d, std::hypot(va.r - vc.r, va.phi - vc.phi) / kGraphene.c());
            }
        }
        note("amplitude x1024 |dv|", exact, 0.0);
        note("amplitude x1e7 |dv|/c", d, 1e-11);
    }

    {
        double parity = 0.0;
        for (int n : {1, 2, 3, 6}) {
            for (double x : {0.7, 5.5, 60.0}) {
                const double s = n % 2 ? -1.0 : 1.0;
                const double jn = special::bessel_j(n, x);
                parity = std::max({parity, std::abs(special::bessel_j(-n, x) - s * jn),
                                   std::abs(special::bessel_j(n, -x) - s * jn)});
            }
        }
        note("Bessel parity", parity, 1e-6);
        double orth = 0.0;
        const double R = 3.0;
        for (int n : {0, 2, 5}) {
            const double za = special::positive_zero(n, 1), zb = special::positive_zero(n, 2);
            const auto f = [&](double a, double b) {
                return quad::trapezoid(
                    [&](double r) { return r * special::bessel_j(n, a * r / R) * special::bessel_j(n, b * r / R); },
                    0.0, R, 20001);
            };
            const double jn1 = special::bessel_j(n + 1, za);
            orth = std::max({orth, std::abs(f(za, zb)), std::abs(f(za, za) - R * R / 2 * jn1 * jn1)});
        }
        note("Bessel orthogonality", orth, 1e-6);
    }
    return {ok, false, os.str()};
}

}  // namespace

int main() {
    std::printf("threads: %d\n", resolve_threads());
    criterion(1, "alpha_j coefficients", [] { return golden_rows([](const GoldenRow& r) { return r.kind == "alpha"; }, 5.0); });
    criterion(2, "packet mean values", criterion2);
    criterion(3, "r_L and r0_hat", [] { return golden_rows([](const GoldenRow& r) { return r.kind == "radii"; }, 60.0); });
    criterion(4, "loop counts", [] {
        return golden_rows(
            [](const GoldenRow& r) {
                return (r.kind == "loops" && r.inputs.count("p0") && r.inputs.at("p0") == "1e-4" &&
                        r.inputs.at("sigma") == "1e-7") ||
                       has_prefix(r.id, "fig loops r0=");
            },
            600.0);
    });
    criterion(5, "decay time", criterion5);
    criterion(6, "classical limit of L", criterion6);
    criterion(7, "arrival-time equivalence", criterion7);
    criterion(8, "property suites", criterion8);
    std::printf("%s\n", hard_failures == 0 ? "acceptance: ok" : "acceptance: FAILED");
    return hard_failures == 0 ? 0 : 1;
}
