#include "dbb/stationary.hpp"

#include <cmath>
#include <functional>

#include "dbb/errors.hpp"
#include "dbb/optimize.hpp"
#include "dbb/special.hpp"

namespace dbb {

StationaryState::StationaryState(AngularMomentum j, double p, double m, PhysicalConstants k)
    : j_(j), p_(p), m_(m), k_(k) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw DomainError("stationary state: p must be positive");
    }
    if (!(m >= 0.0) || !std::isfinite(m)) {
        throw DomainError("stationary state: m must be non-negative");
    }
    omega_ = energy_of_momentum(p, m, k);
    lower_weight_ = energy_mev(p, m, k) - m * k.c() * k.c();
}

std::pair<Complex, Complex> radial_functions(const StationaryState& s, double r) {
    if (!(r >= 0.0)) {
        throw DomainError("radial_functions: r must be non-negative");
    }
    const auto [ja, jb] = special::bessel_j_pair(s.j().lower_order(), s.argument(r));
    return {Complex(0.0, s.upper_weight() * ja), Complex(-s.lower_weight() * jb, 0.0)};
}

Spinor spinor_at(const StationaryState& s, double r, double phi, double t) {
    const auto [h1, h2] = radial_functions(s, r);
    const Complex time_phase = std::polar(1.0, -s.omega() * t);
    const Complex phase1 = std::polar(1.0, s.j().lower_order() * phi);
    const Complex phase2 = std::polar(1.0, s.j().upper_order() * phi);
    return {time_phase * phase1 * h1, time_phase * phase2 * h2};
}

double density_stat(const StationaryState& s, double r) {
    if (!(r >= 0.0)) {
        throw DomainError("density_stat: r must be non-negative");
    }
    const auto [ja, jb] = special::bessel_j_pair(s.j().lower_order(), s.argument(r));
    const double a = s.upper_weight() * ja;
    const double b = s.lower_weight() * jb;
    return a * a + b * b;
}

PolarVelocity velocity_stat(const StationaryState& s, double r) {
    if (!(r >= 0.0)) {
        throw DomainError("velocity_stat: r must be non-negative");
    }
    const auto [ja, jb] = special::bessel_j_pair(s.j().lower_order(), s.argument(r));
    const double a = s.upper_weight() * ja;
    const double b = s.lower_weight() * jb;
    const double rho = a * a + b * b;
    if (rho == 0.0) {
        throw SingularPointError("velocity_stat: density vanishes at r = " + std::to_string(r));
    }
    return {0.0, 2.0 * s.constants().c() * a * b / rho};
}

namespace {

// First local maximum of f on x >= 0, scanning with the given step.
double first_maximum(const std::function<double(double)>& f, double step, double x_max) {
    double prev = f(0.0);
    double cur = f(step);
    if (cur < prev) {
        return 0.0;
    }
    for (double x = step; x < x_max; x += step) {
        const double next = f(x + step);
        if (cur > prev && cur >= next) {
            return opt::golden_section_max(f, x - step, x + step, 1e-12 * (x + step));
        }
        prev = cur;
        cur = next;
    }
    throw ConvergenceError("first maximum not found below x = " + std::to_string(x_max));
}

}  // namespace

double most_probable_radius(const StationaryState& s) {
    const double scale = s.constants().hbar() / s.p();
    const auto f = [&](double x) { return density_stat(s, x * scale); };
    const double x_max = 50.0 + 4.0 * std::abs(s.j().value());
    return first_maximum(f, 0.01, x_max) * scale;
}

double alpha_coefficient(AngularMomentum j) {
    const auto f = [&](double x) {
        const auto [ja, jb] = special::bessel_j_pair(j.lower_order(), x);
        return ja * ja + jb * jb;
    };
    return first_maximum(f, 0.01, 50.0 + 4.0 * std::abs(j.value()));
}

}  // namespace dbb
