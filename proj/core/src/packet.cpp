#include "dbb/packet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dbb/errors.hpp"
#include "dbb/optimize.hpp"
#include "dbb/quadrature.hpp"
#include "dbb/special.hpp"

namespace dbb {

double PacketSpec::window_lo() const { return std::max(0.0, p0 - quad.window_halfwidth * sigma_p); }

double PacketSpec::window_hi() const { return p0 + quad.window_halfwidth * sigma_p; }

void PacketSpec::validate() const {
    if (!(p0 > 0.0) || !std::isfinite(p0)) {
        throw DomainError("p0 must be positive");
    }
    if (!(sigma_p > 0.0) || !std::isfinite(sigma_p)) {
        throw DomainError("sigma must be positive");
    }
    if (!(m >= 0.0) || !std::isfinite(m)) {
        throw DomainError("m must be non-negative");
    }
    if (quad.n_nodes < 32) {
        throw DomainError("quadrature needs at least 32 nodes");
    }
    if (!(quad.window_halfwidth > 0.0)) {
        throw DomainError("quadrature window half-width must be positive");
    }
    if (!(amplitude_scale > 0.0) || !std::isfinite(amplitude_scale)) {
        throw DomainError("amplitude scale must be positive");
    }
}

double amplitude(const PacketSpec& spec, double p) {
    if (!(p >= 0.0)) {
        throw DomainError("amplitude: p must be non-negative");
    }
    const double u = (p - spec.p0) / spec.sigma_p;
    return spec.amplitude_scale * std::sqrt(p) * std::exp(-0.5 * u * u);
}

FieldSample field_from(const RadialFields& f, const PhysicalConstants& k) {
    const Complex cross = std::conj(f.f1) * f.f2;
    return {std::norm(f.f1) + std::norm(f.f2), 2.0 * k.c() * cross.real(), 2.0 * k.c() * cross.imag()};
}

GaussianPacket::GaussianPacket(PacketSpec spec) : spec_(spec) {
    spec_.validate();
    const auto& k = spec_.constants;
    const auto rule = quad::gauss_legendre(spec_.quad.n_nodes, spec_.window_lo(), spec_.window_hi());
    const double rest = spec_.m * k.c() * k.c();
    nodes_.reserve(rule.nodes.size());
    double amp_sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double p = rule.nodes[i];
        const double e = energy_mev(p, spec_.m, k);
        const double wa = rule.weights[i] * amplitude(spec_, p);
        nodes_.push_back({p, e / k.hbar(), wa * k.c() * p, -wa * (e - rest), wa});
        amp_sum += wa;
    }
    const double cp0 = k.c() * spec_.p0;
    floor_ = 1e-30 * cp0 * cp0 * amp_sum * amp_sum;
}

RadialFields GaussianPacket::radial_fields(double r, double t) const {
    if (!(r >= 0.0)) {
        throw DomainError("radial_fields: r must be non-negative (got " + std::to_string(r) + ")");
    }
    const int order = spec_.j.lower_order();
    const double inv_hbar = 1.0 / constants().hbar();
    double re1 = 0.0;
    double im1 = 0.0;
    double re2 = 0.0;
    double im2 = 0.0;
    for (const auto& n : nodes_) {
        const auto [ja, jb] = special::bessel_j_pair(order, n.p * r * inv_hbar);
        const double ph = n.omega * t;
        const double c = std::cos(ph);
        const double s = std::sin(ph);
        // e^{-i ph} = c - i s
        const double u = n.upper * ja;
        const double l = n.lower * jb;
        re1 += u * c;
        im1 -= u * s;
        re2 += l * c;
        im2 -= l * s;
    }
    // f1 carries the extra factor i.
    return {Complex(-im1, re1), Complex(re2, im2)};
}

FieldSample GaussianPacket::field_sample(double r, double t) const {
    return field_from(radial_fields(r, t), constants());
}

PolarVelocity GaussianPacket::velocity(double r, double t) const {
    const auto f = field_sample(r, t);
    if (!(f.rho > floor_)) {
        throw LowDensityError("density below floor at r = " + std::to_string(r) + ", t = " + std::to_string(t));
    }
    return {f.j_r / f.rho, f.j_phi / f.rho};
}

double GaussianPacket::phase_span(double r, double t) const {
    const auto& k = constants();
    return (spec_.window_hi() - spec_.window_lo()) * (std::abs(r) + k.c() * std::abs(t)) / k.hbar();
}

bool GaussianPacket::resolves(double r, double t) const {
    return phase_span(r, t) <= kMaxPhasePerNode * spec_.quad.n_nodes;
}

RadialSlice GaussianPacket::slice(double r) const { return RadialSlice(*this, r); }

double GaussianPacket::initial_peak_radius() const {
    const double scale = constants().hbar() / spec_.p0;
    const auto f = [&](double x) { return density(x * scale, 0.0); };
    constexpr double step = 0.01;
    double prev = f(0.0);
    double cur = f(step);
    if (cur < prev) {
        return 0.0;
    }
    const double x_max = 50.0 + 4.0 * std::abs(spec_.j.value()) + 10.0 * spec_.sigma_p / spec_.p0;
    for (double x = step; x < x_max; x += step) {
        const double next = f(x + step);
        if (cur > prev && cur >= next) {
            return opt::golden_section_max(f, x - step, x + step, 1e-4 / scale) * scale;
        }
        prev = cur;
        cur = next;
    }
    throw ConvergenceError("initial density maximum not found");
}

RadialSlice::RadialSlice(const GaussianPacket& packet, double r) : packet_(&packet), r_(r) {
    if (!(r >= 0.0)) {
        throw DomainError("slice: r must be non-negative");
    }
    const int order = packet.spec().j.lower_order();
    const double inv_hbar = 1.0 / packet.constants().hbar();
    upper_.reserve(packet.nodes().size());
    lower_.reserve(packet.nodes().size());
    for (const auto& n : packet.nodes()) {
        const auto [ja, jb] = special::bessel_j_pair(order, n.p * r * inv_hbar);
        upper_.push_back(n.upper * ja);
        lower_.push_back(n.lower * jb);
    }
}

RadialFields RadialSlice::radial_fields(double t) const {
    const auto& nodes = packet_->nodes();
    double re1 = 0.0;
    double im1 = 0.0;
    double re2 = 0.0;
    double im2 = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double ph = nodes[i].omega * t;
        const double c = std::cos(ph);
        const double s = std::sin(ph);
        re1 += upper_[i] * c;
        im1 -= upper_[i] * s;
        re2 += lower_[i] * c;
        im2 -= lower_[i] * s;
    }
    return {Complex(-im1, re1), Complex(re2, im2)};
}

FieldSample RadialSlice::field_sample(double t) const {
    return field_from(radial_fields(t), packet_->constants());
}

}  // namespace dbb
