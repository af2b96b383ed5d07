#include "dbb/angular_momentum.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "dbb/errors.hpp"

namespace dbb {
namespace {

bool parse_int(std::string_view s, int& out) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

AngularMomentum::AngularMomentum(int twice_j) : twice_(twice_j) {
    if (twice_j % 2 == 0) {
        throw DomainError("j must be half-integer (got 2j = " + std::to_string(twice_j) + ")");
    }
}

AngularMomentum AngularMomentum::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        int num = 0;
        int den = 0;
        if (!parse_int(text.substr(0, slash), num) || !parse_int(text.substr(slash + 1), den)) {
            throw DomainError("cannot parse j from '" + std::string(text) + "'");
        }
        if (den == 1) {
            return AngularMomentum(2 * num);
        }
        if (den != 2) {
            throw DomainError("j must be half-integer (got '" + std::string(text) + "')");
        }
        return AngularMomentum(num);
    }
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw DomainError("cannot parse j from '" + std::string(text) + "'");
    }
    const double twice = 2.0 * v;
    if (twice != std::round(twice) || std::abs(twice) > 1e6) {
        throw DomainError("j must be half-integer (got '" + std::string(text) + "')");
    }
    return AngularMomentum(static_cast<int>(twice));
}

std::string AngularMomentum::str() const { return std::to_string(twice_) + "/2"; }

}  // namespace dbb
