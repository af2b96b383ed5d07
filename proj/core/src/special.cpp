#include "dbb/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dbb/errors.hpp"

namespace dbb::special {
namespace {

constexpr double kAsymptoticThreshold = 1.0e4;
constexpr double kHankelMin = 40.0;
constexpr double kForwardFraction = 0.8;
constexpr double kRescaleAbove = 1.0e250;
constexpr double kRescaleFactor = 1.0e-250;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + ": argument must be finite");
    }
}

// Ascending series; only used where x^2/4 is small against n+1 so that the
// terms decrease from the first one and no cancellation occurs.
double series_j(int n, double x) {
    const double half = 0.5 * x;
    double lead = 1.0;
    for (int i = 1; i <= n; ++i) {
        lead *= half / i;
    }
    const double q = -half * half;
    double term = lead;
    double sum = lead;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (n + k));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

bool use_series(int n, double x) { return x * x < (n + 1.0); }

int miller_start(int n, double x) {
    const double top = std::max(static_cast<double>(n) + 1.0, x);
    int m = static_cast<int>(std::ceil(top + 15.0 + 10.0 * std::cbrt(top)));
    return m + (m & 1);
}

// Hankel expansion for large x (n fixed): returns (J_n, Y_n).
std::pair<double, double> hankel(int n, double x) {
    const double mu = 4.0 * n * n;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double prev = 1.0e300;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) >= prev) {
            break;
        }
        prev = std::abs(term);
        // term = a_k / x^k; signs alternate in pairs.
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            default: p += term; break;
        }
        if (prev < 1e-17) {
            break;
        }
    }
    const double phase = (0.5 * n + 0.25) * std::numbers::pi;
    const double cx = std::cos(x);
    const double sx = std::sin(x);
    const double cw = cx * std::cos(phase) + sx * std::sin(phase);  // cos(x - phase)
    const double sw = sx * std::cos(phase) - cx * std::sin(phase);  // sin(x - phase)
    const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
    return {amp * (p * cw - q * sw), amp * (p * sw + q * cw)};
}

// The Hankel expansion converges to full precision once x >= 40 and the
// leading ratio 4n^2 / (8x) is at most 1/2.
bool use_hankel(int n, double x) {
    return x > kAsymptoticThreshold || (x >= kHankelMin && x >= static_cast<double>(n) * n);
}

// (J_n, J_{n+1}) for n >= 0 and x > 0.
std::pair<double, double> pair_positive(int n, double x) {
    if (use_hankel(n + 1, x)) {
        return {hankel(n, x).first, hankel(n + 1, x).first};
    }
    if (x >= kHankelMin && n + 1 < kForwardFraction * x) {
        // Forward recurrence from J0, J1 is stable below the turning point.
        double prev = hankel(0, x).first;
        double cur = hankel(1, x).first;
        const double two_over_x = 2.0 / x;
        for (int k = 1; k <= n; ++k) {
            const double next = k * two_over_x * cur - prev;
            prev = cur;
            cur = next;
        }
        return {prev, cur};
    }
    if (use_series(n + 1, x)) {
        return {series_j(n, x), series_j(n + 1, x)};
    }
    const int m = miller_start(n + 1, x);
    const double two_over_x = 2.0 / x;
    double above = 0.0;
    double cur = 1.0e-30;
    double even_sum = 0.0;
    double jn = 0.0;
    double jn1 = 0.0;
    for (int k = m; k >= 1; --k) {
        // cur = b_k, above = b_{k+1}; produce b_{k-1}.
        const double below = k * two_over_x * cur - above;
        above = cur;
        cur = below;
        const int idx = k - 1;
        if (idx == n + 1) {
            jn1 = cur;
        } else if (idx == n) {
            jn = cur;
        }
        if (idx > 0 && (idx & 1) == 0) {
            even_sum += cur;
        }
        if (std::abs(cur) > kRescaleAbove) {
            cur *= kRescaleFactor;
            above *= kRescaleFactor;
            even_sum *= kRescaleFactor;
            jn *= kRescaleFactor;
            jn1 *= kRescaleFactor;
        }
    }
    const double norm = cur + 2.0 * even_sum;
    return {jn / norm, jn1 / norm};
}

double sign_for_order(int n) { return (n & 1) ? -1.0 : 1.0; }

}  // namespace

std::pair<double, double> bessel_j_pair(int n, double x) {
    require_finite(x, "bessel_j");
    if (n < 0) {
        // J_n = (-1)^n J_{-n}; (J_n, J_{n+1}) from the pair (J_{|n|-1}, J_{|n|}).
        const int a = -n;
        const auto [lo, hi] = bessel_j_pair(a - 1, x);
        return {sign_for_order(a) * hi, sign_for_order(a - 1) * lo};
    }
    if (x == 0.0) {
        return {n == 0 ? 1.0 : 0.0, 0.0};
    }
    if (x < 0.0) {
        const auto [a, b] = pair_positive(n, -x);
        return {sign_for_order(n) * a, sign_for_order(n + 1) * b};
    }
    return pair_positive(n, x);
}

double bessel_j(int n, double x) {
    require_finite(x, "bessel_j");
    if (n < 0) {
        return sign_for_order(n) * bessel_j(-n, x);
    }
    if (x == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    if (x < 0.0) {
        return sign_for_order(n) * bessel_j(n, -x);
    }
    if (use_hankel(n, x)) {
        return hankel(n, x).first;
    }
    if (use_series(n, x)) {
        return series_j(n, x);
    }
    return pair_positive(n, x).first;
}

std::vector<double> bessel_j_sequence(int n_max, double x) {
    require_finite(x, "bessel_j_sequence");
    if (!(x > 0.0) || n_max < 0) {
        throw DomainError("bessel_j_sequence: requires x > 0 and n_max >= 0");
    }
    const int m = std::max(miller_start(n_max, x), n_max + 2);
    std::vector<double> b(static_cast<std::size_t>(m) + 2, 0.0);
    b[static_cast<std::size_t>(m)] = 1.0e-30;
    const double two_over_x = 2.0 / x;
    for (int k = m; k >= 1; --k) {
        auto& below = b[static_cast<std::size_t>(k - 1)];
        below = k * two_over_x * b[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k + 1)];
        if (std::abs(below) > kRescaleAbove) {
            for (int i = k - 1; i <= m; ++i) {
                b[static_cast<std::size_t>(i)] *= kRescaleFactor;
            }
        }
    }
    double even_sum = 0.0;
    for (int k = 2; k <= m; k += 2) {
        even_sum += b[static_cast<std::size_t>(k)];
    }
    const double norm = b[0] + 2.0 * even_sum;
    b.resize(static_cast<std::size_t>(n_max) + 1);
    for (auto& v : b) {
        v /= norm;
    }
    return b;
}

double bessel_y(int n, double x) {
    require_finite(x, "bessel_y");
    if (!(x > 0.0)) {
        throw DomainError("bessel_y: requires x > 0");
    }
    if (n < 0) {
        return sign_for_order(n) * bessel_y(-n, x);
    }
    double y0 = 0.0;
    double y1 = 0.0;
    if (x > kAsymptoticThreshold) {
        y0 = hankel(0, x).second;
        y1 = hankel(1, x).second;
    } else {
        // Neumann expansions in terms of J_k, stable for all x:
        //   Y0 = (2/pi)[(ln(x/2)+g) J0 - 2 sum_k (-1)^k J_2k / k]
        //   Y1 = (2/pi)[(ln(x/2)+g) J1 - J0/x + sum_k (-1)^k (J_{2k-1} - J_{2k+1}) / k]
        const int m = miller_start(1, x);
        const auto j = bessel_j_sequence(m, x);
        const double lg = std::log(0.5 * x) + std::numbers::egamma;
        double s0 = 0.0;
        double s1 = 0.0;
        for (int k = 1; 2 * k + 1 <= m; ++k) {
            const double sgn = (k & 1) ? -1.0 : 1.0;
            s0 += sgn * j[static_cast<std::size_t>(2 * k)] / k;
            s1 += sgn * (j[static_cast<std::size_t>(2 * k - 1)] - j[static_cast<std::size_t>(2 * k + 1)]) / k;
        }
        y0 = (2.0 / std::numbers::pi) * (lg * j[0] - 2.0 * s0);
        y1 = (2.0 / std::numbers::pi) * (lg * j[1] - j[0] / x + s1);
    }
    if (n == 0) {
        return y0;
    }
    // Forward recurrence is stable for Y.
    double prev = y0;
    double cur = y1;
    for (int k = 1; k < n; ++k) {
        const double next = (2.0 * k / x) * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double erf(double x) { return std::erf(x); }

double positive_zero(int n, int k) {
    if (n < 0 || k < 1) {
        throw DomainError("positive_zero: requires n >= 0 and k >= 1");
    }
    // J_n has no zeros in (0, n]; walk forward counting sign changes.
    double a = n == 0 ? 0.5 : static_cast<double>(n);
    double fa = bessel_j(n, a);
    constexpr double step = 0.1;
    int found = 0;
    for (;;) {
        const double b = a + step;
        const double fb = bessel_j(n, b);
        if ((fa > 0.0) != (fb > 0.0)) {
            if (++found == k) {
                double lo = a;
                double hi = b;
                double flo = fa;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = bessel_j(n, mid);
                    if ((fm > 0.0) == (flo > 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
        fa = fb;
    }
}

double first_positive_zero(int n) { return positive_zero(n, 1); }

}  // namespace dbb::special
