#include "dbb/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "dbb/errors.hpp"

namespace dbb::quad {

Rule gauss_legendre(int n, double a, double b) {
    if (n < 1) {
        throw DomainError("gauss_legendre: need at least one node");
    }
    Rule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = mid - half * x;
        rule.nodes[hi] = mid + half * x;
        rule.weights[lo] = half * w;
        rule.weights[hi] = half * w;
    }
    return rule;
}

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    if (n < 2) {
        throw DomainError("trapezoid: need at least two points");
    }
    const double h = (b - a) / (n - 1);
    long double sum = 0.5L * (f(a) + f(b));
    for (int i = 1; i < n - 1; ++i) {
        sum += f(a + i * h);
    }
    return static_cast<double>(sum * h);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw DomainError("trapezoid: size mismatch");
    }
    long double sum = 0.0L;
    for (std::size_t i = 1; i < x.size(); ++i) {
        sum += 0.5L * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    return static_cast<double>(sum);
}

}  // namespace dbb::quad
