#pragma once

#include <functional>
#include <vector>

namespace dbb::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped onto [a, b] (Newton iteration on P_n).
Rule gauss_legendre(int n, double a, double b);

/// Composite trapezoid rule with n >= 2 equally spaced points on [a, b].
double trapezoid(const std::function<double(double)>& f, double a, double b, int n);

/// Trapezoid rule over tabulated (x, y) pairs.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dbb::quad
