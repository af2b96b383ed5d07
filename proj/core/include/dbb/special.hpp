#pragma once

#include <utility>
#include <vector>

namespace dbb::special {

/// Bessel function of the first kind J_n(x) for integer n and real x.
/// Relative accuracy ~1e-13 away from zeros for |x| <= 1e4, n <= 60.
double bessel_j(int n, double x);

/// The adjacent pair (J_n(x), J_{n+1}(x)) from a single recurrence sweep.
/// This is the hot path of every field evaluation.
std::pair<double, double> bessel_j_pair(int n, double x);

/// J_0(x) ... J_{n_max}(x) for x > 0 (Miller's algorithm, normalized).
std::vector<double> bessel_j_sequence(int n_max, double x);

/// Bessel function of the second kind Y_n(x), x > 0. Only used by tests and
/// diagnostics; field evaluation never needs it.
double bessel_y(int n, double x);

/// Error function.
double erf(double x);

/// Smallest z > 0 with J_n(z) = 0, n >= 0.
double first_positive_zero(int n);

/// The k-th positive zero of J_n (k >= 1).
double positive_zero(int n, int k);

}  // namespace dbb::special
