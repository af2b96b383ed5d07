#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dbb/errors.hpp"
#include "dbb/quadrature.hpp"
#include "dbb/special.hpp"

using namespace dbb;

namespace {

struct Ref {
    int n;
    double x;
    double value;
};

// mpmath, 40 digits
const Ref kJ[] = {
    {0, 0.5, 9.3846980724081290423e-1},
    {0, 5, -1.7759677131433830435e-1},
    {1, 0.001, 4.9999993750000261457e-4},
    {1, 7.25, 6.8581700653131744531e-2},
    {2, 0.10000000000000001, 1.248958658799918984e-3},
    {2, 30, 7.8451246073265348901e-2},
    {3, 2.5, 2.1660039103911352477e-1},
    {5, 1, 2.4975773021123443138e-4},
    {5, 50, -8.1400247696569639644e-2},
    {10, 3, 1.2928351645715883778e-5},
    {10, 12.5, 2.7887174659353570044e-1},
    {20, 15, 7.3602340792234852583e-3},
    {25, 80, 9.106379155568028003e-2},
    {50, 49, 9.2045794377933449676e-2},
    {50, 200, 1.5693898978573084037e-2},
    {0, 1234.5, -1.3550379618035721909e-2},
    {3, 45000, 3.0778936868751057385e-3},
    {7, 200000, 1.348340673049147237e-3},
    {100, 90, 2.6021305819963289288e-3},
    {2, 39.899999999999999, -1.3663629193460784805e-2},
    {2, 40.100000000000001, 1.1512823268359767259e-2},
    {30, 45, 4.5799309554040956079e-2},
};

const Ref kY[] = {
    {0, 0.5, -4.4451873350670655715e-1},
    {0, 5, -3.0851762524903378007e-1},
    {1, 0.01, -6.3678596282060655049e+1},
    {1, 7.25, -2.8934799419758704529e-1},
    {2, 0.10000000000000001, -1.2764478324269015877e+2},
    {2, 30, 1.2292410306411384091e-1},
    {5, 1, -2.6040586662581222072e+2},
    {10, 12.5, 6.406153638227449369e-2},
    {0, 1234.5, 1.8222995047412551598e-2},
    {3, 60, -9.4822718163008262111e-2},
};

// power series, long double, for moderate x
double series_j(int n, double x) {
    long double term = 1.0L;
    for (int k = 1; k <= n; ++k) {
        term *= 0.5L * x / k;
    }
    long double sum = term;
    const long double q = -0.25L * x * x;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<long double>(k) * (k + n));
        sum += term;
    }
    return static_cast<double>(sum);
}

}  // namespace

TEST_SUITE("special") {
    TEST_CASE("J_n matches frozen mpmath values") {
        for (const auto& r : kJ) {
            CAPTURE(r.n);
            CAPTURE(r.x);
            CHECK(special::bessel_j(r.n, r.x) == doctest::Approx(r.value).epsilon(1e-12));
        }
    }

    TEST_CASE("J_n matches the power series where it is well conditioned") {
        for (int n : {0, 1, 2, 4, 7, 12}) {
            for (double x : {0.01, 0.3, 1.0, 2.5, 4.0}) {
                CAPTURE(n);
                CAPTURE(x);
                CHECK(special::bessel_j(n, x) == doctest::Approx(series_j(n, x)).epsilon(1e-13));
            }
        }
    }

    // libstdc++ drifts to ~1e-13 absolute by x = 400 and ~1e-11 by 900
    // (checked against mpmath), so the cross-check stops at 120.
    TEST_CASE("J_n agrees with std::cyl_bessel_j across branches") {
        for (int n : {0, 1, 2, 3, 8, 30, 49, 50}) {
            for (double x : {0.2, 3.0, 11.0, 39.0, 41.0, 120.0}) {
                const double ref = std::cyl_bessel_j(static_cast<double>(n), x);
                CAPTURE(n);
                CAPTURE(x);
                CHECK(std::abs(special::bessel_j(n, x) - ref) <= 1e-12 * std::max(std::abs(ref), 0.01 / std::sqrt(x)));
            }
        }
    }

    TEST_CASE("pair and sequence agree with single evaluations") {
        for (double x : {0.5, 17.0, 333.0}) {
            const auto [a, b] = special::bessel_j_pair(4, x);
            CHECK(a == doctest::Approx(special::bessel_j(4, x)).epsilon(1e-14));
            CHECK(b == doctest::Approx(special::bessel_j(5, x)).epsilon(1e-14));
            const auto seq = special::bessel_j_sequence(12, x);
            REQUIRE(seq.size() == 13);
            for (int n = 0; n <= 12; ++n) {
                CHECK(seq[static_cast<std::size_t>(n)] == doctest::Approx(special::bessel_j(n, x)).epsilon(1e-12).scale(1e-3));
            }
        }
    }

    TEST_CASE("negative order and parity identities") {
        for (int n : {1, 2, 3, 6}) {
            for (double x : {0.7, 5.5, 60.0}) {
                const double sign = n % 2 ? -1.0 : 1.0;
                CHECK(special::bessel_j(-n, x) == doctest::Approx(sign * special::bessel_j(n, x)).epsilon(1e-6));
                CHECK(special::bessel_j(n, -x) == doctest::Approx(sign * special::bessel_j(n, x)).epsilon(1e-6));
                CHECK(special::bessel_y(-n, x) == doctest::Approx(sign * special::bessel_y(n, x)).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("small and large argument forms") {
        // J_n ~ (x/2)^n / n!, Y_n ~ -(n-1)! (2/x)^n / pi, Y_0 ~ (2/pi) log(x/2)
        const double x = 1e-4;
        CHECK(special::bessel_j(3, x) == doctest::Approx(std::pow(x / 2, 3) / 6).epsilon(1e-6));
        CHECK(special::bessel_y(2, x) == doctest::Approx(-1.0 * std::pow(2 / x, 2) / std::numbers::pi).epsilon(1e-6));
        CHECK(special::bessel_y(0, x) == doctest::Approx(2 / std::numbers::pi * (std::log(x / 2) + 0.5772156649015329)).epsilon(1e-6));
        const double big = 1e6;
        const double amp = std::sqrt(2 / (std::numbers::pi * big));
        CHECK(special::bessel_j(2, big) == doctest::Approx(amp * std::cos(big - 2.5 * std::numbers::pi / 2)).epsilon(1e-5).scale(amp));
        CHECK(special::bessel_y(2, big) == doctest::Approx(amp * std::sin(big - 2.5 * std::numbers::pi / 2)).epsilon(1e-5).scale(amp));
    }

    TEST_CASE("Y_n matches frozen mpmath values and std::cyl_neumann") {
        for (const auto& r : kY) {
            CAPTURE(r.n);
            CAPTURE(r.x);
            CHECK(special::bessel_y(r.n, r.x) == doctest::Approx(r.value).epsilon(1e-11));
        }
        for (int n : {0, 1, 4}) {
            for (double x : {0.3, 8.0, 70.0}) {
                CHECK(special::bessel_y(n, x) == doctest::Approx(std::cyl_neumann(n, x)).epsilon(1e-11));
            }
        }
        CHECK_THROWS_AS(special::bessel_y(1, 0.0), DomainError);
    }

    TEST_CASE("Wronskian J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi x)") {
        for (int n : {0, 1, 5}) {
            for (double x : {0.5, 9.0, 75.0}) {
                const double w = special::bessel_j(n + 1, x) * special::bessel_y(n, x) -
                                 special::bessel_j(n, x) * special::bessel_y(n + 1, x);
                CHECK(w == doctest::Approx(2 / (std::numbers::pi * x)).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("positive zeros match mpmath") {
        const struct {
            int n, k;
            double z;
        } zeros[] = {
            {0, 1, 2.4048255576957727686}, {0, 3, 8.653727912911012217},  {1, 1, 3.8317059702075123156},
            {1, 3, 10.173468135062722077}, {2, 1, 5.1356223018406825563}, {2, 3, 11.619841172149059427},
            {5, 1, 8.7714838159599540191}, {5, 3, 15.700174079711671038}, {10, 1, 14.475500686554541238},
            {10, 3, 22.046985364697801872},
        };
        for (const auto& z : zeros) {
            CHECK(special::positive_zero(z.n, z.k) == doctest::Approx(z.z).epsilon(1e-12));
        }
        CHECK(special::first_positive_zero(2) == doctest::Approx(5.1356223018406825563).epsilon(1e-12));
    }

    TEST_CASE("orthogonality over zeros on [0, R]") {
        const double R = 3.0;
        for (int n : {0, 2}) {
            const double za = special::positive_zero(n, 1);
            const double zb = special::positive_zero(n, 2);
            const auto f = [&](double a, double b) {
                return quad::trapezoid(
                    [&](double r) { return r * special::bessel_j(n, a * r / R) * special::bessel_j(n, b * r / R); },
                    0.0, R, 20001);
            };
            const double jn1 = special::bessel_j(n + 1, za);
            CHECK(std::abs(f(za, zb)) <= 1e-6);
            CHECK(f(za, za) == doctest::Approx(R * R / 2 * jn1 * jn1).epsilon(1e-6));
        }
    }

    TEST_CASE("erf matches mpmath and is odd") {
        const double ref[][2] = {{0.1, 0.1124629160182848984},
                                 {0.5, 0.52049987781304653768},
                                 {1.0, 0.84270079294971486934},
                                 {2.0, 0.99532226501895273416},
                                 {3.5, 0.99999925690162765859}};
        for (const auto& r : ref) {
            CHECK(special::erf(r[0]) == doctest::Approx(r[1]).epsilon(1e-15));
            CHECK(special::erf(-r[0]) == doctest::Approx(-r[1]).epsilon(1e-15));
        }
    }
}
