#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "dbb/arrival.hpp"
#include "dbb/dynamics.hpp"
#include "dbb/errors.hpp"
#include "dbb/parallel.hpp"
#include "dbb/quadrature.hpp"

using namespace dbb;

namespace {

const GaussianPacket& packet() {
    static const GaussianPacket pk(PacketSpec{AngularMomentum(5), 1e-4, 1e-7});
    return pk;
}

const ArrivalRecord& record30() {
    static const ArrivalRecord rec = arrival(packet(), {30.0});
    return rec;
}

}  // namespace

TEST_SUITE("arrival") {
    TEST_CASE("time of flight shrinks to zero next to the detector") {
        const DetectorSpec det{30.0};
        double prev = 1.0;
        for (double r0 : {20.0, 25.0, 29.0, 29.9, 29.99}) {
            const auto f = time_of_flight(packet(), r0, det, 0.1);
            REQUIRE(f.t.has_value());
            CHECK(*f.t < prev);
            prev = *f.t;
        }
        CHECK(prev < 1e-3);
    }

    TEST_CASE("time of flight agrees with a tightly integrated trajectory") {
        const DetectorSpec det{30.0};
        const auto f = time_of_flight(packet(), 22.7, det, 0.1, {.tol = 1e-12});
        REQUIRE(f.t.has_value());
        const auto tr = integrate(packet(), 22.7, *f.t, {.tol = 1e-12, .n_samples = 2});
        CHECK(tr.samples.back().r == doctest::Approx(30.0).epsilon(1e-7));
    }

    TEST_CASE("both densities are normalized and agree") {
        const auto& rec = record30();
        CHECK(quad::trapezoid(rec.tau_grid, rec.pi_traj) == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(quad::trapezoid(rec.tau_grid, rec.pi_flux) == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(rec.discrepancy() <= 0.05);
        for (double v : rec.pi_flux) {
            CHECK(v >= 0.0);
        }
        CHECK(rec.peak_tau() >= rec.tau_grid.front());
        CHECK(rec.peak_tau() <= rec.tau_grid.back());
    }

    TEST_CASE("t_flight is strictly decreasing on the default grid") {
        const auto& rec = record30();
        for (std::size_t i = 1; i < rec.t_flight.size(); ++i) {
            CHECK(rec.t_flight[i] < rec.t_flight[i - 1]);
        }
        CHECK(rec.tau_grid.front() == rec.t_flight.back());
        CHECK(rec.tau_grid.back() == rec.t_flight.front());
    }

    TEST_CASE("doubling the r0 and tau grids changes each density by < 1%") {
        const auto& rec = record30();
        ArrivalOptions opt;
        opt.n_r0 = 128;
        opt.r0_per_period = 20.0;
        opt.n_tau = 1023;  // contains the 512-point grid
        const auto fine = arrival(packet(), {30.0}, opt);
        REQUIRE(fine.tau_grid.front() == rec.tau_grid.front());
        double dt = 0.0, df = 0.0, peak = 0.0;
        for (std::size_t k = 0; k < rec.tau_grid.size(); ++k) {
            CHECK(fine.tau_grid[2 * k] == doctest::Approx(rec.tau_grid[k]).epsilon(1e-12));
            dt = std::max(dt, std::abs(fine.pi_traj[2 * k] - rec.pi_traj[k]));
            df = std::max(df, std::abs(fine.pi_flux[2 * k] - rec.pi_flux[k]));
            peak = std::max(peak, rec.pi_flux[k]);
        }
        MESSAGE("grid refinement sup change: traj " << dt / peak << ", flux " << df / peak);
        CHECK(dt / peak <= 0.01);
        CHECK(df / peak <= 0.01);
    }

    TEST_CASE("non-monotone flight times are rejected") {
        const std::vector<double> r0{1, 2, 3, 4, 5};
        const std::vector<double> bad{5, 4, 4.5, 2, 1};
        const std::vector<double> tau{1.5, 2.5, 3.5};
        CHECK_THROWS_AS(arrival_density_traj(packet(), {6.0}, r0, bad, tau), MultiBranchError);
    }

    TEST_CASE("default grids") {
        const auto g = default_r0_grid({30.0});
        REQUIRE(g.size() == 64);
        CHECK(g.front() == doctest::Approx(1.5));
        CHECK(g.back() == doctest::Approx(29.7));
        for (std::size_t i = 2; i < g.size(); ++i) {
            CHECK(g[i] - g[i - 1] > g[i - 1] - g[i - 2]);
        }
        const double cap = density_period(packet()) / 6;
        const auto big = default_r0_grid({500.0}, 64, cap);
        CHECK(big.size() > 64);
        for (std::size_t i = 1; i < big.size(); ++i) {
            CHECK(big[i] - big[i - 1] <= cap * (1 + 1e-12));
        }
        CHECK(big.back() == doctest::Approx(495.0));
        const auto tau = default_tau_grid({3.0, 2.0, 1.0}, 5);
        CHECK(tau == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
    }

    TEST_CASE("argument checks") {
        CHECK_THROWS_AS(DetectorSpec{0.0}.validate(), DomainError);
        CHECK_THROWS_AS(time_of_flight(packet(), 30.0, {30.0}, 0.1), DomainError);
        CHECK_THROWS_AS(time_of_flight(packet(), -1.0, {30.0}, 0.1), DomainError);
        CHECK_FALSE(time_of_flight(packet(), 5.0, {30.0}, 1e-6).t.has_value());
    }
}

TEST_SUITE("parallel") {
    TEST_CASE("every index runs once for any thread count") {
        for (int threads : {1, 2, 7}) {
            std::vector<int> hits(1000, 0);
            parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
            CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
        }
    }

    TEST_CASE("flight times do not depend on the thread count") {
        const auto grid = default_r0_grid({30.0}, 12);
        CHECK(flight_times(packet(), {30.0}, grid, 0.1, 1) == flight_times(packet(), {30.0}, grid, 0.1, 3));
    }

    TEST_CASE("the first exception reaches the caller") {
        std::atomic<int> ran{0};
        CHECK_THROWS_WITH_AS(parallel_for(50, 4,
                                          [&](std::size_t i) {
                                              ++ran;
                                              if (i == 17) throw std::runtime_error("boom");
                                          }),
                             "boom", std::runtime_error);
        CHECK(ran.load() >= 1);
    }

    TEST_CASE("thread count resolution") {
        CHECK(resolve_threads(3) == 3);
        CHECK_THROWS_AS(resolve_threads(0), DomainError);
        ::setenv("DBB_THREADS", "5", 1);
        CHECK(resolve_threads() == 5);
        ::setenv("DBB_THREADS", "zero", 1);
        CHECK_THROWS_AS(resolve_threads(), DomainError);
        ::unsetenv("DBB_THREADS");
        CHECK(resolve_threads() >= 1);
    }
}
