#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "dbb/errors.hpp"

namespace dbb::ode {

struct Options {
    double rtol = 1e-9;
    double atol = 1e-9;
    /// 0 selects an automatic initial step.
    double h_init = 0.0;
    double h_max = std::numeric_limits<double>::infinity();
    /// Steps shorter than h_min_rel * max(|t|, |t_end - t0|) are step underflow.
    double h_min_rel = 1e-14;
    long max_steps = 50'000'000;
};

/// Adaptive Dormand-Prince 5(4) with the 4th-order continuous extension.
/// Drive with step(); after each accepted step dense(t) is valid on
/// [t_prev(), t()].
template <std::size_t N>
class DormandPrince {
public:
    using State = std::array<double, N>;
    using Rhs = std::function<State(double, const State&)>;

    DormandPrince(Rhs f, double t0, const State& y0, double t_end, Options opt = {})
        : f_(std::move(f)), opt_(opt), t0_(t0), t_(t0), t_prev_(t0), t_end_(t_end), y_(y0), y_prev_(y0) {
        if (!(t_end > t0)) {
            throw DomainError("ode: t_end must exceed t0");
        }
        k1_ = f_(t_, y_);
        ++evals_;
        h_ = opt_.h_init > 0.0 ? opt_.h_init : initial_step();
        for (auto& r : rcont_) {
            r.fill(0.0);
        }
    }

    bool done() const { return t_ >= t_end_; }
    double t() const { return t_; }
    double t_prev() const { return t_prev_; }
    const State& state() const { return y_; }
    const State& derivative() const { return k1_; }
    long steps() const { return accepted_; }
    long rejected() const { return rejected_; }
    long evaluations() const { return evals_; }

    /// Advances by one accepted step, clipped at t_end.
    void step() {
        const double h_min = opt_.h_min_rel * std::max(std::abs(t_), std::abs(t_end_ - t0_));
        for (;;) {
            if (accepted_ + rejected_ >= opt_.max_steps) {
                throw ConvergenceError("ode: maximum number of steps exceeded");
            }
            double h = std::min({h_, opt_.h_max, t_end_ - t_});
            const bool last = h >= t_end_ - t_;
            if (h < h_min && !last) {
                throw ConvergenceError("ode: step size underflow at t = " + std::to_string(t_));
            }
            State y1{}, y2{}, y3{}, y4{}, y5{}, y6{};
            for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + h * (a21 * k1_[i]);
            const State k2 = eval(t_ + c2 * h, y1);
            for (std::size_t i = 0; i < N; ++i) y2[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
            const State k3 = eval(t_ + c3 * h, y2);
            for (std::size_t i = 0; i < N; ++i) y3[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
            const State k4 = eval(t_ + c4 * h, y3);
            for (std::size_t i = 0; i < N; ++i)
                y4[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            const State k5 = eval(t_ + c5 * h, y4);
            for (std::size_t i = 0; i < N; ++i)
                y5[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            const double t_new = last ? t_end_ : t_ + h;
            const State k6 = eval(t_new, y5);
            for (std::size_t i = 0; i < N; ++i)
                y6[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            const State k7 = eval(t_new, y6);

            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double e =
                    h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(y6[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / N);
            if (!std::isfinite(err)) {
                h_ *= 0.1;
                ++rejected_;
                continue;
            }
            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                for (std::size_t i = 0; i < N; ++i) {
                    const double ydiff = y6[i] - y_[i];
                    const double bspl = h * k1_[i] - ydiff;
                    rcont_[0][i] = y_[i];
                    rcont_[1][i] = ydiff;
                    rcont_[2][i] = bspl;
                    rcont_[3][i] = ydiff - h * k7[i] - bspl;
                    rcont_[4][i] =
                        h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                t_prev_ = t_;
                y_prev_ = y_;
                h_used_ = h;
                t_ = t_new;
                y_ = y6;
                k1_ = k7;
                ++accepted_;
                h_ = h * (rejected_last_ ? std::min(fac, 1.0) : fac);
                rejected_last_ = false;
                return;
            }
            ++rejected_;
            rejected_last_ = true;
            h_ = h * std::min(fac, 1.0);
        }
    }

    /// Continuous extension on the last accepted step.
    State dense(double t) const {
        if (accepted_ == 0 || h_used_ == 0.0) {
            return y_;
        }
        const double theta = (t - t_prev_) / h_used_;
        const double theta1 = 1.0 - theta;
        State out{};
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = rcont_[0][i] +
                     theta * (rcont_[1][i] +
                              theta1 * (rcont_[2][i] + theta * (rcont_[3][i] + theta1 * rcont_[4][i])));
        }
        return out;
    }

private:
    State eval(double t, const State& y) {
        ++evals_;
        return f_(t, y);
    }

    double initial_step() {
        double d0 = 0.0;
        double d1n = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt_.atol + opt_.rtol * std::abs(y_[i]);
            d0 += (y_[i] / sc) * (y_[i] / sc);
            d1n += (k1_[i] / sc) * (k1_[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * (t_end_ - t0_) : 0.01 * d0 / d1n;
        h0 = std::min(h0, t_end_ - t0_);
        State y1{};
        for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + h0 * k1_[i];
        const State f1 = eval(t_ + h0, y1);
        double d2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt_.atol + opt_.rtol * std::abs(y_[i]);
            d2 += ((f1[i] - k1_[i]) / sc) * ((f1[i] - k1_[i]) / sc);
        }
        d2 = std::sqrt(d2 / N) / h0;
        const double dm = std::max(d1n, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min({100.0 * h0, h1, t_end_ - t0_});
    }

    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                            a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                            a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    Rhs f_;
    Options opt_;
    double t0_;
    double t_;
    double t_prev_;
    double t_end_;
    double h_ = 0.0;
    double h_used_ = 0.0;
    State y_;
    State y_prev_;
    State k1_{};
    std::array<State, 5> rcont_{};
    long accepted_ = 0;
    long rejected_ = 0;
    long evals_ = 0;
    bool rejected_last_ = false;
};

}  // namespace dbb::ode
