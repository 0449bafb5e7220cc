#ifndef ELLIPTIC_DOPRI5_HPP
#define ELLIPTIC_DOPRI5_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "elliptic/errors.hpp"

namespace elliptic {

/// Dense output of one accepted Dormand-Prince step: the fourth-order
/// continuous extension of Hairer & Wanner (routine CONTD5).
template <std::size_t D>
struct DenseStep {
    using State = std::array<double, D>;
    double t0 = 0.0;
    double h = 0.0;
    std::array<State, 5> rc{};

    double t1() const { return t0 + h; }

    double value(std::size_t i, double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    }

    State value(double t) const {
        State y;
        for (std::size_t i = 0; i < D; ++i) y[i] = value(i, t);
        return y;
    }

    /// d/dt of the interpolant.
    double derivative(std::size_t i, double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        // p(th) = a + th (b + th1 (c + th (d + th1 e)))
        const double b = rc[1][i], c = rc[2][i], d = rc[3][i], e = rc[4][i];
        const double inner = d + th1 * e;         // q3
        const double mid = c + th * inner;        // q2
        const double outer = b + th1 * mid;       // q1
        const double dinner = -e;
        const double dmid = inner + th * dinner;
        const double douter = -mid + th1 * dmid;
        return (outer + th * douter) / h;
    }
};

/// Embedded 5(4) Runge-Kutta pair of Dormand and Prince with PI step-size
/// control and dense output. The caller drives it one accepted step at a
/// time so it can inspect events, rescale components or stop early.
template <std::size_t D>
class Dopri5 {
public:
    using State = std::array<double, D>;
    using Rhs = std::function<void(double, const State&, State&)>;

    Dopri5(Rhs rhs, double t0, const State& y0, double rtol, double atol, double h0)
        : rhs_(std::move(rhs)), t_(t0), y_(y0), rtol_(rtol), atol_(atol), h_(h0) {
        rhs_(t_, y_, k1_);
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    const DenseStep<D>& last_step() const { return dense_; }
    std::size_t rejected() const { return rejected_; }
    /// Upper bound on the step size (0 = none).
    void set_max_step(double h) { h_max_ = h; }

    /// Replace the current state (e.g. after rescaling a linear channel).
    void reset_state(const State& y) {
        y_ = y;
        rhs_(t_, y_, k1_);
    }

    /// Advance by one accepted step, never past t_limit. Throws StiffFailure
    /// when the step size underflows.
    void step(double t_limit) {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                                a75 = -2187.0 / 6784, a76 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                                d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                                d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

        State k2, k3, k4, k5, k6, k7, yt, y1;
        bool last_failed = false;
        for (;;) {
            double h = std::min(h_max_ > 0.0 ? std::min(h_, h_max_) : h_, t_limit - t_);
            if (h <= 1e-14 * std::max(1.0, std::fabs(t_)))
                throw StiffFailure("step size underflow at r = " + std::to_string(t_), t_);

            for (std::size_t i = 0; i < D; ++i) yt[i] = y_[i] + h * a21 * k1_[i];
            rhs_(t_ + c2 * h, yt, k2);
            for (std::size_t i = 0; i < D; ++i) yt[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
            rhs_(t_ + c3 * h, yt, k3);
            for (std::size_t i = 0; i < D; ++i)
                yt[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
            rhs_(t_ + c4 * h, yt, k4);
            for (std::size_t i = 0; i < D; ++i)
                yt[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            rhs_(t_ + c5 * h, yt, k5);
            for (std::size_t i = 0; i < D; ++i)
                yt[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            rhs_(t_ + h, yt, k6);
            for (std::size_t i = 0; i < D; ++i)
                y1[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            rhs_(t_ + h, y1, k7);

            double err = 0.0;
            bool finite = true;
            for (std::size_t i = 0; i < D; ++i) {
                const double ei =
                    h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sk = atol_ + rtol_ * std::max(std::fabs(y_[i]), std::fabs(y1[i]));
                const double q = ei / sk;
                err += q * q;
                if (!std::isfinite(y1[i])) finite = false;
            }
            err = std::sqrt(err / static_cast<double>(D));
            if (!finite || !std::isfinite(err)) err = 1e10;

            // PI controller, Hairer's constants.
            const double fac11 = std::pow(err, 0.2 - 0.04 * 0.75);
            double fac = fac11 / std::pow(facold_, 0.04);
            fac = std::max(1.0 / 10.0, std::min(1.0 / 0.2, fac / 0.9));
            const double hnew = h / fac;

            if (err <= 1.0) {
                facold_ = std::max(err, 1e-4);
                dense_.t0 = t_;
                dense_.h = h;
                for (std::size_t i = 0; i < D; ++i) {
                    const double ydiff = y1[i] - y_[i];
                    const double bspl = h * k1_[i] - ydiff;
                    dense_.rc[0][i] = y_[i];
                    dense_.rc[1][i] = ydiff;
                    dense_.rc[2][i] = bspl;
                    dense_.rc[3][i] = ydiff - h * k7[i] - bspl;
                    dense_.rc[4][i] =
                        h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                t_ = (h == t_limit - t_) ? t_limit : t_ + h;
                y_ = y1;
                k1_ = k7;
                h_ = last_failed ? std::min(hnew, h) : hnew;
                return;
            }
            ++rejected_;
            last_failed = true;
            h_ = h / std::min(1.0 / 0.2, fac11 / 0.9);
        }
    }

private:
    Rhs rhs_;
    double t_;
    State y_;
    State k1_{};
    double rtol_;
    double atol_;
    double h_;
    double h_max_ = 0.0;
    double facold_ = 1e-4;
    std::size_t rejected_ = 0;
    DenseStep<D> dense_;
};

}  // namespace elliptic

#endif
