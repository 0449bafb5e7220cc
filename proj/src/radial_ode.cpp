#include "elliptic/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elliptic/errors.hpp"

namespace elliptic {

RadialProblem::RadialProblem(int n, SemilinearModel m)
    : RadialProblem(n, std::make_shared<const SemilinearModel>(std::move(m))) {}

RadialProblem::RadialProblem(int n, std::shared_ptr<const SemilinearModel> m)
    : dimension(n), model(std::move(m)) {
    if (dimension < 2) throw PreconditionError("RadialProblem: dimension must be >= 2");
    if (!model) throw PreconditionError("RadialProblem: null model");
}

double RadialProblem::default_r_max() const {
    const double gp0 = model->g_prime(0.0);
    if (!(gp0 < 0.0)) throw DomainError("default_r_max: g'(0) must be negative");
    return 30.0 / std::sqrt(-gp0);
}

double RadialProblem::start_radius() const {
    const double gp0 = std::fabs(model->g_prime(0.0));
    return 1e-6 * (1.0 + 1.0 / std::sqrt(std::max(gp0, 1e-12)));
}

double Trajectory::delta(std::size_t i) const { return dm_[i] * std::exp(dlog_[i]); }

double Trajectory::delta_prime(std::size_t i) const { return dpm_[i] * std::exp(dlog_[i]); }

double Trajectory::log_abs_delta(std::size_t i) const { return std::log(std::fabs(dm_[i])) + dlog_[i]; }

std::optional<Event> Trajectory::first_event(EventKind kind) const {
    for (const auto& e : events_)
        if (e.kind == kind) return e;
    return std::nullopt;
}

std::vector<double> Trajectory::event_radii(EventKind kind) const {
    std::vector<double> out;
    for (const auto& e : events_)
        if (e.kind == kind) out.push_back(e.r);
    return out;
}

std::size_t Trajectory::step_index(double r) const {
    if (!(r >= r_.front() && r <= r_.back()))
        throw DomainError("trajectory sample at r = " + std::to_string(r) + " outside [" +
                          std::to_string(r_.front()) + ", " + std::to_string(r_.back()) + "]");
    // steps_[k] spans [r_[k], r_[k+1]].
    auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t k = static_cast<std::size_t>(it - r_.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, steps_.size() - 1);
}

RadialSample Trajectory::sample(double r) const {
    const std::size_t k = step_index(r);
    if (r == r_[k] || (k + 1 < r_.size() && r == r_[k + 1])) {
        const std::size_t i = r == r_[k] ? k : k + 1;
        return {r_[i], u_[i], up_[i], delta(i), delta_prime(i), energy_[i]};
    }
    const auto& st = steps_[k];
    const double u = st.value(0, r);
    const double up = st.value(1, r);
    const double scale = std::exp(step_log_scale_[k]);
    return {r, u, up, st.value(2, r) * scale, st.value(3, r) * scale, 0.5 * up * up + model_->G(u)};
}

double Trajectory::u_second_derivative(double r) const {
    const std::size_t k = step_index(r);
    return steps_[k].derivative(1, r);
}

Trajectory Trajectory::truncated(double r_end) const {
    if (r_end >= r_.back()) return *this;
    if (!(r_end > r_.front())) throw DomainError("truncated: r_end before the start radius");
    Trajectory t;
    t.dimension_ = dimension_;
    t.d_ = d_;
    t.with_variation_ = with_variation_;
    t.stop_ = StopReason::RMax;
    t.model_ = model_;
    const std::size_t k = step_index(r_end);
    const RadialSample s = sample(r_end);
    for (std::size_t i = 0; i <= k; ++i) {
        if (r_[i] >= r_end) break;
        t.r_.push_back(r_[i]);
        t.u_.push_back(u_[i]);
        t.up_.push_back(up_[i]);
        t.dm_.push_back(dm_[i]);
        t.dpm_.push_back(dpm_[i]);
        t.dlog_.push_back(dlog_[i]);
        t.energy_.push_back(energy_[i]);
    }
    const std::size_t nsteps = t.r_.size();
    t.steps_.assign(steps_.begin(), steps_.begin() + static_cast<std::ptrdiff_t>(nsteps));
    t.step_log_scale_.assign(step_log_scale_.begin(), step_log_scale_.begin() + static_cast<std::ptrdiff_t>(nsteps));
    const double ls = t.step_log_scale_.back();
    t.r_.push_back(r_end);
    t.u_.push_back(s.u);
    t.up_.push_back(s.u_prime);
    t.dm_.push_back(steps_[k].value(2, r_end));
    t.dpm_.push_back(steps_[k].value(3, r_end));
    t.dlog_.push_back(ls);
    t.energy_.push_back(s.energy);
    for (const auto& e : events_)
        if (e.r <= r_end) t.events_.push_back(e);
    return t;
}

namespace {

// Bisection on a function known to change sign on [a, b].
template <class F>
double refine_zero(F&& f, double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0.0) == (fa > 0.0) && fm != 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

Trajectory integrate(const RadialProblem& problem, double d, double r_max, double tol,
                     const IntegrateOptions& options) {
    if (!(d > 0.0)) throw PreconditionError("integrate: initial height d must be positive");
    if (!(tol > 1e-14 && tol < 1e-3)) throw PreconditionError("integrate: tol must lie in (1e-14, 1e-3)");
    const double r0 = problem.start_radius();
    if (!(r_max > r0)) throw PreconditionError("integrate: r_max must exceed the start radius");

    const SemilinearModel& model = *problem.model;
    const int n = problem.dimension;
    const double nm1 = static_cast<double>(n - 1);
    const bool var = options.with_variation;

    using State = Dopri5<4>::State;
    auto rhs = [&model, nm1, var](double r, const State& y, State& dy) {
        dy[0] = y[1];
        dy[1] = -nm1 / r * y[1] - model.g(y[0]);
        if (var) {
            dy[2] = y[3];
            dy[3] = -nm1 / r * y[3] - model.g_prime(y[0]) * y[2];
        } else {
            dy[2] = 0.0;
            dy[3] = 0.0;
        }
    };

    // Quadratic Taylor start: u''(0) = -g(d)/N.
    const double gd = model.g(d);
    const double gpd = model.g_prime(d);
    const double dn = static_cast<double>(n);
    State y0{d - gd * r0 * r0 / (2.0 * dn), -gd * r0 / dn, 0.0, 0.0};
    if (var) {
        y0[2] = 1.0 - gpd * r0 * r0 / (2.0 * dn);
        y0[3] = -gpd * r0 / dn;
    }

    Trajectory traj;
    traj.dimension_ = n;
    traj.d_ = d;
    traj.with_variation_ = var;
    traj.model_ = problem.model;

    double log_scale = 0.0;
    auto push_node = [&](double r, const State& y) {
        traj.r_.push_back(r);
        traj.u_.push_back(y[0]);
        traj.up_.push_back(y[1]);
        traj.dm_.push_back(y[2]);
        traj.dpm_.push_back(y[3]);
        traj.dlog_.push_back(log_scale);
        traj.energy_.push_back(0.5 * y[1] * y[1] + model.G(y[0]));
    };
    push_node(r0, y0);

    const double margin = options.energy_margin;
    bool energy_fired = false;
    if (traj.energy_.back() < -margin) {
        traj.events_.push_back({EventKind::EnergyNegative, r0, y0[0]});
        energy_fired = true;
        if (options.certificate_b) {
            traj.stop_ = StopReason::PositiveCertificate;
            traj.steps_.push_back({});
            traj.steps_.back().t0 = r0;
            traj.steps_.back().h = 0.0;
            traj.step_log_scale_.push_back(0.0);
            // Degenerate single-node record: duplicate the node so sampling works.
            push_node(r0, y0);
            traj.steps_.back().h = 1.0;
            for (std::size_t i = 0; i < 4; ++i) traj.steps_.back().rc[0][i] = y0[i];
            return traj;
        }
    }

    const double atol = 1e-6 * tol * std::max(1.0, d);
    Dopri5<4> stepper(rhs, r0, y0, tol, atol, r0);
    stepper.set_max_step(options.max_step);

    constexpr std::size_t kMaxSteps = 20'000'000;
    for (std::size_t count = 0;; ++count) {
        if (count > kMaxSteps) throw StiffFailure("integrate: step budget exhausted", stepper.t());
        const State ya = stepper.y();
        stepper.step(r_max);
        const auto& st = stepper.last_step();
        const State yb = stepper.y();
        if (!std::isfinite(yb[0]) || !std::isfinite(yb[1]))
            throw StiffFailure("integrate: non-finite solution", stepper.t());

        const double ta = st.t0;
        double tb = stepper.t();
        bool stop = false;
        StopReason reason = StopReason::RMax;

        // First zero of u ends the shot.
        if (ya[0] > 0.0 && yb[0] <= 0.0) {
            tb = refine_zero([&st](double r) { return st.value(0, r); }, ta, tb);
            stop = true;
            reason = StopReason::UZero;
        }

        std::vector<Event> found;
        const double probes[] = {0.0, 0.25, 0.5, 0.75, 1.0};
        auto scan_channel = [&](std::size_t comp, EventKind kind) {
            double pa = ta;
            double va = st.value(comp, ta);
            for (std::size_t j = 1; j < 5; ++j) {
                const double pb = ta + probes[j] * (tb - ta);
                const double vb = st.value(comp, pb);
                if (va != 0.0 && vb != 0.0 && (va > 0.0) != (vb > 0.0)) {
                    const double rz = refine_zero([&st, comp](double r) { return st.value(comp, r); }, pa, pb);
                    found.push_back({kind, rz, st.value(0, rz)});
                }
                if (vb != 0.0) {
                    pa = pb;
                    va = vb;
                }
            }
        };
        scan_channel(1, EventKind::UPrimeZero);
        if (var) scan_channel(2, EventKind::DeltaZero);
        if (!energy_fired) {
            auto energy_gap = [&st, &model, margin](double r) {
                const double u = st.value(0, r), up = st.value(1, r);
                return 0.5 * up * up + model.G(u) + margin;
            };
            double pa = ta;
            for (std::size_t j = 1; j < 5; ++j) {
                const double pb = ta + probes[j] * (tb - ta);
                if (energy_gap(pb) < 0.0) {
                    const double re = energy_gap(pa) < 0.0 ? pa : refine_zero(energy_gap, pa, pb);
                    found.push_back({EventKind::EnergyNegative, re, st.value(0, re)});
                    energy_fired = true;
                    break;
                }
                pa = pb;
            }
        }
        std::sort(found.begin(), found.end(), [](const Event& a, const Event& b) { return a.r < b.r; });

        for (const auto& e : found) {
            if (stop && e.r > tb) continue;
            traj.events_.push_back(e);
            if (options.certificate_b && !stop) {
                const double b = *options.certificate_b;
                const bool cert = e.kind == EventKind::EnergyNegative ||
                                  (e.kind == EventKind::UPrimeZero && e.u > 1e-12 && e.u < b - 1e-12);
                if (cert) {
                    stop = true;
                    reason = StopReason::PositiveCertificate;
                    tb = e.r;
                }
            }
        }
        if (reason == StopReason::UZero) traj.events_.push_back({EventKind::UZero, tb, 0.0});

        traj.steps_.push_back(st);
        traj.step_log_scale_.push_back(log_scale);
        if (stop) {
            State ys = st.value(tb);
            if (reason == StopReason::UZero) ys[0] = 0.0;
            if (tb > ta) {
                push_node(tb, ys);
            } else {
                traj.steps_.pop_back();
                traj.step_log_scale_.pop_back();
            }
            traj.stop_ = reason;
            break;
        }
        push_node(tb, yb);
        if (tb >= r_max) {
            traj.stop_ = StopReason::RMax;
            break;
        }

        if (var) {
            const double big = std::max(std::fabs(yb[2]), std::fabs(yb[3]));
            if (big > kDeltaRescaleThreshold) {
                const int k = std::ilogb(big);
                State yr = yb;
                yr[2] = std::ldexp(yr[2], -k);
                yr[3] = std::ldexp(yr[3], -k);
                log_scale += k * std::log(2.0);
                stepper.reset_state(yr);
                traj.dm_.back() = yr[2];
                traj.dpm_.back() = yr[3];
                traj.dlog_.back() = log_scale;
            }
        }
    }
    // Events must be ordered by radius across steps as well.
    std::stable_sort(traj.events_.begin(), traj.events_.end(),
                     [](const Event& a, const Event& b) { return a.r < b.r; });
    return traj;
}

}  // namespace elliptic
