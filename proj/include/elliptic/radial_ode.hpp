#ifndef ELLIPTIC_RADIAL_ODE_HPP
#define ELLIPTIC_RADIAL_ODE_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "elliptic/dopri5.hpp"
#include "elliptic/nonlinearity.hpp"

namespace elliptic {

/// u'' + (N-1)/r u' + g(u) = 0 on (0, inf), u(0) = d, u'(0) = 0.
struct RadialProblem {
    int dimension = 3;
    std::shared_ptr<const SemilinearModel> model;

    RadialProblem(int n, SemilinearModel m);
    RadialProblem(int n, std::shared_ptr<const SemilinearModel> m);

    /// 30 / sqrt(-g'(0)); the ground state has decayed to ~1e-13 d there.
    double default_r_max() const;
    /// Taylor-start radius 1e-6 (1 + 1/sqrt|g'(0)|).
    double start_radius() const;
};

enum class EventKind { UZero, UPrimeZero, DeltaZero, EnergyNegative };

struct Event {
    EventKind kind;
    double r;
    double u;  // u at the event, used by the positivity certificate
};

enum class StopReason { UZero, RMax, PositiveCertificate };

struct IntegrateOptions {
    bool with_variation = false;
    /// Energy-negative event threshold: fires once E < -energy_margin.
    double energy_margin = 1e-12;
    /// When set, stop at the first certificate that d lies in P: E below the
    /// margin, or u' = 0 with u in (1e-12, b - 1e-12).
    std::optional<double> certificate_b;
    /// Step-size cap (0 = none); keeps the dense output accurate in slow tails.
    double max_step = 0.0;
};

/// Values of all channels at one radius.
struct RadialSample {
    double r;
    double u;
    double u_prime;
    double delta;
    double delta_prime;
    double energy;
};

/// Dense record of one shot. Nodes are the accepted integrator steps; between
/// nodes the fourth-order continuous extension is used. The variation channel
/// is stored as mantissa * exp(log_scale) so that exponential growth of delta
/// never overflows.
class Trajectory {
public:
    int dimension() const noexcept { return dimension_; }
    double initial_height() const noexcept { return d_; }
    bool has_variation() const noexcept { return with_variation_; }
    StopReason stop_reason() const noexcept { return stop_; }

    std::size_t size() const noexcept { return r_.size(); }
    double r(std::size_t i) const { return r_[i]; }
    double u(std::size_t i) const { return u_[i]; }
    double u_prime(std::size_t i) const { return up_[i]; }
    double energy(std::size_t i) const { return energy_[i]; }
    /// delta at node i; may be +-inf if the true value exceeds double range.
    double delta(std::size_t i) const;
    double delta_prime(std::size_t i) const;
    double delta_mantissa(std::size_t i) const { return dm_[i]; }
    double delta_log_scale(std::size_t i) const { return dlog_[i]; }
    /// log|delta| at node i, finite even where delta() overflows.
    double log_abs_delta(std::size_t i) const;

    double start_radius() const { return r_.front(); }
    double end_radius() const { return r_.back(); }

    const std::vector<Event>& events() const noexcept { return events_; }
    std::optional<Event> first_event(EventKind kind) const;
    std::vector<double> event_radii(EventKind kind) const;

    /// Dense-output sample; exact at nodes. DomainError outside [r0, end].
    RadialSample sample(double r) const;
    /// d/dr of the interpolated u' channel (used for residual checks).
    double u_second_derivative(double r) const;

    /// Copy restricted to [r0, r_end]; events beyond r_end are dropped.
    Trajectory truncated(double r_end) const;

    const SemilinearModel& model() const { return *model_; }

private:
    friend Trajectory integrate(const RadialProblem&, double, double, double, const IntegrateOptions&);

    std::size_t step_index(double r) const;

    int dimension_ = 0;
    double d_ = 0.0;
    bool with_variation_ = false;
    StopReason stop_ = StopReason::RMax;
    std::shared_ptr<const SemilinearModel> model_;

    std::vector<double> r_, u_, up_, dm_, dpm_, dlog_, energy_;
    std::vector<DenseStep<4>> steps_;
    std::vector<double> step_log_scale_;
    std::vector<Event> events_;
};

/// Shoot from u(0) = d. Stops at the first zero of u, at r_max, or (if
/// requested) at a positivity certificate. Preconditions: d > 0, r_max > 0,
/// 1e-14 < tol < 1e-3.
Trajectory integrate(const RadialProblem& problem, double d, double r_max, double tol,
                     const IntegrateOptions& options);

inline Trajectory integrate(const RadialProblem& problem, double d, double r_max, double tol,
                            bool with_variation) {
    IntegrateOptions o;
    o.with_variation = with_variation;
    return integrate(problem, d, r_max, tol, o);
}

/// Free-function form of Trajectory::sample.
inline RadialSample sample(const Trajectory& t, double r) { return t.sample(r); }

/// Threshold above which the variation channel is renormalised.
inline constexpr double kDeltaRescaleThreshold = 1e12;

}  // namespace elliptic

#endif
