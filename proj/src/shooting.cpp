#include "elliptic/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/minima.hpp>

#include "elliptic/errors.hpp"

namespace elliptic {

const char* to_string(ClassKind kind) {
    switch (kind) {
        case ClassKind::CrossesZero: return "CrossesZero";
        case ClassKind::GroundCandidate: return "GroundCandidate";
        case ClassKind::StaysPositive: return "StaysPositive";
        case ClassKind::Undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

Classification classify(const RadialProblem& problem, const StructuralConstants& consts, double d,
                        double r_max, double tol) {
    if (!(d > 0.0)) throw DomainError("classify: d must be positive");
    if (std::isfinite(consts.b_tilde) && d >= consts.b_tilde)
        throw DomainError("classify: d = " + fmt(d) + " is not below b~ = " + fmt(consts.b_tilde));

    const SemilinearModel& m = *problem.model;
    IntegrateOptions o;
    o.certificate_b = consts.b;
    o.energy_margin = 1e-12 * (1.0 + std::fabs(m.G(consts.b)));
    const Trajectory t = integrate(problem, d, r_max, tol, o);

    Classification c;
    c.d = d;
    c.r_max = r_max;
    switch (t.stop_reason()) {
        case StopReason::UZero: {
            c.kind = ClassKind::CrossesZero;
            c.radius = t.end_radius();
            c.evidence = "u(R) = 0 with u'(R) = " + fmt(t.u_prime(t.size() - 1));
            break;
        }
        case StopReason::PositiveCertificate: {
            c.kind = ClassKind::StaysPositive;
            c.radius = t.end_radius();
            const auto e = t.first_event(EventKind::EnergyNegative);
            if (e && e->r <= c.radius)
                c.evidence = "E < -" + fmt(o.energy_margin);
            else
                c.evidence = "u' = 0 at u = " + fmt(t.u(t.size() - 1)) + " in (0, b)";
            break;
        }
        case StopReason::RMax: {
            c.kind = ClassKind::Undetermined;
            c.radius = r_max;
            c.evidence = "no certificate before r_max";
            break;
        }
    }
    return c;
}

DecayFit decay_rate(const Trajectory& t) {
    if (t.first_event(EventKind::UZero))
        throw TailTooShort("decay_rate: trajectory crosses zero, no decaying tail");
    const double u0 = t.u(0);
    std::size_t first = t.size();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.u(i) > 0.0 && t.u(i) < 1e-4 * u0) {
            first = i;
            break;
        }
    }
    if (first + 2 >= t.size()) throw TailTooShort("decay_rate: no tail with u < 1e-4 u(0)");
    // Final decade of the tail: nonlinear corrections of order g(u)/u + g'(0)
    // are smallest there.
    const double u_end = t.u(t.size() - 1);
    while (first + 2 < t.size() && t.u(first) > 10.0 * u_end) ++first;
    const double r_lo = t.r(first), r_hi = t.end_radius();
    const double kappa0 = std::sqrt(-t.model().g_prime(0.0));
    // Require at least half a decay length of tail.
    if ((r_hi - r_lo) * kappa0 < 0.5) throw TailTooShort("decay_rate: tail window shorter than half a decay length");

    constexpr int M = 400;
    std::vector<double> rs(M), ys(M);
    for (int j = 0; j < M; ++j) {
        const double r = r_lo + (r_hi - r_lo) * j / (M - 1);
        const RadialSample s = t.sample(r);
        if (!(s.u > 0.0)) throw TailTooShort("decay_rate: u not positive in the tail window");
        rs[j] = r;
        ys[j] = s.u_prime / s.u;
    }
    const double nu = 0.5 * (t.dimension() - 2);
    auto model = [nu](double k, double r) {
        return -k * boost::math::cyl_bessel_k(nu + 1, k * r) / boost::math::cyl_bessel_k(nu, k * r);
    };
    auto loss = [&](double k) {
        double acc = 0.0;
        for (int j = 0; j < M; ++j) {
            const double e = ys[j] - model(k, rs[j]);
            acc += e * e;
        }
        return acc;
    };
    const auto best = boost::math::tools::brent_find_minima(loss, 0.2 * kappa0, 5.0 * kappa0, 52);
    DecayFit f;
    f.rate = -best.first;
    f.expected = -kappa0;
    f.deviation = f.rate - f.expected;
    f.r_lo = r_lo;
    f.r_hi = r_hi;
    f.samples = M;
    return f;
}

namespace {

Classification classify_escalating(const RadialProblem& p, const StructuralConstants& c, double d, double r_max,
                                   double tol, int doublings) {
    Classification cl;
    double r = r_max;
    for (int k = 0; k <= doublings; ++k, r *= 2.0) {
        cl = classify(p, c, d, r, tol);
        if (cl.kind != ClassKind::Undetermined) break;
    }
    return cl;
}

}  // namespace

GroundState find_ground_state(const RadialProblem& problem, const StructuralConstants& consts, double d_tol,
                              const ShootingOptions& opt) {
    if (!(d_tol >= 0.0)) throw PreconditionError("find_ground_state: d_tol must be non-negative");
    const double r_base = problem.default_r_max() * opt.r_max_factor;
    const double tol = opt.ode_tol;
    const double ceiling = std::isfinite(consts.b_tilde) ? consts.b_tilde * (1.0 - 1e-14) : kInfinity;

    GroundState gs;
    gs.dimension = problem.dimension;
    gs.model = problem.model;
    gs.consts = consts;
    gs.ode_tol = tol;

    double lo = consts.b;
    gs.certificate_P = classify_escalating(problem, consts, lo, r_base, tol, opt.r_max_doublings);
    if (gs.certificate_P.kind != ClassKind::StaysPositive)
        throw NoCrossingError("find_ground_state: d = b is not certified in P (" + gs.certificate_P.evidence + ")");

    if (!consts.zeta) throw NoCrossingError("find_ground_state: G never becomes positive, no zeta");
    double hi = std::min(std::max(*consts.zeta, 2.0 * consts.b), ceiling);
    bool found = false;
    for (int k = 0; k < opt.seed_budget; ++k) {
        const Classification c = classify_escalating(problem, consts, hi, r_base, tol, opt.r_max_doublings);
        if (c.kind == ClassKind::CrossesZero) {
            gs.certificate_N = c;
            found = true;
            break;
        }
        if (c.kind == ClassKind::StaysPositive) {
            lo = hi;
            gs.certificate_P = c;
        }
        if (hi >= ceiling) break;
        hi = std::min(2.0 * hi, ceiling);
    }
    if (!found)
        throw NoCrossingError("find_ground_state: no crossing height found up to " + fmt(hi));

    while (hi - lo > d_tol) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const Classification c = classify_escalating(problem, consts, mid, r_base, tol, opt.r_max_doublings);
        ++gs.iterations;
        if (c.kind == ClassKind::CrossesZero) {
            hi = mid;
            gs.certificate_N = c;
        } else if (c.kind == ClassKind::StaysPositive) {
            lo = mid;
            gs.certificate_P = c;
        } else {
            gs.converged = false;
            break;
        }
    }
    gs.d_P = lo;
    gs.d_N = hi;
    gs.d0 = 0.5 * (lo + hi);
    gs.r_max = std::max(gs.certificate_P.r_max, gs.certificate_N.r_max);

    // The profile at d0 is trusted while the two bracket shots agree.
    const Trajectory tp = integrate(problem, gs.d_P, gs.r_max, tol, false);
    const Trajectory tn = integrate(problem, gs.d_N, gs.r_max, tol, false);
    const Trajectory t0 = integrate(problem, gs.d0, gs.r_max, tol, true);
    const double common = std::min({tp.end_radius(), tn.end_radius(), t0.end_radius()});
    auto radius_at = [&](double separation) {
        for (std::size_t i = 1; i < t0.size(); ++i) {
            const double r = t0.r(i);
            if (r >= common) break;
            const double up = tp.sample(r).u, un = tn.sample(r).u;
            if (!(t0.u(i) > 0.0) || std::fabs(up - un) > separation * std::fabs(t0.u(i))) return t0.r(i - 1);
        }
        return common;
    };
    gs.trust_radius = radius_at(opt.trust_separation);
    gs.variation_radius = radius_at(opt.variation_separation);
    gs.trajectory = gs.trust_radius < t0.end_radius() ? t0.truncated(gs.trust_radius) : t0;
    gs.extended = gs.variation_radius < t0.end_radius() ? t0.truncated(gs.variation_radius) : t0;

    const auto zeros = gs.trajectory.event_radii(EventKind::DeltaZero);
    if (!zeros.empty()) gs.r_delta = zeros.front();
    gs.monotone = true;
    for (std::size_t i = 1; i < gs.trajectory.size(); ++i)
        if (!(gs.trajectory.u_prime(i) < 0.0)) {
            gs.monotone = false;
            break;
        }
    try {
        gs.decay = decay_rate(gs.trajectory);
    } catch (const TailTooShort&) {
        gs.decay.reset();
    }
    return gs;
}

}  // namespace elliptic
