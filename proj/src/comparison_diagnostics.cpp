#include "elliptic/comparison_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "elliptic/dopri5.hpp"
#include "elliptic/errors.hpp"

namespace elliptic {

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

double SampledFunction::operator()(double x) const {
    if (r.empty() || x < r.front() || x > r.back())
        throw DomainError("SampledFunction: " + fmt(x) + " outside the sampled range");
    auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t k = it == r.end() ? r.size() - 2 : static_cast<std::size_t>(it - r.begin()) - 1;
    const double h = r[k + 1] - r[k];
    if (h == 0.0) return value[k];
    const double t = (x - r[k]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * value[k] + h10 * h * slope[k] + h01 * value[k + 1] + h11 * h * slope[k + 1];
}

double SampledFunction::derivative(double x) const {
    if (r.empty() || x < r.front() || x > r.back())
        throw DomainError("SampledFunction: " + fmt(x) + " outside the sampled range");
    auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t k = it == r.end() ? r.size() - 2 : static_cast<std::size_t>(it - r.begin()) - 1;
    const double h = r[k + 1] - r[k];
    if (h == 0.0) return slope[k];
    const double t = (x - r[k]) / h;
    const double d00 = 6 * t * (t - 1) / h, d10 = (1 - t) * (1 - 3 * t);
    const double d01 = -d00, d11 = t * (3 * t - 2);
    return d00 * value[k] + d10 * slope[k] + d01 * value[k + 1] + d11 * slope[k + 1];
}

std::vector<double> SampledFunction::zeros(double lo, double hi) const {
    std::vector<double> out;
    lo = std::max(lo, r.front());
    hi = std::min(hi, r.back());
    if (!(hi > lo)) return out;
    std::vector<double> xs{lo};
    for (double x : r)
        if (x > lo && x < hi) xs.push_back(x);
    xs.push_back(hi);
    double prev = (*this)(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double cur = (*this)(xs[i]);
        if (cur == 0.0 && i + 1 < xs.size()) {
            out.push_back(xs[i]);
        } else if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
            double a = xs[i - 1], b = xs[i], fa = prev;
            for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, b); ++k) {
                const double m = 0.5 * (a + b);
                const double fm = (*this)(m);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            out.push_back(0.5 * (a + b));
        }
        if (cur != 0.0) prev = cur;
    }
    return out;
}

std::vector<double> dense_radii(const Trajectory& t, int oversample) {
    std::vector<double> out;
    const int m = std::max(1, oversample);
    out.reserve(t.size() * static_cast<std::size_t>(m));
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double a = t.r(i), b = t.r(i + 1);
        for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * k / m);
    }
    out.push_back(t.end_radius());
    return out;
}

namespace {

double v_value(const RadialSample& s, double lambda) { return s.r * s.u_prime + lambda * s.u; }

double v_slope(const Trajectory& t, const RadialSample& s, double lambda) {
    return (lambda + 2.0 - t.dimension()) * s.u_prime - s.r * t.model().g(s.u);
}

}  // namespace

SampledFunction v_lambda_profile(const Trajectory& t, double lambda, int oversample) {
    SampledFunction f;
    for (double r : dense_radii(t, oversample)) {
        const RadialSample s = t.sample(r);
        f.r.push_back(r);
        f.value.push_back(v_value(s, lambda));
        f.slope.push_back(v_slope(t, s, lambda));
    }
    return f;
}

double v_lambda_second(const Trajectory& t, double lambda, double r) {
    const RadialSample s = t.sample(r);
    const SemilinearModel& m = t.model();
    const double v = v_value(s, lambda), vp = v_slope(t, s, lambda);
    return i_function(m, s.u, lambda) - (t.dimension() - 1.0) / r * vp - m.g_prime(s.u) * v;
}

SampledFunction theta_profile(const Trajectory& t, int oversample) {
    SampledFunction f;
    const int n = t.dimension();
    for (double r : dense_radii(t, oversample)) {
        const RadialSample s = t.sample(r);
        if (!(s.u > 0.0)) throw DomainError("theta_profile: u = " + fmt(s.u) + " at r = " + fmt(r));
        const double q = s.u_prime / s.u;
        f.r.push_back(r);
        f.value.push_back(-r * q);
        f.slope.push_back(((n - 2.0) * s.u_prime + r * t.model().g(s.u)) / s.u + r * q * q);
    }
    return f;
}

std::vector<double> v_lambda_zeros(const Trajectory& t, double lambda, double lo, double hi, int oversample) {
    std::vector<double> out;
    auto v = [&](double r) { return v_value(t.sample(r), lambda); };
    std::vector<double> xs{std::max(lo, t.start_radius())};
    for (double r : dense_radii(t, oversample))
        if (r > xs.front() && r < hi) xs.push_back(r);
    xs.push_back(std::min(hi, t.end_radius()));
    double prev = v(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double cur = v(xs[i]);
        if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) {
            if (cur == 0.0 && i + 1 == xs.size()) break;
            double a = xs[i - 1], b = xs[i], fa = prev;
            for (int k = 0; k < 200 && b - a > 1e-14 * std::max(1.0, b); ++k) {
                const double m = 0.5 * (a + b);
                const double fm = v(m);
                if (fm != 0.0 && (fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            out.push_back(0.5 * (a + b));
        }
        if (cur != 0.0) prev = cur;
    }
    return out;
}

bool KeyLemmaReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ClauseCheck& c) { return c.pass; });
}

const ClauseCheck& KeyLemmaReport::at(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw DomainError("key lemma report has no clause " + name);
}

namespace {

/// First sample in (lo, hi) where sign * f(r) <= 0, skipping a relative
/// neighbourhood of the endpoints.
std::optional<std::pair<double, double>> sign_violation(const std::vector<double>& rs,
                                                        const std::function<double(double)>& f, double lo,
                                                        double hi, double sign) {
    const double pad_lo = lo * (1.0 + 1e-9) + 1e-12, pad_hi = hi * (1.0 - 1e-9);
    for (double r : rs) {
        if (r <= pad_lo || r >= pad_hi) continue;
        const double v = f(r);
        if (!(sign * v > 0.0)) return std::pair{r, v};
    }
    return std::nullopt;
}

}  // namespace

KeyLemmaReport key_lemma_report(const GroundState& ground, const StructuralConstants& consts) {
    if (!ground.r_delta) throw PreconditionError("key_lemma_report: delta has no zero on the trusted profile");
    const Trajectory& t = ground.trajectory;
    const SemilinearModel& m = t.model();
    KeyLemmaReport rep;
    rep.r_delta = *ground.r_delta;
    rep.end_radius = t.end_radius();
    const double rd = rep.r_delta, end = rep.end_radius;
    const RadialSample at_rd = t.sample(rd);
    rep.u_at_r_delta = at_rd.u;
    const std::vector<double> rs = dense_radii(t, 10);
    auto add = [&rep](std::string name, bool pass, double r, double v, std::string detail) {
        rep.checks.push_back({std::move(name), pass, r, v, std::move(detail)});
    };

    add("b < u(r_delta)", at_rd.u > consts.b, rd, at_rd.u, "u(r_delta) = " + fmt(at_rd.u) + ", b = " + fmt(consts.b));
    if (std::isfinite(consts.s_star))
        add("u(r_delta) < s*", at_rd.u < consts.s_star, rd, at_rd.u, "s* = " + fmt(consts.s_star));
    else
        add("u(r_delta) < s*", true, rd, at_rd.u, "s* = inf");

    rep.lambda0 = -rd * at_rd.u_prime / at_rd.u;
    bool have_under = true;
    try {
        rep.lambda_under = lambda_map(m, consts, at_rd.u);
    } catch (const DomainError& e) {
        have_under = false;
        rep.lambda_under = std::numeric_limits<double>::quiet_NaN();
        add("lambda_under defined", false, rd, at_rd.u, e.what());
    }
    const double lu = rep.lambda_under, l0 = rep.lambda0;
    const SampledFunction theta = theta_profile(t, 10);
    if (have_under) {
        add("lambda_under < lambda0", lu < l0, rd, l0 - lu, "lambda_under = " + fmt(lu) + ", lambda0 = " + fmt(l0));

        // At lambda_under: v has one zero, inside (0, r_delta).
        const auto z = v_lambda_zeros(t, lu, t.start_radius(), end);
        const bool one = z.size() == 1 && z[0] < rd;
        if (!z.empty()) rep.r_under = z[0];
        std::string detail = std::to_string(z.size()) + " zeros";
        bool pass = one;
        double wr = z.empty() ? end : z.back(), wv = 0.0;
        if (one) {
            auto v = [&](double r) { return v_value(t.sample(r), lu); };
            if (auto bad = sign_violation(rs, v, t.start_radius(), z[0], 1.0)) {
                pass = false;
                std::tie(wr, wv) = *bad;
                detail += "; not positive before r_under";
            } else if (auto bad2 = sign_violation(rs, v, z[0], end, -1.0)) {
                pass = false;
                std::tie(wr, wv) = *bad2;
                detail += "; not negative after r_under";
            }
        }
        add("v_lambda_under unique zero in (0, r_delta)", pass, wr, wv, detail);

        if (rep.r_under) {
            auto f = [&](double r) { return theta(r) - lu; };
            const auto bad = sign_violation(theta.r, f, *rep.r_under, end, 1.0);
            add("theta > lambda_under after r_under", !bad, bad ? bad->first : 0.0, bad ? bad->second : 0.0, "");
        }
    }

    // lambda_bar: double from 2 lambda0 until v > 0 on [0, r_delta].
    {
        double lb = 2.0 * l0;
        bool found = false;
        for (int k = 0; k <= 40; ++k, lb *= 2.0) {
            bool positive = true;
            for (double r : rs) {
                if (r > rd) break;
                if (!(v_value(t.sample(r), lb) > 0.0)) {
                    positive = false;
                    break;
                }
            }
            if (positive && v_value(at_rd, lb) > 0.0) {
                found = true;
                rep.lambda_bar_doublings = k;
                break;
            }
        }
        rep.lambda_bar = lb;
        add("v_lambda_bar > 0 on [0, r_delta]", found, rd, v_value(at_rd, lb),
            "lambda_bar = " + fmt(lb) + " after " + std::to_string(rep.lambda_bar_doublings) + " doublings");
        add("lambda0 < lambda_bar", l0 < lb, rd, lb - l0, "");
    }

    // At lambda_bar: exactly one zero r_bar in (r_delta, R) with v' < 0.
    {
        const double lb = rep.lambda_bar;
        const auto z = v_lambda_zeros(t, lb, rd, end);
        bool pass = z.size() == 1;
        std::string detail = std::to_string(z.size()) + " zeros in (r_delta, end)";
        double wr = z.empty() ? end : z[0], wv = 0.0;
        if (pass) {
            rep.r_bar = z[0];
            const RadialSample s = t.sample(z[0]);
            wv = v_slope(t, s, lb);
            if (!(wv < 0.0)) {
                pass = false;
                detail += "; v' = " + fmt(wv) + " at r_bar";
            }
            auto v = [&](double r) { return v_value(t.sample(r), lb); };
            if (auto bad = sign_violation(rs, v, rd, z[0], 1.0)) {
                pass = false;
                std::tie(wr, wv) = *bad;
                detail += "; not positive on (r_delta, r_bar)";
            } else if (auto bad2 = sign_violation(rs, v, z[0], end, -1.0)) {
                pass = false;
                std::tie(wr, wv) = *bad2;
                detail += "; not negative after r_bar";
            }
        }
        add("v_lambda_bar unique zero in (r_delta, R)", pass, wr, wv, detail);
    }

    // At lambda0.
    {
        const double v0 = v_value(at_rd, l0);
        add("v_lambda0(r_delta) = 0", std::fabs(v0) <= 1e-10 * (1.0 + l0 * at_rd.u), rd, v0, "");
        auto v = [&](double r) { return v_value(t.sample(r), l0); };
        const auto bad = sign_violation(rs, v, rd, end, -1.0);
        add("v_lambda0 < 0 on (r_delta, R)", !bad, bad ? bad->first : end, bad ? bad->second : v(end), "");
        const double vp = v_slope(t, at_rd, l0);
        add("v_lambda0'(r_delta) < 0", vp < 0.0, rd, vp, "");
    }

    // theta' > 0 on (r_delta, r_bar].
    if (rep.r_bar) {
        std::optional<std::pair<double, double>> bad;
        for (std::size_t i = 0; i < theta.r.size() && !bad; ++i) {
            const double r = theta.r[i];
            if (r <= rd * (1.0 + 1e-9) || r > *rep.r_bar) continue;
            if (!(theta.slope[i] > 0.0)) bad = std::pair{r, theta.slope[i]};
        }
        if (!bad && !(theta.derivative(*rep.r_bar) > 0.0)) bad = std::pair{*rep.r_bar, theta.derivative(*rep.r_bar)};
        add("theta' > 0 on (r_delta, r_bar]", !bad, bad ? bad->first : *rep.r_bar,
            bad ? bad->second : theta.derivative(*rep.r_bar), "");
    }

    // A tangential zero after r_delta must have v'' = I(u, lambda) > 0.
    {
        int tangential = 0;
        bool pass = true;
        double wr = 0.0, wv = 0.0;
        for (double lam : {lu, l0, rep.lambda_bar}) {
            if (!(lam > 0.0)) continue;
            for (double z : v_lambda_zeros(t, lam, rd * (1.0 + 1e-9), end)) {
                const RadialSample s = t.sample(z);
                if (std::fabs(v_slope(t, s, lam)) > 1e-10) continue;
                ++tangential;
                const double v2 = v_lambda_second(t, lam, z);
                if (!(v2 > 0.0)) {
                    pass = false;
                    wr = z;
                    wv = v2;
                }
            }
        }
        add("tangential zeros after r_delta turn upward", pass, wr, wv,
            std::to_string(tangential) + " tangential zeros");
    }
    return rep;
}

SampledFunction solve_linear_radial(const std::function<double(double)>& q, int n, double r_start, double y,
                                    double y_prime, double r_end, double tol) {
    if (n < 1) throw DomainError("solve_linear_radial: dimension must be positive");
    if (!(r_end > r_start) || r_start < 0.0) throw DomainError("solve_linear_radial: need 0 <= r_start < r_end");
    double r0 = r_start;
    if (r_start == 0.0) {
        r0 = 1e-6 * std::min(1.0, r_end);
        const double q0 = q(0.0);
        y_prime = -q0 * y * r0 / n;
        y = y * (1.0 - q0 * r0 * r0 / (2.0 * n));
    }
    using S = Dopri5<2>::State;
    auto rhs = [&q, n](double r, const S& s, S& ds) {
        ds[0] = s[1];
        ds[1] = -(n - 1.0) / r * s[1] - q(r) * s[0];
    };
    Dopri5<2> st(rhs, r0, S{y, y_prime}, tol, tol, 1e-3 * (r_end - r0));
    st.set_max_step((r_end - r0) / 400.0);
    SampledFunction f;
    f.r.push_back(r0);
    f.value.push_back(y);
    f.slope.push_back(y_prime);
    while (st.t() < r_end) {
        st.step(r_end);
        const auto& d = st.last_step();
        for (int k = 1; k < 10; ++k) {
            const double r = d.t0 + d.h * k / 10.0;
            f.r.push_back(r);
            f.value.push_back(d.value(0, r));
            f.slope.push_back(d.value(1, r));
        }
        f.r.push_back(st.t());
        f.value.push_back(st.y()[0]);
        f.slope.push_back(st.y()[1]);
    }
    return f;
}

bool sturm_check(const SampledFunction& U, const SampledFunction& V, const std::function<double(double)>& g_coef,
                 const std::function<double(double)>& G_coef, double mu, double nu) {
    if (!(nu > mu) || mu < 0.0) throw PreconditionError("sturm_check: need 0 <= mu < nu");
    const double lo = std::max(mu, std::max(U.front(), V.front()));
    if (nu > U.back() || nu > V.back()) throw PreconditionError("sturm_check: samples do not cover (mu, nu)");
    if (mu > 0.0 && (mu < U.front() || mu < V.front()))
        throw PreconditionError("sturm_check: samples do not cover (mu, nu)");

    std::vector<double> xs;
    for (int k = 1; k < 1000; ++k) xs.push_back(mu + (nu - mu) * k / 1000.0);
    for (double x : U.r)
        if (x > mu && x < nu) xs.push_back(x);
    bool strict_somewhere = false;
    double u_max = 0.0;
    for (double x : xs) {
        const double g = g_coef(x), G = G_coef(x);
        const double slack = 1e-12 * (1.0 + std::fabs(g));
        if (G < g - slack)
            throw PreconditionError("sturm_check: G_coef < g_coef at r = " + fmt(x));
        if (G > g + slack) strict_somewhere = true;
        if (x >= lo) u_max = std::max(u_max, std::fabs(U(x)));
    }
    if (!strict_somewhere) throw PreconditionError("sturm_check: G_coef coincides with g_coef on (mu, nu)");
    if (!(u_max > 0.0)) throw PreconditionError("sturm_check: U vanishes identically");

    const double ztol = 1e-8 * u_max;
    if (std::fabs(U(nu)) > ztol) throw PreconditionError("sturm_check: U(nu) = " + fmt(U(nu)) + " is not a zero");
    if (mu > 0.0) {
        if (std::fabs(U(mu)) > ztol) throw PreconditionError("sturm_check: U(mu) = " + fmt(U(mu)) + " is not a zero");
    } else {
        // Regular solutions started at the Taylor radius have slopes O(r0) there.
        const double stol = 1e-4 * u_max;
        if (std::fabs(U.derivative(U.front())) > stol || std::fabs(V.derivative(V.front())) > stol * 
            std::max(1.0, std::fabs(V(V.front())) / u_max))
            throw PreconditionError("sturm_check: case mu = 0 needs U'(0) = V'(0) = 0");
    }
    const double pad = 1e-12 * std::max(1.0, nu);
    for (double z : V.zeros(lo, nu))
        if (z > mu + pad && z < nu - pad) return true;
    return false;
}

}  // namespace elliptic
