#include "elliptic/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "elliptic/errors.hpp"

namespace elliptic {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

const ConditionResult& HypothesisReport::at(const std::string& label) const {
    for (const auto& c : conditions)
        if (c.label == label) return c;
    throw DomainError("hypothesis report has no condition " + label);
}

bool HypothesisReport::has(const std::string& label) const {
    return std::any_of(conditions.begin(), conditions.end(), [&](const auto& c) { return c.label == label; });
}

bool HypothesisReport::any_fail() const {
    return std::any_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.verdict == Verdict::Fail; });
}

bool HypothesisReport::any_undetermined() const {
    return std::any_of(conditions.begin(), conditions.end(),
                       [](const auto& c) { return c.verdict == Verdict::Undetermined; });
}

bool HypothesisReport::all_pass() const { return !any_fail() && !any_undetermined(); }

int HypothesisReport::exit_code() const {
    if (any_fail()) return 2;
    if (any_undetermined()) return 3;
    return 0;
}

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ConditionResult make(const std::string& label) {
    ConditionResult r;
    r.label = label;
    return r;
}

ConditionResult fail_at(ConditionResult r, double s, double v, std::string detail) {
    r.verdict = Verdict::Fail;
    r.witness = Witness{s, v};
    r.detail = std::move(detail);
    return r;
}

/// Grid points plus clusters at x(1 +- 10^-k) around the interesting abscissae.
std::vector<double> refined_points(const GridSpec& grid, std::initializer_list<double> anchors) {
    std::vector<double> pts = grid.points();
    for (double x : anchors) {
        if (!(x > 0.0) || !std::isfinite(x)) continue;
        for (int k = 2; k <= 9; ++k) {
            const double e = std::pow(10.0, -k);
            for (double y : {x * (1.0 - e), x * (1.0 + e)})
                if (y >= grid.lo && y <= grid.hi) pts.push_back(y);
        }
        if (x >= grid.lo && x <= grid.hi) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

bool near(double s, double x) { return std::isfinite(x) && std::fabs(s - x) <= 1e-10 * std::max(1.0, x); }

ConditionResult check_origin(const std::string& label, const SemilinearModel& m) {
    ConditionResult r = make(label);
    const double v0 = m.g(0.0), d0 = m.g_prime(0.0);
    r.margin = -d0;
    if (!std::isfinite(v0) || std::fabs(v0) > 1e-14)
        return fail_at(r, 0.0, v0, "value at 0 is " + fmt(v0) + ", not 0");
    if (!(d0 < 0.0)) return fail_at(r, 0.0, d0, "derivative at 0 is " + fmt(d0) + ", not negative");
    r.detail = "derivative at 0 = " + fmt(d0);
    return r;
}

ConditionResult check_signs(const std::string& label, const SemilinearModel& m, const StructuralConstants& c,
                            const std::vector<double>& pts) {
    ConditionResult r = make(label);
    double margin = kInfinity;
    for (double s : pts) {
        if (near(s, c.b) || near(s, c.b_tilde)) continue;
        const double expect = (s < c.b || s > c.b_tilde) ? -1.0 : 1.0;
        const double v = m.g(s);
        const double signed_v = expect * v;
        margin = std::min(margin, signed_v / (1.0 + std::fabs(s * m.g_prime(s))));
        if (!(signed_v > 0.0)) {
            r.margin = margin;
            return fail_at(r, s, v, "value " + fmt(v) + " at " + fmt(s) + " has the wrong sign");
        }
    }
    const double db = m.g_prime(c.b);
    margin = std::min(margin, db);
    if (!(db > 0.0)) {
        r.margin = margin;
        return fail_at(r, c.b, db, "derivative at the first positive zero is " + fmt(db));
    }
    if (std::isfinite(c.b_tilde)) {
        const double dt = m.g_prime(c.b_tilde);
        margin = std::min(margin, -dt);
        if (!(dt < 0.0)) {
            r.margin = margin;
            return fail_at(r, c.b_tilde, dt, "derivative at the second positive zero is " + fmt(dt));
        }
    }
    r.margin = margin;
    r.detail = std::isfinite(c.b_tilde) ? "zeros at " + fmt(c.b) + " and " + fmt(c.b_tilde)
                                        : "zero at " + fmt(c.b) + ", positive through the grid top";
    return r;
}

// Without a zeta the witness maximizes G(s)/s^4 over the positive range of g
// (or the whole grid when g has no positive range); the value is G itself.
ConditionResult check_primitive(const std::string& label, const SemilinearModel& m,
                                const std::optional<StructuralConstants>& c, const std::vector<double>& pts) {
    ConditionResult r = make(label);
    if (c && c->zeta) {
        r.margin = m.G(*c->zeta);
        if (r.margin > 0.0) {
            r.detail = "primitive " + fmt(r.margin) + " at " + fmt(*c->zeta);
            return r;
        }
        return fail_at(r, *c->zeta, r.margin, "primitive not positive at the recorded zeta");
    }
    const double lo = c ? c->b : 0.0, hi = c ? c->b_tilde : kInfinity;
    std::vector<double> cand;
    for (double s : pts)
        if (s > lo && s <= hi) cand.push_back(s);
    if (std::isfinite(hi)) cand.push_back(hi);
    double best = -kInfinity, where = cand.empty() ? 0.0 : cand.front();
    for (double s : cand) {
        const double v = m.G(s) / (s * s * s * s);
        if (v > best) {
            best = v;
            where = s;
        }
    }
    const double gw = m.G(where);
    r.margin = gw;
    return fail_at(r, where, gw, "primitive never positive; G = " + fmt(gw) + " at " + fmt(where));
}

struct Sampled {
    double s, k;
};

std::vector<Sampled> growth_samples(const SemilinearModel& m, const std::vector<double>& pts, double lo, double hi) {
    std::vector<Sampled> out;
    for (double s : pts) {
        if (s <= lo || s >= hi) continue;
        try {
            out.push_back({s, growth_function(m, s)});
        } catch (const PoleError&) {
        }
    }
    return out;
}

ConditionResult check_decreasing(const std::string& label, const SemilinearModel& m, const StructuralConstants& c,
                                 const std::vector<double>& pts) {
    ConditionResult r = make(label);
    const auto ks = growth_samples(m, pts, c.b, c.b_tilde);
    double worst = -kInfinity;
    std::size_t at = 0;
    for (std::size_t i = 1; i < ks.size(); ++i) {
        const double d = ks[i].k - ks[i - 1].k;
        if (d > worst) {
            worst = d;
            at = i;
        }
    }
    r.margin = ks.size() > 1 ? -worst : 0.0;
    if (ks.size() > 1 && worst > kMonotoneSlack)
        return fail_at(r, ks[at].s, ks[at].k,
                       "growth function rises from " + fmt(ks[at - 1].k) + " at " + fmt(ks[at - 1].s) + " to " +
                           fmt(ks[at].k) + " at " + fmt(ks[at].s));
    r.detail = std::to_string(ks.size()) + " samples";
    return r;
}

ConditionResult check_below_one(const std::string& label, const SemilinearModel& m, const StructuralConstants& c,
                                const std::vector<double>& pts) {
    ConditionResult r = make(label);
    const auto ks = growth_samples(m, pts, 0.0, c.b);
    double worst = -kInfinity, where = 0.0;
    for (const auto& k : ks)
        if (k.k > worst) {
            worst = k.k;
            where = k.s;
        }
    r.margin = ks.empty() ? 0.0 : 1.0 - worst;
    if (!ks.empty() && worst > 1.0 + 1e-12)
        return fail_at(r, where, worst, "growth function " + fmt(worst) + " exceeds 1 at " + fmt(where));
    r.detail = "max growth function below the first zero = " + fmt(worst);
    return r;
}

ConditionResult merge(const std::string& label, const ConditionResult& a, const ConditionResult& b) {
    ConditionResult r = make(label);
    r.margin = std::min(a.margin, b.margin);
    const ConditionResult* bad = a.verdict == Verdict::Fail ? &a : (b.verdict == Verdict::Fail ? &b : nullptr);
    if (bad) {
        r.verdict = Verdict::Fail;
        r.witness = bad->witness;
        r.detail = bad->detail;
    } else {
        r.detail = a.detail + "; " + b.detail;
    }
    return r;
}

/// Least-squares slope of ys against xs.
double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Growth at infinity. For N >= 3 the log-log slope of g is compared with
/// crit_power; for N = 2 the slope of log(log g) against log s is compared with
/// crit_exp (g below e^{alpha s^crit} for every alpha).
ConditionResult check_growth(const std::string& label, const SemilinearModel& m, const GridSpec& grid, int dim,
                             double crit_power, double crit_exp) {
    ConditionResult r = make(label);
    const double top = grid.hi;
    const double gt = m.g(top);
    if (!(gt > 0.0)) {
        r.margin = kInfinity;
        r.detail = "nonpositive at the grid top";
        return r;
    }
    std::vector<double> xs, ys;
    for (double s : grid.points(top / 100.0, top)) {
        const double v = m.g(s);
        if (!(v > 0.0)) continue;
        if (dim >= 3) {
            xs.push_back(std::log(s));
            ys.push_back(std::log(v));
        } else if (v > 1.0) {
            xs.push_back(std::log(s));
            ys.push_back(std::log(std::log(v)));
        }
    }
    if (dim == 2 && xs.size() < 2) {
        r.margin = kInfinity;
        r.detail = "bounded by 1 at the grid top";
        return r;
    }
    if (xs.size() < 2) {
        r.verdict = Verdict::Undetermined;
        r.detail = "too few positive samples in the top two decades";
        return r;
    }
    const double crit = dim >= 3 ? crit_power : crit_exp;
    const double sl = slope(xs, ys);
    r.margin = crit - sl;
    const std::string what = (dim >= 3 ? "log-log slope " : "log-log-log slope ") + fmt(sl) + " vs critical " + fmt(crit);
    if (std::fabs(sl - crit) <= kGrowthBand) {
        r.verdict = Verdict::Undetermined;
        r.detail = what + " (inside the undecided band)";
    } else if (sl > crit) {
        return fail_at(r, top, gt, what);
    } else {
        r.detail = what;
    }
    return r;
}

void check_consistency(const SemilinearModel& m, const StructuralConstants& c) {
    if (!(c.b > 0.0) || !(c.b_tilde > c.b))
        throw PreconditionError("check_semilinear: structural constants are not ordered 0 < b < b~");
    const double scale = 1.0 + std::fabs(c.b * m.g_prime(c.b));
    if (!(std::fabs(m.g(c.b)) <= 1e-8 * scale))
        throw PreconditionError("check_semilinear: g(b) = " + fmt(m.g(c.b)) + " is not a zero of this model");
    if (std::isfinite(c.b_tilde) &&
        !(std::fabs(m.g(c.b_tilde)) <= 1e-8 * (1.0 + std::fabs(c.b_tilde * m.g_prime(c.b_tilde)))))
        throw PreconditionError("check_semilinear: g(b~) is not a zero of this model");
    if (c.zeta && !(*c.zeta > c.b)) throw PreconditionError("check_semilinear: zeta is not above b");
}

double critical_power(int dim, double ell) {
    return dim >= 3 ? ((ell + 1.0) * dim + 2.0) / (dim - 2.0) : kInfinity;
}


// g with no usable sign change: the witness is the sampled maximum of g.
ConditionResult unstructured_signs(const std::string& label, const SemilinearModel& m,
                                   const std::vector<double>& pts, const std::string& why) {
    ConditionResult r = make(label);
    double best = -kInfinity, where = pts.front();
    for (double s : pts) {
        const double v = m.g(s);
        if (v > best) {
            best = v;
            where = s;
        }
    }
    r.margin = -kInfinity;
    return fail_at(r, where, best, why + "; sampled maximum " + fmt(best) + " at " + fmt(where));
}

}  // namespace

HypothesisReport check_semilinear(const SemilinearModel& model, const StructuralConstants& consts,
                                  const GridSpec& grid, int dimension) {
    if (dimension < 2) throw DomainError("check_semilinear: dimension must be at least 2");
    check_consistency(model, consts);
    HypothesisReport rep;
    rep.grid = grid;
    rep.dimension = dimension;
    const auto pts = refined_points(grid, {consts.b, consts.b_tilde, consts.s_star});
    rep.conditions.push_back(check_origin("G1", model));
    rep.conditions.push_back(check_signs("G2", model, consts, pts));
    rep.conditions.push_back(check_primitive("G3", model, consts, pts));
    rep.conditions.push_back(check_decreasing("G4", model, consts, pts));
    rep.conditions.push_back(check_below_one("G5", model, consts, pts));
    rep.conditions.push_back(check_growth("G6", model, grid, dimension, critical_power(dimension, 0.0), 2.0));
    return rep;
}

HypothesisReport check_semilinear(const SemilinearModel& model, const GridSpec& grid, int dimension) {
    if (dimension < 2) throw DomainError("check_semilinear: dimension must be at least 2");
    try {
        return check_semilinear(model, structural_constants(model, grid.hi), grid, dimension);
    } catch (const StructureError& e) {
        HypothesisReport rep;
        rep.grid = grid;
        rep.dimension = dimension;
        const auto pts = grid.points();
        rep.conditions.push_back(check_origin("G1", model));
        rep.conditions.push_back(unstructured_signs("G2", model, pts, e.what()));
        rep.conditions.push_back(check_primitive("G3", model, std::nullopt, pts));
        rep.conditions.push_back(check_growth("G6", model, grid, dimension, critical_power(dimension, 0.0), 2.0));
        return rep;
    }
}

namespace {

ConditionResult check_a_positive(const DiffusionModel& a, const std::vector<double>& pts) {
    ConditionResult r = make("A1");
    double lo = a.a(0.0), where = 0.0;
    for (double t : pts) {
        const double v = a.a(t);
        if (!std::isfinite(v) || !std::isfinite(a.a_prime(t)) || !std::isfinite(a.a_second(t)))
            return fail_at(r, t, v, "a or its derivatives not finite at " + fmt(t));
        if (v < lo) {
            lo = v;
            where = t;
        }
    }
    r.margin = lo;
    if (!(lo > 0.0)) return fail_at(r, where, lo, "a reaches " + fmt(lo) + " at " + fmt(where));
    r.detail = "inf a = " + fmt(lo) + " at " + fmt(where);
    return r;
}

ConditionResult check_a_monotone(const DiffusionModel& a, const std::vector<double>& pts) {
    ConditionResult r = make("A2");
    double lo = kInfinity, where = 0.0;
    for (double t : pts) {
        const double v = a.a_prime(t);
        if (v < lo) {
            lo = v;
            where = t;
        }
    }
    r.margin = lo;
    if (lo < -1e-12 * (1.0 + std::fabs(a.a(where))))
        return fail_at(r, where, lo, "a' = " + fmt(lo) + " at " + fmt(where));
    r.detail = "min a' = " + fmt(lo);
    return r;
}

double k_a(const DiffusionModel& a, double t) { return t * a.a_prime(t) / a.a(t); }

ConditionResult check_a_growth_split(const DiffusionModel& a, const StructuralConstants& hc,
                                     const std::vector<double>& pts) {
    ConditionResult r = make("A3");
    const double beta = hc.b;
    const double kb = k_a(a, beta);
    double margin = kInfinity;
    double prev_t = beta, prev_k = kb;
    for (double t : pts) {
        if (t <= beta || t >= hc.b_tilde) continue;
        const double k = k_a(a, t);
        margin = std::min(margin, k - prev_k);
        if (k - prev_k < -kMonotoneSlack) {
            r.margin = margin;
            return fail_at(r, t, k,
                           "K_a falls from " + fmt(prev_k) + " at " + fmt(prev_t) + " to " + fmt(k) + " at " + fmt(t));
        }
        prev_t = t;
        prev_k = k;
    }
    for (double t : pts) {
        if (t >= beta) break;
        const double k = k_a(a, t);
        margin = std::min(margin, kb - k);
        if (k > kb + kMonotoneSlack) {
            r.margin = margin;
            return fail_at(r, t, k, "K_a = " + fmt(k) + " below beta exceeds K_a(beta) = " + fmt(kb));
        }
    }
    r.margin = margin;
    r.detail = "K_a(beta) = " + fmt(kb);
    return r;
}

ConditionResult check_a_limit(const DiffusionModel& a, const GridSpec& grid) {
    ConditionResult r = make("A4");
    const double ell = a.ell();
    const double T = grid.hi;
    const double ts[3] = {T / 100.0, T / 10.0, T};
    double q[3];
    for (int i = 0; i < 3; ++i) {
        q[i] = a.a(ts[i]) / std::pow(ts[i], ell);
        if (!(q[i] > 0.0) || !std::isfinite(q[i]))
            return fail_at(r, ts[i], q[i], "a/t^ell = " + fmt(q[i]) + " at " + fmt(ts[i]));
    }
    const double d1 = q[1] - q[0], d2 = q[2] - q[1];
    double limit = q[2];
    if (std::fabs(d2) > 1e-12 * q[2]) {
        const double ratio = d2 / d1;
        if (std::fabs(ratio) >= 0.9 || !std::isfinite(ratio)) {
            if (d1 > 0.0 && d2 > 0.0) {
                r.margin = -q[2];
                return fail_at(r, T, q[2], "a/t^ell keeps growing: " + fmt(q[0]) + ", " + fmt(q[1]) + ", " + fmt(q[2]));
            }
            r.verdict = Verdict::Undetermined;
            r.margin = q[2];
            r.detail = "a/t^ell not converged over the top two decades";
            return r;
        }
        limit = q[2] - d2 * d2 / (d2 - d1);
    }
    r.margin = limit;
    if (!(limit > 1e-3 * std::max({q[0], q[1], q[2]})))
        return fail_at(r, T, q[2], "a/t^ell tends to " + fmt(limit) + ", no positive limit");
    r.detail = "estimated a_inf = " + fmt(limit);
    if (a.a_inf() && std::fabs(*a.a_inf() - limit) > 1e-3 * *a.a_inf())
        r.detail += "; declared a_inf = " + fmt(*a.a_inf()) + " disagrees";
    return r;
}

}  // namespace

HypothesisReport check_quasilinear(const DiffusionModel& a, const SemilinearModel& h, const GridSpec& grid,
                                   int dimension) {
    if (dimension < 2) throw DomainError("check_quasilinear: dimension must be at least 2");
    HypothesisReport rep;
    rep.grid = grid;
    rep.dimension = dimension;
    const double ell = a.ell();
    std::optional<StructuralConstants> hc;
    std::string why;
    try {
        hc = structural_constants(h, grid.hi);
    } catch (const StructureError& e) {
        why = e.what();
    }
    const auto pts = hc ? refined_points(grid, {hc->b, hc->b_tilde, hc->s_star}) : grid.points();
    rep.conditions.push_back(check_origin("H1", h));
    if (hc) {
        rep.conditions.push_back(check_signs("H2", h, *hc, pts));
        rep.conditions.push_back(check_primitive("H3", h, hc, pts));
        rep.conditions.push_back(
            merge("H4", check_decreasing("H4", h, *hc, pts), check_below_one("H4", h, *hc, pts)));
    } else {
        rep.conditions.push_back(unstructured_signs("H2", h, pts, why));
        rep.conditions.push_back(check_primitive("H3", h, std::nullopt, pts));
    }
    rep.conditions.push_back(check_growth("H5", h, grid, dimension, critical_power(dimension, ell), ell + 2.0));
    rep.conditions.push_back(check_a_positive(a, pts));
    rep.conditions.push_back(check_a_monotone(a, pts));
    if (hc) rep.conditions.push_back(check_a_growth_split(a, *hc, pts));
    rep.conditions.push_back(check_a_limit(a, grid));
    return rep;
}

}  // namespace elliptic
