#include "elliptic/dual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "elliptic/dopri5.hpp"
#include "elliptic/errors.hpp"
#include "elliptic/expression.hpp"
#include "elliptic/roots.hpp"

namespace elliptic {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

DiffusionModel::DiffusionModel(std::string name, Fn a, Fn a_prime, Fn a_second, double ell,
                               std::optional<double> a_inf, std::optional<FamilyTag> tag)
    : name_(std::move(name)),
      a_(std::move(a)),
      a1_(std::move(a_prime)),
      a2_(std::move(a_second)),
      ell_(ell),
      a_inf_(a_inf),
      tag_(std::move(tag)) {}

DiffusionModel mnls_diffusion(double kappa) {
    return DiffusionModel(
        "mnls(kappa=" + fmt(kappa) + ")", [kappa](double t) { return 1.0 + 2.0 * kappa * t * t; },
        [kappa](double t) { return 4.0 * kappa * t; }, [kappa](double) { return 4.0 * kappa; }, 2.0,
        2.0 * kappa, FamilyTag{"mnls", {{"kappa", kappa}}});
}

DiffusionModel constant_diffusion(double ell) {
    return DiffusionModel(
        "constant", [](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }, ell,
        std::nullopt, FamilyTag{"constant", {{"ell", ell}}});
}

DiffusionModel two_power_diffusion(double l1, double l2) {
    return DiffusionModel(
        "two_power(l1=" + fmt(l1) + ",l2=" + fmt(l2) + ")",
        [l1, l2](double t) { return 1.0 + std::pow(t, l1) + std::pow(t, l2); },
        [l1, l2](double t) {
            if (t == 0.0) return 0.0;
            return l1 * std::pow(t, l1 - 1.0) + l2 * std::pow(t, l2 - 1.0);
        },
        [l1, l2](double t) {
            if (t == 0.0) return 0.0;
            return l1 * (l1 - 1.0) * std::pow(t, l1 - 2.0) + l2 * (l2 - 1.0) * std::pow(t, l2 - 2.0);
        },
        l2, 1.0, FamilyTag{"two_power", {{"l1", l1}, {"l2", l2}}});
}

DiffusionModel gaussian_diffusion(double c) {
    return DiffusionModel(
        "gaussian(c=" + fmt(c) + ")", [c](double t) { return t * t + std::exp(-c * t * t); },
        [c](double t) { return 2.0 * t - 2.0 * c * t * std::exp(-c * t * t); },
        [c](double t) { return 2.0 + (4.0 * c * c * t * t - 2.0 * c) * std::exp(-c * t * t); }, 2.0, 1.0,
        FamilyTag{"gaussian", {{"c", c}}});
}

DiffusionModel builtin_diffusion(std::string_view family, const std::map<std::string, double>& params) {
    std::set<std::string> allowed;
    std::map<std::string, double> v;
    if (family == "mnls") {
        allowed = {"kappa"};
        v["kappa"] = 1.0;
    } else if (family == "constant") {
        allowed = {"ell"};
        v["ell"] = 2.0;
    } else if (family == "two_power") {
        allowed = {"l1", "l2"};
        v["l1"] = 1.0;
        v["l2"] = 2.0;
    } else if (family == "gaussian") {
        allowed = {"c"};
        v["c"] = 1.0;
    } else {
        throw ConfigError("unknown diffusion family '" + std::string(family) + "'");
    }
    for (const auto& [key, value] : params) {
        if (!allowed.count(key))
            throw ConfigError("diffusion family '" + std::string(family) + "' has no parameter '" + key + "'");
        v[key] = value;
    }
    if (family == "mnls") return mnls_diffusion(v["kappa"]);
    if (family == "constant") return constant_diffusion(v["ell"]);
    if (family == "two_power") return two_power_diffusion(v["l1"], v["l2"]);
    return gaussian_diffusion(v["c"]);
}

DiffusionModel expression_diffusion(std::string_view a, std::string_view a_prime, std::string_view a_second,
                                    double ell, std::optional<double> a_inf) {
    auto ea = std::make_shared<const Expression>(Expression::parse(a, "t"));
    auto e1 = std::make_shared<const Expression>(Expression::parse(a_prime, "t"));
    auto e2 = std::make_shared<const Expression>(Expression::parse(a_second, "t"));
    return DiffusionModel(
        "expr(" + std::string(a) + ")", [ea](double t) { return (*ea)(t); }, [e1](double t) { return (*e1)(t); },
        [e2](double t) { return (*e2)(t); }, ell, a_inf);
}

// ---------------------------------------------------------------------------

DualTransform::DualTransform(std::shared_ptr<const DiffusionModel> a, double s_max, double tol)
    : a_(std::move(a)), tol_(tol) {
    if (!a_) throw PreconditionError("DualTransform: null diffusion model");
    if (!(s_max > 0.0)) throw PreconditionError("DualTransform: s_max must be positive");
    const double a0 = a_->a(0.0);
    if (!(a0 > 0.0)) throw DomainError("DualTransform: a(0) must be positive");
    s_.push_back(0.0);
    f_.push_back(0.0);
    fp_.push_back(1.0 / std::sqrt(a0));
    fpp_.push_back(-a_->a_prime(0.0) / (2.0 * a0 * a0));
    integrate_to(s_max);
}

void DualTransform::integrate_to(double s_new) {
    if (s_new <= s_.back()) return;
    const DiffusionModel& am = *a_;
    using State = Dopri5<1>::State;
    auto rhs = [&am](double, const State& y, State& dy) {
        const double a = am.a(y[0]);
        if (!(a > 0.0) || !std::isfinite(a))
            throw DomainError("DualTransform: a(f) = " + fmt(a) + " at f = " + fmt(y[0]));
        dy[0] = 1.0 / std::sqrt(a);
    };
    const double h0 = std::max(1e-8, 1e-8 * s_.back());
    Dopri5<1> st(rhs, s_.back(), State{f_.back()}, tol_, 1e-3 * tol_, h0);
    while (st.t() < s_new) {
        st.step(s_new);
        const double f = st.y()[0];
        const double a = am.a(f);
        s_.push_back(st.t());
        f_.push_back(f);
        fp_.push_back(1.0 / std::sqrt(a));
        fpp_.push_back(-am.a_prime(f) / (2.0 * a * a));
    }
}

DualTransform DualTransform::extended(double s_new) const {
    DualTransform t = *this;
    t.integrate_to(s_new);
    return t;
}

std::size_t DualTransform::segment(double s) const {
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t k = static_cast<std::size_t>(it - s_.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, s_.size() - 2);
}

double DualTransform::interpolate(std::size_t k, double s) const {
    const double h = s_[k + 1] - s_[k];
    const double t = (s - s_[k]) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 0.5 * (t3 - 2 * t4 + t5);
    return f_[k] * h0 + h * fp_[k] * h1 + h * h * fpp_[k] * h2 + f_[k + 1] * h3 + h * fp_[k + 1] * h4 +
           h * h * fpp_[k + 1] * h5;
}

double DualTransform::f(double s) const {
    if (s < 0.0) return -f(-s);
    if (s > s_.back()) throw RangeExceeded("DualTransform: s = " + fmt(s) + " beyond table end " + fmt(s_.back()), s);
    return interpolate(segment(s), s);
}

double DualTransform::f_prime(double s) const { return 1.0 / std::sqrt(a_->a(f(s))); }

double DualTransform::f_second(double s) const {
    const double v = f(s);
    const double a = a_->a(v);
    return -a_->a_prime(v) / (2.0 * a * a);
}

double DualTransform::inverse(double t) const {
    if (t < 0.0) return -inverse(-t);
    if (t > f_.back()) throw RangeExceeded("DualTransform: f^{-1}(" + fmt(t) + ") beyond table", kInfinity);
    auto it = std::upper_bound(f_.begin(), f_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - f_.begin());
    k = k == 0 ? 0 : k - 1;
    k = std::min(k, f_.size() - 2);
    auto resid = [this, k, t](double s) { return interpolate(k, s) - t; };
    return bracketed_root(resid, s_[k], s_[k + 1], 1e-15);
}

std::shared_ptr<const DualTransform> solve_f(const DiffusionModel& a, double s_max, double tol) {
    return std::make_shared<const DualTransform>(std::make_shared<const DiffusionModel>(a), s_max, tol);
}

double sqrt_a_integral(const DiffusionModel& a, double t) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&a](double x) { return std::sqrt(a.a(x)); };
    // Split on a geometric mesh so large t keeps relative accuracy.
    double acc = 0.0, lo = 0.0;
    double hi = std::min(t, 1.0);
    while (lo < t) {
        acc += gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-13);
        lo = hi;
        hi = std::min(t, 2.0 * hi);
    }
    return acc;
}

SemilinearModel dual_nonlinearity(const SemilinearModel& h, std::shared_ptr<const DualTransform> tr) {
    auto hm = std::make_shared<const SemilinearModel>(h);
    std::optional<FamilyTag> tag = FamilyTag{"dual", {}};
    return SemilinearModel(
        "dual[" + tr->diffusion().name() + "](" + h.name() + ")",
        [hm, tr](double s) {
            const double f = tr->f(s);
            return hm->g(f) / std::sqrt(tr->diffusion().a(f));
        },
        [hm, tr](double s) {
            const double f = tr->f(s);
            const DiffusionModel& a = tr->diffusion();
            const double av = a.a(f);
            return hm->g_prime(f) / av - hm->g(f) * a.a_prime(f) / (2.0 * av * av);
        },
        [hm, tr](double s) { return hm->G(tr->f(s)); }, std::move(tag));
}

StructuralConstants dual_constants(const SemilinearModel& dual, const StructuralConstants& hc,
                                   const DualTransform& tr, double search_bound) {
    StructuralConstants direct = structural_constants(dual, search_bound);
    StructuralConstants c = direct;
    c.b = tr.inverse(hc.b);
    if (std::isfinite(hc.b_tilde)) c.b_tilde = tr.inverse(hc.b_tilde);
    if (hc.zeta && *hc.zeta <= tr.f_max()) c.zeta = tr.inverse(*hc.zeta);
    return c;
}

std::vector<double> GridSpec::points(double a, double b) const {
    const double l = std::max(lo, a), u = std::min(hi, b);
    std::vector<double> out;
    if (!(u > l)) return out;
    const double step = std::log(10.0) / per_decade;
    const double la = std::log(l), lb = std::log(u);
    const auto n = static_cast<std::size_t>(std::ceil((lb - la) / step));
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out.push_back(std::exp(std::min(lb, la + step * static_cast<double>(i))));
    // exp(log(x)) may round past the ends.
    out.front() = l;
    out.back() = u;
    for (auto& x : out) x = std::clamp(x, l, u);
    return out;
}

PhiCheck phi_monotone_check(const DiffusionModel& a, double beta, const GridSpec& grid) {
    if (!(beta > 0.0)) throw PreconditionError("phi_monotone_check: beta must be positive");
    using boost::math::quadrature::gauss_kronrod;
    const auto pts = grid.points(beta);
    PhiCheck r;
    if (pts.size() < 2) return r;
    auto sq = [&a](double x) { return std::sqrt(a.a(x)); };
    double integral = sqrt_a_integral(a, pts[0]);
    double prev = pts[0] * sq(pts[0]) / integral;
    double worst = kInfinity;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        integral += gauss_kronrod<double, 15>::integrate(sq, pts[i - 1], pts[i], 0, 1e-13);
        const double phi = pts[i] * sq(pts[i]) / integral;
        const double margin = phi - prev + 1e-10;
        if (margin < worst) {
            worst = margin;
            if (margin < 0.0 && r.pass) {
                r.pass = false;
                r.witness = pts[i];
            }
        }
        prev = phi;
    }
    r.worst_margin = worst;
    return r;
}

// ---------------------------------------------------------------------------

QuasilinearSolution::Physical QuasilinearSolution::physical(double r) const {
    const RadialSample v = ground.trajectory.sample(r);
    const double vpp = ground.trajectory.u_second_derivative(r);
    const double fp = transform->f_prime(v.u);
    Physical p;
    p.r = r;
    p.u = transform->f(v.u);
    p.u_prime = fp * v.u_prime;
    p.u_second = transform->f_second(v.u) * v.u_prime * v.u_prime + fp * vpp;
    return p;
}

QuasilinearSolution solve_quasilinear(const DiffusionModel& a, const SemilinearModel& h, int n, double d_tol,
                                      const QuasilinearOptions& opt) {
    QuasilinearSolution sol;
    sol.h_model = std::make_shared<const SemilinearModel>(h);
    sol.h_consts = structural_constants(h, opt.search_bound);
    double s_max = opt.s_max;
    if (!(s_max > 0.0)) s_max = opt.search_bound;
    auto am = std::make_shared<const DiffusionModel>(a);
    auto tr = std::make_shared<const DualTransform>(am, s_max, opt.transform_tol);
    // Cover 10 b~ (or 1e3 beta) in the physical variable.
    const double need = std::isfinite(sol.h_consts.b_tilde) ? 10.0 * sol.h_consts.b_tilde : 1e3 * sol.h_consts.b;
    while (tr->f_max() < need) tr = std::make_shared<const DualTransform>(tr->extended(2.0 * tr->s_max()));
    sol.transform = tr;
    sol.dual_model = std::make_shared<const SemilinearModel>(dual_nonlinearity(h, tr));
    sol.dual_consts = dual_constants(*sol.dual_model, sol.h_consts, *tr, std::min(opt.search_bound, tr->s_max()));

    const RadialProblem prob(n, sol.dual_model);
    sol.ground = find_ground_state(prob, sol.dual_consts, d_tol, opt.shooting);
    sol.u0 = tr->f(sol.ground.d0);

    const Trajectory& t = sol.ground.trajectory;
    const double nm1 = n - 1.0;
    auto residual = [&](double r) {
        const auto p = sol.physical(r);
        return a.a(p.u) * (p.u_second + nm1 / r * p.u_prime) + 0.5 * a.a_prime(p.u) * p.u_prime * p.u_prime +
               h.g(p.u);
    };
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double at_node = std::fabs(residual(t.r(i)));
        if (at_node > sol.max_residual) {
            sol.max_residual = at_node;
            sol.residual_radius = t.r(i);
        }
        sol.midpoint_residual = std::max(sol.midpoint_residual, std::fabs(residual(0.5 * (t.r(i - 1) + t.r(i)))));
    }
    return sol;
}

}  // namespace elliptic
