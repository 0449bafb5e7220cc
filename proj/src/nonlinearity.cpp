#include "elliptic/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>

#include "elliptic/errors.hpp"
#include "elliptic/expression.hpp"
#include "elliptic/roots.hpp"

namespace elliptic {

SemilinearModel::SemilinearModel(std::string name, Fn g, Fn g_prime, Fn g_anti,
                                 std::optional<FamilyTag> tag)
    : name_(std::move(name)),
      g_(std::move(g)),
      g_prime_(std::move(g_prime)),
      g_anti_(std::move(g_anti)),
      tag_(std::move(tag)) {}

namespace {

// Builds the odd extension of a model given on s >= 0: g(-s) = -g(s),
// g'(-s) = g'(s), G(-s) = G(s).
SemilinearModel odd_model(std::string name, std::function<double(double)> g,
                          std::function<double(double)> gp, std::function<double(double)> G,
                          FamilyTag tag) {
    return SemilinearModel(
        std::move(name),
        [g](double s) { return s < 0.0 ? -g(-s) : g(s); },
        [gp](double s) { return gp(std::fabs(s)); },
        [G](double s) { return G(std::fabs(s)); },
        std::move(tag));
}

std::string fmt_param(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SemilinearModel builtin_model(const FamilySpec& spec) {
    switch (spec.family) {
        case Family::Power: {
            const double lam = spec.lambda;
            const double p = spec.p;
            return odd_model(
                "power(lambda=" + fmt_param(lam) + ",p=" + fmt_param(p) + ")",
                [lam, p](double s) { return -lam * s + std::pow(s, p); },
                [lam, p](double s) { return -lam + p * std::pow(s, p - 1.0); },
                [lam, p](double s) { return -0.5 * lam * s * s + std::pow(s, p + 1.0) / (p + 1.0); },
                {"power", {{"lambda", lam}, {"p", p}}});
        }
        case Family::CubicQuinticDefocusing:
            return odd_model(
                "cubic_quintic_defocusing",
                [](double s) { const double s2 = s * s; return s * (-1.0 - s2 + s2 * s2); },
                [](double s) { const double s2 = s * s; return -1.0 - 3.0 * s2 + 5.0 * s2 * s2; },
                [](double s) {
                    const double s2 = s * s;
                    return -0.5 * s2 - 0.25 * s2 * s2 + s2 * s2 * s2 / 6.0;
                },
                {"cubic_quintic_defocusing", {}});
        case Family::CubicQuinticFocusing: {
            const double c = spec.c;
            return odd_model(
                "cubic_quintic_focusing(c=" + fmt_param(c) + ")",
                [c](double s) { const double s2 = s * s; return s * (-1.0 + c * s2 - s2 * s2); },
                [c](double s) { const double s2 = s * s; return -1.0 + 3.0 * c * s2 - 5.0 * s2 * s2; },
                [c](double s) {
                    const double s2 = s * s;
                    return -0.5 * s2 + 0.25 * c * s2 * s2 - s2 * s2 * s2 / 6.0;
                },
                {"cubic_quintic_focusing", {{"c", c}}});
        }
        case Family::Nagumo: {
            const double c = spec.c;
            return odd_model(
                "nagumo(c=" + fmt_param(c) + ")",
                [c](double s) { return s * (s - c) * (1.0 - s); },
                [c](double s) { return -3.0 * s * s + 2.0 * (1.0 + c) * s - c; },
                [c](double s) {
                    const double s2 = s * s;
                    return -0.25 * s2 * s2 + (1.0 + c) * s2 * s / 3.0 - 0.5 * c * s2;
                },
                {"nagumo", {{"c", c}}});
        }
        case Family::QuadraticCubic: {
            const double c = spec.c;
            const double sg = spec.sign >= 0 ? 1.0 : -1.0;
            return odd_model(
                "quadratic_cubic(sign=" + std::string(sg > 0 ? "+" : "-") + ",c=" + fmt_param(c) + ")",
                [c, sg](double s) { return -s + sg * c * s * s - sg * s * s * s; },
                [c, sg](double s) { return -1.0 + 2.0 * sg * c * s - 3.0 * sg * s * s; },
                [c, sg](double s) {
                    const double s2 = s * s;
                    return -0.5 * s2 + sg * c * s2 * s / 3.0 - 0.25 * sg * s2 * s2;
                },
                {"quadratic_cubic", {{"c", c}, {"sign", sg}}});
        }
    }
    throw ConfigError("unknown builtin family");
}

SemilinearModel builtin_model(std::string_view family, const std::map<std::string, double>& params) {
    FamilySpec spec;
    std::set<std::string> allowed;
    if (family == "power") {
        spec.family = Family::Power;
        allowed = {"lambda", "p"};
    } else if (family == "cubic_quintic_defocusing") {
        spec.family = Family::CubicQuinticDefocusing;
    } else if (family == "cubic_quintic_focusing") {
        spec.family = Family::CubicQuinticFocusing;
        allowed = {"c"};
        spec.c = 4.0 * std::sqrt(3.0) / 3.0 + 0.1;
    } else if (family == "nagumo") {
        spec.family = Family::Nagumo;
        allowed = {"c"};
        spec.c = 0.3;
    } else if (family == "quadratic_cubic") {
        spec.family = Family::QuadraticCubic;
        allowed = {"c", "sign"};
        spec.c = 3.0;
    } else {
        throw ConfigError("unknown family '" + std::string(family) + "'");
    }
    for (const auto& [key, value] : params) {
        if (!allowed.count(key))
            throw ConfigError("family '" + std::string(family) + "' has no parameter '" + key + "'");
        if (key == "lambda") spec.lambda = value;
        if (key == "p") spec.p = value;
        if (key == "c") spec.c = value;
        if (key == "sign") spec.sign = value >= 0 ? +1 : -1;
    }
    return builtin_model(spec);
}

SemilinearModel expression_model(std::string_view expr_g, std::string_view expr_g_prime,
                                 std::string_view expr_G) {
    auto g = std::make_shared<const Expression>(Expression::parse(expr_g));
    auto gp = std::make_shared<const Expression>(Expression::parse(expr_g_prime));
    auto G = std::make_shared<const Expression>(Expression::parse(expr_G));
    return SemilinearModel("expr(" + std::string(expr_g) + ")",
                           [g](double s) { return (*g)(s); },
                           [gp](double s) { return (*gp)(s); },
                           [G](double s) { return (*G)(s); });
}

double growth_function(const SemilinearModel& model, double s) {
    if (!(s > 0.0)) throw DomainError("growth_function: s must be positive");
    const double g = model.g(s);
    const double sgp = s * model.g_prime(s);
    if (std::fabs(g) < 1e-14 * (1.0 + std::fabs(sgp)))
        throw PoleError("growth_function: g vanishes at s = " + fmt_param(s), s);
    return sgp / g;
}

double i_function(const SemilinearModel& model, double s, double lambda) {
    return lambda * s * model.g_prime(s) - (lambda + 2.0) * model.g(s);
}

double lambda_map(const SemilinearModel& model, const StructuralConstants& consts, double t) {
    if (!(t > consts.b && t < consts.s_star))
        throw DomainError("lambda_map: t = " + fmt_param(t) + " outside (b, s*)");
    const double k = growth_function(model, t);
    if (!(k > 1.0)) throw DomainError("lambda_map: K_g(t) <= 1 at t = " + fmt_param(t));
    return 2.0 / (k - 1.0);
}

SignScan scan_sign_changes(const SemilinearModel& model, double search_bound) {
    // Log grid from 1e-8 up to the bound, 200 points per decade; fine enough
    // to separate the zeros of every builtin family.
    SignScan scan;
    const double lo = std::min(1e-8, 1e-3 * search_bound);
    const double decades = std::log10(search_bound / lo);
    const int n = std::max(400, static_cast<int>(std::ceil(200.0 * decades)));
    double prev_s = lo;
    double prev_g = model.g(lo);
    scan.first_sample = lo;
    scan.negative_near_zero = prev_g < 0.0;
    for (int i = 1; i <= n; ++i) {
        const double s = lo * std::pow(10.0, decades * i / n);
        const double gv = model.g(s);
        if (!std::isfinite(gv)) break;
        if ((gv > 0.0) != (prev_g > 0.0) && gv != 0.0) {
            scan.brackets_lo.push_back(prev_s);
            scan.brackets_hi.push_back(s);
        }
        if (gv != 0.0) {
            prev_s = s;
            prev_g = gv;
        }
    }
    return scan;
}

StructuralConstants structural_constants(const SemilinearModel& model, double search_bound) {
    if (!(search_bound > 0.0)) throw PreconditionError("structural_constants: search_bound must be positive");
    const SignScan scan = scan_sign_changes(model, search_bound);
    if (!scan.negative_near_zero)
        throw StructureError("g is not negative just right of the origin");
    if (scan.brackets_lo.empty())
        throw StructureError("no sign change of g within search bound " + fmt_param(search_bound));
    if (scan.brackets_lo.size() > 2)
        throw StructureError("g has more than two positive zeros below " + fmt_param(search_bound));

    auto g = [&model](double s) { return model.g(s); };
    StructuralConstants c;
    c.search_bound = search_bound;
    c.b = bracketed_root(g, scan.brackets_lo[0], scan.brackets_hi[0], 1e-12);
    if (scan.brackets_lo.size() == 2)
        c.b_tilde = bracketed_root(g, scan.brackets_lo[1], scan.brackets_hi[1],
                                   1e-12);

    const double upper = std::isfinite(c.b_tilde) ? c.b_tilde : search_bound;

    // zeta: smallest point right of b with G >= margin. G increases on (b, b~).
    const double g_top = model.G(upper);
    if (g_top >= kZetaMargin) {
        auto shifted = [&model](double s) { return model.G(s) - kZetaMargin; };
        double z = bracketed_root(shifted, c.b, upper, 1e-12);
        while (model.G(z) < kZetaMargin) z += 1e-12;
        c.zeta = z;
    }

    auto k_raw = [&model](double s) { return s * model.g_prime(s) / model.g(s); };
    if (std::isfinite(c.b_tilde)) {
        c.K_infty = -kInfinity;
    } else {
        // Aitken extrapolation over the top two decades when the approach is
        // geometric in log s, as for power-type corrections.
        const double k1 = k_raw(search_bound / 100.0), k2 = k_raw(search_bound / 10.0), k3 = k_raw(search_bound);
        const double d1 = k2 - k1, d2 = k3 - k2;
        const double ratio = d2 / d1;
        c.K_infty = (d1 != 0.0 && ratio > 0.0 && ratio < 0.9) ? k3 - d2 * d2 / (d2 - d1) : k3;
    }
    // K_infty = 1 approached from above leaves s* = inf even if the estimate
    // rounds below 1.
    const bool drops = std::isfinite(c.b_tilde) || k_raw(search_bound) < 1.0;
    if (c.K_infty < 1.0 && drops) {
        // K_g runs from +inf at b+ down to K_infty; step inside both ends until
        // the bracket is valid.
        double lo = c.b, hi = upper;
        double klo = 0.0, khi = 0.0;
        for (double eps = 1e-9;; eps *= 10.0) {
            lo = c.b + eps * std::max(1.0, c.b);
            klo = k_raw(lo);
            if (std::isfinite(klo) && klo > 1.0) break;
            if (eps > 1e-2) throw StructureError("K_g does not exceed 1 just right of b");
        }
        for (double eps = 1e-9;; eps *= 10.0) {
            hi = std::isfinite(c.b_tilde) ? c.b_tilde * (1.0 - eps) : search_bound;
            khi = k_raw(hi);
            if (std::isfinite(khi) && khi < 1.0) break;
            if (eps > 1e-2) throw StructureError("K_g does not drop below 1 left of b~");
        }
        auto shifted = [&k_raw](double s) { return k_raw(s) - 1.0; };
        c.s_star = bracketed_root(shifted, lo, hi, klo - 1.0, khi - 1.0, 1e-12);
    }
    return c;
}

}  // namespace elliptic
