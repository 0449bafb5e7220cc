// One line per acceptance criterion. Reference values come from closed forms
// or from the independent routines in oracle.hpp, never from the library.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "elliptic/comparison_diagnostics.hpp"
#include "elliptic/dual.hpp"
#include "elliptic/errors.hpp"
#include "elliptic/hypothesis.hpp"
#include "elliptic/linearization.hpp"
#include "elliptic/spectrum.hpp"
#include "oracle.hpp"

using namespace elliptic;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

SemilinearModel family(Family f, double c = 0.0, double lam = 1.0, double p = 3.0) {
    FamilySpec s;
    s.family = f;
    s.c = c;
    s.lambda = lam;
    s.p = p;
    return builtin_model(s);
}

SemilinearModel power(double lam, double p) { return family(Family::Power, 0.0, lam, p); }

GroundState ground(const SemilinearModel& m, int n) {
    RadialProblem prob(n, m);
    return find_ground_state(prob, structural_constants(*prob.model), 0.0);
}

QuasilinearSolution mnls_solution(double p) {
    return solve_quasilinear(mnls_diffusion(1.0), power(1.0, p), 2, 0.0);
}

// s = int_0^t sqrt(1 + 2 x^2) dx
double mnls_primitive(double t) {
    return t * std::sqrt(1 + 2 * t * t) / 2 + std::asinh(std::sqrt(2.0) * t) / (2 * std::sqrt(2.0));
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
    RadialProblem prob(3, SemilinearModel(
                              "linear", [](double s) { return -s; }, [](double) { return -1.0; },
                              [](double s) { return -0.5 * s * s; }));
    const auto t = integrate(prob, 1.0, 5.0, 1e-12, true);
    double worst_u = 0, worst_d = 0;
    for (int i = 0; i <= 2000; ++i) {
        const double r = std::max(t.start_radius(), 5.0 * i / 2000.0);
        const double exact = r < 1e-4 ? 1 + r * r / 6 : std::sinh(r) / r;
        const auto s = t.sample(r);
        worst_u = std::max(worst_u, std::fabs(s.u - exact) / exact);
        worst_d = std::max(worst_d, std::fabs(s.delta - exact) / exact);
    }
    o.require(t.end_radius() >= 5.0, "integration stopped before r = 5");
    o.require(worst_u <= 1e-8, "u error");
    o.require(worst_d <= 1e-8, "delta error");
    o.detail << "max rel err u " << worst_u << ", delta " << worst_d;
}

void criterion2(Outcome& o) {
    for (double lam : {1.0, 4.0})
        for (int n : {2, 3}) {
            const auto g = ground(power(lam, 3.0), n);
            const double expected = -std::sqrt(lam);
            const bool ok = g.decay && std::fabs(g.decay->rate - expected) <= 1e-3;
            o.require(ok, "lambda " + std::to_string(lam) + " N " + std::to_string(n));
            o.detail << "l=" << lam << ",N=" << n << ": " << (g.decay ? g.decay->rate - expected : NAN) << "; ";
        }
}

void criterion3(Outcome& o) {
    for (auto [p, n] : {std::pair{3.0, 3}, std::pair{2.0, 2}}) {
        RadialProblem prob(n, power(1.0, p));
        const auto c = structural_constants(*prob.model);
        const auto g = find_ground_state(prob, c, 0.0);
        const auto nd = nondegeneracy_check(g);
        const std::string tag = "N=" + std::to_string(n) + " ";
        o.require(zeros_of_delta(g.trajectory).count == 1, tag + "delta zero count");
        o.require(nd.verdict.end_sign < 0, tag + "delta sign at end");
        const double growth = std::exp(nd.verdict.log_end_magnitude) / nd.verdict.pre_zero_peak;
        o.require(growth > 1e3, tag + "delta growth");
        const double r_max = prob.default_r_max() * 4;
        o.require(classify(prob, c, g.d0 + 1e-4, r_max, 1e-12).kind == ClassKind::CrossesZero, tag + "d0 + 1e-4");
        o.require(classify(prob, c, g.d0 - 1e-4, r_max, 1e-12).kind == ClassKind::StaysPositive, tag + "d0 - 1e-4");
        bool below_b = true;
        for (int k = 1; k <= 20; ++k)
            below_b = below_b && classify(prob, c, c.b * k / 20.0, r_max, 1e-12).kind == ClassKind::StaysPositive;
        o.require(below_b, tag + "(0, b] samples");
        o.detail << tag << "|delta| growth " << growth << "; ";
    }
}

double oracle_height(const std::function<double(double)>& g, int n, double lo, double hi, double r_end) {
    if (oracle::rk4_shot(g, n, hi, 1e-4, r_end) != oracle::Shot::Crosses) return NAN;
    return oracle::rk4_ground_height(g, n, lo, hi, 1e-10, 1e-4, r_end);
}

void criterion4(Outcome& o) {
    {
        auto g = [](double s) { return -s + s * s * s; };
        const double ref = oracle_height(g, 3, 1.0, 8.0, 40.0);
        const double d0 = ground(power(1.0, 3.0), 3).d0;
        o.require(std::fabs(d0 - ref) <= 1e-6, "power N=3");
        o.detail << "power " << d0 - ref << "; ";
    }
    {
        const double c = 2.4;
        auto g = [c](double s) { return -s + c * s * s * s - s * s * s * s * s; };
        const double x1 = (c - std::sqrt(c * c - 4)) / 2, x2 = (c + std::sqrt(c * c - 4)) / 2;
        const double ref = oracle_height(g, 3, std::sqrt(x1), std::sqrt(x2) * (1 - 1e-14), 80.0);
        const double d0 = ground(family(Family::CubicQuinticFocusing, c), 3).d0;
        o.require(std::fabs(d0 - ref) <= 1e-6, "focusing 2.4");
        o.detail << "focusing " << d0 - ref << "; ";
    }
    {
        auto g = [](double v) {
            const double f = oracle::mnls_f(v);
            return (-f + f * std::fabs(f)) / std::sqrt(1 + 2 * f * f);
        };
        const double b = mnls_primitive(1.0);
        const double ref = oracle_height(g, 2, b, 16.0, 60.0);
        const double d0 = mnls_solution(2.0).ground.d0;
        o.require(std::fabs(d0 - ref) <= 1e-6, "dual mNLS");
        o.detail << "dual mNLS " << d0 - ref;
    }
}

void criterion5(Outcome& o) {
    const auto a = mnls_diffusion(1.0);  // a = 1 + 2t^2, ell = 2
    struct Case {
        std::string name;
        SemilinearModel h;
        int n;
    };
    std::vector<Case> cases;
    for (int n : {2, 3}) {
        cases.push_back({"power p=3", power(1.0, 3.0), n});
        cases.push_back({"power p=1.5", power(1.0, 1.5), n});
        cases.push_back({"power lambda=4 p=5", power(4.0, 5.0), n});
        cases.push_back({"defocusing", family(Family::CubicQuinticDefocusing), n});
        cases.push_back({"focusing c=2.4", family(Family::CubicQuinticFocusing, 2.4), n});
        cases.push_back({"focusing c=3", family(Family::CubicQuinticFocusing, 3.0), n});
        cases.push_back({"nagumo c=0.3", family(Family::Nagumo, 0.3), n});
        cases.push_back({"nagumo c=0.45", family(Family::Nagumo, 0.45), n});
    }
    cases.push_back({"power p=9", power(1.0, 9.0), 2});
    cases.push_back({"power p=10", power(1.0, 10.0), 3});
    int failed = 0;
    for (const auto& c : cases) {
        const auto r = check_quasilinear(a, c.h, GridSpec{}, c.n);
        if (r.all_pass()) continue;
        ++failed;
        std::string labels;
        for (const auto& cond : r.conditions)
            if (cond.verdict != Verdict::Pass) labels += cond.label;
        o.require(false, c.name + " N=" + std::to_string(c.n) + " " + labels);
    }
    o.detail << cases.size() - failed << "/" << cases.size() << " in-range cases all-pass; ";

    const auto nag = check_quasilinear(a, family(Family::Nagumo, 0.6), GridSpec{}, 3).at("H3");
    const bool nag_ok = nag.verdict == Verdict::Fail && nag.witness &&
                        std::fabs(nag.witness->value - (1.0 / 12.0 - 0.6 / 6.0)) <= 1e-10;
    o.require(nag_ok, "nagumo 0.6 H3 witness");
    const auto foc = check_semilinear(family(Family::CubicQuinticFocusing, 2.0), GridSpec{}, 3).at("G3");
    o.require(foc.verdict == Verdict::Fail && foc.witness.has_value(), "focusing 2.0 G3");
    o.detail << "nagumo 0.6 H3 witness G(" << (nag.witness ? nag.witness->abscissa : NAN)
             << ") = " << (nag.witness ? nag.witness->value : NAN) << "; focusing 2.0 G3 " << to_string(foc.verdict);
}

void criterion6(Outcome& o) {
    const auto a = mnls_diffusion(1.0);
    const auto tr = solve_f(a, 1e8);
    double worst = 0;
    for (double s : {0.1, 1.0, 10.0, 100.0}) worst = std::max(worst, std::fabs(s - mnls_primitive(tr->f(s))));
    o.require(worst <= 1e-10, "integral identity");
    const double s = 1e8, ratio = s * tr->f_prime(s) / tr->f(s);
    o.require(std::fabs(ratio - 0.5) <= 1e-4, "s f'/f");
    const auto q = solve_quasilinear(constant_diffusion(), power(1.0, 3.0), 3, 0.0);
    const double d_semi = ground(power(1.0, 3.0), 3).d0;
    o.require(std::fabs(q.ground.d0 - d_semi) <= 1e-8, "a = 1 pipeline");
    o.detail << "identity " << worst << ", s f'/f - 1/2 = " << ratio - 0.5 << ", a=1 d0 diff "
             << q.ground.d0 - d_semi;
}

void criterion7(Outcome& o) {
    for (double p : {1.5, 2.0, 2.5}) {
        const auto q = mnls_solution(p);
        const double K = q.dual_consts.K_infty;
        o.require(std::fabs(K - (p - 1) / 2) <= 1e-3 && K < 1, "K_inf p=" + std::to_string(p));
        const auto nd = nondegeneracy_check(q.ground);
        o.require(nd.strict == Strictness::Strict, "strict p=" + std::to_string(p));
        o.detail << "p=" << p << ": K_inf " << K << ", " << to_string(nd.strict) << "; ";
    }
}

void criterion8(Outcome& o) {
    auto run = [&](const std::string& name, const GroundState& g, const StructuralConstants& c) {
        const auto rep = key_lemma_report(g, c);
        std::string failed;
        for (const auto& ch : rep.checks)
            if (!ch.pass) failed += (failed.empty() ? "" : ", ") + ch.name;
        o.require(rep.all_pass(), name + ": " + failed);
        if (rep.all_pass()) o.detail << name << " ok; ";
    };
    for (auto [p, n] : {std::pair{3.0, 3}, std::pair{2.0, 2}}) {
        const auto g = ground(power(1.0, p), n);
        run("power N=" + std::to_string(n), g, g.consts);
    }
    for (double p : {1.5, 2.0, 2.5}) {
        const auto q = mnls_solution(p);
        std::ostringstream name;
        name << "mNLS p=" << p << " (u(r_delta) " << q.ground.trajectory.sample(*q.ground.r_delta).u << ", b "
             << q.dual_consts.b << ")";
        run(name.str(), q.ground, q.dual_consts);
    }
}

void criterion9(Outcome& o) {
    const auto g = ground(power(1.0, 3.0), 3);
    const auto rep = corollary24_report(g, 4000, 1.5 * g.r_max);
    for (const char* v : {"mu1_positive_simple", "mu1_one_signed", "l0_kernel_free", "mu2_zero",
                          "l1_kernel_matches_uprime"})
        o.require(rep.at(v).pass, v);
    o.detail << rep.at("mu2_zero").detail << "; " << rep.at("l1_kernel_matches_uprime").detail << "; ";
    const auto m = mnls_kernel_report(mnls_solution(2.0), 1.0, 1.0, 2.0, 4000, 0.0);
    for (const char* v : {"l2_zero_mode_matches_w", "l1_radial_kernel_free"}) o.require(m.at(v).pass, v);
    o.detail << "L2: " << m.at("l2_zero_mode_matches_w").detail;
}

void criterion10(Outcome& o) {
    using boost::math::cyl_bessel_j;
    using boost::math::cyl_neumann;
    auto one = [](double) { return 1.0; };
    auto four = [](double) { return 4.0; };
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI), start(1.0, 30.0);
    int interlaced = 0;
    for (int k = 0; k < 20; ++k) {
        const double a = ang(rng), r1 = start(rng), cc = ang(rng);
        const double A = std::cos(a), B = std::sin(a), C = std::cos(cc), D = std::sin(cc);
        const double u = A * cyl_bessel_j(0, r1) + B * cyl_neumann(0, r1);
        const double up = -(A * cyl_bessel_j(1, r1) + B * cyl_neumann(1, r1));
        const double v = C * cyl_bessel_j(0, 2 * r1) + D * cyl_neumann(0, 2 * r1);
        const double vp = -2 * (C * cyl_bessel_j(1, 2 * r1) + D * cyl_neumann(1, 2 * r1));
        const auto U = solve_linear_radial(one, 2, r1, u, up, r1 + 12.0);
        const auto V = solve_linear_radial(four, 2, r1, v, vp, r1 + 12.0);
        const auto zu = U.zeros(r1, r1 + 12.0);
        if (zu.size() < 2) continue;
        // Independent confirmation of the interlacing from the closed form.
        bool sign_change = false;
        const double v_lo = C * cyl_bessel_j(0, 2 * zu[0]) + D * cyl_neumann(0, 2 * zu[0]);
        for (int i = 1; i <= 400 && !sign_change; ++i) {
            const double x = zu[0] + (zu[1] - zu[0]) * i / 401.0;
            sign_change = (C * cyl_bessel_j(0, 2 * x) + D * cyl_neumann(0, 2 * x)) * v_lo < 0;
        }
        if (sturm_check(U, V, one, four, zu[0], zu[1]) && sign_change) ++interlaced;
    }
    o.require(interlaced == 20, "interlacing on all 20 intervals");
    bool rejected = false;
    try {
        const auto U = solve_linear_radial(one, 2, 0.0, 1.0, 0.0, 10.0);
        const auto z = U.zeros(0.0, 10.0);
        sturm_check(U, U, one, one, z[0], z[1]);
    } catch (const PreconditionError&) {
        rejected = true;
    }
    o.require(rejected, "degenerate G = g rejected");
    o.detail << interlaced << "/20 intervals interlace, degenerate pair " << (rejected ? "rejected" : "accepted");
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* title;
        double budget_s;
        void (*fn)(Outcome&);
    };
    const Entry entries[] = {
        {1, "closed-form integrator", 1.0, criterion1},
        {2, "decay law", 10.0, criterion2},
        {3, "delta structure and N/P sides", 30.0, criterion3},
        {4, "RK4 oracle equivalence", 300.0, criterion4},
        {5, "hypothesis checker", 10.0, criterion5},
        {6, "dual transform identities", 5.0, criterion6},
        {7, "sublinear mNLS regime", 120.0, criterion7},
        {8, "key-lemma verifier", 60.0, criterion8},
        {9, "spectral picture", 180.0, criterion9},
        {10, "Sturm self-test", 5.0, criterion10},
    };
    int failures = 0;
    for (const auto& e : entries) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            e.fn(o);
        } catch (const std::exception& ex) {
            o.require(false, std::string("exception: ") + ex.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > e.budget_s) o.require(false, "runtime budget");
        if (!o.pass) ++failures;
        std::printf("criterion %2d %s  %s (%.2f s of %.0f s): %s\n", e.id, o.pass ? "PASS" : "FAIL", e.title, secs,
                    e.budget_s, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
