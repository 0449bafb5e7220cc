#include "doctest.h"

#include <chrono>
#include <cmath>

#include "elliptic/errors.hpp"
#include "elliptic/hypothesis.hpp"

using namespace elliptic;

namespace {

SemilinearModel family(Family f, double c = 0.0, double lambda = 1.0, double p = 3.0) {
    FamilySpec s;
    s.family = f;
    s.c = c;
    s.lambda = lambda;
    s.p = p;
    return builtin_model(s);
}

void require_witness_reproduces(const ConditionResult& c, const std::function<double(double)>& eval) {
    REQUIRE(c.verdict == Verdict::Fail);
    REQUIRE(c.witness.has_value());
    CHECK(eval(c.witness->abscissa) == doctest::Approx(c.witness->value).epsilon(1e-12));
}

}  // namespace

TEST_CASE("power(1,3), N=3 passes G1-G6") {
    const auto m = family(Family::Power);
    const auto r = check_semilinear(m, structural_constants(m), GridSpec{}, 3);
    for (const char* l : {"G1", "G2", "G3", "G4", "G5", "G6"}) {
        CAPTURE(l);
        CHECK(r.at(l).verdict == Verdict::Pass);
    }
    CHECK(r.exit_code() == 0);
}

TEST_CASE("nagumo(0.6) fails G3 with the closed-form primitive") {
    const auto m = family(Family::Nagumo, 0.6);
    const auto r = check_semilinear(m, GridSpec{}, 3);
    const auto& g3 = r.at("G3");
    require_witness_reproduces(g3, [&](double s) { return m.G(s); });
    // int_0^1 t (t - c)(1 - t) dt = 1/12 - c/6, the largest value of G on (c, 1].
    CHECK(g3.witness->abscissa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g3.witness->value == doctest::Approx(1.0 / 12.0 - 0.6 / 6.0).epsilon(1e-12));
    CHECK(r.exit_code() == 2);
}

TEST_CASE("focusing quintic below the threshold fails G3") {
    // G(s) = (x^2/4)(c - 2/x - 2x/3), x = s^2; the bracket is maximal at x = sqrt 3
    // where it equals c - 4 sqrt3 / 3.
    const double threshold = 4.0 * std::sqrt(3.0) / 3.0;
    for (double c : {2.0, 2.3}) {
        CAPTURE(c);
        const auto m = family(Family::CubicQuinticFocusing, c);
        const auto r = check_semilinear(m, GridSpec{}, 3);
        const auto& g3 = r.at("G3");
        require_witness_reproduces(g3, [&](double s) { return m.G(s); });
        CHECK(g3.witness->value <= 0.0);
        if (c == 2.0) {
            CHECK(r.at("G2").verdict == Verdict::Fail);
            CHECK(g3.witness->abscissa == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-3));
            const double x = g3.witness->abscissa * g3.witness->abscissa;
            CHECK(4.0 * g3.witness->value / (x * x) == doctest::Approx(c - threshold).epsilon(1e-6));
        }
    }
    const auto ok = family(Family::CubicQuinticFocusing, 2.32);
    CHECK(check_semilinear(ok, GridSpec{}, 3).at("G3").verdict == Verdict::Pass);
}

TEST_CASE("inconsistent constants are a precondition error") {
    const auto m = family(Family::Power);
    auto c = structural_constants(m);
    c.b = 0.9;
    CHECK_THROWS_AS(check_semilinear(m, c, GridSpec{}, 3), PreconditionError);
}

TEST_CASE("G5 violation near the origin is caught") {
    // -s - s^3 + s^5: s g' - g = 2 s^3 (2 s^2 - 1) < 0 with g < 0 for s < 1/sqrt 2, so K_g > 1.
    const auto m = family(Family::CubicQuinticDefocusing);
    const auto r = check_semilinear(m, GridSpec{}, 3);
    const auto& g5 = r.at("G5");
    require_witness_reproduces(g5, [&](double s) { return growth_function(m, s); });
    const double s = g5.witness->abscissa;
    CHECK(s < 1.0 / std::sqrt(2.0));
    CHECK(2.0 * s * s * s * (2.0 * s * s - 1.0) < 0.0);
    CHECK(g5.witness->value > 1.0);
}

TEST_CASE("G6 critical exponent for N>=3 and exponential test for N=2") {
    // (N+2)/(N-2) = 5 for N = 3.
    CHECK(check_semilinear(family(Family::Power, 0, 1, 4.0), GridSpec{}, 3).at("G6").verdict == Verdict::Pass);
    const auto r6 = check_semilinear(family(Family::Power, 0, 1, 6.0), GridSpec{}, 3);
    CHECK(r6.at("G6").verdict == Verdict::Fail);
    CHECK(r6.at("G6").witness.has_value());
    CHECK(check_semilinear(family(Family::Power, 0, 1, 5.0), GridSpec{}, 3).at("G6").verdict ==
          Verdict::Undetermined);
    CHECK(check_semilinear(family(Family::Power, 0, 1, 5.0), GridSpec{}, 3).exit_code() == 3);
    // Any power is below exp(alpha s^2) in N = 2.
    CHECK(check_semilinear(family(Family::Power, 0, 1, 9.0), GridSpec{}, 2).at("G6").verdict == Verdict::Pass);
    // exp(s^3) - 1 - 2s overtakes every exp(alpha s^2).
    const auto fast = expression_model("exp(s^3) - 1 - 2*s", "3*s^2*exp(s^3) - 2", "0");
    GridSpec small{1e-8, 5.0, 2000};
    CHECK(check_semilinear(fast, structural_constants(fast, 5.0), small, 2).at("G6").verdict == Verdict::Fail);
}

TEST_CASE("modified NLS regime with p = 2, N = 2 passes everything") {
    const auto r = check_quasilinear(mnls_diffusion(1.0), family(Family::Power, 0, 1, 2.0), GridSpec{}, 2);
    for (const auto& c : r.conditions) {
        CAPTURE(c.label);
        CAPTURE(c.detail);
        CHECK(c.verdict == Verdict::Pass);
    }
    CHECK(r.conditions.size() == 9);
}

TEST_CASE("example families with a = 1 + 2t^2") {
    const auto a = mnls_diffusion(1.0);
    for (int n : {2, 3}) {
        CAPTURE(n);
        for (const auto& h : {family(Family::Power), family(Family::CubicQuinticFocusing, 2.4),
                              family(Family::Nagumo, 0.3), family(Family::Nagumo, 0.45)}) {
            CAPTURE(h.name());
            CHECK(check_quasilinear(a, h, GridSpec{}, n).all_pass());
        }
    }
}

TEST_CASE("parameters just outside the stated ranges fail with a witness") {
    const auto a = mnls_diffusion(1.0);
    SUBCASE("nagumo c = 0.51: H3") {
        const auto h = family(Family::Nagumo, 0.51);
        const auto& c = check_quasilinear(a, h, GridSpec{}, 3).at("H3");
        require_witness_reproduces(c, [&](double t) { return h.G(t); });
        CHECK(c.witness->value == doctest::Approx(1.0 / 12.0 - 0.51 / 6.0).epsilon(1e-10));
    }
    SUBCASE("nagumo c = 0.6: H3") {
        const auto h = family(Family::Nagumo, 0.6);
        const auto r = check_quasilinear(a, h, GridSpec{}, 3);
        CHECK(r.at("H3").witness->value == doctest::Approx(1.0 / 12.0 - 0.1).epsilon(1e-10));
        CHECK(r.exit_code() == 2);
    }
    SUBCASE("focusing c = 2.30: H3") {
        const auto h = family(Family::CubicQuinticFocusing, 2.30);
        require_witness_reproduces(check_quasilinear(a, h, GridSpec{}, 3).at("H3"),
                                   [&](double t) { return h.G(t); });
    }
    SUBCASE("power p = 11.5 above ((l+1)N+2)/(N-2) = 11: H5") {
        const auto r = check_quasilinear(a, family(Family::Power, 0, 1, 11.5), GridSpec{}, 3);
        CHECK(r.at("H5").verdict == Verdict::Fail);
        CHECK(r.at("H5").witness.has_value());
    }
    SUBCASE("defocusing N = 4 with ell = 0.9 below 4 - 12/N: H5") {
        // ((0.9 + 1) 4 + 2)/2 = 4.8 < 5.
        const auto r = check_quasilinear(two_power_diffusion(0.5, 0.9), family(Family::CubicQuinticDefocusing),
                                         GridSpec{}, 4);
        CHECK(r.at("H5").verdict == Verdict::Fail);
        CHECK(r.at("H5").margin == doctest::Approx(4.8 - 5.0).epsilon(1e-6));
    }
}

TEST_CASE("defocusing quintic: growth at infinity fine, K_h <= 1 below beta fails") {
    const auto h = family(Family::CubicQuinticDefocusing);
    const auto r = check_quasilinear(mnls_diffusion(1.0), h, GridSpec{}, 3);
    CHECK(r.at("H5").verdict == Verdict::Pass);
    const auto& h4 = r.at("H4");
    require_witness_reproduces(h4, [&](double t) { return growth_function(h, t); });
    const double t = h4.witness->abscissa;
    CHECK(2.0 * t * t * t * (2.0 * t * t - 1.0) < 0.0);
}

TEST_CASE("diffusion conditions") {
    const auto h = family(Family::Power, 0, 1, 2.0);
    SUBCASE("two powers pass A1-A4") {
        for (auto [l1, l2] : {std::pair{0.5, 2.0}, std::pair{1.0, 3.0}, std::pair{0.3, 0.7}}) {
            const auto r = check_quasilinear(two_power_diffusion(l1, l2), h, GridSpec{}, 2);
            for (const char* l : {"A1", "A2", "A3", "A4"}) {
                CAPTURE(l);
                CHECK(r.at(l).verdict == Verdict::Pass);
            }
            CHECK(r.at("A4").margin == doctest::Approx(1.0).epsilon(1e-4));
        }
    }
    SUBCASE("gaussian passes A1-A4") {
        const auto r = check_quasilinear(gaussian_diffusion(1.0), h, GridSpec{}, 2);
        for (const char* l : {"A1", "A2", "A3", "A4"}) CHECK(r.at(l).verdict == Verdict::Pass);
    }
    SUBCASE("constant a fails A4") {
        for (double ell : {0.5, 2.0}) {
            const auto r = check_quasilinear(constant_diffusion(ell), h, GridSpec{}, 2);
            CHECK(r.at("A4").verdict == Verdict::Fail);
            CHECK(r.at("A4").witness.has_value());
        }
    }
    SUBCASE("a growing faster than t^ell fails A4") {
        const auto a = expression_diffusion("1 + t^3", "3*t^2", "6*t", 2.0);
        CHECK(check_quasilinear(a, h, GridSpec{}, 2).at("A4").verdict == Verdict::Fail);
    }
    SUBCASE("decreasing a fails A2 and a vanishing a fails A1") {
        const auto dec = expression_diffusion("2 - t^2/(1 + t^2) + t^2/1000000", "-2*t/(1+t^2)^2 + t/500000",
                                              "0", 2.0);
        const auto r = check_quasilinear(dec, h, GridSpec{}, 2);
        REQUIRE(r.at("A2").verdict == Verdict::Fail);
        CHECK(dec.a_prime(r.at("A2").witness->abscissa) < 0.0);
        const auto zero = expression_diffusion("(t - 1)^2 + t^2*0", "2*(t - 1)", "2", 2.0);
        CHECK(check_quasilinear(zero, h, GridSpec{}, 2).at("A1").verdict == Verdict::Fail);
    }
    SUBCASE("A3 split") {
        // Increasing a with a sigmoid step at t0: K_a peaks near t0 and falls after it.
        auto step = [](double t0) {
            const std::string x = "exp(-20*(t-" + std::to_string(t0) + "))";
            return expression_diffusion("1 + 2/(1+" + x + ") + t^2", "40*" + x + "/(1+" + x + ")^2 + 2*t", "0", 2.0);
        };
        // Step below beta = 1: K_a(0.5) > K_a(1) violates the second clause.
        const auto below = step(0.5);
        const auto rb = check_quasilinear(below, h, GridSpec{}, 2);
        CHECK(rb.at("A2").verdict == Verdict::Pass);
        REQUIRE(rb.at("A3").verdict == Verdict::Fail);
        double t = rb.at("A3").witness->abscissa;
        CHECK(t < 1.0);
        CHECK(t * below.a_prime(t) / below.a(t) > below.a_prime(1.0) / below.a(1.0));
        CHECK(t * below.a_prime(t) / below.a(t) == doctest::Approx(rb.at("A3").witness->value).epsilon(1e-12));
        // Step above beta: K_a decreases after the step, violating the first clause.
        const auto above = step(2.0);
        const auto ra = check_quasilinear(above, h, GridSpec{}, 2);
        REQUIRE(ra.at("A3").verdict == Verdict::Fail);
        t = ra.at("A3").witness->abscissa;
        CHECK(t > 1.0);
        CHECK(t * above.a_prime(t) / above.a(t) == doctest::Approx(ra.at("A3").witness->value).epsilon(1e-12));
    }
    SUBCASE("declared a_inf mismatch is reported") {
        const auto a = expression_diffusion("1 + 2*t^2", "4*t", "4", 2.0, 3.0);
        const auto& c = check_quasilinear(a, h, GridSpec{}, 2).at("A4");
        CHECK(c.verdict == Verdict::Pass);
        CHECK(c.detail.find("disagrees") != std::string::npos);
    }
}

TEST_CASE("monotonicity verdicts stable under grid doubling") {
    const auto a = mnls_diffusion(1.0);
    for (const auto& h : {family(Family::Power), family(Family::Nagumo, 0.3), family(Family::CubicQuinticFocusing, 2.4),
                          family(Family::CubicQuinticDefocusing)}) {
        CAPTURE(h.name());
        const auto r1 = check_quasilinear(a, h, GridSpec{1e-8, 1e8, 1000}, 3);
        const auto r2 = check_quasilinear(a, h, GridSpec{1e-8, 1e8, 2000}, 3);
        for (const char* l : {"H4", "A3"}) {
            CAPTURE(l);
            const auto& c1 = r1.at(l);
            const auto& c2 = r2.at(l);
            if (c1.verdict == Verdict::Pass && c2.verdict == Verdict::Fail) CHECK(-c2.margin > 10.0 * kMonotoneSlack);
        }
    }
}

TEST_CASE("criterion-scale run stays fast") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto a = mnls_diffusion(1.0);
    for (const auto& h : {family(Family::Power), family(Family::CubicQuinticDefocusing),
                          family(Family::CubicQuinticFocusing, 2.4), family(Family::Nagumo, 0.3)})
        (void)check_quasilinear(a, h, GridSpec{}, 3);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 10.0);
}
