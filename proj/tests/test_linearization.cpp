#include <cmath>

#include "doctest.h"
#include "elliptic/errors.hpp"
#include "elliptic/linearization.hpp"

using namespace elliptic;

namespace {

SemilinearModel power(double lam, double p) {
    FamilySpec s;
    s.lambda = lam;
    s.p = p;
    return builtin_model(s);
}

}  // namespace

TEST_CASE("linear model: delta has no zero") {
    RadialProblem prob(3, SemilinearModel(
                              "linear", [](double s) { return -s; }, [](double) { return -1.0; },
                              [](double s) { return -0.5 * s * s; }));
    const auto t = integrate(prob, 1.0, 5.0, 1e-12, true);
    CHECK(zeros_of_delta(t).count == 0);
    CHECK_THROWS_AS(zeros_of_delta(integrate(prob, 1.0, 5.0, 1e-12, false)), PreconditionError);
}

TEST_CASE("ground states are strictly admissible") {
    for (auto [p, n] : {std::pair{3.0, 3}, std::pair{2.0, 2}}) {
        RadialProblem prob(n, power(1, p));
        const auto c = structural_constants(*prob.model);
        const auto g = find_ground_state(prob, c, 0.0);
        const auto z = zeros_of_delta(g.trajectory);
        CHECK(z.count == 1);
        REQUIRE(g.r_delta);
        CHECK(z.locations[0] == *g.r_delta);
        const auto nd = nondegeneracy_check(g);
        CHECK(nd.nondegenerate);
        CHECK(nd.verdict.tail == TailBehavior::DivergesNegative);
        CHECK(nd.verdict.end_sign < 0);
        CHECK(std::exp(nd.verdict.log_end_magnitude) > 1e3 * nd.verdict.pre_zero_peak);
        CHECK_FALSE(nd.verdict.alarm);
        // Sign pattern around r_delta on nodes.
        for (std::size_t i = 0; i < g.trajectory.size(); ++i) {
            const double r = g.trajectory.r(i);
            if (r < *g.r_delta - 1e-9) CHECK(g.trajectory.delta_mantissa(i) > 0);
            if (r > *g.r_delta + 1e-9) CHECK(g.trajectory.delta_mantissa(i) < 0);
        }
        // Doubling the shooting range leaves the count unchanged.
        ShootingOptions o;
        o.r_max_factor = 2.0;
        const auto g2 = find_ground_state(prob, c, 0.0, o);
        CHECK(zeros_of_delta(g2.trajectory).count == 1);
    }
}

TEST_CASE("N side near d0: delta(R) < 0") {
    RadialProblem prob(3, power(1, 3));
    const auto c = structural_constants(*prob.model);
    const auto g = find_ground_state(prob, c, 0.0);
    const double d = g.d0 + 1e-3;
    const auto cl = classify(prob, c, d, 30, 1e-12);
    REQUIRE(cl.kind == ClassKind::CrossesZero);
    const auto t = integrate(prob, d, 30, 1e-12, true);
    const auto v = admissibility(t, cl);
    CHECK(v.zero_count == 1);
    CHECK(v.zero_locations[0] < t.end_radius());
    CHECK(v.tail == TailBehavior::NegativeAtCrossing);
    CHECK(v.strict == Strictness::Strict);
}

TEST_CASE("truncated trajectory is undetermined") {
    RadialProblem prob(3, power(1, 3));
    const auto c = structural_constants(*prob.model);
    const auto g = find_ground_state(prob, c, 0.0);
    const auto t = g.trajectory.truncated(2 * *g.r_delta);
    Classification cl;
    cl.kind = ClassKind::GroundCandidate;
    const auto v = admissibility(t, cl);
    CHECK(v.strict == Strictness::Undetermined);
    CHECK(v.tail == TailBehavior::Truncated);

    GroundState cut = g;
    cut.trajectory = t;
    cut.extended = t;
    CHECK(nondegeneracy_check(cut).strict == Strictness::Undetermined);
    CHECK_FALSE(nondegeneracy_check(cut).nondegenerate);
}

TEST_CASE("finite-difference direction matches delta") {
    RadialProblem prob(3, power(1, 3));
    const auto c = structural_constants(*prob.model);
    const auto g = find_ground_state(prob, c, 0.0);
    const double h = 1e-6;
    const auto tp = integrate(prob, g.d0 + h, 30, 1e-12, false);
    const double r_end = std::min(3 * *g.r_delta, g.trajectory.end_radius());
    double dot = 0, na = 0, nb = 0;
    for (int j = 0; j <= 500; ++j) {
        const double r = g.trajectory.start_radius() + (r_end - g.trajectory.start_radius()) * j / 500.0;
        const double a = (tp.sample(r).u - g.trajectory.sample(r).u) / h;
        const double b = g.trajectory.sample(r).delta;
        dot += a * b;
        na += a * a;
        nb += b * b;
    }
    CHECK(dot / std::sqrt(na * nb) >= 0.999);
}
