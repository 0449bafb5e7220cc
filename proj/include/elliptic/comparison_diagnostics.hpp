#ifndef ELLIPTIC_COMPARISON_DIAGNOSTICS_HPP
#define ELLIPTIC_COMPARISON_DIAGNOSTICS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elliptic/nonlinearity.hpp"
#include "elliptic/radial_ode.hpp"
#include "elliptic/shooting.hpp"

namespace elliptic {

/// Samples of a function and its derivative on increasing abscissae. Between
/// samples the cubic Hermite interpolant is used.
struct SampledFunction {
    std::vector<double> r;
    std::vector<double> value;
    std::vector<double> slope;

    double operator()(double x) const;
    double derivative(double x) const;
    double front() const { return r.front(); }
    double back() const { return r.back(); }
    /// Sign changes of the interpolant in (lo, hi), refined by bisection.
    std::vector<double> zeros(double lo, double hi) const;
};

/// Nodes of t plus (oversample - 1) dense points inside every step.
std::vector<double> dense_radii(const Trajectory& t, int oversample = 10);

/// v(r) = r u'(r) + lambda u(r), with v' = (lambda + 2 - N) u' - r g(u).
SampledFunction v_lambda_profile(const Trajectory& t, double lambda, int oversample = 10);
/// v''(r) reconstructed from v'' + (N-1)/r v' + g'(u) v = I(u, lambda).
double v_lambda_second(const Trajectory& t, double lambda, double r);

/// theta(r) = -r u'/u and its derivative. DomainError where u <= 0.
SampledFunction theta_profile(const Trajectory& t, int oversample = 10);

/// Zeros of r u' + lambda u on (lo, hi), located on the dense grid and refined
/// against the trajectory's continuous extension.
std::vector<double> v_lambda_zeros(const Trajectory& t, double lambda, double lo, double hi, int oversample = 10);

struct ClauseCheck {
    std::string name;
    bool pass = true;
    double witness_r = 0.0;
    double value = 0.0;
    std::string detail;
};

struct KeyLemmaReport {
    double r_delta = 0.0;
    double u_at_r_delta = 0.0;
    double lambda_under = 0.0;
    double lambda0 = 0.0;
    double lambda_bar = 0.0;
    int lambda_bar_doublings = 0;
    std::optional<double> r_under;
    std::optional<double> r_bar;
    double end_radius = 0.0;
    std::vector<ClauseCheck> checks;

    bool all_pass() const;
    const ClauseCheck& at(const std::string& name) const;
};

/// Verifies the comparison-function lemmas on the trusted ground-state
/// profile. Clause failures are recorded, never thrown; a ground state without
/// a zero of delta is a precondition error.
KeyLemmaReport key_lemma_report(const GroundState& ground, const StructuralConstants& consts);

/// Solution of y'' + (N-1)/r y' + q(r) y = 0 from (y, y') at r_start to
/// r_end. With r_start = 0 the regular solution (y'(0) = 0) is started from
/// its Taylor expansion.
SampledFunction solve_linear_radial(const std::function<double(double)>& q, int n, double r_start, double y,
                                    double y_prime, double r_end, double tol = 1e-12);

/// Comparison principle self-test. U solves the equation with coefficient
/// g_coef, V the one with G_coef >= g_coef (not identically equal) on
/// (mu, nu); U(mu) = U(nu) = 0 with mu > 0, or mu = 0, U'(0) = V'(0) = 0 and
/// U(nu) = 0. Returns whether V changes sign strictly inside (mu, nu).
/// Violated hypotheses raise PreconditionError.
bool sturm_check(const SampledFunction& U, const SampledFunction& V, const std::function<double(double)>& g_coef,
                 const std::function<double(double)>& G_coef, double mu, double nu);

}  // namespace elliptic

#endif
