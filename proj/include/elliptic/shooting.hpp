#ifndef ELLIPTIC_SHOOTING_HPP
#define ELLIPTIC_SHOOTING_HPP

#include <memory>
#include <optional>
#include <string>

#include "elliptic/nonlinearity.hpp"
#include "elliptic/radial_ode.hpp"

namespace elliptic {

enum class ClassKind { CrossesZero, GroundCandidate, StaysPositive, Undetermined };

const char* to_string(ClassKind kind);

/// Where d sits in the N/G/P partition, with the radius that triggered it:
/// the zero R for CrossesZero, the certificate radius for StaysPositive, the
/// truncation radius for Undetermined.
struct Classification {
    ClassKind kind = ClassKind::Undetermined;
    double d = 0.0;
    double radius = 0.0;
    std::string evidence;
    double r_max = 0.0;
};

/// Classify one height. Domain error if d >= b~ or d <= 0.
Classification classify(const RadialProblem& problem, const StructuralConstants& consts, double d,
                        double r_max, double tol);

struct DecayFit {
    double rate = 0.0;      // fitted limit of u'/u
    double expected = 0.0;  // -sqrt(-g'(0))
    double deviation = 0.0;
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::size_t samples = 0;
};

/// Fit the exponential rate of the tail where u < 1e-4 u(0). The tail is
/// matched to the linearised profile r^{-nu} K_nu(k r), nu = (N-2)/2, whose
/// log-derivative -k K_{nu+1}(k r)/K_nu(k r) absorbs the algebraic prefactor.
/// TailTooShort if the trajectory crosses zero or never reaches the tail.
DecayFit decay_rate(const Trajectory& trajectory);

struct ShootingOptions {
    double ode_tol = 1e-12;
    double r_max_factor = 1.0;
    int seed_budget = 40;
    int r_max_doublings = 3;  // r_max grows up to 2^3 = 8x on Undetermined
    /// Relative separation of the two bracket trajectories beyond which the
    /// midpoint profile is no longer trusted.
    double trust_separation = 1e-6;
    /// Looser bound for the variation record: delta only needs its sign and
    /// order of magnitude, not profile accuracy.
    double variation_separation = 1e-2;
};

struct GroundState {
    int dimension = 0;
    std::shared_ptr<const SemilinearModel> model;
    StructuralConstants consts;
    double ode_tol = 0.0;

    double d0 = 0.0;
    double d_P = 0.0;
    double d_N = 0.0;
    Classification certificate_P;
    Classification certificate_N;
    bool converged = true;
    int iterations = 0;

    /// Profile at d0 with the variation channel, cut at the trust radius.
    Trajectory trajectory;
    double trust_radius = 0.0;
    /// Same shot cut at the looser variation radius; used for the
    /// divergence evidence of delta.
    Trajectory extended;
    double variation_radius = 0.0;
    /// Shooting range used for the final classifications.
    double r_max = 0.0;
    std::optional<DecayFit> decay;
    std::optional<double> r_delta;
    bool monotone = false;
};

/// Bisection on [d_P, d_N] down to d_tol (or until the midpoint is no longer
/// representable). NoCrossingError if no N-side height is found below b~.
GroundState find_ground_state(const RadialProblem& problem, const StructuralConstants& consts,
                              double d_tol, const ShootingOptions& options = {});

}  // namespace elliptic

#endif
