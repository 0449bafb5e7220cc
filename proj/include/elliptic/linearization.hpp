#ifndef ELLIPTIC_LINEARIZATION_HPP
#define ELLIPTIC_LINEARIZATION_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "elliptic/radial_ode.hpp"
#include "elliptic/shooting.hpp"

namespace elliptic {

struct DeltaZeros {
    std::size_t count = 0;
    std::vector<double> locations;
};

/// Sign changes of delta on (r0, end], refined to 1e-12 in r.
DeltaZeros zeros_of_delta(const Trajectory& trajectory);

enum class Strictness { Strict, NotStrict, Undetermined };
/// NegativeAtCrossing is the N-side outcome delta(R) < 0.
enum class TailBehavior { DivergesNegative, DecaysToZero, Truncated, NegativeAtCrossing, PositiveAtCrossing };

const char* to_string(Strictness s);
const char* to_string(TailBehavior t);

struct AdmissibilityVerdict {
    std::size_t zero_count = 0;
    std::vector<double> zero_locations;
    Strictness strict = Strictness::Undetermined;
    TailBehavior tail = TailBehavior::Truncated;
    double pre_zero_peak = 0.0;   // max |delta| on (r0, r_delta]
    double log_end_magnitude = 0.0;  // log|delta| at the last node
    int end_sign = 0;
    double end_radius = 0.0;
    /// Zero count of 0 on a ground candidate contradicts the theory and
    /// signals a numerical failure.
    bool alarm = false;
    std::string evidence;
};

/// Factor by which |delta| must exceed its pre-zero peak to count as divergence.
inline constexpr double kDivergenceFactor = 1e3;

AdmissibilityVerdict admissibility(const Trajectory& trajectory, const Classification& classification);

struct NondegeneracyResult {
    bool nondegenerate = false;
    Strictness strict = Strictness::Undetermined;
    AdmissibilityVerdict verdict;
};

NondegeneracyResult nondegeneracy_check(const GroundState& ground);

}  // namespace elliptic

#endif
