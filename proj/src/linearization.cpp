#include "elliptic/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "elliptic/errors.hpp"

namespace elliptic {

const char* to_string(Strictness s) {
    switch (s) {
        case Strictness::Strict: return "Strict";
        case Strictness::NotStrict: return "NotStrict";
        case Strictness::Undetermined: return "Undetermined";
    }
    return "?";
}

const char* to_string(TailBehavior t) {
    switch (t) {
        case TailBehavior::DivergesNegative: return "DivergesNegative";
        case TailBehavior::DecaysToZero: return "DecaysToZero";
        case TailBehavior::Truncated: return "Truncated";
        case TailBehavior::NegativeAtCrossing: return "NegativeAtCrossing";
        case TailBehavior::PositiveAtCrossing: return "PositiveAtCrossing";
    }
    return "?";
}

DeltaZeros zeros_of_delta(const Trajectory& t) {
    if (!t.has_variation()) throw PreconditionError("zeros_of_delta: trajectory has no variation channel");
    DeltaZeros z;
    z.locations = t.event_radii(EventKind::DeltaZero);
    z.count = z.locations.size();
    return z;
}

AdmissibilityVerdict admissibility(const Trajectory& t, const Classification& cl) {
    const DeltaZeros z = zeros_of_delta(t);
    AdmissibilityVerdict v;
    v.zero_count = z.count;
    v.zero_locations = z.locations;
    const std::size_t last = t.size() - 1;
    v.end_radius = t.end_radius();
    v.log_end_magnitude = t.log_abs_delta(last);
    v.end_sign = t.delta_mantissa(last) > 0.0 ? 1 : (t.delta_mantissa(last) < 0.0 ? -1 : 0);

    const double r_cut = z.count ? z.locations.front() : t.end_radius();
    for (std::size_t i = 0; i < t.size() && t.r(i) <= r_cut; ++i)
        v.pre_zero_peak = std::max(v.pre_zero_peak, std::exp(t.log_abs_delta(i)));

    char buf[200];
    if (cl.kind == ClassKind::CrossesZero) {
        const double dR = t.delta(last);
        v.tail = dR < 0.0 ? TailBehavior::NegativeAtCrossing : TailBehavior::PositiveAtCrossing;
        const bool strict = z.count == 1 && dR < -1e-10;
        v.strict = strict ? Strictness::Strict : Strictness::NotStrict;
        std::snprintf(buf, sizeof buf, "delta(R) = %.6g at R = %.6g, %zu zero(s)", dR, v.end_radius, z.count);
        v.evidence = buf;
        return v;
    }

    if (z.count == 0) {
        v.alarm = true;
        v.strict = Strictness::Undetermined;
        v.tail = TailBehavior::Truncated;
        v.evidence = "delta has no zero on a ground candidate: numerical inconsistency";
        return v;
    }
    if (z.count > 1) {
        v.strict = Strictness::NotStrict;
        v.tail = TailBehavior::Truncated;
        std::snprintf(buf, sizeof buf, "%zu zeros of delta", z.count);
        v.evidence = buf;
        return v;
    }

    const double log_ratio = v.log_end_magnitude - std::log(v.pre_zero_peak);
    // Monotone growth of |delta| over the last quarter of the post-zero range.
    const double r_check = r_cut + 0.75 * (t.end_radius() - r_cut);
    bool growing = true;
    double prev = -kInfinity;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.r(i) < r_check) continue;
        const double la = t.log_abs_delta(i);
        if (la < prev) growing = false;
        prev = la;
    }
    if (v.end_sign < 0 && log_ratio > std::log(kDivergenceFactor) && growing) {
        v.tail = TailBehavior::DivergesNegative;
        v.strict = Strictness::Strict;
    } else if (std::exp(v.log_end_magnitude) < 1e-3 * v.pre_zero_peak) {
        v.tail = TailBehavior::DecaysToZero;
        v.strict = Strictness::NotStrict;
    } else {
        v.tail = TailBehavior::Truncated;
        v.strict = Strictness::Undetermined;
    }
    std::snprintf(buf, sizeof buf, "|delta(%.6g)| / peak = 10^%.3f, sign %d", v.end_radius, log_ratio / std::log(10.0),
                  v.end_sign);
    v.evidence = buf;
    return v;
}

NondegeneracyResult nondegeneracy_check(const GroundState& ground) {
    Classification cl;
    cl.kind = ClassKind::GroundCandidate;
    cl.d = ground.d0;
    cl.radius = ground.variation_radius;
    NondegeneracyResult r;
    r.verdict = admissibility(ground.extended, cl);
    r.strict = r.verdict.strict;
    r.nondegenerate = r.strict == Strictness::Strict;
    return r;
}

}  // namespace elliptic
