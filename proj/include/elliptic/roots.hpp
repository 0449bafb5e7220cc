#ifndef ELLIPTIC_ROOTS_HPP
#define ELLIPTIC_ROOTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "elliptic/errors.hpp"

namespace elliptic {

/// Root of f in [lo, hi] given f(lo), f(hi) of opposite sign (or one of them
/// zero). Terminates when the bracket is narrower than abs_tol, measured
/// relative to the abscissa once it exceeds 1.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double flo, double fhi, double abs_tol = 1e-12) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw PreconditionError("bracketed_root: f has the same sign at both ends of the bracket");
    std::uintmax_t iters = 200;
    auto tol = [abs_tol](double a, double b) {
        return std::fabs(b - a) <= abs_tol * std::max(1.0, std::min(std::fabs(a), std::fabs(b)));
    };
    const std::pair<double, double> r =
        boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
}

template <class F>
double bracketed_root(F&& f, double lo, double hi, double abs_tol = 1e-12) {
    return bracketed_root(f, lo, hi, f(lo), f(hi), abs_tol);
}

}  // namespace elliptic

#endif
