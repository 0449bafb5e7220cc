#ifndef ELLIPTIC_HYPOTHESIS_HPP
#define ELLIPTIC_HYPOTHESIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "elliptic/dual.hpp"
#include "elliptic/nonlinearity.hpp"

namespace elliptic {

enum class Verdict { Pass, Fail, Undetermined };

const char* to_string(Verdict v);

struct Witness {
    double abscissa = 0.0;
    double value = 0.0;
};

struct ConditionResult {
    std::string label;
    Verdict verdict = Verdict::Pass;
    /// Worst-case margin; negative means violated.
    double margin = 0.0;
    std::optional<Witness> witness;  // present for every Fail
    std::string detail;
};

/// Grid-sampled verdicts. This is evidence on a finite grid, not a proof.
struct HypothesisReport {
    GridSpec grid;
    int dimension = 0;
    std::vector<ConditionResult> conditions;

    const ConditionResult& at(const std::string& label) const;
    bool has(const std::string& label) const;
    bool all_pass() const;
    bool any_fail() const;
    bool any_undetermined() const;
    /// 0 all pass, 2 any fail, 3 undetermined present and none failed.
    int exit_code() const;
};

/// (G1)-(G6). Throws PreconditionError when consts were not produced from model.
HypothesisReport check_semilinear(const SemilinearModel& model, const StructuralConstants& consts,
                                  const GridSpec& grid, int dimension);

/// Computes the constants itself. When g has no usable sign structure the
/// report carries G2 and G3 failures and omits G4/G5, which need b.
HypothesisReport check_semilinear(const SemilinearModel& model, const GridSpec& grid, int dimension);

/// (H1)-(H5) on h and (A1)-(A4) on a. The exponent ell is taken from a.
/// Without a sign structure for h, H4 and A3 are omitted.
HypothesisReport check_quasilinear(const DiffusionModel& a, const SemilinearModel& h, const GridSpec& grid,
                                   int dimension);

/// Slack used by the monotonicity tests between adjacent samples.
inline constexpr double kMonotoneSlack = 1e-10;
/// Band around the critical exponent inside which a growth verdict is undetermined.
inline constexpr double kGrowthBand = 1e-3;

}  // namespace elliptic

#endif
