#ifndef ELLIPTIC_NONLINEARITY_HPP
#define ELLIPTIC_NONLINEARITY_HPP

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elliptic {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Identifies a closed-form nonlinearity and its parameters.
struct FamilyTag {
    std::string family;
    std::map<std::string, double> params;
};

/// A scalar nonlinearity g on [0, inf) together with g' and G(s) = int_0^s g.
///
/// Builtin families are odd in s so that the solver may safely evaluate them
/// at slightly negative arguments near a zero crossing.
class SemilinearModel {
public:
    using Fn = std::function<double(double)>;

    SemilinearModel(std::string name, Fn g, Fn g_prime, Fn g_anti,
                    std::optional<FamilyTag> tag = std::nullopt);

    double g(double s) const { return g_(s); }
    double g_prime(double s) const { return g_prime_(s); }
    double G(double s) const { return g_anti_(s); }

    const std::string& name() const noexcept { return name_; }
    const std::optional<FamilyTag>& family() const noexcept { return tag_; }

private:
    std::string name_;
    Fn g_;
    Fn g_prime_;
    Fn g_anti_;
    std::optional<FamilyTag> tag_;
};

enum class Family { Power, CubicQuinticDefocusing, CubicQuinticFocusing, Nagumo, QuadraticCubic };

struct FamilySpec {
    Family family = Family::Power;
    double lambda = 1.0;  // power: coefficient of the linear term
    double p = 3.0;       // power: exponent
    double c = 0.0;       // focusing quintic, Nagumo, quadratic-cubic
    int sign = +1;        // quadratic-cubic: -s + sign*c*s^2 - sign*s^3
};

/// Closed-form g, g', G for a builtin family. Parameters are not validated here.
SemilinearModel builtin_model(const FamilySpec& spec);

/// Builtin lookup by name ("power", "cubic_quintic_defocusing",
/// "cubic_quintic_focusing", "nagumo", "quadratic_cubic"). Unknown names or
/// parameter keys raise ConfigError.
SemilinearModel builtin_model(std::string_view family, const std::map<std::string, double>& params);

/// User model from expression strings in the variable s.
SemilinearModel expression_model(std::string_view expr_g, std::string_view expr_g_prime,
                                 std::string_view expr_G);

struct StructuralConstants {
    double b = 0.0;
    double b_tilde = kInfinity;
    std::optional<double> zeta;  // absent when G never reaches the positivity margin
    double s_star = kInfinity;
    double K_infty = 0.0;  // limit of K_g at b~-; if b~ = inf, extrapolated from the top two decades
    double search_bound = 0.0;
};

/// K_g(s) = s g'(s) / g(s). Raises PoleError within |g| < 1e-14 (1 + |s g'|).
double growth_function(const SemilinearModel& model, double s);

/// I(s, lambda) = lambda s g'(s) - (lambda + 2) g(s).
double i_function(const SemilinearModel& model, double s, double lambda);

/// Lambda(t) = 2 / (K_g(t) - 1) for t in (b, s*). DomainError outside.
double lambda_map(const SemilinearModel& model, const StructuralConstants& consts, double t);

/// Ordered sign changes of g on a dense log grid in (0, search_bound].
struct SignScan {
    std::vector<double> brackets_lo;
    std::vector<double> brackets_hi;
    bool negative_near_zero = true;
    double first_sample = 0.0;
};
SignScan scan_sign_changes(const SemilinearModel& model, double search_bound);

/// Locate b, b~, zeta, s*, K_infty. Throws StructureError if g has no sign
/// change in (0, search_bound], more than two positive zeros, or is not
/// negative just right of the origin.
StructuralConstants structural_constants(const SemilinearModel& model, double search_bound = 1e8);

inline constexpr double kZetaMargin = 1e-10;

}  // namespace elliptic

#endif
