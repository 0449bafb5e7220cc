#ifndef ELLIPTIC_DUAL_HPP
#define ELLIPTIC_DUAL_HPP

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elliptic/nonlinearity.hpp"
#include "elliptic/shooting.hpp"

namespace elliptic {

/// Diffusion coefficient a(t) of -div(a(u) grad u) + a'(u)|grad u|^2/2 = h(u).
/// Evaluated evenly in t (a' odd) so that odd extensions stay consistent.
class DiffusionModel {
public:
    using Fn = std::function<double(double)>;

    DiffusionModel(std::string name, Fn a, Fn a_prime, Fn a_second, double ell,
                   std::optional<double> a_inf = std::nullopt, std::optional<FamilyTag> tag = std::nullopt);

    double a(double t) const { return a_(std::fabs(t)); }
    double a_prime(double t) const { return t < 0 ? -a1_(-t) : a1_(t); }
    double a_second(double t) const { return a2_(std::fabs(t)); }
    /// Growth exponent of a at infinity.
    double ell() const noexcept { return ell_; }
    /// Declared lim a(t)/t^ell, if known in closed form.
    const std::optional<double>& a_inf() const noexcept { return a_inf_; }
    const std::string& name() const noexcept { return name_; }
    const std::optional<FamilyTag>& family() const noexcept { return tag_; }

private:
    std::string name_;
    Fn a_, a1_, a2_;
    double ell_;
    std::optional<double> a_inf_;
    std::optional<FamilyTag> tag_;
};

/// a = 1 + 2 kappa t^2 (modified NLS), ell = 2, a_inf = 2 kappa.
DiffusionModel mnls_diffusion(double kappa);
/// a = 1; ell is carried only for the growth conditions.
DiffusionModel constant_diffusion(double ell = 2.0);
/// a = 1 + t^l1 + t^l2 with 0 < l1 < l2; ell = l2, a_inf = 1.
DiffusionModel two_power_diffusion(double l1, double l2);
/// a = t^2 + exp(-c t^2); ell = 2, a_inf = 1.
DiffusionModel gaussian_diffusion(double c);
/// By name: "mnls" {kappa}, "constant" {ell}, "two_power" {l1, l2}, "gaussian" {c}.
DiffusionModel builtin_diffusion(std::string_view family, const std::map<std::string, double>& params);
DiffusionModel expression_diffusion(std::string_view a, std::string_view a_prime, std::string_view a_second,
                                    double ell, std::optional<double> a_inf = std::nullopt);

/// Tabulated solution of f' = 1/sqrt(a(f)), f(0) = 0 on [0, s_max]. Between
/// nodes f is the quintic Hermite interpolant of (f, f', f''); f' and f'' at
/// any point come from the closed forms in f, never from differencing.
class DualTransform {
public:
    DualTransform(std::shared_ptr<const DiffusionModel> a, double s_max, double tol = 1e-14);

    double f(double s) const;
    double f_prime(double s) const;
    double f_second(double s) const;
    /// f^{-1}(t) by monotone lookup and Newton on the interpolant.
    double inverse(double t) const;

    double s_max() const noexcept { return s_.back(); }
    double f_max() const noexcept { return f_.back(); }
    double tol() const noexcept { return tol_; }
    std::size_t size() const noexcept { return s_.size(); }
    double node_s(std::size_t i) const { return s_[i]; }
    double node_f(std::size_t i) const { return f_[i]; }
    const DiffusionModel& diffusion() const { return *a_; }
    std::shared_ptr<const DiffusionModel> diffusion_ptr() const { return a_; }

    /// New table continuing the integration to s_new.
    DualTransform extended(double s_new) const;

private:
    DualTransform() = default;
    void integrate_to(double s_new);
    double interpolate(std::size_t k, double s) const;
    std::size_t segment(double s) const;

    std::shared_ptr<const DiffusionModel> a_;
    double tol_ = 1e-14;
    std::vector<double> s_, f_, fp_, fpp_;
};

/// Tabulates f on [0, s_max] (see DualTransform).
std::shared_ptr<const DualTransform> solve_f(const DiffusionModel& a, double s_max, double tol = 1e-14);

/// int_0^t sqrt(a) by adaptive Gauss-Kronrod, tolerance 1e-13. Independent of
/// the table and used to verify it.
double sqrt_a_integral(const DiffusionModel& a, double t);

/// g(s) = h(f(s)) f'(s), g' = h'(f)/a(f) - h(f) a'(f)/(2 a(f)^2), G(s) = H(f(s)).
/// Beyond the table the callbacks throw RangeExceeded.
SemilinearModel dual_nonlinearity(const SemilinearModel& h, std::shared_ptr<const DualTransform> transform);

/// Structural constants of the dual model mapped from those of h:
/// b = f^{-1}(beta), b~ = f^{-1}(beta~), zeta = f^{-1}(zeta_h); s* and K_infty
/// are computed on the dual model directly.
StructuralConstants dual_constants(const SemilinearModel& dual, const StructuralConstants& h_consts,
                                   const DualTransform& transform, double search_bound);

struct GridSpec {
    double lo = 1e-8;
    double hi = 1e8;
    int per_decade = 10000;

    /// Log-spaced points in [max(lo, a), min(hi, b)].
    std::vector<double> points(double a = 0.0, double b = kInfinity) const;
};

struct PhiCheck {
    bool pass = true;
    double worst_margin = 0.0;  // most negative phi(t_{i+1}) - phi(t_i) + slack
    double witness = 0.0;
};

/// phi(t) = t sqrt(a(t)) / int_0^t sqrt(a) non-decreasing on [beta, grid top].
PhiCheck phi_monotone_check(const DiffusionModel& a, double beta, const GridSpec& grid);

struct QuasilinearOptions {
    ShootingOptions shooting;
    double s_max = 0.0;  // 0: automatic
    double transform_tol = 1e-14;
    double search_bound = 1e8;
};

struct QuasilinearSolution {
    std::shared_ptr<const DualTransform> transform;
    std::shared_ptr<const SemilinearModel> dual_model;
    StructuralConstants h_consts;
    StructuralConstants dual_consts;
    GroundState ground;
    double u0 = 0.0;  // f(d0)
    /// max |a(u)(u'' + (N-1)/r u') + a'(u) u'^2/2 + h(u)| over the nodes of
    /// the trusted profile, where v'' is exact; this isolates the transform.
    double max_residual = 0.0;
    double residual_radius = 0.0;
    /// Same residual at step midpoints, dominated by the dense-output
    /// derivative error of the integrator.
    double midpoint_residual = 0.0;
    std::shared_ptr<const SemilinearModel> h_model;

    struct Physical {
        double r, u, u_prime, u_second;
    };
    /// u = f(v) and its radial derivatives at r.
    Physical physical(double r) const;
};

QuasilinearSolution solve_quasilinear(const DiffusionModel& a, const SemilinearModel& h, int n, double d_tol,
                                      const QuasilinearOptions& options = {});

}  // namespace elliptic

#endif
