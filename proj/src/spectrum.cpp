#include "elliptic/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>
#include <lapacke.h>

#include "elliptic/errors.hpp"

namespace elliptic {

namespace {

constexpr double kCosineMin = 0.999;
constexpr double kShrinkMin = 3.0;
constexpr double kDecayBand = 0.05;
constexpr int kTop = 4;

double weight(double r, int n) { return std::pow(r, n - 1); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void check_resolution(double kappa, int mesh_n, double R_max) {
    if (!(mesh_n >= 2)) throw ResolutionError("mesh_n must be at least 2");
    if (!(R_max > 0.0) || !std::isfinite(R_max)) throw ResolutionError("R_max must be positive and finite");
    const double per_length = mesh_n / (R_max * kappa);
    if (per_length < 10.0)
        throw ResolutionError("mesh has " + fmt(per_length) + " points per decay length, need at least 10");
}

SectorSummary summarise(const std::string& op, const Eigenpairs& e, std::size_t mode, bool ascending, int mesh_n) {
    SectorSummary s;
    s.operator_name = op;
    s.l = e.l;
    s.mesh_n = mesh_n;
    for (double v : e.values) s.eigenvalues.push_back(ascending ? -v : v);
    const auto phi = e.phi(mode);
    const std::size_t stride = std::max<std::size_t>(1, e.r.size() / 200);
    for (std::size_t i = 0; i < e.r.size(); i += stride) {
        s.r.push_back(e.r[i]);
        s.eigenvector.push_back(phi[i]);
    }
    return s;
}

SpectralVerdict verdict(std::string name, bool pass, double margin, std::string detail) {
    return {std::move(name), pass, margin, std::move(detail)};
}

// Index of the eigenvalue closest to zero.
std::size_t nearest_zero(const std::vector<double>& v) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) < std::abs(v[k])) k = i;
    return k;
}

// Shrink test of a near-zero eigenvalue under mesh doubling. Values already
// at rounding level count as converged.
bool shrinks(double coarse, double fine, double& ratio) {
    ratio = std::abs(coarse) / std::max(std::abs(fine), 1e-300);
    return ratio >= kShrinkMin || std::abs(fine) < 1e-9;
}

// Least-squares slope of log|chi| on the decaying part of the tail.
double tail_rate(const Eigenpairs& e, std::size_t mode, double kappa_guess, double& r_lo, double& r_hi) {
    const auto& chi = e.vectors[mode];
    double peak = 0.0;
    std::size_t ipk = 0;
    for (std::size_t i = 0; i < chi.size(); ++i)
        if (std::abs(chi[i]) > peak) {
            peak = std::abs(chi[i]);
            ipk = i;
        }
    const double r_stop = e.r.back() - 5.0 / kappa_guess;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    r_lo = r_hi = 0.0;
    for (std::size_t i = ipk; i < chi.size(); ++i) {
        const double a = std::abs(chi[i]) / peak;
        if (a > 1e-4) continue;
        if (a < 1e-10 || e.r[i] > r_stop) break;
        if (m == 0) r_lo = e.r[i];
        r_hi = e.r[i];
        const double x = e.r[i], y = std::log(a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 10) return std::nan("");
    return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

double angular_eigenvalue(int l, int n) { return static_cast<double>(l) * (l + n - 2); }

SectorMatrix assemble_sector(const std::function<double(double)>& q, const std::function<double(double)>& A,
                             int dimension, int l, int mesh_n, double R_max) {
    if (dimension < 2) throw DomainError("sector assembly needs N >= 2");
    if (l < 0) throw DomainError("angular index must be non-negative");
    if (mesh_n < 2 || !(R_max > 0.0)) throw ResolutionError("mesh_n >= 2 and R_max > 0 required");
    SectorMatrix m;
    m.dimension = dimension;
    m.l = l;
    m.R_max = R_max;
    m.h = R_max / mesh_n;
    const std::size_t n = static_cast<std::size_t>(mesh_n);
    const double h2 = m.h * m.h;
    const double lam = angular_eigenvalue(l, dimension);
    auto coef = [&](double r) { return A ? A(r) : 1.0; };

    m.r.resize(n);
    std::vector<double> w(n), face(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        m.r[i] = (static_cast<double>(i) + 0.5) * m.h;
        w[i] = weight(m.r[i], dimension);
    }
    // face[i] sits at r = i h; face[0] has zero weight, face[n] is the
    // Dirichlet face with ghost value -chi_{n-1}.
    for (std::size_t i = 0; i <= n; ++i) {
        const double rf = static_cast<double>(i) * m.h;
        face[i] = i == 0 ? 0.0 : weight(rf, dimension) * coef(rf);
    }
    m.diag.resize(n);
    m.off.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double right = i + 1 == n ? 2.0 * face[n] : face[i + 1];
        m.diag[i] = -(face[i] + right) / (w[i] * h2) + q(m.r[i]) - coef(m.r[i]) * lam / (m.r[i] * m.r[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) m.off[i] = face[i + 1] / (h2 * std::sqrt(w[i] * w[i + 1]));
    return m;
}

std::vector<double> Eigenpairs::phi(std::size_t k) const {
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = vectors.at(k)[i] / std::pow(r[i], 0.5 * (dimension - 1));
    return out;
}

Eigenpairs top_eigenpairs(const SectorMatrix& m, int k) {
    const lapack_int n = static_cast<lapack_int>(m.diag.size());
    k = std::clamp(k, 1, static_cast<int>(n));
    std::vector<double> d = m.diag, e(m.diag.size(), 0.0);
    std::copy(m.off.begin(), m.off.end(), e.begin());
    std::vector<double> w(n), z(static_cast<std::size_t>(n) * k);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, n - k + 1,
                                           n, 0.0, &found, w.data(), z.data(), n, support.data());
    if (info != 0) throw Error("dstevr failed with info " + std::to_string(info));

    Eigenpairs out;
    out.dimension = m.dimension;
    out.l = m.l;
    out.r = m.r;
    for (lapack_int j = found - 1; j >= 0; --j) {
        out.values.push_back(w[j]);
        std::vector<double> v(z.begin() + static_cast<std::ptrdiff_t>(j) * n,
                              z.begin() + static_cast<std::ptrdiff_t>(j + 1) * n);
        // Sign convention: largest component positive.
        const auto big = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        if (*big < 0.0)
            for (double& x : v) x = -x;
        out.vectors.push_back(std::move(v));
    }
    return out;
}

ProfileSamples ground_profile(const GroundState& ground, const std::vector<double>& r) {
    const Trajectory& t = ground.trajectory;
    const int n = ground.dimension;
    const double kappa = std::sqrt(-ground.model->g_prime(0.0));
    const double nu = 0.5 * (n - 2);
    const double rt = t.end_radius(), ut = t.u(t.size() - 1);
    const double kt = boost::math::cyl_bessel_k(nu, kappa * rt);
    ProfileSamples p;
    p.u.resize(r.size());
    p.u_prime.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double x = std::max(r[i], t.start_radius());
        if (x <= rt) {
            const auto s = t.sample(x);
            p.u[i] = s.u;
            p.u_prime[i] = s.u_prime;
        } else {
            const double scale = ut * std::pow(rt / x, nu) / kt;
            p.u[i] = scale * boost::math::cyl_bessel_k(nu, kappa * x);
            p.u_prime[i] = -kappa * scale * boost::math::cyl_bessel_k(nu + 1.0, kappa * x);
        }
    }
    return p;
}

namespace {

double resolve_R(const GroundState& ground, double R_max) { return R_max > 0.0 ? R_max : 1.5 * ground.r_max; }

double ground_kappa(const GroundState& ground) {
    const double g0 = ground.model->g_prime(0.0);
    if (!(g0 < 0.0)) throw PreconditionError("g'(0) must be negative for a decaying ground state");
    return std::sqrt(-g0);
}

// q = g'(u) tabulated on the cell centres and faces; assembly only asks
// for those radii, so a lookup by index is exact.
std::function<double(double)> tabulated(double h, std::vector<double> centre, std::vector<double> faces) {
    return [h, centre = std::move(centre), faces = std::move(faces)](double r) {
        const double k = r / h;
        const auto j = static_cast<std::size_t>(std::llround(k));
        if (std::abs(k - static_cast<double>(j)) < 1e-6) return faces.at(std::min(j, faces.size() - 1));
        return centre.at(std::min(static_cast<std::size_t>(k), centre.size() - 1));
    };
}

std::vector<double> centres(int mesh_n, double R_max) {
    std::vector<double> r(static_cast<std::size_t>(mesh_n));
    const double h = R_max / mesh_n;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (static_cast<double>(i) + 0.5) * h;
    return r;
}

std::vector<double> face_radii(int mesh_n, double R_max) {
    std::vector<double> r(static_cast<std::size_t>(mesh_n) + 1);
    const double h = R_max / mesh_n;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(i) * h;
    return r;
}

}  // namespace

Eigenpairs sector_eigs(const GroundState& ground, int l, int mesh_n, double R_max, int k_top) {
    R_max = resolve_R(ground, R_max);
    check_resolution(ground_kappa(ground), mesh_n, R_max);
    const auto rc = centres(mesh_n, R_max);
    const auto pu = ground_profile(ground, rc);
    std::vector<double> qc(rc.size());
    for (std::size_t i = 0; i < rc.size(); ++i) qc[i] = ground.model->g_prime(pu.u[i]);
    const auto q = tabulated(R_max / mesh_n, std::move(qc), {});
    return top_eigenpairs(assemble_sector(q, {}, ground.dimension, l, mesh_n, R_max), k_top);
}

double weighted_cosine(const std::vector<double>& r, int dimension, const std::vector<double>& x,
                       const std::vector<double>& y) {
    double xy = 0, xx = 0, yy = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double w = weight(r[i], dimension);
        xy += w * x[i] * y[i];
        xx += w * x[i] * x[i];
        yy += w * y[i] * y[i];
    }
    return xy / std::sqrt(xx * yy);
}

bool SpectralReport::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const SpectralVerdict& v) { return v.pass; });
}

const SpectralVerdict& SpectralReport::at(const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return v;
    throw ConfigError("no spectral verdict named " + name);
}

SpectralReport corollary24_report(const GroundState& ground, int mesh_n, double R_max) {
    R_max = resolve_R(ground, R_max);
    const double kappa = ground_kappa(ground);
    const int n = ground.dimension;
    const double tol = kZeroTolerance, margin = 10.0 * kZeroTolerance;

    const auto e0 = sector_eigs(ground, 0, mesh_n, R_max, kTop);
    const auto e1 = sector_eigs(ground, 1, mesh_n, R_max, kTop);
    const auto e1f = sector_eigs(ground, 1, 2 * mesh_n, R_max, kTop);
    const auto e2 = sector_eigs(ground, 2, mesh_n, R_max, kTop);

    SpectralReport rep;
    rep.kind = "semilinear";
    rep.dimension = n;
    rep.mesh_n = mesh_n;
    rep.R_max = R_max;
    rep.sectors = {summarise("L", e0, 0, false, mesh_n), summarise("L", e1, 0, false, mesh_n),
                   summarise("L", e2, 0, false, mesh_n)};

    const double mu1 = e0.values[0], mu2 = e0.values.size() > 1 ? e0.values[1] : -INFINITY;
    rep.verdicts.push_back(verdict("mu1_positive_simple", mu1 > tol && mu1 - mu2 > margin,
                                   std::min(mu1 - tol, mu1 - mu2 - margin),
                                   "mu1 = " + fmt(mu1) + ", next l=0 eigenvalue " + fmt(mu2)));

    // Components below the eigensolver's absolute accuracy carry no sign.
    const auto& chi = e0.vectors[0];
    const double peak = *std::max_element(chi.begin(), chi.end());
    const double floor = 1e-12 * peak;
    std::size_t negative = 0, noise = 0;
    double worst = peak;
    for (double x : chi) {
        if (std::abs(x) <= floor) {
            ++noise;
            continue;
        }
        if (x < 0.0) ++negative;
        worst = std::min(worst, x);
    }
    rep.verdicts.push_back(verdict("mu1_one_signed", negative == 0, worst / peak,
                                   std::to_string(negative) + " negative entries above 1e-12 of the peak, " +
                                       std::to_string(noise) + " entries at noise level"));

    rep.verdicts.push_back(verdict("l0_kernel_free", mu2 < -margin, -mu2 - margin,
                                   "second l=0 eigenvalue " + fmt(mu2) + ", required below " + fmt(-margin)));

    const double z = e1.values[0], zf = e1f.values[0];
    double ratio = 0.0;
    const bool shrink = shrinks(z, zf, ratio);
    rep.verdicts.push_back(verdict("mu2_zero", std::abs(z) <= tol && shrink, tol - std::abs(z),
                                   "top l=1 eigenvalue " + fmt(z) + " at mesh " + std::to_string(mesh_n) + ", " +
                                       fmt(zf) + " at mesh " + std::to_string(2 * mesh_n) + " (ratio " +
                                       fmt(ratio) + ")"));

    const auto up = ground_profile(ground, e1.r).u_prime;
    const double cs = std::abs(weighted_cosine(e1.r, n, e1.phi(0), up));
    rep.verdicts.push_back(verdict("l1_kernel_matches_uprime", cs >= kCosineMin, cs - kCosineMin,
                                   "cosine " + fmt(cs) + " against u'"));

    const double top2 = e2.values[0];
    rep.verdicts.push_back(verdict("l2_no_kernel", top2 < -margin, -top2 - margin, "top l=2 eigenvalue " + fmt(top2)));

    const double expected = std::sqrt(kappa * kappa + mu1);
    double r_lo = 0, r_hi = 0;
    const double rate = tail_rate(e0, 0, expected, r_lo, r_hi);
    const double dev = std::abs(rate / expected - 1.0);
    rep.verdicts.push_back(verdict("mu1_tail_decay", std::isfinite(rate) && dev <= kDecayBand,
                                   std::isfinite(rate) ? kDecayBand - dev : -INFINITY,
                                   "fitted rate " + fmt(rate) + " on [" + fmt(r_lo) + ", " + fmt(r_hi) +
                                       "], expected sqrt(-g'(0) + mu1) = " + fmt(expected)));
    return rep;
}

namespace {

struct MnlsOperators {
    Eigenpairs l2, l1_radial, l1_angular;
};

struct WProfile {
    std::vector<double> w, wp, lap;
};

WProfile mnls_profile(const QuasilinearSolution& s, const std::vector<double>& r, double lambda, double kappa,
                      double p) {
    const auto v = ground_profile(s.ground, r);
    WProfile out;
    out.w.resize(r.size());
    out.wp.resize(r.size());
    out.lap.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double w = s.transform->f(v.u[i]);
        const double wp = s.transform->f_prime(v.u[i]) * v.u_prime[i];
        out.w[i] = w;
        out.wp[i] = wp;
        // (1 + 2k w^2) Dw + 2k w w'^2 = lambda w - w^p
        out.lap[i] = (lambda * w - 2.0 * kappa * w * wp * wp - std::pow(std::max(w, 0.0), p)) /
                     (1.0 + 2.0 * kappa * w * w);
    }
    return out;
}

MnlsOperators mnls_operators(const QuasilinearSolution& s, double lambda, double kappa, double p, int mesh_n,
                             double R_max) {
    const int n = s.ground.dimension;
    const double h = R_max / mesh_n;
    const auto rc = centres(mesh_n, R_max), rf = face_radii(mesh_n, R_max);
    const auto pc = mnls_profile(s, rc, lambda, kappa, p);
    const auto pf = mnls_profile(s, rf, lambda, kappa, p);

    // The assembled form is r^{1-N}(r^{N-1} A phi')' + (q - A l/r^2) phi = -L phi.
    std::vector<double> q1(rc.size()), q2(rc.size()), ac(rc.size()), af(rf.size());
    for (std::size_t i = 0; i < rc.size(); ++i) {
        const double w = pc.w[i], wp = pc.wp[i], lap = pc.lap[i];
        const double wp1 = std::pow(std::max(w, 0.0), p - 1.0);
        q1[i] = -(lambda - 4.0 * kappa * w * lap - 2.0 * kappa * wp * wp - p * wp1);
        q2[i] = -(lambda - 2.0 * kappa * (w * lap + wp * wp) - wp1);
        ac[i] = 1.0 + 2.0 * kappa * w * w;
    }
    for (std::size_t i = 0; i < rf.size(); ++i) af[i] = 1.0 + 2.0 * kappa * pf.w[i] * pf.w[i];

    const auto A = tabulated(h, ac, af);
    MnlsOperators ops;
    ops.l2 = top_eigenpairs(assemble_sector(tabulated(h, q2, {}), {}, n, 0, mesh_n, R_max), kTop);
    ops.l1_radial = top_eigenpairs(assemble_sector(tabulated(h, q1, {}), A, n, 0, mesh_n, R_max), kTop);
    ops.l1_angular = top_eigenpairs(assemble_sector(tabulated(h, q1, {}), A, n, 1, mesh_n, R_max), kTop);
    return ops;
}

}  // namespace

SpectralReport mnls_kernel_report(const QuasilinearSolution& s, double lambda, double kappa, double p, int mesh_n,
                                  double R_max) {
    if (!s.transform) throw PreconditionError("quasilinear solution carries no transform");
    if (!(lambda > 0.0) || !(kappa >= 0.0) || !(p > 1.0)) throw DomainError("need lambda > 0, kappa >= 0, p > 1");
    R_max = resolve_R(s.ground, R_max);
    check_resolution(std::sqrt(lambda), mesh_n, R_max);
    const int n = s.ground.dimension;
    const double tol = kZeroTolerance, margin = 10.0 * kZeroTolerance;

    const auto ops = mnls_operators(s, lambda, kappa, p, mesh_n, R_max);
    const auto fine = mnls_operators(s, lambda, kappa, p, 2 * mesh_n, R_max);

    SpectralReport rep;
    rep.kind = "mnls";
    rep.dimension = n;
    rep.mesh_n = mesh_n;
    rep.R_max = R_max;

    // Eigenvalues of L are the negated ones of the assembled matrix.
    auto neg = [](const std::vector<double>& v) {
        std::vector<double> out;
        for (double x : v) out.push_back(-x);
        return out;
    };

    {
        const auto ev = neg(ops.l2.values);
        const std::size_t k = nearest_zero(ev);
        const double zf = -fine.l2.values[nearest_zero(neg(fine.l2.values))];
        double ratio = 0;
        const bool shrink = shrinks(ev[k], zf, ratio);
        const auto w = mnls_profile(s, ops.l2.r, lambda, kappa, p).w;
        const double cs = std::abs(weighted_cosine(ops.l2.r, n, ops.l2.phi(k), w));
        rep.sectors.push_back(summarise("L2", ops.l2, k, true, mesh_n));
        rep.verdicts.push_back(verdict("l2_zero_mode_matches_w", std::abs(ev[k]) <= tol && shrink && cs >= kCosineMin,
                                       std::min(tol - std::abs(ev[k]), cs - kCosineMin),
                                       "eigenvalue " + fmt(ev[k]) + " (mesh doubling ratio " + fmt(ratio) +
                                           "), cosine " + fmt(cs) + " against w"));
    }
    {
        const auto ev = neg(ops.l1_radial.values);
        const std::size_t k = nearest_zero(ev);
        rep.sectors.push_back(summarise("L1", ops.l1_radial, 0, true, mesh_n));
        rep.verdicts.push_back(verdict("l1_radial_kernel_free", std::abs(ev[k]) > margin, std::abs(ev[k]) - margin,
                                       "eigenvalue nearest 0 is " + fmt(ev[k]) + ", lowest " + fmt(ev[0])));
    }
    {
        const auto ev = neg(ops.l1_angular.values);
        const std::size_t k = nearest_zero(ev);
        const double zf = -fine.l1_angular.values[nearest_zero(neg(fine.l1_angular.values))];
        double ratio = 0;
        const bool shrink = shrinks(ev[k], zf, ratio);
        const auto wp = mnls_profile(s, ops.l1_angular.r, lambda, kappa, p).wp;
        const double cs = std::abs(weighted_cosine(ops.l1_angular.r, n, ops.l1_angular.phi(k), wp));
        rep.sectors.push_back(summarise("L1", ops.l1_angular, k, true, mesh_n));
        rep.verdicts.push_back(verdict("l1_l1_zero_mode_matches_wprime",
                                       std::abs(ev[k]) <= tol && shrink && cs >= kCosineMin,
                                       std::min(tol - std::abs(ev[k]), cs - kCosineMin),
                                       "eigenvalue " + fmt(ev[k]) + " (mesh doubling ratio " + fmt(ratio) +
                                           "), cosine " + fmt(cs) + " against w'"));
    }
    return rep;
}

}  // namespace elliptic
