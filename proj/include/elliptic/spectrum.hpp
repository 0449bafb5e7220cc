#ifndef ELLIPTIC_SPECTRUM_HPP
#define ELLIPTIC_SPECTRUM_HPP

#include <functional>
#include <string>
#include <vector>

#include "elliptic/dual.hpp"
#include "elliptic/shooting.hpp"

namespace elliptic {

/// Zero-eigenvalue tolerance at the reference mesh.
inline constexpr double kZeroTolerance = 5e-3;
inline constexpr int kDefaultMesh = 4000;

/// Symmetric tridiagonal form of
///   phi -> r^{1-N} (r^{N-1} A phi')' + (q - A lambda_l / r^2) phi
/// on the cell-centred mesh r_i = (i + 1/2) h, h = R_max / n. The face at
/// r = 0 carries weight r^{N-1} = 0 (no flux); phi = 0 on the face r = R_max.
/// Conjugation by sqrt(r_i^{N-1}) makes the matrix symmetric; eigenvectors
/// chi relate to phi by phi_i = chi_i / r_i^{(N-1)/2}.
struct SectorMatrix {
    int dimension = 0;
    int l = 0;
    double h = 0.0;
    double R_max = 0.0;
    std::vector<double> r;
    std::vector<double> diag;
    std::vector<double> off;  // size n - 1
};

/// l(l + N - 2).
double angular_eigenvalue(int l, int n);

/// A may be empty (A = 1).
SectorMatrix assemble_sector(const std::function<double(double)>& q, const std::function<double(double)>& A,
                             int dimension, int l, int mesh_n, double R_max);

struct Eigenpairs {
    int dimension = 0;
    int l = 0;
    std::vector<double> r;
    std::vector<double> values;                // descending
    std::vector<std::vector<double>> vectors;  // chi, unit Euclidean norm
    /// phi_i = chi_i / r_i^{(N-1)/2}
    std::vector<double> phi(std::size_t k) const;
};

/// The k largest eigenpairs (LAPACK dstevr).
Eigenpairs top_eigenpairs(const SectorMatrix& m, int k);

/// u, u' on given radii: the trusted trajectory, then the linearised tail
/// u ~ r^{-nu} K_nu(kappa r) matched in value at the trust radius.
struct ProfileSamples {
    std::vector<double> u, u_prime;
};
ProfileSamples ground_profile(const GroundState& ground, const std::vector<double>& r);

/// R_max <= 0 selects 1.5 r_max of the ground state. ResolutionError if the
/// mesh has fewer than 10 points per decay length 1/sqrt(-g'(0)).
Eigenpairs sector_eigs(const GroundState& ground, int l, int mesh_n, double R_max, int k_top);

struct SpectralVerdict {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::string detail;
};

struct SectorSummary {
    std::string operator_name;  // "L", "L1", "L2"
    int l = 0;
    int mesh_n = 0;
    std::vector<double> eigenvalues;  // descending for L, ascending for L1/L2
    std::vector<double> r;            // eigenvector sample radii (thinned)
    std::vector<double> eigenvector;  // phi of the reported mode, sampled at r
};

struct SpectralReport {
    std::string kind;  // "semilinear" or "mnls"
    int dimension = 0;
    int mesh_n = 0;
    double R_max = 0.0;
    double zero_tolerance = kZeroTolerance;
    std::vector<SectorSummary> sectors;
    std::vector<SpectralVerdict> verdicts;

    bool all_pass() const;
    const SpectralVerdict& at(const std::string& name) const;
};

/// Sectors l = 0, 1, 2 of L = Delta + g'(u) with verdicts mu1_positive_simple,
/// mu1_one_signed, l0_kernel_free, mu2_zero, l1_kernel_matches_uprime,
/// l2_no_kernel, mu1_tail_decay.
SpectralReport corollary24_report(const GroundState& ground, int mesh_n = kDefaultMesh, double R_max = 0.0);

/// Linearisation of -Delta w + lambda w - kappa w Delta(w^2) = w^p about the
/// profile of a solve_quasilinear run with a = 1 + 2 kappa t^2:
///   L1 = -div(A grad) + lambda - 4 kappa w Dw - 2 kappa |w'|^2 - p w^{p-1}, A = 1 + 2 kappa w^2
///   L2 = -Delta + lambda - 2 kappa (w Dw + |w'|^2) - w^{p-1}
/// with Dw taken from the equation. Verdicts l2_zero_mode_matches_w,
/// l1_radial_kernel_free, l1_l1_zero_mode_matches_wprime.
SpectralReport mnls_kernel_report(const QuasilinearSolution& w, double lambda, double kappa, double p,
                                  int mesh_n = kDefaultMesh, double R_max = 0.0);

/// Cosine similarity in the weighted inner product sum r_i^{N-1} x_i y_i.
double weighted_cosine(const std::vector<double>& r, int dimension, const std::vector<double>& x,
                       const std::vector<double>& y);

}  // namespace elliptic

#endif
