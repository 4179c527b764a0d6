#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "sketchls/rng.hpp"

namespace sketchls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin singular value decomposition A = U * diag(s) * Vt with k = min(rows, cols).
struct ThinSvd {
    Matrix u;               // rows x k, orthonormal columns
    Vector singular_values; // length k, nonincreasing, nonnegative
    Matrix vt;              // k x cols

    double sigma_max() const { return singular_values.size() ? singular_values(0) : 0.0; }
    double sigma_min() const {
        return singular_values.size() ? singular_values(singular_values.size() - 1) : 0.0;
    }
    Matrix reconstruct() const { return u * singular_values.asDiagonal() * vt; }
};

/// Least squares solve argmin ||Ax - b|| via column-pivoted QR.
/// Requires rows >= cols and full column rank: throws RankDeficient with the
/// offending R diagonal index when |R(i,i)| <= rel_tol * |R(0,0)|.
Vector qr_solve(const Matrix& a, const Vector& b, double rel_tol = 1e-12);

/// Thin SVD (one-sided Jacobi). Throws NoConvergence if the iteration cap is
/// hit, InvalidArgument on non-finite entries.
ThinSvd thin_svd(const Matrix& a);

/// Spectral norm by power iteration on A^T A.
/// Deterministic start vector; stops at relative change <= rel_tol or at
/// max_iter (returns the current estimate at the cap).
double spectral_norm_power(const Matrix& a, double rel_tol = 1e-10,
                           std::size_t max_iter = 10000);

/// Standard normal quantile, AS241-class rational approximation (|err| <= 1e-9,
/// in practice ~1e-15). Throws OutOfDomain unless 0 < p < 1.
double normal_quantile(double p);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Upper tail P(chi^2_df > x).
double chi_squared_sf(double x, double df);

/// Draw from N(0, Sigma) with Sigma_ij = rho^|i-j| using the AR(1) recursion
/// x_1 = eps_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) eps_j. Requires |rho| < 1.
Vector mvn_ar1(std::size_t dim, double rho, RngStream& stream);

} // namespace sketchls
