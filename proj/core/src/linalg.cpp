#include "sketchls/linalg.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "sketchls/errors.hpp"

namespace sketchls {

Vector qr_solve(const Matrix& a, const Vector& b, double rel_tol) {
    if (a.rows() < a.cols()) {
        throw InvalidArgument("qr_solve: need rows >= cols, got " + std::to_string(a.rows()) +
                              " x " + std::to_string(a.cols()));
    }
    if (b.size() != a.rows()) {
        throw DimensionMismatch("qr_solve: b has length " + std::to_string(b.size()) +
                                ", A has " + std::to_string(a.rows()) + " rows");
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    const auto& r = qr.matrixR();
    const double largest = std::abs(r(0, 0));
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        const double d = std::abs(r(i, i));
        if (!(d > rel_tol * largest)) {
            throw RankDeficient(static_cast<std::size_t>(i),
                                largest > 0.0 ? d / largest : 0.0);
        }
    }
    return qr.solve(b);
}

ThinSvd thin_svd(const Matrix& a) {
    if (!a.allFinite()) {
        throw InvalidArgument("thin_svd: non-finite entries");
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        // Eigen's internal sweep cap; effectively unreachable for finite input
        throw NoConvergence(30);
    }
    ThinSvd out;
    out.u = svd.matrixU();
    out.singular_values = svd.singularValues();
    out.vt = svd.matrixV().transpose();
    return out;
}

double spectral_norm_power(const Matrix& a, double rel_tol, std::size_t max_iter) {
    if (a.rows() == 0 || a.cols() == 0) {
        return 0.0;
    }
    // deterministic start with nonuniform entries so no single direction is
    // systematically missed
    Vector v(a.cols());
    RngStream init(0x5EEDBA5Eull, 0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = 1.0 + 0.25 * init.uniform();
    }
    v.normalize();
    double sigma = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        Vector w = a.transpose() * (a * v);
        double norm = w.norm();
        if (norm == 0.0) {
            return 0.0; // v in the null space of a nonzero-rank map is measure
                        // zero with the perturbed start; A must be zero
        }
        double next = std::sqrt(norm);
        v = w / norm;
        if (std::abs(next - sigma) <= rel_tol * next) {
            return next;
        }
        sigma = next;
    }
    return sigma;
}

namespace {

// Wichura's PPND16 coefficient sets.
constexpr double kA[8] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                          1.9715909503065514427e+3, 1.3731693765509461125e+4,
                          4.5921953931549871457e+4, 6.7265770927008700853e+4,
                          3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[8] = {1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                          5.3941960214247511077e+3, 2.1213794301586595867e+4,
                          3.9307895800092710610e+4, 2.8729085735721942674e+4,
                          5.2264952788528545610e+3};
constexpr double kC[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                          5.76949722146069140550e0, 3.64784832476320460504e0,
                          1.27045825245236838258e0, 2.41780725177450611770e-1,
                          2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
                          6.89767334985100004550e-1, 1.48103976427480074590e-1,
                          1.51986665636164571966e-2, 5.47593808499534494600e-4,
                          1.05075007164441684324e-9};
constexpr double kE[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                          1.78482653991729133580e0, 2.96560571828504891230e-1,
                          2.65321895265761230930e-2, 1.24266094738807843860e-3,
                          2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                          1.48753612908506148525e-2, 7.86869131145613259100e-4,
                          1.84631831751005468180e-5, 1.42151175831644588870e-7,
                          2.04426310338993978564e-15};

inline double poly7(const double* c, double x) {
    double r = c[7];
    for (int i = 6; i >= 0; --i) {
        r = r * x + c[i];
    }
    return r;
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw OutOfDomain("normal_quantile: p must be in (0,1), got " + std::to_string(p));
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly7(kA, r) / poly7(kB, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = poly7(kC, r) / poly7(kD, r);
    } else {
        r -= 5.0;
        val = poly7(kE, r) / poly7(kF, r);
    }
    return q < 0.0 ? -val : val;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double chi_squared_sf(double x, double df) {
    if (!(df > 0.0)) {
        throw OutOfDomain("chi_squared_sf: df must be positive");
    }
    if (x <= 0.0) {
        return 1.0;
    }
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

Vector mvn_ar1(std::size_t dim, double rho, RngStream& stream) {
    if (!(std::abs(rho) < 1.0)) {
        throw InvalidArgument("mvn_ar1: |rho| must be < 1");
    }
    Vector x(static_cast<Eigen::Index>(dim));
    if (dim == 0) {
        return x;
    }
    const double innov = std::sqrt(1.0 - rho * rho);
    x(0) = stream.normal();
    for (std::size_t j = 1; j < dim; ++j) {
        x(static_cast<Eigen::Index>(j)) =
            rho * x(static_cast<Eigen::Index>(j - 1)) + innov * stream.normal();
    }
    return x;
}

} // namespace sketchls
