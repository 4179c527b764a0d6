#include <cmath>

#include "doctest.h"
#include "sketchls/errors.hpp"
#include "sketchls/linalg.hpp"
#include "sketchls/rng.hpp"

using namespace sketchls;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    RngStream s(seed, 0);
    Matrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            a(i, j) = s.normal();
        }
    }
    return a;
}

// independent oracle: plain power iteration, no library SVD involved
double power_iteration_sigma_max(const Matrix& a) {
    Vector v = Vector::Ones(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) += 0.01 * static_cast<double>(i);
    }
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 5000; ++it) {
        Vector w = a.transpose() * (a * v);
        double norm = w.norm();
        double next = std::sqrt(norm);
        v = w / norm;
        if (std::abs(next - sigma) < 1e-12 * next) {
            return next;
        }
        sigma = next;
    }
    return sigma;
}

} // namespace

TEST_CASE("qr_solve: identity") {
    Matrix a = Matrix::Identity(3, 3);
    Vector b(3);
    b << 1, 2, 3;
    Vector x = qr_solve(a, b);
    CHECK(x.isApprox(b, 1e-14));
}

TEST_CASE("qr_solve: column of ones gives the mean") {
    Matrix a = Matrix::Ones(5, 1);
    Vector b(5);
    b << 1, 2, 3, 4, 5;
    Vector x = qr_solve(a, b);
    CHECK(x(0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("qr_solve: hand-derived normal equations") {
    // A = [[1,0],[1,1],[1,2]], b = (0,1,2): A'A = [[3,3],[3,5]], A'b = (3,5)
    // solving gives (0, 1)
    Matrix a(3, 2);
    a << 1, 0, 1, 1, 1, 2;
    Vector b(3);
    b << 0, 1, 2;
    Vector x = qr_solve(a, b);
    CHECK(x(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(x(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("qr_solve: rank deficiency reports the offending index") {
    Matrix a(4, 2);
    a.col(0) = Vector::Ones(4);
    a.col(1) = 2.0 * Vector::Ones(4);
    try {
        qr_solve(a, Vector::Zero(4));
        FAIL("expected RankDeficient");
    } catch (const RankDeficient& e) {
        CHECK(e.diagonal_index == 1);
    }
}

TEST_CASE("qr_solve: residual orthogonality on random instances") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Matrix a = random_matrix(40, 6, seed);
        Vector b = random_matrix(40, 1, seed + 100).col(0);
        Vector x = qr_solve(a, b);
        Vector resid = b - a * x;
        const double bound = 1e-8 * power_iteration_sigma_max(a) * b.norm();
        CHECK((a.transpose() * resid).cwiseAbs().maxCoeff() <= bound);
    }
}

TEST_CASE("thin_svd: diagonal") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 3.0;
    a(1, 1) = 1.0;
    auto svd = thin_svd(a);
    CHECK(svd.singular_values(0) == doctest::Approx(3.0));
    CHECK(svd.singular_values(1) == doctest::Approx(1.0));
}

TEST_CASE("thin_svd: orthonormal input has unit singular values") {
    Matrix a = random_matrix(10, 4, 11);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(10, 4);
    auto svd = thin_svd(q);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(svd.singular_values(i) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("thin_svd: reconstruction and invariants") {
    Matrix a = random_matrix(3, 2, 21);
    auto svd = thin_svd(a);
    CHECK((svd.reconstruct() - a).norm() <= 1e-10 * a.norm());
    CHECK((svd.u.transpose() * svd.u - Matrix::Identity(2, 2)).norm() < 1e-12);
    CHECK(svd.singular_values(0) >= svd.singular_values(1));
    CHECK(svd.singular_values(1) >= 0.0);
}

TEST_CASE("thin_svd: sigma_max matches power iteration") {
    for (std::uint64_t seed = 31; seed <= 34; ++seed) {
        Matrix a = random_matrix(30, 7, seed);
        auto svd = thin_svd(a);
        CHECK(svd.sigma_max() ==
              doctest::Approx(power_iteration_sigma_max(a)).epsilon(1e-8));
    }
}

TEST_CASE("thin_svd rejects non-finite input") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = std::nan("");
    CHECK_THROWS_AS(thin_svd(a), InvalidArgument);
}

TEST_CASE("spectral_norm_power agrees with the SVD") {
    for (std::uint64_t seed = 41; seed <= 44; ++seed) {
        Matrix a = random_matrix(12, 12, seed);
        a = a + a.transpose().eval(); // symmetric indefinite
        CHECK(spectral_norm_power(a) == doctest::Approx(thin_svd(a).sigma_max()).epsilon(1e-8));
    }
    CHECK(spectral_norm_power(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("normal_quantile: pinned values") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(5e-7));
    CHECK(normal_quantile(0.8) == doctest::Approx(0.841621).epsilon(5e-7));
    CHECK_THROWS_AS(normal_quantile(0.0), OutOfDomain);
    CHECK_THROWS_AS(normal_quantile(1.0), OutOfDomain);
}

TEST_CASE("normal_quantile inverts the CDF to 1e-9") {
    for (double p : {1e-8, 1e-4, 0.01, 0.2, 0.5, 0.7, 0.95, 0.999, 1.0 - 1e-7}) {
        const double x = normal_quantile(p);
        CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("chi_squared_sf sanity") {
    CHECK(chi_squared_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_squared_sf(0.0, 5.0) == 1.0);
    CHECK(chi_squared_sf(10.0, 4.0) == doctest::Approx(0.040427681994512805).epsilon(1e-9));
}

TEST_CASE("mvn_ar1: rho = 0 gives iid standard normals") {
    RngStream s(51, 0);
    const int reps = 100000;
    double sum_sq = 0.0, cross = 0.0;
    for (int r = 0; r < reps; ++r) {
        Vector x = mvn_ar1(2, 0.0, s);
        sum_sq += x(0) * x(0);
        cross += x(0) * x(1);
    }
    CHECK(std::abs(sum_sq / reps - 1.0) < 3.0 * std::sqrt(2.0 / reps));
    CHECK(std::abs(cross / reps) < 3.0 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("mvn_ar1: rho = 0.5 correlations") {
    RngStream s(52, 0);
    const int reps = 100000;
    double c01 = 0.0, c05 = 0.0;
    for (int r = 0; r < reps; ++r) {
        Vector x = mvn_ar1(6, 0.5, s);
        c01 += x(0) * x(1);
        c05 += x(0) * x(5);
    }
    // se of a product-moment of two unit normals with corr rho is
    // sqrt((1 + rho^2) / reps)
    CHECK(std::abs(c01 / reps - 0.5) < 3.0 * std::sqrt(1.25 / reps));
    CHECK(std::abs(c05 / reps - 0.03125) < 3.0 * std::sqrt(1.001 / reps));
}

TEST_CASE("mvn_ar1 rejects |rho| >= 1") {
    RngStream s(53, 0);
    CHECK_THROWS_AS(mvn_ar1(3, 1.0, s), InvalidArgument);
}
