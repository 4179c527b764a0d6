#include <cmath>
#include <cstring>

#include "doctest.h"
#include "sketchls/errors.hpp"
#include "sketchls/estimators.hpp"

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

DataBundle ols_fixture() {
    // 5 x 2 fixture with noise
    DataBundle data;
    data.x = Matrix(5, 2);
    data.x << 1, 0.2, 1, -1.3, 1, 0.7, 1, 2.1, 1, -0.4;
    data.y = Vector(5);
    data.y << 0.5, -1.1, 1.9, 3.2, 0.1;
    return data;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

} // namespace

TEST_CASE("fit_ols: exact fit has zero residuals and zero covariances") {
    DataBundle data;
    data.x = random_matrix(8, 2, 1);
    Vector c(2);
    c << 2.0, -1.0;
    data.y = data.x * c;
    FitResult fit = fit_ols(data);
    CHECK((fit.beta - c).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(fit.s_squared < 1e-24);
    CHECK(fit.cov_homo.cwiseAbs().maxCoeff() < 1e-20);
    CHECK(fit.cov_robust.cwiseAbs().maxCoeff() < 1e-20);
}

TEST_CASE("fit_ols: intercept only gives the mean, variance s^2/n") {
    DataBundle data;
    data.x = Matrix::Ones(6, 1);
    data.y = Vector(6);
    data.y << 1, 2, 3, 4, 5, 9;
    FitResult fit = fit_ols(data);
    CHECK(fit.beta(0) == doctest::Approx(4.0));
    // per-observation normalization: cov_homo = s^2, Var(mean) = s^2 / n
    CHECK(fit.cov_homo(0, 0) == doctest::Approx(fit.s_squared));
    const double var_mean = fit.cov_homo(0, 0) / static_cast<double>(fit.sample_size_used);
    CHECK(var_mean == doctest::Approx(fit.s_squared / 6.0));
}

TEST_CASE("fit_ols: brute-force oracle for beta and both covariances") {
    DataBundle data = ols_fixture();
    FitResult fit = fit_ols(data);

    const Matrix xtx = data.x.transpose() * data.x;
    const Vector beta = xtx.inverse() * data.x.transpose() * data.y;
    CHECK((fit.beta - beta).cwiseAbs().maxCoeff() < 1e-10);

    const Vector e = data.y - data.x * beta;
    const double n = 5.0;
    const double s2 = e.squaredNorm() / n;
    const Matrix v0 = s2 * (xtx / n).inverse();
    Matrix meat = Matrix::Zero(2, 2);
    for (int i = 0; i < 5; ++i) {
        meat += data.x.row(i).transpose() * data.x.row(i) * e(i) * e(i);
    }
    meat /= n;
    const Matrix v1 = (xtx / n).inverse() * meat * (xtx / n).inverse();
    CHECK((fit.cov_homo - v0).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fit.cov_robust - v1).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(fit.s_squared == doctest::Approx(s2));

    // residual orthogonality
    CHECK((data.x.transpose() * fit.residuals).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit_ols: equivariance in y-scaling") {
    DataBundle data = ols_fixture();
    FitResult base = fit_ols(data);
    DataBundle scaled = data;
    scaled.y *= 3.0;
    FitResult fit = fit_ols(scaled);
    CHECK((fit.beta - 3.0 * base.beta).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((fit.cov_homo - 9.0 * base.cov_homo).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fit.cov_robust - 9.0 * base.cov_robust).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit_ols: rank deficiency propagates") {
    DataBundle data;
    data.x = Matrix(4, 2);
    data.x.col(0) = Vector::Ones(4);
    data.x.col(1) = 5.0 * Vector::Ones(4);
    data.y = Vector::Ones(4);
    CHECK_THROWS_AS(fit_ols(data), RankDeficient);
}

TEST_CASE("fit_tsls: Z = X reduces to OLS") {
    DataBundle data = ols_fixture();
    data.z = data.x;
    FitResult tsls = fit_tsls(data);
    FitResult ols = fit_ols(data);
    CHECK((tsls.beta - ols.beta).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((tsls.cov_homo - ols.cov_homo).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((tsls.cov_robust - ols.cov_robust).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fit_tsls: exactly identified closed form and instrument orthogonality") {
    DataBundle data;
    data.x = random_matrix(9, 2, 3);
    data.z = random_matrix(9, 2, 4) + 2.0 * data.x; // correlated instruments
    data.y = random_matrix(9, 1, 5).col(0);
    FitResult fit = fit_tsls(data);
    const Vector closed = (data.z->transpose() * data.x).inverse() *
                          (data.z->transpose() * data.y);
    CHECK((fit.beta - closed).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((data.z->transpose() * fit.residuals).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit_tsls: explicit projection-matrix oracle, p=2 q=3") {
    DataBundle data;
    data.x = random_matrix(8, 2, 6);
    data.z = random_matrix(8, 3, 7);
    data.z->col(0) += data.x.col(0);
    data.z->col(1) += data.x.col(1);
    data.y = random_matrix(8, 1, 8).col(0);

    FitResult fit = fit_tsls(data);
    const Matrix pz = *data.z * (data.z->transpose() * *data.z).inverse() * data.z->transpose();
    const Matrix xpx = data.x.transpose() * pz * data.x;
    const Vector beta = xpx.inverse() * data.x.transpose() * pz * data.y;
    CHECK((fit.beta - beta).cwiseAbs().maxCoeff() < 1e-10);

    const Vector e = data.y - data.x * beta;
    const double n = 8.0;
    const double s2 = e.squaredNorm() / n;
    const Matrix w0 = s2 * (xpx / n).inverse();
    CHECK((fit.cov_homo - w0).cwiseAbs().maxCoeff() < 1e-9);

    const Matrix a_n = (xpx / n).inverse() * (data.x.transpose() * *data.z / n) *
                       (data.z->transpose() * *data.z / n).inverse();
    Matrix meat = Matrix::Zero(3, 3);
    for (int i = 0; i < 8; ++i) {
        meat += data.z->row(i).transpose() * data.z->row(i) * e(i) * e(i);
    }
    meat /= n;
    const Matrix w1 = a_n * meat * a_n.transpose();
    CHECK((fit.cov_robust - w1).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fit_tsls: q < p is not identified") {
    DataBundle data;
    data.x = random_matrix(9, 3, 9);
    data.z = random_matrix(9, 2, 10);
    data.y = random_matrix(9, 1, 11).col(0);
    CHECK_THROWS_AS(fit_tsls(data), NotIdentified);
}

TEST_CASE("covariances are PSD on random fits") {
    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        DataBundle data;
        data.x = random_matrix(30, 4, seed);
        data.y = random_matrix(30, 1, seed + 50).col(0);
        FitResult fit = fit_ols(data);
        for (const Matrix* cov : {&fit.cov_homo, &fit.cov_robust}) {
            Eigen::SelfAdjointEigenSolver<Matrix> eig(*cov);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * cov->trace());
        }
    }
}

TEST_CASE("fit_sketched: bernoulli m = n equals the full-sample fit bitwise") {
    DataBundle data;
    data.x = random_matrix(40, 3, 30);
    data.y = random_matrix(40, 1, 31).col(0);
    RngStream s(32, 0);
    SketchPlan plan = plan_sketch({SchemeKind::Bernoulli, 40}, 40, s);
    FitResult sk = fit_sketched(data, plan, FitKind::Ols);
    FitResult full = fit_ols(data);
    CHECK(bitwise_equal(sk.beta, full.beta));
    CHECK(bitwise_equal(sk.residuals, full.residuals));
    CHECK(sk.sample_size_used == full.sample_size_used);
    CHECK(std::memcmp(sk.cov_robust.data(), full.cov_robust.data(),
                      sizeof(double) * 9) == 0);
}

TEST_CASE("fit_sketched: countsketch preserves an exact linear relation") {
    DataBundle data;
    data.x = random_matrix(60, 3, 33);
    Vector c(3);
    c << 1.0, -2.0, 0.5;
    data.y = data.x * c;
    RngStream s(34, 0);
    SketchPlan plan = plan_sketch({SchemeKind::CountSketch, 10}, 60, s);
    FitResult fit = fit_sketched(data, plan, FitKind::Ols);
    CHECK((fit.beta - c).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit_sketched: effective_m and too-small sketches") {
    DataBundle data;
    data.x = random_matrix(50, 4, 35);
    data.y = random_matrix(50, 1, 36).col(0);
    RngStream s(37, 0);
    SketchPlan plan = plan_sketch({SchemeKind::CountSketch, 3}, 50, s);
    CHECK_THROWS_AS(fit_sketched(data, plan, FitKind::Ols), SketchTooSmall);
    SketchedData sk = sketch_bundle(plan_sketch({SchemeKind::CountSketch, 12}, 50, s), data);
    CHECK(sk.effective_m == 12);
    CHECK(sk.rows_out == 12);
}

TEST_CASE("t_test: pinned behavior") {
    DataBundle data = ols_fixture();
    FitResult fit = fit_ols(data);
    Vector c(2);
    c << 0.0, 1.0;

    // statistic 0 at the point estimate
    TestResult at_estimate = t_test(fit, c, c.dot(fit.beta), CovType::Robust);
    CHECK(at_estimate.statistic == doctest::Approx(0.0));
    CHECK(at_estimate.p_value == doctest::Approx(1.0));

    // hand-computed statistic
    const double se = std::sqrt(fit.cov_robust(1, 1) / 5.0);
    TestResult shifted = t_test(fit, c, fit.beta(1) - se, CovType::Robust);
    CHECK(shifted.statistic == doctest::Approx(1.0).epsilon(1e-10));

    // p-value oracle at the 5% critical value
    TestResult crit = t_test(fit, c, fit.beta(1) - 1.959964 * se, CovType::Robust);
    CHECK(crit.p_value == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(crit.reject_at(0.051));
    CHECK(!crit.reject_at(0.049));
}

TEST_CASE("t_test: zero variance errors") {
    FitResult fit;
    fit.beta = Vector::Ones(2);
    fit.cov_homo = Matrix::Zero(2, 2);
    fit.cov_robust = Matrix::Zero(2, 2);
    fit.sample_size_used = 10;
    Vector c(2);
    c << 2.0, -1.0;
    CHECK_THROWS_AS(t_test(fit, c, 0.0, CovType::Homo), ZeroVariance);
    Vector wrong(3);
    CHECK_THROWS_AS(t_test(fit, wrong, 0.0, CovType::Homo), DimensionMismatch);
}

TEST_CASE("first_stage_f: zero coefficients give F = 0, one instrument gives t^2") {
    DataBundle data;
    data.z = random_matrix(60, 3, 40);
    data.x = Matrix(60, 2);
    data.x.col(0) = Vector::Ones(60);
    // X_2 depends only on the first instrument, so excluded {2} has zeta = 0
    data.x.col(1) = data.z->col(0) + 0.3 * random_matrix(60, 1, 41).col(0);
    data.y = random_matrix(60, 1, 42).col(0);

    // single excluded instrument: F = t^2 of that first-stage coefficient
    TestResult f = first_stage_f(data, 1, {2}, CovType::Robust);
    DataBundle first_stage{data.x.col(1), *data.z, std::nullopt};
    FitResult fs = fit_ols(first_stage);
    Vector c = Vector::Zero(3);
    c(2) = 1.0;
    TestResult t = t_test(fs, c, 0.0, CovType::Robust);
    CHECK(f.statistic == doctest::Approx(t.statistic * t.statistic).epsilon(1e-10));
    CHECK(f.df_num == 1);

    // exactly-zero excluded block: regressing the zero vector on Z gives
    // bitwise-zero coefficients, and the F statistic sits at its algebraic
    // limit F = 0
    DataBundle null_data = data;
    null_data.x.col(1).setZero();
    TestResult f0 = first_stage_f(null_data, 1, {1, 2}, CovType::Homo);
    CHECK(f0.statistic == 0.0);
    CHECK(f0.p_value == 1.0);
}

TEST_CASE("first_stage_f: argument validation") {
    DataBundle data;
    data.x = random_matrix(10, 2, 43);
    data.y = random_matrix(10, 1, 44).col(0);
    CHECK_THROWS_AS(first_stage_f(data, 1, {0}, CovType::Homo), InvalidArgument);
    data.z = random_matrix(10, 3, 45);
    CHECK_THROWS_AS(first_stage_f(data, 5, {0}, CovType::Homo), InvalidArgument);
    CHECK_THROWS_AS(first_stage_f(data, 1, {}, CovType::Homo), InvalidArgument);
    CHECK_THROWS_AS(first_stage_f(data, 1, {7}, CovType::Homo), InvalidArgument);
}
