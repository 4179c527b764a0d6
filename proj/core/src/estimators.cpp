#include "sketchls/estimators.hpp"

#include <cmath>

#include "sketchls/errors.hpp"

namespace sketchls {

void DataBundle::validate() const {
    if (static_cast<std::size_t>(x.rows()) != n()) {
        throw DimensionMismatch("data bundle: X has " + std::to_string(x.rows()) +
                                " rows, y has " + std::to_string(n()));
    }
    if (z && static_cast<std::size_t>(z->rows()) != n()) {
        throw DimensionMismatch("data bundle: Z has " + std::to_string(z->rows()) +
                                " rows, y has " + std::to_string(n()));
    }
    if (z && q() < p()) {
        throw NotIdentified(q(), p());
    }
}

namespace {

constexpr double kRankTol = 1e-12;

struct LsSolution {
    Vector beta;
    Matrix xtx_inv; // (X^T X)^{-1}
};

LsSolution solve_ls(const Matrix& x, const Vector& y) {
    if (x.rows() < x.cols()) {
        throw RankDeficient(0, 0.0);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    const auto& r = qr.matrixR();
    const Eigen::Index k = x.cols();
    const double largest = std::abs(r(0, 0));
    for (Eigen::Index i = 0; i < k; ++i) {
        const double d = std::abs(r(i, i));
        if (!(d > kRankTol * largest)) {
            throw RankDeficient(static_cast<std::size_t>(i),
                                largest > 0.0 ? d / largest : 0.0);
        }
    }
    LsSolution out;
    out.beta = qr.solve(y);
    Matrix rinv = r.topLeftCorner(k, k)
                      .triangularView<Eigen::Upper>()
                      .solve(Matrix::Identity(k, k));
    Matrix core = rinv * rinv.transpose();
    out.xtx_inv = qr.colsPermutation() * core * qr.colsPermutation().transpose();
    return out;
}

Matrix symmetrized(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

} // namespace

FitResult fit_ols(const DataBundle& data) {
    data.validate();
    const auto ls = solve_ls(data.x, data.y);
    const double m_used = static_cast<double>(data.n());

    FitResult fit;
    fit.kind = FitKind::Ols;
    fit.beta = ls.beta;
    fit.residuals = data.y - data.x * ls.beta;
    fit.sample_size_used = data.n();
    fit.s_squared = fit.residuals.squaredNorm() / m_used;
    // per-observation normalization: Var(beta) ~ cov / sample_size_used
    fit.cov_homo = symmetrized(fit.s_squared * m_used * ls.xtx_inv);
    Vector e2 = fit.residuals.array().square();
    Matrix meat = data.x.transpose() * e2.asDiagonal() * data.x;
    fit.cov_robust = symmetrized(m_used * (ls.xtx_inv * meat * ls.xtx_inv));
    return fit;
}

FitResult fit_tsls(const DataBundle& data) {
    data.validate();
    if (!data.z) {
        throw InvalidArgument("fit_tsls: no instruments in bundle");
    }
    const Matrix& z = *data.z;
    const double m_used = static_cast<double>(data.n());

    // First QR: projection of X on col(Z) without forming P_Z.
    Eigen::ColPivHouseholderQR<Matrix> qr_z(z);
    {
        const auto& r = qr_z.matrixR();
        const double largest = std::abs(r(0, 0));
        for (Eigen::Index i = 0; i < z.cols(); ++i) {
            const double d = std::abs(r(i, i));
            if (!(d > kRankTol * largest)) {
                throw RankDeficient(static_cast<std::size_t>(i),
                                    largest > 0.0 ? d / largest : 0.0);
            }
        }
    }
    Matrix q1 = qr_z.householderQ() * Matrix::Identity(z.rows(), z.cols());
    Matrix xhat = q1 * (q1.transpose() * data.x);

    // Second QR: regress y on the fitted regressors.
    const auto ls = solve_ls(xhat, data.y);

    FitResult fit;
    fit.kind = FitKind::Tsls;
    fit.beta = ls.beta;
    fit.residuals = data.y - data.x * ls.beta; // structural residuals
    fit.sample_size_used = data.n();
    fit.s_squared = fit.residuals.squaredNorm() / m_used;
    fit.cov_homo = symmetrized(fit.s_squared * m_used * ls.xtx_inv);

    // A_n = (X^T P_Z X / M)^{-1} (X^T Z / M)(Z^T Z / M)^{-1}; the first-stage
    // coefficient matrix W = (Z^T Z)^{-1} Z^T X comes from the Z QR.
    Matrix w = qr_z.solve(data.x); // q x p
    Matrix a_n = m_used * (ls.xtx_inv * w.transpose());
    Vector e2 = fit.residuals.array().square();
    Matrix meat = (z.transpose() * e2.asDiagonal() * z) / m_used;
    fit.cov_robust = symmetrized(a_n * meat * a_n.transpose());
    return fit;
}

SketchedData sketch_bundle(const SketchPlan& plan, const DataBundle& data) {
    data.validate();
    const std::size_t p = data.p();
    const std::size_t q = data.q();
    Matrix block(data.n(), 1 + p + q);
    block.col(0) = data.y;
    block.middleCols(1, p) = data.x;
    if (data.z) {
        block.middleCols(1 + p, q) = *data.z;
    }
    Matrix sketched = apply_sketch(plan, block);

    SketchedData out;
    out.rows_out = static_cast<std::size_t>(sketched.rows());
    out.effective_m = plan.scheme.target_m;
    out.y = sketched.col(0);
    out.x = sketched.middleCols(1, p);
    if (data.z) {
        out.z = sketched.middleCols(1 + p, q);
    }
    return out;
}

FitResult fit_sketched(const DataBundle& data, const SketchPlan& plan, FitKind kind) {
    if (kind == FitKind::Tsls && !data.z) {
        throw InvalidArgument("fit_sketched: TSLS needs instruments");
    }
    SketchedData sk = sketch_bundle(plan, data);
    const std::size_t needed = kind == FitKind::Tsls ? data.q() : data.p();
    if (sk.rows_out < needed) {
        throw SketchTooSmall(sk.rows_out, needed);
    }
    DataBundle sketched_bundle{std::move(sk.y), std::move(sk.x), std::move(sk.z)};
    return kind == FitKind::Tsls ? fit_tsls(sketched_bundle) : fit_ols(sketched_bundle);
}

TestResult t_test(const FitResult& fit, const Vector& c, double null_value, CovType cov) {
    if (c.size() != fit.beta.size()) {
        throw DimensionMismatch("t_test: c has length " + std::to_string(c.size()) +
                                ", beta has " + std::to_string(fit.beta.size()));
    }
    const double v = c.dot(fit.cov(cov) * c);
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ZeroVariance("t_test: c^T V c = " + std::to_string(v));
    }
    const double se = std::sqrt(v / static_cast<double>(fit.sample_size_used));
    TestResult out;
    out.statistic = (c.dot(fit.beta) - null_value) / se;
    out.df_num = 1;
    out.p_value = 2.0 * normal_cdf(-std::abs(out.statistic));
    return out;
}

TestResult first_stage_f(const DataBundle& data, std::size_t endogenous_col,
                         const std::vector<std::size_t>& excluded, CovType cov) {
    if (!data.z) {
        throw InvalidArgument("first_stage_f: no instruments in bundle");
    }
    if (endogenous_col >= data.p()) {
        throw InvalidArgument("first_stage_f: endogenous column out of range");
    }
    if (excluded.empty()) {
        throw InvalidArgument("first_stage_f: excluded set is empty");
    }
    for (std::size_t idx : excluded) {
        if (idx >= data.q()) {
            throw InvalidArgument("first_stage_f: excluded index out of range");
        }
    }

    DataBundle first_stage{data.x.col(static_cast<Eigen::Index>(endogenous_col)), *data.z,
                           std::nullopt};
    FitResult fs = fit_ols(first_stage);

    const Eigen::Index d = static_cast<Eigen::Index>(excluded.size());
    Vector zeta(d);
    Matrix v_block(d, d);
    const Matrix& v = fs.cov(cov);
    for (Eigen::Index a = 0; a < d; ++a) {
        zeta(a) = fs.beta(static_cast<Eigen::Index>(excluded[static_cast<std::size_t>(a)]));
        for (Eigen::Index b = 0; b < d; ++b) {
            v_block(a, b) = v(static_cast<Eigen::Index>(excluded[static_cast<std::size_t>(a)]),
                              static_cast<Eigen::Index>(excluded[static_cast<std::size_t>(b)]));
        }
    }
    v_block /= static_cast<double>(fs.sample_size_used);

    // the quadratic form at an exactly-zero block is 0 regardless of V
    if ((zeta.array() == 0.0).all()) {
        TestResult out;
        out.df_num = excluded.size();
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }

    Eigen::LDLT<Matrix> ldlt(v_block);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularBlock("first_stage_f: covariance block not positive definite");
    }
    const double quad = zeta.dot(ldlt.solve(zeta));

    TestResult out;
    out.df_num = excluded.size();
    out.statistic = quad / static_cast<double>(excluded.size());
    out.p_value = chi_squared_sf(quad, static_cast<double>(excluded.size()));
    return out;
}

} // namespace sketchls
