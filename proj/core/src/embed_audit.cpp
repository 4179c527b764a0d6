#include "sketchls/embed_audit.hpp"

#include <cmath>

#include "sketchls/errors.hpp"

namespace sketchls {

EmbedErrors measure_embed_errors(const Matrix& x, const Matrix& z, const Vector& e_hat,
                                 const SketchPlan& plan) {
    const ThinSvd svd_x = thin_svd(x);
    const ThinSvd svd_z = thin_svd(z);
    if (!(svd_x.sigma_min() > 1e-12 * svd_x.sigma_max())) {
        throw RankDeficient(static_cast<std::size_t>(x.cols() - 1),
                            svd_x.sigma_min() / svd_x.sigma_max());
    }
    if (!(svd_z.sigma_min() > 1e-12 * svd_z.sigma_max())) {
        throw RankDeficient(static_cast<std::size_t>(z.cols() - 1),
                            svd_z.sigma_min() / svd_z.sigma_max());
    }
    const Eigen::Index q = z.cols();
    const Eigen::Index p = x.cols();

    // one pass of Pi over [U_Z | U_X | e]
    Matrix block(z.rows(), q + p + 1);
    block.leftCols(q) = svd_z.u;
    block.middleCols(q, p) = svd_x.u;
    block.col(q + p) = e_hat;
    Matrix sk = apply_sketch(plan, block);
    Matrix sk_uz = sk.leftCols(q);
    Matrix sk_ux = sk.middleCols(q, p);
    Vector sk_e = sk.col(q + p);

    EmbedErrors out;
    out.eps1 = spectral_norm_power(Matrix(sk_uz.transpose() * sk_uz - Matrix::Identity(q, q)));
    out.eps2 = spectral_norm_power(
        Matrix(sk_uz.transpose() * sk_ux - svd_z.u.transpose() * svd_x.u));
    out.norm_ehat = e_hat.norm();
    const double raw3 = (sk_uz.transpose() * sk_e - svd_z.u.transpose() * e_hat).norm();
    out.eps3 = out.norm_ehat > 0.0 ? raw3 / out.norm_ehat : 0.0;

    const ThinSvd cross = thin_svd(Matrix(svd_z.u.transpose() * svd_x.u));
    out.sigma_min_uzux = cross.sigma_min();
    out.sigma_min_x = svd_x.sigma_min();
    out.condition_iv_ok =
        out.eps1 < 1.0 &&
        out.sigma_min_uzux * out.sigma_min_uzux >= 2.0 * f1(out.eps1, out.eps2);
    return out;
}

double f1(double eps1, double eps2) {
    if (!(eps1 < 1.0)) {
        throw OutOfDomain("f1: eps1 must be < 1");
    }
    return (eps1 + eps2 * (eps2 + 2.0)) / (1.0 - eps1);
}

double f2(double eps1, double eps2) {
    if (!(eps1 < 1.0)) {
        throw OutOfDomain("f2: eps1 must be < 1");
    }
    return eps2 + eps1 / (1.0 - eps1) + eps2 * eps1 / (1.0 - eps1);
}

TslsBoundResult tsls_bound_check(const DataBundle& data, const SketchPlan& plan) {
    data.validate();
    if (!data.z) {
        throw InvalidArgument("tsls_bound_check: no instruments in bundle");
    }
    FitResult full = fit_tsls(data);

    TslsBoundResult out;
    out.errors = measure_embed_errors(data.x, *data.z, full.residuals, plan);
    if (!out.errors.condition_iv_ok) {
        throw ConditionIVFailed("tsls_bound_check: sigma_min^2(U_Z'U_X) < 2 f1 for this plan");
    }

    FitResult sketched = fit_sketched(data, plan, FitKind::Tsls);
    out.actual = (sketched.beta - full.beta).norm();

    const double s2 = out.errors.sigma_min_uzux * out.errors.sigma_min_uzux;
    const double f1v = f1(out.errors.eps1, out.errors.eps2);
    const double f2v = f2(out.errors.eps1, out.errors.eps2);
    out.bound = (f2v + out.errors.eps3 * out.errors.norm_ehat * (1.0 + f2v)) /
                (out.errors.sigma_min_x * s2) * (1.0 + 2.0 * f1v / s2);
    out.holds = out.actual <= out.bound;
    return out;
}

std::size_t countsketch_size_bound(std::size_t p, std::size_t q, double eps, double delta) {
    if (!(eps > 0.0 && eps <= 1.0 / 3.0)) {
        throw OutOfDomain("countsketch_size_bound: eps must be in (0, 1/3]");
    }
    if (!(delta > 0.0 && delta <= 0.5)) {
        throw OutOfDomain("countsketch_size_bound: delta must be in (0, 1/2]");
    }
    const double qd = static_cast<double>(q);
    const double pd = static_cast<double>(p);
    const double numerator = std::max(qd * (qd + 1.0), 2.0 * pd * qd);
    return static_cast<std::size_t>(std::ceil(numerator / (eps * eps * delta)));
}

} // namespace sketchls
