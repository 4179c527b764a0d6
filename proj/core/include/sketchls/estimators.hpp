#pragma once

#include <optional>
#include <vector>

#include "sketchls/data.hpp"
#include "sketchls/sketch.hpp"

namespace sketchls {

enum class FitKind { Ols, Tsls };
enum class CovType { Homo, Robust };

/// Point estimate plus both covariance estimates.
///
/// cov_homo / cov_robust are normalized per observation: the variance of
/// beta_hat is estimated by cov / sample_size_used. For 2SLS the residuals
/// are structural (y - X beta_hat), not second-stage residuals.
struct FitResult {
    FitKind kind = FitKind::Ols;
    Vector beta;
    Vector residuals;
    Matrix cov_homo;
    Matrix cov_robust;
    std::size_t sample_size_used = 0;
    double s_squared = 0.0;

    const Matrix& cov(CovType type) const {
        return type == CovType::Homo ? cov_homo : cov_robust;
    }
};

struct TestResult {
    double statistic = 0.0;
    std::size_t df_num = 1;
    std::optional<std::size_t> df_denom; // nullopt = asymptotic (infinite)
    double p_value = 1.0;

    bool reject_at(double alpha) const { return p_value < alpha; }
};

FitResult fit_ols(const DataBundle& data);
FitResult fit_tsls(const DataBundle& data);

/// Sketch (y, X, Z) jointly with one plan.
SketchedData sketch_bundle(const SketchPlan& plan, const DataBundle& data);

/// Apply the plan, then fit. sample_size_used is the realized row count;
/// throws SketchTooSmall when it cannot identify the fit.
FitResult fit_sketched(const DataBundle& data, const SketchPlan& plan, FitKind kind);

/// Two-sided test of H0: c^T beta = null_value against the standard normal,
/// statistic (c^T beta - null) / sqrt(c^T V c / sample_size_used).
TestResult t_test(const FitResult& fit, const Vector& c, double null_value, CovType cov);

/// First-stage F test for instrument relevance: regress X[:, endogenous_col]
/// on Z, extract the excluded-coefficient block, return the quadratic form
/// divided by its dimension with a chi-squared(q - p + 1) / (q - p + 1)
/// p-value.
TestResult first_stage_f(const DataBundle& data, std::size_t endogenous_col,
                         const std::vector<std::size_t>& excluded, CovType cov);

} // namespace sketchls
