#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sketchls/montecarlo.hpp"
#include "sketchls/sketch.hpp"

namespace sketchls {

enum class UVKind { GaussianIndep, GaussianEqual, Product, Custom };

/// Analytic moments of one (U_i, V_i) pair.
struct UVMoments {
    double e_u2 = 0.0;
    double e_v2 = 0.0;
    double e_uv = 0.0;
    double e_u2v2 = 0.0;
    double var_uv = 0.0;
};

/// Distribution of the i.i.d. pairs (U_i, V_i) entering the sketching-error
/// kernels, with the moments the limit theorems need.
struct UVDistribution {
    UVKind kind = UVKind::Custom;
    std::string name;
    UVMoments moments;
    std::function<std::pair<double, double>(RngStream&)> sampler;

    std::pair<double, double> draw(RngStream& stream) const { return sampler(stream); }

    static UVDistribution gaussian_indep(); // U, V iid N(0,1)
    static UVDistribution gaussian_equal(); // V = U
    static UVDistribution product();        // V = U * W, W indep N(0,1)
    static UVDistribution custom(std::string name, UVMoments moments,
                                 std::function<std::pair<double, double>(RngStream&)> sampler);
};

struct MomentRow {
    std::string name;
    double empirical = 0.0;
    double theoretical = 0.0;
    double mc_stderr = 0.0;
    bool pass = true;
    bool hard = true; // hard rows gate `verify`; soft rows are informational
    std::string note;
};

struct MomentReport {
    std::string check;
    std::string scheme;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t replications = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<MomentRow> rows;

    bool all_pass() const;
    bool all_hard_pass() const;
    std::string to_csv() const;
};

/// Empirical check of the random-projection moment conditions for one scheme:
/// entry means/variances, fourth-moment boundedness, within-row and
/// cross-row product moments. SRFT rows are marked soft (convention
/// dependent). Schemes: Gaussian, CountSketch, SRHT, SRFT.
MomentReport check_rp_conditions(SchemeKind scheme, std::size_t n, std::size_t m,
                                 std::size_t reps, const RngStream& stream, int threads = 1);

/// Monte Carlo MSE of sqrt(m) (U' Pi' Pi V - U'V) / n against the class limit:
/// Var(UV) for sampling-with-replacement, E[U^2 V^2] for Bernoulli,
/// E[U^2] E[V^2] + E[UV]^2 for random projections. Requires m/n <= 0.1.
MomentReport mse_limit_check(SchemeKind scheme, const UVDistribution& uv, std::size_t n,
                             std::size_t m, std::size_t reps, const RngStream& stream,
                             int threads = 1);

/// Exact finite-sample variance of the RS sketching error per unit Var(UV):
/// (1/m - 1/n + (1 - 1/m) sum p_i^2) Var(UV).
double exact_rs_variance(const std::vector<double>& p_vec, std::size_t m, std::size_t n,
                         double var_uv);
double exact_rs_variance_uniform(std::size_t m, std::size_t n, double var_uv);

/// Estimates the Hall CLT ingredients E[H^2], E[H^4], E[G^2] across an
/// n-ladder with m = m_of_n(n) and reports whether the sufficient-condition
/// ratio decreases. Only schemes with i.i.d. columns (Gaussian, CountSketch).
MomentReport hall_ratio_diagnostic(SchemeKind scheme, const UVDistribution& uv,
                                   const std::vector<std::size_t>& n_ladder,
                                   const std::function<std::size_t(std::size_t)>& m_of_n,
                                   std::size_t reps, const RngStream& stream,
                                   std::size_t pair_budget = 100000);

/// Coverage of nominal intervals for sqrt(m) c'(beta_tilde - beta_hat)
/// standardized by the analytic asymptotic variance of the DGP (V1 for
/// sampling schemes, V0 for projection schemes), plus a Kolmogorov-Smirnov
/// distance. Exogenous designs only; reps >= 1000.
MomentReport normality_check(SchemeKind scheme, const DgpSpec& dgp, std::size_t n,
                             std::size_t m, std::size_t reps, const RngStream& stream,
                             int threads = 1);

} // namespace sketchls
