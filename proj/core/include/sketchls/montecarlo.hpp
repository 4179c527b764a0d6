#pragma once

#include <string>
#include <variant>
#include <vector>

#include "sketchls/estimators.hpp"

namespace sketchls {

enum class Design { Exogenous, Endogenous };

/// Simulation design. Exogenous: X = (1, AR(1) normal block), y = X b + s(X) e
/// with s(X) = 1 or exp(X_p). Endogenous: Z = (1, AR(1) block), shared
/// exogenous regressors, X_p = Z'zeta + s1(Z) eta, y = X'b + s2(Z)(eta + eps)
/// with s1/s2 = 1 or exp((5/q) sum_j |Z_j|)/100.
struct DgpSpec {
    Design design = Design::Exogenous;
    bool hetero = false;             // sigma(X) for exogenous, sigma_2(Z) for endogenous
    bool first_stage_hetero = false; // sigma_1(Z), endogenous only
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t q = 0;
    double rho = 0.5;
    Vector beta0; // default (0, 1, ..., 1)
    Vector zeta0; // endogenous: length q

    static DgpSpec exogenous(std::size_t n, std::size_t p, bool hetero, double rho = 0.5);
    /// First-stage F-test design: zeta = (0, 0.1, ..., 0.1 | excluded...),
    /// heteroskedasticity enters sigma_1.
    static DgpSpec endogenous_first_stage(std::size_t n, std::size_t p, std::size_t q,
                                          bool hetero, double excluded_zeta,
                                          double rho = 0.5);
    /// 2SLS design: excluded zeta = 0.5, sigma_1 = 1, heteroskedasticity
    /// enters sigma_2.
    static DgpSpec endogenous_tsls(std::size_t n, std::size_t p, std::size_t q, bool hetero,
                                   double rho = 0.5);
};

DataBundle gen_exogenous(const DgpSpec& spec, RngStream& stream);
DataBundle gen_endogenous(const DgpSpec& spec, RngStream& stream);
DataBundle generate(const DgpSpec& spec, RngStream& stream);

/// E[X X^T] for the exogenous design (intercept block + AR(1) covariance).
Matrix exogenous_sigma_x(const DgpSpec& spec);
/// Asymptotic covariances of the full-sample OLS estimator under the
/// exogenous design, in closed form: V0 = E[e~^2] E[XX^T]^{-1} and
/// V1 = E[XX^T]^{-1} E[e~^2 X X^T] E[XX^T]^{-1} with e~ = sigma(X) e.
Matrix exogenous_v0(const DgpSpec& spec);
Matrix exogenous_v1(const DgpSpec& spec);

struct TTestSpec {
    Vector c;
    double null_value = 1.0;
    double alt_value = 1.1;
};

struct FirstStageFSpec {
    double null_zeta = 0.0;
    double alt_zeta = 0.1;
};

using TestSpec = std::variant<TTestSpec, FirstStageFSpec>;

struct SimRow {
    std::string scheme;
    std::string metric; // "size" or "power"
    std::string cov;    // "se0" or "se1"
    double rate = 0.0;
    double mc_se = 0.0;
};

struct SimTable {
    std::vector<SimRow> rows;
    std::size_t replications = 0;
    std::vector<std::pair<std::string, std::size_t>> failures; // per scheme
    std::uint64_t master_seed = 0;
    std::string experiment;

    const SimRow& cell(const std::string& scheme, const std::string& metric,
                       const std::string& cov) const;
    std::string to_csv() const;
    std::string pretty() const;
};

/// Size and power of the test across schemes: per (scheme, replication) a
/// fresh data set and a fresh plan, both covariance types, rejections at
/// nominal 0.05. Deterministic in (stream identity, spec) for any thread
/// count; per-replication failures are counted, not dropped.
SimTable run_size_power(const DgpSpec& dgp, const std::vector<SketchScheme>& schemes,
                        std::size_t m, std::size_t reps, const TestSpec& test,
                        const RngStream& stream, int threads = 1);

} // namespace sketchls
