#pragma once

#include "sketchls/estimators.hpp"

namespace sketchls {

/// Realized subspace-embedding errors of one plan on fixed data:
///   eps1 = ||U_Z' P'P U_Z - I||_2, eps2 = ||U_Z' P'P U_X - U_Z' U_X||_2,
///   eps3 = ||U_Z' P'P e - U_Z' e|| / ||e||,
/// plus the instrument-strength ingredients of the worst-case 2SLS bound.
struct EmbedErrors {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps3 = 0.0;
    double sigma_min_uzux = 0.0;
    double norm_ehat = 0.0;
    double sigma_min_x = 0.0;
    bool condition_iv_ok = false; // sigma_min^2(U_Z'U_X) >= 2 f1(eps1, eps2)
};

EmbedErrors measure_embed_errors(const Matrix& x, const Matrix& z, const Vector& e_hat,
                                 const SketchPlan& plan);

/// f1 = (eps1 + eps2 (eps2 + 2)) / (1 - eps1); requires eps1 < 1.
double f1(double eps1, double eps2);
/// f2 = eps2 + eps1/(1 - eps1) + eps2 eps1/(1 - eps1); requires eps1 < 1.
double f2(double eps1, double eps2);

struct TslsBoundResult {
    double bound = 0.0;
    double actual = 0.0;
    bool holds = false;
    EmbedErrors errors;
};

/// Per-realization check of the worst-case 2SLS bound: computes the realized
/// embedding errors, the bound, and ||beta_tilde - beta_hat||. Throws
/// ConditionIVFailed when the instrument-strength precondition fails (the
/// instance is untestable, not a violation).
TslsBoundResult tsls_bound_check(const DataBundle& data, const SketchPlan& plan);

/// Countsketch sketch size sufficient for the embedding property:
/// ceil(max{q(q+1), 2pq} / (eps^2 delta)), eps in (0, 1/3], delta in (0, 1/2).
std::size_t countsketch_size_bound(std::size_t p, std::size_t q, double eps, double delta);

} // namespace sketchls
