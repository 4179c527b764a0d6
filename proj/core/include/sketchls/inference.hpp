#pragma once

#include <cstddef>

namespace sketchls {

enum class M1Variant { LogQ, QSquared };

/// S(alpha, gamma) = Phi^{-1}(gamma) + Phi^{-1}(1 - alpha).
double s_factor(double alpha, double gamma);

/// Algorithmic sketch size: ceil(C_m q log q) or ceil(C_m q^2), natural log.
std::size_t m1_rule(std::size_t q, double c_m, M1Variant variant);

/// Inference-conscious sketch size from a preliminary sketch of size m1:
/// ceil(m1 S^2(alpha, gamma) (se / effect)^2).
std::size_t m2_rule(std::size_t m1, double se_ctbeta, double effect, double alpha,
                    double gamma);

/// Data-oblivious sketch size: round(n S^2(alpha, gamma) / tau_inf^2).
std::size_t m3_rule(std::size_t n, double alpha, double gamma, double tau_inf);

} // namespace sketchls
