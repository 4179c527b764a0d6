#include "sketchls/inference.hpp"

#include <cmath>

#include "sketchls/errors.hpp"
#include "sketchls/linalg.hpp"

namespace sketchls {

double s_factor(double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(gamma > 0.0 && gamma < 1.0)) {
        throw OutOfDomain("s_factor: alpha and gamma must be in (0,1)");
    }
    return normal_quantile(gamma) + normal_quantile(1.0 - alpha);
}

std::size_t m1_rule(std::size_t q, double c_m, M1Variant variant) {
    const double qd = static_cast<double>(q);
    double value;
    if (variant == M1Variant::LogQ) {
        if (q < 2) {
            throw OutOfDomain("m1_rule: LogQ variant needs q >= 2");
        }
        value = c_m * qd * std::log(qd);
    } else {
        value = c_m * qd * qd;
    }
    return static_cast<std::size_t>(std::ceil(value));
}

std::size_t m2_rule(std::size_t m1, double se_ctbeta, double effect, double alpha,
                    double gamma) {
    if (effect == 0.0) {
        throw ZeroEffect("m2_rule: effect size must be nonzero");
    }
    const double s = s_factor(alpha, gamma);
    const double ratio = se_ctbeta / effect;
    const double value = static_cast<double>(m1) * s * s * ratio * ratio;
    // guard exact-integer products against FP noise before the ceiling
    return static_cast<std::size_t>(std::ceil(value - 1e-9));
}

std::size_t m3_rule(std::size_t n, double alpha, double gamma, double tau_inf) {
    if (!(tau_inf > 0.0)) {
        throw OutOfDomain("m3_rule: tau_inf must be positive");
    }
    const double s = s_factor(alpha, gamma);
    const double value = static_cast<double>(n) * s * s / (tau_inf * tau_inf);
    return static_cast<std::size_t>(std::floor(value + 0.5));
}

} // namespace sketchls
