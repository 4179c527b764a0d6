#include <cmath>

#include "doctest.h"
#include "sketchls/errors.hpp"
#include "sketchls/inference.hpp"
#include "sketchls/linalg.hpp"
#include "sketchls/rng.hpp"

using namespace sketchls;

TEST_CASE("s_factor: pinned values") {
    CHECK(s_factor(0.5, 0.5) == doctest::Approx(0.0));
    const double s = s_factor(0.05, 0.8);
    CHECK(s == doctest::Approx(2.4866).epsilon(2e-4));
    CHECK(s * s == doctest::Approx(6.18).epsilon(0.01 / 6.18));
    CHECK(s_factor(0.025, 0.975) == doctest::Approx(3.9199).epsilon(1e-4));
    CHECK_THROWS_AS(s_factor(0.0, 0.5), OutOfDomain);
    CHECK_THROWS_AS(s_factor(0.5, 1.0), OutOfDomain);
}

TEST_CASE("s_factor symmetry S(a, g) = S(1-g, 1-a)") {
    RngStream s(1, 0);
    for (int i = 0; i < 50; ++i) {
        double a = 0.01 + 0.98 * s.uniform();
        double g = 0.01 + 0.98 * s.uniform();
        CHECK(s_factor(a, g) == doctest::Approx(s_factor(1.0 - g, 1.0 - a)).epsilon(1e-12));
    }
}

TEST_CASE("m1_rule: pinned values") {
    CHECK(m1_rule(40, 1.0, M1Variant::QSquared) == 1600);
    CHECK(m1_rule(40, 1.0, M1Variant::LogQ) == 148);
    CHECK(m1_rule(2, 10.0, M1Variant::LogQ) == 14);
    CHECK_THROWS_AS(m1_rule(1, 1.0, M1Variant::LogQ), OutOfDomain);
}

TEST_CASE("m2_rule: pinned values and properties") {
    // S^2 = 1 at alpha = 1 - Phi(1), gamma = 0.5; then m2 = m1 exactly
    const double alpha = 1.0 - normal_cdf(1.0);
    CHECK(m2_rule(500, 0.25, 0.25, alpha, 0.5) == 500);

    CHECK(m2_rule(500, 0.1, 0.1, 0.05, 0.8) == 3092);

    // monotone decreasing in |effect|
    std::size_t prev = m2_rule(500, 0.1, 0.05, 0.05, 0.8);
    for (double effect : {0.1, 0.2, 0.8, 10.0}) {
        std::size_t next = m2_rule(500, 0.1, effect, 0.05, 0.8);
        CHECK(next <= prev);
        prev = next;
    }
    CHECK(m2_rule(500, 0.1, 1e9, 0.05, 0.8) <= 1);

    // invariant to rescaling (se, effect) jointly
    CHECK(m2_rule(321, 0.07, 0.02, 0.05, 0.8) == m2_rule(321, 7.0, 2.0, 0.05, 0.8));

    CHECK_THROWS_AS(m2_rule(10, 0.1, 0.0, 0.05, 0.8), ZeroEffect);
}

TEST_CASE("m3_rule: pinned paper sizes") {
    CHECK(std::abs(static_cast<double>(m3_rule(247199, 0.05, 0.8, 10.0)) - 15283.0) <=
          0.001 * 15283.0);
    CHECK(std::abs(static_cast<double>(m3_rule(247199, 0.05, 0.8, 5.0)) - 61132.0) <=
          0.001 * 61132.0);
    // tau = S cancels exactly
    const double s = s_factor(0.05, 0.8);
    CHECK(m3_rule(12345, 0.05, 0.8, s) == 12345);
    CHECK_THROWS_AS(m3_rule(10, 0.05, 0.8, 0.0), OutOfDomain);
}

TEST_CASE("m3_rule monotonicity") {
    CHECK(m3_rule(20000, 0.05, 0.8, 5.0) >= m3_rule(10000, 0.05, 0.8, 5.0));
    CHECK(m3_rule(10000, 0.05, 0.9, 5.0) >= m3_rule(10000, 0.05, 0.8, 5.0));
    CHECK(m3_rule(10000, 0.05, 0.8, 8.0) <= m3_rule(10000, 0.05, 0.8, 5.0));
    CHECK(m3_rule(10000, 0.10, 0.8, 5.0) <= m3_rule(10000, 0.05, 0.8, 5.0));
}
