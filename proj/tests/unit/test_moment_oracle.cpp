#include <cmath>

#include "doctest.h"
#include "sketchls/errors.hpp"
#include "sketchls/moment_oracle.hpp"

using namespace sketchls;

namespace {

const MomentRow& row_named(const MomentReport& report, const std::string& prefix) {
    for (const auto& row : report.rows) {
        if (row.name.rfind(prefix, 0) == 0) {
            return row;
        }
    }
    FAIL("no row starting with '", prefix, "'");
    static MomentRow dummy;
    return dummy;
}

UVDistribution constant_uv() {
    return UVDistribution::custom("const-one", {1.0, 1.0, 1.0, 1.0, 0.0},
                                  [](RngStream&) { return std::make_pair(1.0, 1.0); });
}

} // namespace

TEST_CASE("mse limits: RS with constant UV vanishes") {
    RngStream s(1, 0);
    auto report = mse_limit_check(SchemeKind::UniformWithReplacement, constant_uv(), 2000, 50,
                                  800, s);
    const auto& row = row_named(report, "MSE");
    CHECK(row.theoretical == 0.0);
    CHECK(row.empirical < 1e-3);
    CHECK(row.pass);
}

TEST_CASE("mse limits: Bernoulli with U = V approaches E[U^4] = 3") {
    RngStream s(2, 0);
    auto report = mse_limit_check(SchemeKind::Bernoulli, UVDistribution::gaussian_equal(),
                                  4000, 100, 1500, s);
    const auto& row = row_named(report, "MSE");
    CHECK(row.theoretical == 3.0);
    CHECK(row.pass);
    CHECK(std::abs(row.empirical - 3.0) < 0.5);
}

TEST_CASE("mse limits: countsketch with independent U, V approaches 1") {
    RngStream s(3, 0);
    auto report = mse_limit_check(SchemeKind::CountSketch, UVDistribution::gaussian_indep(),
                                  4000, 100, 1500, s);
    const auto& row = row_named(report, "MSE");
    CHECK(row.theoretical == 1.0);
    CHECK(row.pass);
}

TEST_CASE("mse limits: RP below RS exactly when the distribution says so") {
    // product distribution: Var(UV) = 3 > 1 = E[U^2]E[V^2] + E[UV]^2
    RngStream s(4, 0);
    auto uv = UVDistribution::product();
    auto rs = mse_limit_check(SchemeKind::UniformWithReplacement, uv, 4000, 100, 1500,
                              s.fork(0));
    auto rp = mse_limit_check(SchemeKind::CountSketch, uv, 4000, 100, 1500, s.fork(1));
    const auto& rs_row = row_named(rs, "MSE");
    const auto& rp_row = row_named(rp, "MSE");
    CHECK(rs_row.theoretical > rp_row.theoretical);
    CHECK(rs_row.empirical - rp_row.empirical >
          -3.0 * (rs_row.mc_stderr + rp_row.mc_stderr));
}

TEST_CASE("mse limits: argument guards") {
    RngStream s(5, 0);
    CHECK_THROWS_AS(
        mse_limit_check(SchemeKind::Bernoulli, UVDistribution::gaussian_indep(), 100, 50, 10, s),
        BadRatio);
    CHECK_THROWS_AS(mse_limit_check(SchemeKind::LeverageScore,
                                    UVDistribution::gaussian_indep(), 2000, 50, 10, s),
                    UnsupportedScheme);
}

TEST_CASE("exact_rs_variance: pinned arithmetic") {
    CHECK(exact_rs_variance_uniform(10, 100, 2.0) == doctest::Approx(0.198).epsilon(1e-12));
    const std::size_t n = 50;
    // m = n uniform: (1/n - 1/n + (1 - 1/n)/n) Var = ((n-1)/n^2) Var
    CHECK(exact_rs_variance_uniform(n, n, 1.0) ==
          doctest::Approx((n - 1.0) / (static_cast<double>(n) * n)).epsilon(1e-12));
    CHECK(exact_rs_variance_uniform(7, 300, 0.0) == 0.0);
    std::vector<double> uniform(100, 0.01);
    CHECK(exact_rs_variance(uniform, 10, 100, 2.0) == doctest::Approx(0.198).epsilon(1e-12));
    std::vector<double> bad(100, 0.02);
    CHECK_THROWS_AS(exact_rs_variance(bad, 10, 100, 1.0), BadProbabilities);
}

TEST_CASE("exact_rs_variance matches Monte Carlo") {
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{1000, 50},
                        std::pair<std::size_t, std::size_t>{5000, 100}}) {
        RngStream root(6 + n, 0);
        const auto uv = UVDistribution::gaussian_indep();
        const std::size_t reps = 2500;
        std::vector<double> sq(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            RngStream rep = root.fork(r);
            RngStream uv_stream = rep.fork(0);
            Matrix uvmat(n, 2);
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                auto [u, v] = uv.draw(uv_stream);
                uvmat(static_cast<Eigen::Index>(i), 0) = u;
                uvmat(static_cast<Eigen::Index>(i), 1) = v;
                dot += u * v;
            }
            auto plan = plan_sketch({SchemeKind::UniformWithReplacement, m}, n, rep.fork(1));
            Matrix sk = apply_sketch(plan, uvmat);
            const double err = (sk.col(0).dot(sk.col(1)) - dot) / static_cast<double>(n);
            sq[r] = err * err;
        }
        // grouped standard error, 20 batches
        const std::size_t groups = 20;
        const std::size_t per = reps / groups;
        std::vector<double> means(groups, 0.0);
        for (std::size_t g = 0; g < groups; ++g) {
            for (std::size_t i = 0; i < per; ++i) {
                means[g] += sq[g * per + i];
            }
            means[g] /= static_cast<double>(per);
        }
        double grand = 0.0;
        for (double v : means) {
            grand += v;
        }
        grand /= groups;
        double ss = 0.0;
        for (double v : means) {
            ss += (v - grand) * (v - grand);
        }
        const double se = std::sqrt(ss / (groups - 1.0) / groups);
        const double exact = exact_rs_variance_uniform(m, n, 1.0);
        CHECK(std::abs(grand - exact) <= 3.0 * se);
    }
}

TEST_CASE("hall diagnostic: kernel second moment and monotone ratio") {
    auto m_of_n = [](std::size_t n) {
        return static_cast<std::size_t>(std::lround(std::pow(static_cast<double>(n), 0.4)));
    };
    for (SchemeKind kind : {SchemeKind::Gaussian, SchemeKind::CountSketch}) {
        CAPTURE(scheme_name(kind));
        RngStream s(8 + static_cast<std::uint64_t>(kind), 0);
        auto report = hall_ratio_diagnostic(kind, UVDistribution::gaussian_indep(),
                                            {400, 1600}, m_of_n, 60, s, 100000);
        const auto& h2 = row_named(report, "m*E[H^2]/2 [n=400");
        CHECK(h2.theoretical == 1.0);
        CHECK(h2.pass);
        const auto& h2b = row_named(report, "m*E[H^2]/2 [n=1600");
        CHECK(h2b.pass);
        const auto& mono = row_named(report, "hall_ratio_monotone");
        CHECK(mono.pass);
    }
    RngStream s(10, 0);
    CHECK_THROWS_AS(hall_ratio_diagnostic(SchemeKind::Srht, UVDistribution::gaussian_indep(),
                                          {400}, m_of_n, 10, s),
                    UnsupportedScheme);
}

TEST_CASE("rp-conditions: hard rows pass for gaussian, countsketch, srht") {
    for (SchemeKind kind :
         {SchemeKind::Gaussian, SchemeKind::CountSketch, SchemeKind::Srht}) {
        CAPTURE(scheme_name(kind));
        RngStream s(11 + static_cast<std::uint64_t>(kind), 0);
        auto report = check_rp_conditions(kind, 64, 16, 4000, s);
        for (const auto& row : report.rows) {
            CAPTURE(row.name);
            CHECK(row.pass);
        }
        CHECK(report.all_hard_pass());
    }
}

TEST_CASE("rp-conditions: srft runs with soft, convention-dependent rows") {
    RngStream s(15, 0);
    auto report = check_rp_conditions(SchemeKind::Srft, 64, 16, 4000, s);
    for (const auto& row : report.rows) {
        CHECK(!row.hard);
    }
    // with the orthonormal basis the second-moment row still holds
    CHECK(row_named(report, "E[pi_ki^2]").pass);
    CHECK_THROWS_AS(check_rp_conditions(SchemeKind::Bernoulli, 64, 16, 10, s),
                    UnsupportedScheme);
}

TEST_CASE("rp-conditions: countsketch zero-product fraction row") {
    RngStream s(16, 0);
    auto report = check_rp_conditions(SchemeKind::CountSketch, 64, 16, 3000, s);
    const auto& row = row_named(report, "P[pi_ki*pi_kj == 0]");
    CHECK(row.theoretical == doctest::Approx(1.0 - 1.0 / 256.0));
    CHECK(row.pass);
}

TEST_CASE("normality_check: countsketch homoskedastic coverage") {
    DgpSpec spec = DgpSpec::exogenous(2000, 4, false);
    RngStream s(17, 0);
    auto report = normality_check(SchemeKind::CountSketch, spec, 2000, 200, 1200, s);
    CHECK(row_named(report, "coverage_95").pass);
    CHECK(row_named(report, "ks_distance").empirical < 0.05);
}

TEST_CASE("normality_check: bernoulli heteroskedastic standardized by V1") {
    DgpSpec spec = DgpSpec::exogenous(2000, 4, true);
    RngStream s(18, 0);
    auto report = normality_check(SchemeKind::Bernoulli, spec, 2000, 200, 1200, s);
    CHECK(row_named(report, "coverage_95").pass);
}

TEST_CASE("normality_check guards") {
    DgpSpec spec = DgpSpec::exogenous(500, 3, false);
    RngStream s(19, 0);
    CHECK_THROWS_AS(normality_check(SchemeKind::CountSketch, spec, 500, 50, 10, s),
                    InvalidArgument);
    DgpSpec endo = DgpSpec::endogenous_tsls(500, 3, 4, false);
    CHECK_THROWS_AS(normality_check(SchemeKind::CountSketch, endo, 500, 50, 2000, s),
                    InvalidArgument);
}

TEST_CASE("report CSV serialization") {
    RngStream s(20, 0);
    auto report = check_rp_conditions(SchemeKind::CountSketch, 16, 4, 200, s);
    const std::string csv = report.to_csv();
    CHECK(csv.find("check,scheme,n,m,replications,name") != std::string::npos);
    CHECK(csv.find("countsketch") != std::string::npos);
    CHECK(csv.find("E[pi_ki^2]") != std::string::npos);
}
