#include "sketchls/moment_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sketchls/errors.hpp"
#include "sketchls/parallel.hpp"

namespace sketchls {

UVDistribution UVDistribution::gaussian_indep() {
    UVDistribution uv;
    uv.kind = UVKind::GaussianIndep;
    uv.name = "gaussian-indep";
    uv.moments = {1.0, 1.0, 0.0, 1.0, 1.0};
    uv.sampler = [](RngStream& s) { return std::make_pair(s.normal(), s.normal()); };
    return uv;
}

UVDistribution UVDistribution::gaussian_equal() {
    UVDistribution uv;
    uv.kind = UVKind::GaussianEqual;
    uv.name = "gaussian-equal";
    // V = U: E(UV) = 1, E(U^2 V^2) = E(U^4) = 3, Var(UV) = 2
    uv.moments = {1.0, 1.0, 1.0, 3.0, 2.0};
    uv.sampler = [](RngStream& s) {
        double u = s.normal();
        return std::make_pair(u, u);
    };
    return uv;
}

UVDistribution UVDistribution::product() {
    UVDistribution uv;
    uv.kind = UVKind::Product;
    uv.name = "product";
    // V = U W: E(V^2) = 1, E(UV) = E(U^2 W) = 0, E(U^2 V^2) = E(U^4) = 3
    uv.moments = {1.0, 1.0, 0.0, 3.0, 3.0};
    uv.sampler = [](RngStream& s) {
        double u = s.normal();
        return std::make_pair(u, u * s.normal());
    };
    return uv;
}

UVDistribution UVDistribution::custom(
    std::string name, UVMoments moments,
    std::function<std::pair<double, double>(RngStream&)> sampler) {
    UVDistribution uv;
    uv.kind = UVKind::Custom;
    uv.name = std::move(name);
    uv.moments = moments;
    uv.sampler = std::move(sampler);
    return uv;
}

bool MomentReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const MomentRow& r) { return r.pass; });
}

bool MomentReport::all_hard_pass() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const MomentRow& r) { return r.pass || !r.hard; });
}

std::string MomentReport::to_csv() const {
    std::ostringstream out;
    for (const auto& [key, value] : metadata) {
        out << "# " << key << " = " << value << "\n";
    }
    out << "check,scheme,n,m,replications,name,empirical,theoretical,mc_stderr,pass,hard,note\n";
    out.precision(12);
    for (const auto& row : rows) {
        out << check << "," << scheme << "," << n << "," << m << "," << replications << ","
            << row.name << "," << row.empirical << "," << row.theoretical << ","
            << row.mc_stderr << "," << (row.pass ? 1 : 0) << "," << (row.hard ? 1 : 0) << ","
            << row.note << "\n";
    }
    return out.str();
}

namespace {

constexpr std::size_t kGroups = 20;

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

/// Standard error of the mean from 20 replication batches.
double grouped_se(const std::vector<double>& values) {
    const std::size_t groups = std::min(kGroups, values.size());
    if (groups < 2) {
        return 0.0;
    }
    std::vector<double> means(groups, 0.0);
    std::vector<std::size_t> counts(groups, 0);
    const std::size_t per = (values.size() + groups - 1) / groups;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t g = std::min(i / per, groups - 1);
        means[g] += values[i];
        counts[g] += 1;
    }
    for (std::size_t g = 0; g < groups; ++g) {
        means[g] /= static_cast<double>(std::max<std::size_t>(counts[g], 1));
    }
    const double grand = mean_of(means);
    double ss = 0.0;
    for (double v : means) {
        ss += (v - grand) * (v - grand);
    }
    const double var_of_mean = ss / static_cast<double>(groups - 1) / static_cast<double>(groups);
    return std::sqrt(var_of_mean);
}

MomentRow make_row(std::string name, const std::vector<double>& values, double theoretical,
                   bool hard, std::string note = "") {
    MomentRow row;
    row.name = std::move(name);
    row.empirical = mean_of(values);
    row.theoretical = theoretical;
    row.mc_stderr = grouped_se(values);
    // absolute slack covers FP-degenerate cases where every value is exact
    row.pass = std::abs(row.empirical - theoretical) <=
               3.0 * row.mc_stderr + 1e-12 * std::max(1.0, std::abs(theoretical));
    row.hard = hard;
    row.note = std::move(note);
    return row;
}

/// Evaluates single entries of the Pi implied by a plan, consistently with
/// apply_sketch. RP schemes only.
class PiEntry {
public:
    explicit PiEntry(const SketchPlan& plan) : plan_(plan) {
        switch (plan.scheme.kind) {
            case SchemeKind::CountSketch:
                break;
            case SchemeKind::Srht:
                scale_ = 1.0 / std::sqrt(static_cast<double>(plan.scheme.target_m));
                break;
            case SchemeKind::Srft:
                scale_ = std::sqrt(static_cast<double>(plan.n) /
                                   static_cast<double>(plan.scheme.target_m));
                break;
            case SchemeKind::Gaussian:
                rows_.resize(plan.scheme.target_m);
                inv_sqrt_m_ = 1.0 / std::sqrt(static_cast<double>(plan.scheme.target_m));
                break;
            default:
                throw UnsupportedScheme("PiEntry: RP schemes only");
        }
    }

    double at(std::size_t k, std::size_t i) {
        switch (plan_.scheme.kind) {
            case SchemeKind::CountSketch:
                return plan_.cs_buckets[i] == k ? static_cast<double>(plan_.cs_signs[i]) : 0.0;
            case SchemeKind::Srht: {
                const std::uint32_t r = plan_.sampled_rows[k];
                const int parity = std::popcount(r & static_cast<std::uint32_t>(i)) & 1;
                const double h = parity ? -1.0 : 1.0;
                return scale_ * h * static_cast<double>(plan_.rademacher[i]);
            }
            case SchemeKind::Srft: {
                const std::size_t n = plan_.n;
                const std::size_t t = plan_.sampled_rows[k];
                const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
                double r;
                const std::size_t cos_rows = (n + 1) / 2;
                if (t == 0) {
                    r = inv_sqrt_n;
                } else if (t < cos_rows) {
                    r = std::sqrt(2.0) * inv_sqrt_n *
                        std::cos(2.0 * std::numbers::pi * static_cast<double>(t) *
                                 static_cast<double>(i) / static_cast<double>(n));
                } else if (n % 2 == 0 && t == n / 2) {
                    r = (i % 2 == 0 ? 1.0 : -1.0) * inv_sqrt_n;
                } else {
                    r = std::sqrt(2.0) * inv_sqrt_n *
                        std::sin(2.0 * std::numbers::pi * static_cast<double>(n - t) *
                                 static_cast<double>(i) / static_cast<double>(n));
                }
                return scale_ * r * static_cast<double>(plan_.rademacher[i]);
            }
            case SchemeKind::Gaussian: {
                auto& row = rows_[k];
                if (row.empty()) {
                    row.resize(plan_.n);
                    RngStream row_stream = plan_.gaussian_rows.fork(k);
                    for (std::size_t j = 0; j < plan_.n; ++j) {
                        row[j] = inv_sqrt_m_ * row_stream.normal();
                    }
                }
                return row[i];
            }
            default:
                return 0.0;
        }
    }

private:
    const SketchPlan& plan_;
    double scale_ = 1.0;
    double inv_sqrt_m_ = 1.0;
    std::vector<std::vector<double>> rows_;
};

enum class MseClass { Rs, Bs, Rp };

MseClass mse_class(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Bernoulli:
            return MseClass::Bs;
        case SchemeKind::UniformWithReplacement:
            return MseClass::Rs;
        case SchemeKind::LeverageScore:
            throw UnsupportedScheme("mse limits need scheme-independent probabilities");
        default:
            return MseClass::Rp;
    }
}

} // namespace

MomentReport check_rp_conditions(SchemeKind scheme, std::size_t n, std::size_t m,
                                 std::size_t reps, const RngStream& stream, int threads) {
    if (!is_random_projection(scheme)) {
        throw UnsupportedScheme("check_rp_conditions: RP schemes only");
    }
    if (n < 4 || m < 2) {
        throw InvalidArgument("check_rp_conditions: need n >= 4 and m >= 2");
    }
    constexpr std::size_t kTuples = 16;
    // per-rep means of: pi, pi^2, m pi^4, pi_ki pi_kj, pi^2 pi^2 cross,
    // cross-row product, cs zero fraction
    constexpr std::size_t kQuant = 7;
    std::vector<std::vector<double>> acc(kQuant, std::vector<double>(reps, 0.0));

    parallel_for(reps, threads, [&](std::size_t r) {
        RngStream rep_stream = stream.fork(r);
        SketchPlan plan = plan_sketch({scheme, m}, n, rep_stream.fork(0));
        PiEntry pi(plan);
        RngStream idx = rep_stream.fork(1);
        double sums[kQuant] = {0, 0, 0, 0, 0, 0, 0};
        for (std::size_t t = 0; t < kTuples; ++t) {
            const std::size_t k = idx.uniform_below(m);
            const std::size_t i = idx.uniform_below(n);
            const double e = pi.at(k, i);
            sums[0] += e;
            sums[1] += e * e;
            sums[2] += static_cast<double>(m) * e * e * e * e;

            std::size_t j = idx.uniform_below(n - 1);
            if (j >= i) {
                ++j;
            }
            const double ej = pi.at(k, j);
            sums[3] += e * ej;
            sums[4] += e * e * ej * ej;
            sums[6] += (e * ej == 0.0) ? 1.0 : 0.0;

            std::size_t l = idx.uniform_below(m - 1);
            if (l >= k) {
                ++l;
            }
            std::size_t a = idx.uniform_below(n);
            std::size_t b = idx.uniform_below(n - 1);
            if (b >= a) {
                ++b;
            }
            sums[5] += e * ej * pi.at(l, a) * pi.at(l, b);
        }
        for (std::size_t qn = 0; qn < kQuant; ++qn) {
            acc[qn][r] = sums[qn] / static_cast<double>(kTuples);
        }
    });

    const bool hard = scheme != SchemeKind::Srft;
    const std::string note = hard ? "" : "convention-dependent (orthonormal real Fourier)";
    const double md = static_cast<double>(m);

    MomentReport report;
    report.check = "rp-conditions";
    report.scheme = scheme_name(scheme);
    report.n = n;
    report.m = m;
    report.replications = reps;
    report.master_seed = stream.master_seed();
    report.stream_id = stream.stream_id();
    report.metadata.emplace_back("srft_basis", "orthonormal real Fourier (cos/sin), no permutation");
    report.metadata.emplace_back("tuples_per_replication", std::to_string(kTuples));

    report.rows.push_back(make_row("E[pi_ki]", acc[0], 0.0, hard, note));
    report.rows.push_back(make_row("E[pi_ki^2]", acc[1], 1.0 / md, hard, note));
    {
        MomentRow row = make_row("m*E[pi_ki^4]", acc[2], 0.0, hard, "boundedness proxy, pass iff <= 3");
        row.theoretical = 3.0;
        row.pass = row.empirical <= 3.0 + 3.0 * row.mc_stderr;
        if (!hard) {
            row.hard = false;
        }
        report.rows.push_back(std::move(row));
    }
    report.rows.push_back(make_row("E[pi_ki*pi_kj]", acc[3], 0.0, hard, note));
    report.rows.push_back(make_row("E[pi_ki^2*pi_kj^2]", acc[4], 1.0 / (md * md), hard, note));
    report.rows.push_back(make_row("E[pi_ki*pi_kj*pi_lp*pi_lq]", acc[5], 0.0, hard, note));
    if (scheme == SchemeKind::CountSketch) {
        report.rows.push_back(make_row("P[pi_ki*pi_kj == 0]", acc[6], 1.0 - 1.0 / (md * md),
                                       true, "one nonzero per column"));
    }
    return report;
}

MomentReport mse_limit_check(SchemeKind scheme, const UVDistribution& uv, std::size_t n,
                             std::size_t m, std::size_t reps, const RngStream& stream,
                             int threads) {
    if (10 * m > n) {
        throw BadRatio("mse_limit_check: need m/n <= 0.1");
    }
    const MseClass cls = mse_class(scheme);

    std::vector<double> sq(reps, 0.0);
    std::vector<double> raw(reps, 0.0);
    parallel_for(reps, threads, [&](std::size_t r) {
        RngStream rep_stream = stream.fork(r);
        RngStream uv_stream = rep_stream.fork(0);
        Matrix uvmat(n, 2);
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto [u, v] = uv.draw(uv_stream);
            uvmat(static_cast<Eigen::Index>(i), 0) = u;
            uvmat(static_cast<Eigen::Index>(i), 1) = v;
            dot += u * v;
        }
        SketchPlan plan = plan_sketch({scheme, m}, n, rep_stream.fork(1));
        Matrix sk = apply_sketch(plan, uvmat);
        const double sketched_dot = sk.col(0).dot(sk.col(1));
        const double err = std::sqrt(static_cast<double>(m)) * (sketched_dot - dot) /
                           static_cast<double>(n);
        sq[r] = err * err;
        raw[r] = err;
    });

    double limit = 0.0;
    const char* limit_name = "";
    switch (cls) {
        case MseClass::Rs:
            limit = uv.moments.var_uv;
            limit_name = "Var(UV)";
            break;
        case MseClass::Bs:
            limit = uv.moments.e_u2v2;
            limit_name = "E[U^2 V^2]";
            break;
        case MseClass::Rp:
            limit = uv.moments.e_u2 * uv.moments.e_v2 + uv.moments.e_uv * uv.moments.e_uv;
            limit_name = "E[U^2]E[V^2] + E[UV]^2";
            break;
    }

    MomentReport report;
    report.check = "mse-limits";
    report.scheme = scheme_name(scheme);
    report.n = n;
    report.m = m;
    report.replications = reps;
    report.master_seed = stream.master_seed();
    report.stream_id = stream.stream_id();
    report.metadata.emplace_back("uv_distribution", uv.name);
    report.metadata.emplace_back("limit", limit_name);
    report.rows.push_back(make_row("MSE[sqrt(m)(U'P'PV - U'V)/n]", sq, limit, true));
    report.rows.push_back(make_row("E[sqrt(m)(U'P'PV - U'V)/n]", raw, 0.0, false, "mean error"));
    return report;
}

double exact_rs_variance(const std::vector<double>& p_vec, std::size_t m, std::size_t n,
                         double var_uv) {
    if (p_vec.size() != n) {
        throw BadProbabilities("exact_rs_variance: p_vec length " +
                               std::to_string(p_vec.size()) + " != n = " + std::to_string(n));
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double p : p_vec) {
        if (!(p >= 0.0)) {
            throw BadProbabilities("exact_rs_variance: negative probability");
        }
        sum += p;
        sum_sq += p * p;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        throw BadProbabilities("exact_rs_variance: probabilities sum to " + std::to_string(sum));
    }
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    return (1.0 / md - 1.0 / nd + (1.0 - 1.0 / md) * sum_sq) * var_uv;
}

double exact_rs_variance_uniform(std::size_t m, std::size_t n, double var_uv) {
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    return (1.0 / md - 1.0 / nd + (1.0 - 1.0 / md) / nd) * var_uv;
}

MomentReport hall_ratio_diagnostic(SchemeKind scheme, const UVDistribution& uv,
                                   const std::vector<std::size_t>& n_ladder,
                                   const std::function<std::size_t(std::size_t)>& m_of_n,
                                   std::size_t reps, const RngStream& stream,
                                   std::size_t pair_budget) {
    if (scheme != SchemeKind::Gaussian && scheme != SchemeKind::CountSketch) {
        throw UnsupportedScheme(
            "hall_ratio_diagnostic: needs i.i.d. columns (gaussian or countsketch)");
    }
    if (n_ladder.empty() || reps < 2) {
        throw InvalidArgument("hall_ratio_diagnostic: empty ladder or reps < 2");
    }
    const std::size_t pairs_per_rep = std::max<std::size_t>(1, pair_budget / reps);

    MomentReport report;
    report.check = "hall-ratio";
    report.scheme = scheme_name(scheme);
    report.n = n_ladder.back();
    report.replications = reps;
    report.master_seed = stream.master_seed();
    report.stream_id = stream.stream_id();
    report.metadata.emplace_back("uv_distribution", uv.name);
    report.metadata.emplace_back("pairs_per_replication", std::to_string(pairs_per_rep));

    const UVMoments& mo = uv.moments;
    std::vector<double> ratios;
    for (std::size_t step = 0; step < n_ladder.size(); ++step) {
        const std::size_t n = n_ladder[step];
        const std::size_t m = m_of_n(n);
        report.m = m;
        std::vector<double> h2(reps), h4(reps), g2(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            RngStream rep_stream = stream.fork(step * reps + r);
            SketchPlan plan = plan_sketch({scheme, m}, n, rep_stream.fork(0));

            // countsketch: phi_ij from the plan arrays; gaussian: materialized
            Matrix pi;
            if (scheme == SchemeKind::Gaussian) {
                pi = materialize_pi(plan);
            }
            RngStream draw = rep_stream.fork(1);
            double sh2 = 0.0, sh4 = 0.0, sg2 = 0.0;
            for (std::size_t t = 0; t < pairs_per_rep; ++t) {
                const std::size_t i = draw.uniform_below(n);
                std::size_t j = draw.uniform_below(n - 1);
                if (j >= i) {
                    ++j;
                }
                double phi;
                if (scheme == SchemeKind::CountSketch) {
                    phi = plan.cs_buckets[i] == plan.cs_buckets[j]
                              ? static_cast<double>(plan.cs_signs[i] * plan.cs_signs[j])
                              : 0.0;
                } else {
                    phi = pi.col(static_cast<Eigen::Index>(i))
                              .dot(pi.col(static_cast<Eigen::Index>(j)));
                }
                auto [ui, vi] = uv.draw(draw);
                auto [uj, vj] = uv.draw(draw);
                const double h = phi * (ui * vj + uj * vi);
                const double g = (phi / static_cast<double>(m)) *
                                 (mo.e_u2 * vi * vj + mo.e_v2 * ui * uj +
                                  mo.e_uv * (ui * vj + uj * vi));
                sh2 += h * h;
                sh4 += h * h * h * h;
                sg2 += g * g;
            }
            const double denom = static_cast<double>(pairs_per_rep);
            h2[r] = sh2 / denom;
            h4[r] = sh4 / denom;
            g2[r] = sg2 / denom;
        }

        const double md = static_cast<double>(m);
        const std::string tag = "[n=" + std::to_string(n) + ",m=" + std::to_string(m) + "]";
        report.rows.push_back(make_row("m*E[H^2]/2 " + tag,
                                       [&] {
                                           std::vector<double> scaled(h2);
                                           for (double& v : scaled) {
                                               v *= md / 2.0;
                                           }
                                           return scaled;
                                       }(),
                                       mo.e_u2 * mo.e_v2 + mo.e_uv * mo.e_uv, true));
        {
            std::vector<double> scaled(h4);
            for (double& v : scaled) {
                v *= md;
            }
            MomentRow row = make_row("m*E[H^4] " + tag, scaled, 0.0, false, "O(1) bound proxy");
            row.pass = true;
            report.rows.push_back(std::move(row));
        }
        {
            std::vector<double> scaled(g2);
            for (double& v : scaled) {
                v *= md * md * md;
            }
            MomentRow row = make_row("m^3*E[G^2] " + tag, scaled, 0.0, false, "O(1) bound proxy");
            row.pass = true;
            report.rows.push_back(std::move(row));
        }
        const double eh2 = mean_of(h2);
        const double ratio =
            (mean_of(g2) + mean_of(h4) / static_cast<double>(n)) / (eh2 * eh2);
        ratios.push_back(ratio);
        MomentRow row;
        row.name = "hall_ratio " + tag;
        row.empirical = ratio;
        row.theoretical = 0.0;
        row.pass = true;
        row.hard = false;
        row.note = "(E[G^2] + E[H^4]/n) / E[H^2]^2";
        report.rows.push_back(std::move(row));
    }

    MomentRow mono;
    mono.name = "hall_ratio_monotone_decreasing";
    mono.empirical = ratios.back();
    mono.theoretical = 0.0;
    mono.pass = std::is_sorted(ratios.rbegin(), ratios.rend()) &&
                (ratios.size() < 2 || ratios.back() < ratios.front());
    mono.hard = true;
    mono.note = "ratio decreases along the n ladder";
    report.rows.push_back(std::move(mono));
    return report;
}

MomentReport normality_check(SchemeKind scheme, const DgpSpec& dgp, std::size_t n,
                             std::size_t m, std::size_t reps, const RngStream& stream,
                             int threads) {
    if (dgp.design != Design::Exogenous) {
        throw InvalidArgument("normality_check: exogenous designs only");
    }
    if (reps < 1000) {
        throw InvalidArgument("normality_check: need reps >= 1000");
    }
    DgpSpec spec = dgp;
    spec.n = n;

    const Matrix v = is_random_projection(scheme) ? exogenous_v0(spec) : exogenous_v1(spec);
    Vector c = Vector::Zero(static_cast<Eigen::Index>(spec.p));
    c(static_cast<Eigen::Index>(spec.p - 1)) = 1.0;
    const double ctvc = c.dot(v * c);

    std::vector<double> vals(reps, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::uint8_t> failed(reps, 0);
    parallel_for(reps, threads, [&](std::size_t r) {
        RngStream rep_stream = stream.fork(r);
        try {
            RngStream data_stream = rep_stream.fork(0);
            DataBundle data = gen_exogenous(spec, data_stream);
            FitResult full = fit_ols(data);
            std::vector<double> probs;
            const std::vector<double>* probs_ptr = nullptr;
            if (scheme == SchemeKind::LeverageScore) {
                probs = leverage_probs(data.x);
                probs_ptr = &probs;
            }
            SketchPlan plan = plan_sketch({scheme, m}, n, rep_stream.fork(1), probs_ptr);
            FitResult sk = fit_sketched(data, plan, FitKind::Ols);
            vals[r] = std::sqrt(static_cast<double>(m)) * c.dot(sk.beta - full.beta) /
                      std::sqrt(ctvc);
        } catch (const Error&) {
            failed[r] = 1;
        }
    });

    std::vector<double> clean;
    clean.reserve(reps);
    std::size_t failures = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        if (failed[r]) {
            ++failures;
        } else {
            clean.push_back(vals[r]);
        }
    }
    if (clean.empty()) {
        throw NumericalError("normality_check: every replication failed");
    }

    const double z90 = normal_quantile(0.95);
    const double z95 = normal_quantile(0.975);
    const double z99 = normal_quantile(0.995);
    double c90 = 0.0, c95 = 0.0, c99 = 0.0;
    for (double x : clean) {
        c90 += std::abs(x) <= z90;
        c95 += std::abs(x) <= z95;
        c99 += std::abs(x) <= z99;
    }
    const double nn = static_cast<double>(clean.size());
    c90 /= nn;
    c95 /= nn;
    c99 /= nn;

    std::vector<double> sorted(clean);
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double phi = normal_cdf(sorted[i]);
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / nn - phi));
        ks = std::max(ks, std::abs(phi - static_cast<double>(i) / nn));
    }

    auto coverage_row = [&](std::string name, double emp, double nominal, bool hard,
                            double lo, double hi) {
        MomentRow row;
        row.name = std::move(name);
        row.empirical = emp;
        row.theoretical = nominal;
        row.mc_stderr = std::sqrt(nominal * (1.0 - nominal) / nn);
        row.pass = emp >= lo && emp <= hi;
        row.hard = hard;
        row.note = "pass iff in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
        return row;
    };
    MomentReport report;
    report.check = "normality";
    report.scheme = scheme_name(scheme);
    report.n = n;
    report.m = m;
    report.replications = reps;
    report.master_seed = stream.master_seed();
    report.stream_id = stream.stream_id();
    report.metadata.emplace_back("design", spec.hetero ? "heteroskedastic" : "homoskedastic");
    report.metadata.emplace_back("standardized_by",
                                 is_random_projection(scheme) ? "V0 (analytic)" : "V1 (analytic)");
    report.metadata.emplace_back("failed_replications", std::to_string(failures));
    report.rows.push_back(coverage_row("coverage_90", c90, 0.90, false, 0.90 - 0.025, 0.90 + 0.025));
    report.rows.push_back(coverage_row("coverage_95", c95, 0.95, true, 0.93, 0.97));
    report.rows.push_back(coverage_row("coverage_99", c99, 0.99, false, 0.99 - 0.012, 0.99 + 0.009));
    {
        MomentRow row;
        row.name = "ks_distance";
        row.empirical = ks;
        row.theoretical = 0.0;
        row.pass = ks < 0.05;
        row.hard = false;
        row.note = "empirical probe";
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace sketchls
