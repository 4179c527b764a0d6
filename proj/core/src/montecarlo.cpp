#include "sketchls/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sketchls/errors.hpp"
#include "sketchls/parallel.hpp"

namespace sketchls {

namespace {

void ar1_fill(double* out, std::size_t dim, double rho, RngStream& stream) {
    if (dim == 0) {
        return;
    }
    const double innov = std::sqrt(1.0 - rho * rho);
    out[0] = stream.normal();
    for (std::size_t j = 1; j < dim; ++j) {
        out[j] = rho * out[j - 1] + innov * stream.normal();
    }
}

Vector default_beta0(std::size_t p) {
    Vector beta = Vector::Ones(static_cast<Eigen::Index>(p));
    beta(0) = 0.0;
    return beta;
}

} // namespace

DgpSpec DgpSpec::exogenous(std::size_t n, std::size_t p, bool hetero, double rho) {
    DgpSpec spec;
    spec.design = Design::Exogenous;
    spec.hetero = hetero;
    spec.n = n;
    spec.p = p;
    spec.rho = rho;
    spec.beta0 = default_beta0(p);
    return spec;
}

DgpSpec DgpSpec::endogenous_first_stage(std::size_t n, std::size_t p, std::size_t q,
                                        bool hetero, double excluded_zeta, double rho) {
    DgpSpec spec;
    spec.design = Design::Endogenous;
    spec.hetero = false;
    spec.first_stage_hetero = hetero;
    spec.n = n;
    spec.p = p;
    spec.q = q;
    spec.rho = rho;
    spec.beta0 = default_beta0(p);
    spec.zeta0 = Vector::Zero(static_cast<Eigen::Index>(q));
    for (std::size_t j = 1; j < p - 1; ++j) {
        spec.zeta0(static_cast<Eigen::Index>(j)) = 0.1;
    }
    for (std::size_t j = p - 1; j < q; ++j) {
        spec.zeta0(static_cast<Eigen::Index>(j)) = excluded_zeta;
    }
    return spec;
}

DgpSpec DgpSpec::endogenous_tsls(std::size_t n, std::size_t p, std::size_t q, bool hetero,
                                 double rho) {
    DgpSpec spec = endogenous_first_stage(n, p, q, false, 0.5, rho);
    spec.hetero = hetero;
    spec.first_stage_hetero = false;
    return spec;
}

DataBundle gen_exogenous(const DgpSpec& spec, RngStream& stream) {
    if (spec.design != Design::Exogenous) {
        throw InvalidArgument("gen_exogenous: spec is not an exogenous design");
    }
    if (spec.p < 1 || (spec.hetero && spec.p < 2)) {
        throw InvalidArgument("gen_exogenous: need p >= 1 (p >= 2 for heteroskedastic)");
    }
    const std::size_t n = spec.n;
    const std::size_t p = spec.p;
    DataBundle data;
    data.x = Matrix(n, p);
    data.y = Vector(n);
    std::vector<double> row(p - 1);
    for (std::size_t i = 0; i < n; ++i) {
        data.x(static_cast<Eigen::Index>(i), 0) = 1.0;
        ar1_fill(row.data(), p - 1, spec.rho, stream);
        for (std::size_t j = 1; j < p; ++j) {
            data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j - 1];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double e = stream.normal();
        const double sigma =
            spec.hetero
                ? std::exp(data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p - 1)))
                : 1.0;
        data.y(static_cast<Eigen::Index>(i)) =
            data.x.row(static_cast<Eigen::Index>(i)).dot(spec.beta0) + sigma * e;
    }
    return data;
}

DataBundle gen_endogenous(const DgpSpec& spec, RngStream& stream) {
    if (spec.design != Design::Endogenous) {
        throw InvalidArgument("gen_endogenous: spec is not an endogenous design");
    }
    if (spec.p < 2 || spec.q < spec.p) {
        throw InvalidArgument("gen_endogenous: need p >= 2 and q >= p");
    }
    const std::size_t n = spec.n;
    const std::size_t p = spec.p;
    const std::size_t q = spec.q;
    DataBundle data;
    data.x = Matrix(n, p);
    data.y = Vector(n);
    Matrix z(n, q);
    std::vector<double> row(q - 1);
    for (std::size_t i = 0; i < n; ++i) {
        z(static_cast<Eigen::Index>(i), 0) = 1.0;
        ar1_fill(row.data(), q - 1, spec.rho, stream);
        for (std::size_t j = 1; j < q; ++j) {
            z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j - 1];
        }
    }
    const double abs_scale = 5.0 / static_cast<double>(q);
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = stream.normal();
        const double eps = stream.normal();
        double hetero_scale = 1.0;
        if (spec.first_stage_hetero || spec.hetero) {
            double abs_sum = 0.0;
            for (std::size_t j = 1; j < q; ++j) {
                abs_sum += std::abs(z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
            hetero_scale = std::exp(abs_scale * abs_sum) / 100.0;
        }
        const double sigma1 = spec.first_stage_hetero ? hetero_scale : 1.0;
        const double sigma2 = spec.hetero ? hetero_scale : 1.0;

        data.x(static_cast<Eigen::Index>(i), 0) = 1.0;
        for (std::size_t j = 1; j + 1 < p; ++j) {
            data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p - 1)) =
            z.row(static_cast<Eigen::Index>(i)).dot(spec.zeta0) + sigma1 * eta;
        data.y(static_cast<Eigen::Index>(i)) =
            data.x.row(static_cast<Eigen::Index>(i)).dot(spec.beta0) + sigma2 * (eta + eps);
    }
    data.z = std::move(z);
    return data;
}

DataBundle generate(const DgpSpec& spec, RngStream& stream) {
    return spec.design == Design::Exogenous ? gen_exogenous(spec, stream)
                                            : gen_endogenous(spec, stream);
}

Matrix exogenous_sigma_x(const DgpSpec& spec) {
    const std::size_t p = spec.p;
    Matrix sigma = Matrix::Zero(p, p);
    sigma(0, 0) = 1.0;
    for (std::size_t j = 1; j < p; ++j) {
        for (std::size_t k = 1; k < p; ++k) {
            sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                std::pow(spec.rho, std::abs(static_cast<double>(j) - static_cast<double>(k)));
        }
    }
    return sigma;
}

Matrix exogenous_v0(const DgpSpec& spec) {
    const double e2 = spec.hetero ? std::exp(2.0) : 1.0;
    return e2 * exogenous_sigma_x(spec).inverse();
}

Matrix exogenous_v1(const DgpSpec& spec) {
    const Matrix sigma_x = exogenous_sigma_x(spec);
    if (!spec.hetero) {
        return sigma_x.inverse();
    }
    // X = (1, G) with G ~ N(0, S). Under the exponential tilt e^{2 G_t},
    // G ~ N(2 S e_t, S) and E[e^{2 G_t}] = e^2; t is the last coordinate.
    const std::size_t p = spec.p;
    const std::size_t d = p - 1;
    Matrix s(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                std::pow(spec.rho, std::abs(static_cast<double>(j) - static_cast<double>(k)));
        }
    }
    const std::size_t t = d - 1;
    const double e2 = std::exp(2.0);
    Matrix meat(p, p);
    meat(0, 0) = e2;
    for (std::size_t j = 0; j < d; ++j) {
        const double mean_j = 2.0 * s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t));
        meat(0, static_cast<Eigen::Index>(j + 1)) = e2 * mean_j;
        meat(static_cast<Eigen::Index>(j + 1), 0) = e2 * mean_j;
        for (std::size_t k = 0; k < d; ++k) {
            const double mean_k =
                2.0 * s(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
            meat(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(k + 1)) =
                e2 * (s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +
                      mean_j * mean_k);
        }
    }
    const Matrix sigma_inv = exogenous_sigma_x(spec).inverse();
    return sigma_inv * meat * sigma_inv;
}

namespace {

struct RepOutcome {
    bool failed = false;
    bool size_se0 = false;
    bool size_se1 = false;
    bool power_se0 = false;
    bool power_se1 = false;
};

RepOutcome run_ttest_rep(const DgpSpec& dgp, SketchScheme scheme, const TTestSpec& test,
                         const RngStream& rep_stream) {
    RepOutcome out;
    RngStream data_stream = rep_stream.fork(0);
    DataBundle data = generate(dgp, data_stream);

    std::vector<double> probs;
    const std::vector<double>* probs_ptr = nullptr;
    if (scheme.kind == SchemeKind::LeverageScore) {
        probs = leverage_probs(data.x);
        probs_ptr = &probs;
    }
    SketchPlan plan = plan_sketch(scheme, dgp.n, rep_stream.fork(1), probs_ptr);
    const FitKind kind = dgp.design == Design::Endogenous ? FitKind::Tsls : FitKind::Ols;
    FitResult fit = fit_sketched(data, plan, kind);

    constexpr double kAlpha = 0.05;
    out.size_se0 = t_test(fit, test.c, test.null_value, CovType::Homo).reject_at(kAlpha);
    out.size_se1 = t_test(fit, test.c, test.null_value, CovType::Robust).reject_at(kAlpha);
    out.power_se0 = t_test(fit, test.c, test.alt_value, CovType::Homo).reject_at(kAlpha);
    out.power_se1 = t_test(fit, test.c, test.alt_value, CovType::Robust).reject_at(kAlpha);
    return out;
}

RepOutcome run_fstat_rep(const DgpSpec& null_spec, const DgpSpec& alt_spec,
                         SketchScheme scheme, const RngStream& rep_stream) {
    RepOutcome out;
    const std::size_t p = null_spec.p;
    const std::size_t q = null_spec.q;
    std::vector<std::size_t> excluded;
    for (std::size_t j = p - 1; j < q; ++j) {
        excluded.push_back(j);
    }
    constexpr double kAlpha = 0.05;

    auto rejected = [&](const DgpSpec& spec, std::uint64_t data_tag, std::uint64_t plan_tag,
                        bool& se0, bool& se1) {
        RngStream data_stream = rep_stream.fork(data_tag);
        DataBundle data = generate(spec, data_stream);
        SketchPlan plan = plan_sketch(scheme, spec.n, rep_stream.fork(plan_tag));
        SketchedData sk = sketch_bundle(plan, data);
        if (sk.rows_out < q) {
            throw SketchTooSmall(sk.rows_out, q);
        }
        DataBundle sketched{std::move(sk.y), std::move(sk.x), std::move(sk.z)};
        se0 = first_stage_f(sketched, p - 1, excluded, CovType::Homo).reject_at(kAlpha);
        se1 = first_stage_f(sketched, p - 1, excluded, CovType::Robust).reject_at(kAlpha);
    };
    rejected(null_spec, 0, 1, out.size_se0, out.size_se1);
    rejected(alt_spec, 2, 3, out.power_se0, out.power_se1);
    return out;
}

} // namespace

const SimRow& SimTable::cell(const std::string& scheme, const std::string& metric,
                             const std::string& cov) const {
    for (const auto& row : rows) {
        if (row.scheme == scheme && row.metric == metric && row.cov == cov) {
            return row;
        }
    }
    throw InvalidArgument("SimTable: no cell (" + scheme + ", " + metric + ", " + cov + ")");
}

std::string SimTable::to_csv() const {
    std::ostringstream out;
    out << "scheme,metric,cov,rate,mc_se,replications,failures\n";
    for (const auto& row : rows) {
        std::size_t fails = 0;
        for (const auto& [scheme, count] : failures) {
            if (scheme == row.scheme) {
                fails = count;
            }
        }
        out << row.scheme << "," << row.metric << "," << row.cov << "," << row.rate << ","
            << row.mc_se << "," << replications << "," << fails << "\n";
    }
    return out.str();
}

std::string SimTable::pretty() const {
    std::ostringstream out;
    out << experiment << " (reps = " << replications << ", seed = " << master_seed << ")\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %10s %10s %10s %10s %8s\n", "scheme",
                  "size.se0", "size.se1", "power.se0", "power.se1", "fails");
    out << line;
    std::vector<std::string> schemes;
    for (const auto& row : rows) {
        if (std::find(schemes.begin(), schemes.end(), row.scheme) == schemes.end()) {
            schemes.push_back(row.scheme);
        }
    }
    for (const auto& scheme : schemes) {
        std::size_t fails = 0;
        for (const auto& [s, count] : failures) {
            if (s == scheme) {
                fails = count;
            }
        }
        std::snprintf(line, sizeof(line), "%-14s %10.3f %10.3f %10.3f %10.3f %8zu\n",
                      scheme.c_str(), cell(scheme, "size", "se0").rate,
                      cell(scheme, "size", "se1").rate, cell(scheme, "power", "se0").rate,
                      cell(scheme, "power", "se1").rate, fails);
        out << line;
    }
    return out.str();
}

SimTable run_size_power(const DgpSpec& dgp, const std::vector<SketchScheme>& schemes,
                        std::size_t m, std::size_t reps, const TestSpec& test,
                        const RngStream& stream, int threads) {
    if (reps == 0) {
        throw InvalidArgument("run_size_power: reps must be >= 1");
    }
    for (const auto& scheme : schemes) {
        if (scheme.kind == SchemeKind::LeverageScore && dgp.design == Design::Endogenous) {
            throw InvalidArgument("leverage-score sampling is not defined for 2SLS designs");
        }
    }

    const bool is_f_test = std::holds_alternative<FirstStageFSpec>(test);
    DgpSpec null_spec = dgp;
    DgpSpec alt_spec = dgp;
    if (is_f_test) {
        const auto& f = std::get<FirstStageFSpec>(test);
        for (std::size_t j = dgp.p - 1; j < dgp.q; ++j) {
            null_spec.zeta0(static_cast<Eigen::Index>(j)) = f.null_zeta;
            alt_spec.zeta0(static_cast<Eigen::Index>(j)) = f.alt_zeta;
        }
    }

    SimTable table;
    table.replications = reps;
    table.master_seed = stream.master_seed();
    table.experiment = std::string(dgp.design == Design::Endogenous
                                       ? (is_f_test ? "first-stage F" : "2SLS t-test")
                                       : "OLS t-test") +
                       (dgp.hetero || dgp.first_stage_hetero ? ", heteroskedastic"
                                                             : ", homoskedastic");

    for (std::size_t s = 0; s < schemes.size(); ++s) {
        SketchScheme scheme = schemes[s];
        scheme.target_m = m;
        std::vector<RepOutcome> outcomes(reps);
        parallel_for(reps, threads, [&](std::size_t r) {
            RngStream rep_stream = stream.fork(s * reps + r);
            try {
                outcomes[r] = is_f_test
                                  ? run_fstat_rep(null_spec, alt_spec, scheme, rep_stream)
                                  : run_ttest_rep(dgp, scheme, std::get<TTestSpec>(test),
                                                  rep_stream);
            } catch (const Error&) {
                outcomes[r].failed = true;
            }
        });

        std::size_t fails = 0;
        std::size_t counts[4] = {0, 0, 0, 0};
        for (const auto& o : outcomes) {
            if (o.failed) {
                ++fails;
                continue;
            }
            counts[0] += o.size_se0;
            counts[1] += o.size_se1;
            counts[2] += o.power_se0;
            counts[3] += o.power_se1;
        }
        const double effective = static_cast<double>(reps - fails);
        const char* metrics[4] = {"size", "size", "power", "power"};
        const char* covs[4] = {"se0", "se1", "se0", "se1"};
        for (int k = 0; k < 4; ++k) {
            SimRow row;
            row.scheme = scheme_name(scheme.kind);
            row.metric = metrics[k];
            row.cov = covs[k];
            row.rate = effective > 0 ? static_cast<double>(counts[k]) / effective : 0.0;
            row.mc_se = effective > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / effective) : 0.0;
            table.rows.push_back(std::move(row));
        }
        table.failures.emplace_back(scheme_name(scheme.kind), fails);
    }
    return table;
}

} // namespace sketchls
