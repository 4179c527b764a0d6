#include "sketchls/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sketchls/errors.hpp"
#include "sketchls/transforms.hpp"

namespace sketchls {

const char* scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Bernoulli: return "bernoulli";
        case SchemeKind::UniformWithReplacement: return "uniform";
        case SchemeKind::LeverageScore: return "leverage";
        case SchemeKind::CountSketch: return "countsketch";
        case SchemeKind::Srht: return "srht";
        case SchemeKind::Srft: return "srft";
        case SchemeKind::Gaussian: return "gaussian";
    }
    return "unknown";
}

std::optional<SchemeKind> scheme_from_name(const std::string& name) {
    if (name == "bernoulli") return SchemeKind::Bernoulli;
    if (name == "uniform") return SchemeKind::UniformWithReplacement;
    if (name == "leverage") return SchemeKind::LeverageScore;
    if (name == "countsketch") return SchemeKind::CountSketch;
    if (name == "srht") return SchemeKind::Srht;
    if (name == "srft" || name == "fft") return SchemeKind::Srft;
    if (name == "gaussian") return SchemeKind::Gaussian;
    return std::nullopt;
}

bool is_random_projection(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::CountSketch:
        case SchemeKind::Srht:
        case SchemeKind::Srft:
        case SchemeKind::Gaussian:
            return true;
        default:
            return false;
    }
}

namespace detail {

RngStream plan_substream(const RngStream& stream, SchemeKind kind) {
    return stream.fork(0xC0DE5000ull + static_cast<std::uint64_t>(kind));
}

std::uint32_t cs_bucket(const RngStream& stream, std::uint64_t index, std::size_t m) {
    // Lemire bounded hash with deterministic rejection slots
    const std::uint64_t bound = m;
    const std::uint64_t threshold = (-bound) % bound;
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::uint64_t u = stream.hash_at(index, 1 + attempt);
        unsigned __int128 prod = static_cast<unsigned __int128>(u) * bound;
        if (static_cast<std::uint64_t>(prod) >= threshold) {
            return static_cast<std::uint32_t>(prod >> 64);
        }
    }
}

double cs_sign(const RngStream& stream, std::uint64_t index) {
    return (stream.hash_at(index, 0) >> 63) ? 1.0 : -1.0;
}

} // namespace detail

namespace {

void validate_probs(const std::vector<double>& probs, std::size_t n) {
    if (probs.size() != n) {
        throw BadProbabilities("probability vector has length " +
                               std::to_string(probs.size()) + ", expected " +
                               std::to_string(n));
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw BadProbabilities("probabilities must be finite and nonnegative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        throw BadProbabilities("probabilities sum to " + std::to_string(sum));
    }
}

std::vector<double> cumulative(const std::vector<double>& probs) {
    std::vector<double> cum(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;
    return cum;
}

// Inverse-CDF draw: first index with cum >= u, u in (0,1]. Zero-probability
// rows have zero-width slots and are never selected.
std::uint32_t draw_from_cum(const std::vector<double>& cum, double u) {
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) {
        --it;
    }
    return static_cast<std::uint32_t>(it - cum.begin());
}

} // namespace

std::size_t SketchPlan::rows_out() const {
    if (scheme.kind == SchemeKind::Bernoulli) {
        std::size_t count = 0;
        for (std::uint8_t b : bernoulli_bits) {
            count += b;
        }
        return count;
    }
    return scheme.target_m;
}

SketchPlan plan_sketch(SketchScheme scheme, std::size_t n, const RngStream& stream,
                       const std::vector<double>* probs) {
    if (scheme.target_m < 1) {
        throw InvalidArgument("plan_sketch: target_m must be >= 1");
    }
    if (n < 1) {
        throw InvalidArgument("plan_sketch: n must be >= 1");
    }
    const std::size_t m = scheme.target_m;
    SketchPlan plan;
    plan.scheme = scheme;
    plan.n = n;
    plan.master_seed = stream.master_seed();
    plan.stream_id = stream.stream_id();

    RngStream draws = detail::plan_substream(stream, scheme.kind);

    switch (scheme.kind) {
        case SchemeKind::Bernoulli: {
            if (m > n) {
                throw MTooLarge(m, n);
            }
            const double prob = static_cast<double>(m) / static_cast<double>(n);
            plan.bernoulli_bits.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                plan.bernoulli_bits[i] = draws.uniform() <= prob ? 1 : 0;
            }
            break;
        }
        case SchemeKind::UniformWithReplacement:
        case SchemeKind::LeverageScore: {
            if (scheme.kind == SchemeKind::LeverageScore && probs == nullptr) {
                throw BadProbabilities("leverage-score plans need a probability vector");
            }
            if (probs != nullptr) {
                validate_probs(*probs, n);
                plan.probs = *probs;
                plan.cum_probs = cumulative(plan.probs);
            }
            plan.sampled_rows.resize(m);
            for (std::size_t t = 0; t < m; ++t) {
                if (plan.cum_probs.empty()) {
                    plan.sampled_rows[t] = static_cast<std::uint32_t>(draws.uniform_below(n));
                } else {
                    plan.sampled_rows[t] = draw_from_cum(plan.cum_probs, draws.uniform());
                }
            }
            break;
        }
        case SchemeKind::CountSketch: {
            plan.cs_buckets.resize(n);
            plan.cs_signs.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                plan.cs_buckets[i] = detail::cs_bucket(draws, i, m);
                plan.cs_signs[i] = detail::cs_sign(draws, i) > 0 ? 1 : -1;
            }
            break;
        }
        case SchemeKind::Srht: {
            if (m > n) {
                throw MTooLarge(m, n);
            }
            plan.n_pad = std::bit_ceil(n);
            plan.sampled_rows.resize(m);
            for (std::size_t t = 0; t < m; ++t) {
                plan.sampled_rows[t] =
                    static_cast<std::uint32_t>(draws.uniform_below(plan.n_pad));
            }
            plan.rademacher.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                plan.rademacher[i] = draws.rademacher() > 0 ? 1 : -1;
            }
            break;
        }
        case SchemeKind::Srft: {
            plan.sampled_rows.resize(m);
            for (std::size_t t = 0; t < m; ++t) {
                plan.sampled_rows[t] = static_cast<std::uint32_t>(draws.uniform_below(n));
            }
            plan.rademacher.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                plan.rademacher[i] = draws.rademacher() > 0 ? 1 : -1;
            }
            break;
        }
        case SchemeKind::Gaussian: {
            plan.gaussian_rows = draws;
            break;
        }
    }
    return plan;
}

namespace {

Matrix apply_bernoulli(const SketchPlan& plan, const Matrix& a) {
    const std::size_t m_real = plan.rows_out();
    const double scale = std::sqrt(static_cast<double>(plan.n) /
                                   static_cast<double>(plan.scheme.target_m));
    Matrix out(m_real, a.cols());
    std::size_t r = 0;
    for (std::size_t i = 0; i < plan.n; ++i) {
        if (plan.bernoulli_bits[i]) {
            out.row(r++) = scale * a.row(static_cast<Eigen::Index>(i));
        }
    }
    return out;
}

Matrix apply_row_sampling(const SketchPlan& plan, const Matrix& a) {
    const std::size_t m = plan.scheme.target_m;
    Matrix out(m, a.cols());
    if (plan.probs.empty()) {
        const double scale = std::sqrt(static_cast<double>(plan.n) / static_cast<double>(m));
        for (std::size_t t = 0; t < m; ++t) {
            out.row(t) = scale * a.row(plan.sampled_rows[t]);
        }
    } else {
        for (std::size_t t = 0; t < m; ++t) {
            const std::uint32_t i = plan.sampled_rows[t];
            const double scale = 1.0 / std::sqrt(static_cast<double>(m) * plan.probs[i]);
            out.row(t) = scale * a.row(i);
        }
    }
    return out;
}

Matrix apply_countsketch(const SketchPlan& plan, const Matrix& a) {
    const std::size_t m = plan.scheme.target_m;
    const std::size_t cols = static_cast<std::size_t>(a.cols());
    std::vector<ExactSum> cells(m * cols);
    for (std::size_t i = 0; i < plan.n; ++i) {
        const std::size_t b = plan.cs_buckets[i];
        const double s = plan.cs_signs[i];
        ExactSum* cell = &cells[b * cols];
        for (std::size_t c = 0; c < cols; ++c) {
            cell[c].add(s * a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
        }
    }
    Matrix out(m, cols);
    for (std::size_t b = 0; b < m; ++b) {
        for (std::size_t c = 0; c < cols; ++c) {
            out(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) =
                cells[b * cols + c].to_double();
        }
    }
    return out;
}

Matrix apply_srht(const SketchPlan& plan, const Matrix& a) {
    const std::size_t m = plan.scheme.target_m;
    Matrix work = Matrix::Zero(plan.n_pad, a.cols());
    for (std::size_t i = 0; i < plan.n; ++i) {
        work.row(static_cast<Eigen::Index>(i)) =
            static_cast<double>(plan.rademacher[i]) * a.row(static_cast<Eigen::Index>(i));
    }
    fwht_normalized_columns_inplace(work);
    const double scale =
        std::sqrt(static_cast<double>(plan.n_pad) / static_cast<double>(m));
    Matrix out(m, a.cols());
    for (std::size_t t = 0; t < m; ++t) {
        out.row(t) = scale * work.row(plan.sampled_rows[t]);
    }
    return out;
}

Matrix apply_srft(const SketchPlan& plan, const Matrix& a) {
    const std::size_t m = plan.scheme.target_m;
    Matrix work(plan.n, a.cols());
    for (std::size_t i = 0; i < plan.n; ++i) {
        work.row(static_cast<Eigen::Index>(i)) =
            static_cast<double>(plan.rademacher[i]) * a.row(static_cast<Eigen::Index>(i));
    }
    real_fourier_orthonormal_columns_inplace(work);
    const double scale = std::sqrt(static_cast<double>(plan.n) / static_cast<double>(m));
    Matrix out(m, a.cols());
    for (std::size_t t = 0; t < m; ++t) {
        out.row(t) = scale * work.row(plan.sampled_rows[t]);
    }
    return out;
}

Matrix apply_gaussian(const SketchPlan& plan, const Matrix& a) {
    const std::size_t m = plan.scheme.target_m;
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    Matrix out(m, a.cols());
    Vector pi_row(static_cast<Eigen::Index>(plan.n));
    for (std::size_t k = 0; k < m; ++k) {
        RngStream row_stream = plan.gaussian_rows.fork(k);
        for (std::size_t i = 0; i < plan.n; ++i) {
            pi_row(static_cast<Eigen::Index>(i)) = inv_sqrt_m * row_stream.normal();
        }
        out.row(k) = pi_row.transpose() * a;
    }
    return out;
}

} // namespace

Matrix apply_sketch(const SketchPlan& plan, const Matrix& a) {
    if (static_cast<std::size_t>(a.rows()) != plan.n) {
        throw DimensionMismatch("apply_sketch: matrix has " + std::to_string(a.rows()) +
                                " rows, plan expects " + std::to_string(plan.n));
    }
    switch (plan.scheme.kind) {
        case SchemeKind::Bernoulli: return apply_bernoulli(plan, a);
        case SchemeKind::UniformWithReplacement:
        case SchemeKind::LeverageScore: return apply_row_sampling(plan, a);
        case SchemeKind::CountSketch: return apply_countsketch(plan, a);
        case SchemeKind::Srht: return apply_srht(plan, a);
        case SchemeKind::Srft: return apply_srft(plan, a);
        case SchemeKind::Gaussian: return apply_gaussian(plan, a);
    }
    throw InvalidArgument("apply_sketch: unknown scheme");
}

Vector apply_sketch(const SketchPlan& plan, const Vector& v) {
    Matrix a = v;
    return apply_sketch(plan, a).col(0);
}

Matrix materialize_pi(const SketchPlan& plan) {
    return apply_sketch(plan, Matrix(Matrix::Identity(plan.n, plan.n)));
}

CountSketchAccumulator::CountSketchAccumulator(std::size_t m, std::size_t cols,
                                               const RngStream& stream)
    : m_(m),
      cols_(cols),
      hash_stream_(detail::plan_substream(stream, SchemeKind::CountSketch)),
      cells_(m * cols) {
    if (m < 1 || cols < 1) {
        throw InvalidArgument("countsketch accumulator needs m >= 1 and cols >= 1");
    }
}

void CountSketchAccumulator::absorb(std::size_t row_index,
                                    Eigen::Ref<const Eigen::RowVectorXd> row) {
    if (static_cast<std::size_t>(row.size()) != cols_) {
        throw DimensionMismatch("countsketch absorb: row has " + std::to_string(row.size()) +
                                " entries, expected " + std::to_string(cols_));
    }
    const std::size_t word = row_index >> 6;
    const std::uint64_t bit = 1ull << (row_index & 63);
    if (word >= seen_.size()) {
        seen_.resize(std::max(word + 1, seen_.size() * 2), 0);
    }
    if (seen_[word] & bit) {
        throw DuplicateRowIndex(row_index);
    }
    seen_[word] |= bit;
    ++rows_absorbed_;

    const std::size_t b = detail::cs_bucket(hash_stream_, row_index, m_);
    const double s = detail::cs_sign(hash_stream_, row_index);
    ExactSum* cell = &cells_[b * cols_];
    for (std::size_t c = 0; c < cols_; ++c) {
        cell[c].add(s * row(static_cast<Eigen::Index>(c)));
    }
}

Matrix CountSketchAccumulator::finish() const {
    Matrix out(m_, cols_);
    for (std::size_t b = 0; b < m_; ++b) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) =
                cells_[b * cols_ + c].to_double();
        }
    }
    return out;
}

Matrix stream_countsketch(const RowSource& source, std::size_t m, std::size_t cols,
                          const RngStream& stream) {
    CountSketchAccumulator acc(m, cols, stream);
    while (auto item = source()) {
        acc.absorb(item->first, item->second);
    }
    return acc.finish();
}

std::vector<double> leverage_probs(const Matrix& x) {
    const auto svd = thin_svd(x);
    const double smax = svd.sigma_max();
    const double smin = svd.sigma_min();
    if (!(smin > 1e-12 * smax) || x.rows() < x.cols()) {
        throw RankDeficient(static_cast<std::size_t>(svd.singular_values.size() - 1),
                            smax > 0.0 ? smin / smax : 0.0);
    }
    const double p = static_cast<double>(x.cols());
    std::vector<double> probs(static_cast<std::size_t>(x.rows()));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        probs[static_cast<std::size_t>(i)] = svd.u.row(i).squaredNorm() / p;
        sum += probs[static_cast<std::size_t>(i)];
    }
    // exact leverages sum to p; renormalize away FP drift so plans validate
    for (double& v : probs) {
        v /= sum;
    }
    return probs;
}

} // namespace sketchls
