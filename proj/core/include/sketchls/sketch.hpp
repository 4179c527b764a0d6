#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sketchls/exact_sum.hpp"
#include "sketchls/linalg.hpp"
#include "sketchls/rng.hpp"

namespace sketchls {

enum class SchemeKind {
    Bernoulli,
    UniformWithReplacement,
    LeverageScore,
    CountSketch,
    Srht,
    Srft,
    Gaussian,
};

const char* scheme_name(SchemeKind kind);
std::optional<SchemeKind> scheme_from_name(const std::string& name);

/// Random sampling (RS) schemes select and reweight rows; random projection
/// (RP) schemes mix rows with zero-mean weights.
bool is_random_projection(SchemeKind kind);

struct SketchScheme {
    SchemeKind kind;
    std::size_t target_m;
};

/// Materialized randomness of one sketching operator.
///
/// A plan is a pure function of (stream identity, scheme, n, m, probs): the
/// caller's stream is not consumed, so the same inputs always produce the
/// same plan, and a plan applied twice yields bitwise-identical output.
struct SketchPlan {
    SketchScheme scheme{SchemeKind::CountSketch, 0};
    std::size_t n = 0;
    std::size_t n_pad = 0; // SRHT only: least power of two >= n
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    std::vector<std::uint8_t> bernoulli_bits;  // Bernoulli: n selection bits
    std::vector<std::uint32_t> sampled_rows;   // RS/Leverage/SRHT/SRFT: m draws
    std::vector<double> probs;                 // RS (nonuniform) / Leverage: n
    std::vector<double> cum_probs;             // cumulative of probs
    std::vector<std::uint32_t> cs_buckets;     // CountSketch: n, in [0, m)
    std::vector<std::int8_t> cs_signs;         // CountSketch: n, +-1
    std::vector<std::int8_t> rademacher;       // SRHT/SRFT: n, +-1
    RngStream gaussian_rows{0, 0};             // Gaussian: substream, copied per apply

    /// Realized output row count: binomial for Bernoulli, target m otherwise.
    std::size_t rows_out() const;
};

/// Sketched data blocks sharing rows_out rows.
struct SketchedData {
    std::size_t rows_out = 0;
    std::size_t effective_m = 0; // target m for every scheme, Bernoulli included
    Vector y;
    Matrix x;
    std::optional<Matrix> z;
};

/// Build a sketching plan.
///
/// probs is required for LeverageScore and optional (nonuniform) for
/// UniformWithReplacement; it must be a probability vector of length n
/// summing to 1 within 1e-10. Bernoulli selects each row with probability
/// m/n. Throws BadProbabilities / MTooLarge.
SketchPlan plan_sketch(SketchScheme scheme, std::size_t n, const RngStream& stream,
                       const std::vector<double>* probs = nullptr);

/// Apply the implied Pi to an n x k matrix.
///
/// Row scaling: sqrt(n/m) for Bernoulli/uniform-RS/SRHT/SRFT, 1/sqrt(m p_i)
/// per sampled row for nonuniform RS and LeverageScore. CountSketch runs in
/// O(nnz(A)) by bucket accumulation with entries +-1.
Matrix apply_sketch(const SketchPlan& plan, const Matrix& a);
Vector apply_sketch(const SketchPlan& plan, const Vector& v);

/// Pi itself, as apply_sketch(plan, I_n). Intended for diagnostics and small n.
Matrix materialize_pi(const SketchPlan& plan);

/// One-pass countsketch accumulator: absorb rows keyed by index in any order,
/// memory O(m * cols). finish() is bitwise-equal to apply_sketch with the
/// CountSketch plan built from the same stream, for any arrival order
/// (bucket sums are kept in exact fixed point). Duplicate indices throw
/// DuplicateRowIndex.
class CountSketchAccumulator {
public:
    CountSketchAccumulator(std::size_t m, std::size_t cols, const RngStream& stream);

    void absorb(std::size_t row_index, Eigen::Ref<const Eigen::RowVectorXd> row);
    Matrix finish() const;

    std::size_t rows_absorbed() const { return rows_absorbed_; }

private:
    std::size_t m_;
    std::size_t cols_;
    RngStream hash_stream_;
    std::vector<ExactSum> cells_; // m * cols, row-major
    std::vector<std::uint64_t> seen_;
    std::size_t rows_absorbed_ = 0;
};

/// Streaming countsketch over a pull source yielding (index, row) pairs;
/// returns the m x k sketch once the source is exhausted.
using RowSource = std::function<std::optional<std::pair<std::size_t, Eigen::RowVectorXd>>()>;
Matrix stream_countsketch(const RowSource& source, std::size_t m, std::size_t cols,
                          const RngStream& stream);

/// Leverage-score sampling probabilities p_i = ||row i of U_X||^2 / p.
std::vector<double> leverage_probs(const Matrix& x);

// Countsketch bucket/sign lookups, addressable by row index so the streaming
// path needs no a-priori n. Both plan_sketch and the accumulator use these.
namespace detail {
std::uint32_t cs_bucket(const RngStream& stream, std::uint64_t index, std::size_t m);
double cs_sign(const RngStream& stream, std::uint64_t index);
RngStream plan_substream(const RngStream& stream, SchemeKind kind);
} // namespace detail

} // namespace sketchls
