#pragma once

#include <cstdint>
#include <span>

namespace sketchls {

/// Counter-based random number stream.
///
/// Every draw is a pure function of (master_seed, stream_id, counter), so a
/// stream is reproducible across runs and across thread counts, and forking
/// substreams is O(1). Parallel code derives one stream per task via fork();
/// a single RngStream instance must not be shared between threads.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Next raw 64 random bits.
    std::uint64_t next_u64();

    /// Uniform double in (0, 1].
    double uniform();

    /// Uniform integer in [0, bound). Exact (rejection sampling), bound >= 1.
    std::uint64_t uniform_below(std::uint64_t bound);

    /// Standard normal draw (ziggurat).
    double normal();

    /// Fill a span with standard normal draws.
    void fill_normal(std::span<double> out);

    /// +1 or -1 with equal probability.
    double rademacher();

    /// Independent substream for task `id`; deterministic in (this stream's
    /// identity, id) and unaffected by draws made on the parent.
    RngStream fork(std::uint64_t id) const;

    /// Stateless per-index raw bits: hash of (stream identity, index, slot).
    /// Used where a value must be addressable by index without sequencing,
    /// e.g. countsketch bucket/sign lookups while streaming.
    std::uint64_t hash_at(std::uint64_t index, std::uint64_t slot) const;

private:
    RngStream(std::uint64_t key, std::uint64_t master_seed, std::uint64_t stream_id, int);

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
};

} // namespace sketchls
