#include "sketchls/rng.hpp"

#include <cmath>
#include <cstdlib>

namespace sketchls {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t a = mix64(master_seed ^ 0x8BADF00D5EEDC0DEull);
    std::uint64_t b = mix64(stream_id ^ 0xD1B54A32D192ED03ull);
    return mix64(a + kGolden * b);
}

// Marsaglia-Tsang ziggurat for the standard normal, 128 layers, 53-bit draws.
struct ZigguratTables {
    std::uint64_t kn[128];
    double wn[128];
    double fn[128];
    double r;
    double inv_r;

    ZigguratTables() {
        const double m1 = 9007199254740992.0; // 2^53
        double dn = 3.442619855899;
        double tn = dn;
        const double vn = 9.91256303526217e-3;
        r = dn;
        inv_r = 1.0 / dn;

        double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::uint64_t>((dn / q) * m1);
        kn[1] = 0;
        wn[0] = q / m1;
        wn[127] = dn / m1;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = static_cast<std::uint64_t>((dn / tn) * m1);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m1;
        }
    }
};

const ZigguratTables& zig() {
    static const ZigguratTables tables;
    return tables;
}

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : key_(derive_key(master_seed, stream_id)),
      master_seed_(master_seed),
      stream_id_(stream_id) {}

RngStream::RngStream(std::uint64_t key, std::uint64_t master_seed, std::uint64_t stream_id, int)
    : key_(key), master_seed_(master_seed), stream_id_(stream_id) {}

std::uint64_t RngStream::next_u64() {
    counter_ += 1;
    return mix64(key_ + kGolden * counter_);
}

double RngStream::uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection; exactly uniform.
    std::uint64_t threshold = (-bound) % bound;
    for (;;) {
        std::uint64_t u = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(u) * bound;
        if (static_cast<std::uint64_t>(m) >= threshold) {
            return static_cast<std::uint64_t>(m >> 64);
        }
    }
}

double RngStream::normal() {
    const ZigguratTables& t = zig();
    for (;;) {
        std::uint64_t u = next_u64();
        // bits 0..6: layer; bits 10..63: signed 54-bit magnitude. Disjoint.
        unsigned iz = static_cast<unsigned>(u & 127);
        std::int64_t hz = static_cast<std::int64_t>(u) >> 10;
        std::uint64_t ahz = static_cast<std::uint64_t>(hz < 0 ? -hz : hz);
        if (ahz < t.kn[iz]) {
            return static_cast<double>(hz) * t.wn[iz];
        }
        if (iz == 0) {
            // tail beyond r
            double x, y;
            do {
                x = -std::log(uniform()) * t.inv_r;
                y = -std::log(uniform());
            } while (y + y < x * x);
            return hz > 0 ? t.r + x : -t.r - x;
        }
        double x = static_cast<double>(hz) * t.wn[iz];
        if (t.fn[iz] + uniform() * (t.fn[iz - 1] - t.fn[iz]) < std::exp(-0.5 * x * x)) {
            return x;
        }
    }
}

void RngStream::fill_normal(std::span<double> out) {
    for (double& v : out) {
        v = normal();
    }
}

double RngStream::rademacher() {
    return (next_u64() >> 63) ? 1.0 : -1.0;
}

RngStream RngStream::fork(std::uint64_t id) const {
    std::uint64_t child_key = mix64(key_ ^ mix64((id + 1) * 0xBF58476D1CE4E5B9ull));
    return RngStream(child_key, master_seed_, id, 0);
}

std::uint64_t RngStream::hash_at(std::uint64_t index, std::uint64_t slot) const {
    return mix64(key_ ^ mix64(kGolden * (index + 1) + 0x94D049BB133111EBull * slot));
}

} // namespace sketchls
