#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace sketchls {

/// Exact accumulator for sums of doubles.
///
/// Holds the running sum as a fixed-point integer spanning the full double
/// exponent range (66 limbs of 32 value bits, stored in int64 so carries can
/// be deferred). Integer addition is commutative and associative, so the
/// final double is bitwise identical for any summand order -- this is what
/// lets the streaming countsketch path match the materialized one no matter
/// how rows arrive. Accuracy of the final conversion is a few ulps.
///
/// Inputs must be finite. Each limb tolerates 2^30 deferred additions before
/// normalize() is needed; add() tracks this and renormalizes itself.
class ExactSum {
public:
    static constexpr int kLimbs = 66;         // ceil((2046 + 53) / 32) + 1
    static constexpr int kLimbBits = 32;
    static constexpr std::int64_t kLimbMask = 0xFFFFFFFFll;

    ExactSum() { clear(); }

    void clear() {
        std::memset(limbs_, 0, sizeof(limbs_));
        pending_ = 0;
    }

    void add(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        std::uint64_t mantissa = bits & 0xFFFFFFFFFFFFFull;
        int biased_exp = static_cast<int>((bits >> 52) & 0x7FF);
        if (biased_exp != 0) {
            mantissa |= 1ull << 52;
        } else {
            biased_exp = 1; // subnormal
        }
        if (mantissa == 0) {
            return;
        }
        // v = +-mantissa * 2^(biased_exp - 1075); lowest representable bit of
        // any double sits at 2^-1074, i.e. fixed-point bit 0.
        int bit = biased_exp - 1;           // in [0, 2045]
        int idx = bit >> 5;
        int shift = bit & 31;
        unsigned __int128 wide = static_cast<unsigned __int128>(mantissa) << shift;
        std::int64_t c0 = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide) & kLimbMask);
        std::int64_t c1 = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide >> 32) & kLimbMask);
        std::int64_t c2 = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide >> 64) & kLimbMask);
        if (bits >> 63) {
            limbs_[idx] -= c0;
            limbs_[idx + 1] -= c1;
            limbs_[idx + 2] -= c2;
        } else {
            limbs_[idx] += c0;
            limbs_[idx + 1] += c1;
            limbs_[idx + 2] += c2;
        }
        if (++pending_ >= (1u << 30)) {
            normalize();
        }
    }

    /// Deterministic conversion of the integer state back to double.
    double to_double() const {
        std::int64_t norm[kLimbs];
        std::memcpy(norm, limbs_, sizeof(norm));
        std::int64_t carry = propagate(norm);
        bool negative = carry < 0;
        if (negative) {
            // two's complement over the limb array
            std::int64_t borrow = 1;
            for (int i = 0; i < kLimbs; ++i) {
                norm[i] = (~norm[i] & kLimbMask) + borrow;
                borrow = norm[i] >> kLimbBits;
                norm[i] &= kLimbMask;
            }
        }
        double result = 0.0;
        for (int i = 0; i < kLimbs; ++i) {
            if (norm[i] != 0) {
                result += std::ldexp(static_cast<double>(norm[i]), kLimbBits * i - 1074);
            }
        }
        return negative ? -result : result;
    }

    void normalize() {
        std::int64_t carry = propagate(limbs_);
        // fold the sign carry back into the top limb; propagate() keeps all
        // lower limbs in [0, 2^32)
        limbs_[kLimbs - 1] += carry << kLimbBits;
        pending_ = 0;
    }

private:
    static std::int64_t propagate(std::int64_t* limbs) {
        std::int64_t carry = 0;
        for (int i = 0; i < kLimbs; ++i) {
            std::int64_t v = limbs[i] + carry;
            carry = v >> kLimbBits; // arithmetic shift: floor division
            limbs[i] = v - (carry << kLimbBits);
        }
        return carry;
    }

    std::int64_t limbs_[kLimbs];
    std::uint32_t pending_ = 0;
};

} // namespace sketchls
