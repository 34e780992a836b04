#pragma once

// Integer-exact evaluation of the log2 expressions the parameter derivation
// needs: ceil((log2 m)^4), floor(x / (log2 x - d)^2), ceil(log2(a/b)).
// Floating point is never trusted at a boundary. Real-valued logs are
// bracketed by a certified fixed-point interval obtained with the classic
// squaring bit-extraction; every extracted bit is validated by both interval
// endpoints, and decisions retry at higher precision if an interval straddles
// an integer. For m not a power of two, (log2 m)^4 is irrational, so the
// refinement always terminates.

#include <array>
#include <cstdint>

#include "metered.hpp"  // contract_violation, require

namespace fgsort::exact {

using u64 = uint64_t;
using u128 = unsigned __int128;

inline int floor_log2(u64 x) {
    require(x >= 1, "floor_log2 of zero");
    int e = 0;
    while (x >>= 1) ++e;
    return e;
}

inline int ceil_log2(u64 x) {
    require(x >= 1, "ceil_log2 of zero");
    int e = floor_log2(x);
    return (x == (u64{1} << e)) ? e : e + 1;
}

// Smallest k >= 0 with 2^k * den >= num (i.e. ceil(log2(num/den)), num >= den >= 1).
inline int ceil_log2_ratio(u64 num, u64 den) {
    require(den >= 1 && num >= den, "ceil_log2_ratio domain");
    int k = 0;
    u128 lhs = den;
    while (lhs < num) {
        lhs <<= 1;
        ++k;
    }
    return k;
}

inline u64 pow_u64(u64 base, unsigned exp) {
    u64 r = 1;
    for (unsigned i = 0; i < exp; ++i) r *= base;
    return r;
}

namespace detail {

struct U256 {
    u128 hi = 0, lo = 0;
};

inline U256 mul_u128(u128 a, u128 b) {
    const u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
    const u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
    const u128 p00 = static_cast<u128>(a0) * b0;
    const u128 p01 = static_cast<u128>(a0) * b1;
    const u128 p10 = static_cast<u128>(a1) * b0;
    const u128 p11 = static_cast<u128>(a1) * b1;
    u128 mid = (p00 >> 64) + static_cast<u64>(p01) + static_cast<u64>(p10);
    U256 r;
    r.lo = (mid << 64) | static_cast<u64>(p00);
    r.hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    return r;
}

// x^2 / 2^120 for Q120 fixed point, rounded down or up.
inline u128 square_q120(u128 x, bool round_up) {
    U256 p = mul_u128(x, x);
    u128 out = (p.hi << 8) | (p.lo >> 120);
    if (round_up && (p.lo & ((u128{1} << 120) - 1)) != 0) ++out;
    return out;
}

// Wide fixed point: one integer limb + W fraction limbs, little endian.
// Used as the high-precision fallback when the Q120 stage cannot certify.
template <int W>
struct WideFix {
    std::array<u64, W + 1> limb{};  // value = sum limb[i] * 2^(64*(i-W))

    static WideFix from_int_shifted(u64 m, int left_shift_into_frac) {
        // value = m / 2^left_shift_into_frac, left_shift <= 64*W
        WideFix x;
        int pos = 64 * W - left_shift_into_frac;  // bit offset of m's bit 0
        for (int b = 0; b < 64; ++b) {
            if ((m >> b) & 1) {
                int bit = pos + b;
                x.limb[bit / 64] |= u64{1} << (bit % 64);
            }
        }
        return x;
    }

    bool ge2() const { return limb[W] >= 2; }

    void halve_down() {
        for (int i = 0; i <= W; ++i) {
            u64 carry = (i + 1 <= W) ? (limb[i + 1] & 1) : 0;
            limb[i] = (limb[i] >> 1) | (carry << 63);
        }
    }
    void add_ulp() {
        for (int i = 0; i <= W; ++i) {
            if (++limb[i] != 0) return;
        }
    }
    void halve_up() {
        bool dropped = limb[0] & 1;
        halve_down();
        if (dropped) add_ulp();
    }

    WideFix square(bool round_up) const {
        std::array<u64, 2 * (W + 1)> acc{};
        for (int i = 0; i <= W; ++i) {
            u128 carry = 0;
            for (int j = 0; j <= W; ++j) {
                u128 cur = static_cast<u128>(limb[i]) * limb[j] + acc[i + j] + carry;
                acc[i + j] = static_cast<u64>(cur);
                carry = cur >> 64;
            }
            u64 c = static_cast<u64>(carry);
            for (int k = i + W + 1; c != 0 && k < 2 * (W + 1); ++k) {
                u128 cur = static_cast<u128>(acc[k]) + c;
                acc[k] = static_cast<u64>(cur);
                c = static_cast<u64>(cur >> 64);
            }
        }
        WideFix r;
        bool dropped = false;
        for (int i = 0; i < W; ++i) dropped = dropped || acc[i] != 0;
        for (int i = 0; i <= W; ++i) r.limb[i] = acc[i + W];
        if (round_up && dropped) r.add_ulp();
        return r;
    }
};

}  // namespace detail

// Certified bracket of log2(m): log2(m) in
//   [int_part + lo/2^bits, int_part + hi/2^bits],  hi - lo <= 1.
// Exact (lo == hi) when m is a power of two.
struct Log2Bracket {
    int int_part = 0;
    u128 lo = 0, hi = 0;
    int bits = 0;

    u128 scaled_lo() const { return (static_cast<u128>(int_part) << bits) | lo; }
    u128 scaled_hi() const { return (static_cast<u128>(int_part) << bits) | hi; }
};

namespace detail {

// Stage 1: Q120 extraction. Returns the number of certified bits produced
// (may stop early if the interval straddles 2 after a squaring).
inline int extract_bits_q120(u64 m, int e, int want, u128& frac_out) {
    const u128 one = u128{1} << 120;
    u128 xlo = static_cast<u128>(m) << (120 - e);
    u128 xhi = xlo;
    u128 frac = 0;
    int nb = 0;
    while (nb < want) {
        xlo = square_q120(xlo, false);
        xhi = square_q120(xhi, true);
        int bit;
        if (xhi < 2 * one) {
            bit = 0;
        } else if (xlo >= 2 * one) {
            bit = 1;
            xlo >>= 1;
            xhi = (xhi >> 1) + (xhi & 1);
        } else {
            break;  // endpoints disagree; precision exhausted
        }
        frac = (frac << 1) | static_cast<unsigned>(bit);
        ++nb;
    }
    frac_out = frac;
    return nb;
}

// Stage 2: wide fallback with 6 fraction limbs (384 bits of working precision).
inline int extract_bits_wide(u64 m, int e, int want, u128& frac_out) {
    using Fix = WideFix<6>;
    Fix xlo = Fix::from_int_shifted(m, e);
    Fix xhi = xlo;
    u128 frac = 0;
    int nb = 0;
    while (nb < want) {
        xlo = xlo.square(false);
        xhi = xhi.square(true);
        int bit;
        if (!xhi.ge2()) {
            bit = 0;
        } else if (xlo.ge2()) {
            bit = 1;
            xlo.halve_down();
            xhi.halve_up();
        } else {
            break;
        }
        frac = (frac << 1) | static_cast<unsigned>(bit);
        ++nb;
    }
    frac_out = frac;
    return nb;
}

}  // namespace detail

inline Log2Bracket log2_bracket(u64 m, int want_bits) {
    require(m >= 1, "log2_bracket of zero");
    require(want_bits >= 1 && want_bits <= 110, "log2_bracket precision out of range");
    const int e = floor_log2(m);
    Log2Bracket b;
    b.int_part = e;
    if (m == (u64{1} << e)) {
        b.bits = want_bits;
        b.lo = b.hi = 0;
        return b;
    }
    u128 frac = 0;
    int nb = detail::extract_bits_q120(m, e, want_bits, frac);
    if (nb < want_bits) nb = detail::extract_bits_wide(m, e, want_bits, frac);
    require(nb >= 1, "log2 bit extraction failed");
    b.bits = nb;
    b.lo = frac;
    b.hi = frac + 1;
    return b;
}

namespace detail {

// Reduce a bracket to at most `maxb` fraction bits, rounding outward.
inline void clamp_bits(Log2Bracket& b, int maxb) {
    if (b.bits <= maxb) return;
    int drop = b.bits - maxb;
    u128 rem = b.hi & ((u128{1} << drop) - 1);
    b.lo >>= drop;
    b.hi = (b.hi >> drop) + (rem != 0 ? 1 : 0);
    b.bits = maxb;
}

struct Q96Interval {
    u128 lo = 0, hi = 0;  // value * 2^96
};

// Fourth power of the bracketed log as a Q96 interval. Inputs are clamped to
// 48 fraction bits so all intermediates fit in 128 bits (log2 m < 64).
inline Q96Interval pow4_q96(Log2Bracket b) {
    clamp_bits(b, 48);
    int up = 48 - b.bits;
    u128 llo = b.scaled_lo() << up;  // Q48
    u128 lhi = b.scaled_hi() << up;
    u128 sq_lo = llo * llo;  // Q96, < 2^108
    u128 sq_hi = lhi * lhi;
    u128 s2lo = sq_lo >> 48;  // Q48
    u128 s2hi = (sq_hi >> 48) + ((sq_hi & ((u128{1} << 48) - 1)) != 0 ? 1 : 0);
    return Q96Interval{s2lo * s2lo, s2hi * s2hi};
}

inline u64 ceil_q96(u128 v) {
    u128 ip = v >> 96;
    if ((v & ((u128{1} << 96) - 1)) != 0) ++ip;
    return static_cast<u64>(ip);
}

}  // namespace detail

// ceil((log2 m)^4), certified. m >= 2.
inline u64 ceil_log2_pow4(u64 m) {
    require(m >= 2, "ceil_log2_pow4 domain");
    for (int bits : {48, 72, 96, 110}) {
        detail::Q96Interval p4 = detail::pow4_q96(log2_bracket(m, bits));
        u64 clo = detail::ceil_q96(p4.lo);
        u64 chi = detail::ceil_q96(p4.hi);
        if (clo == chi) return clo;
    }
    throw contract_violation("ceil_log2_pow4: interval refinement exhausted");
}

// floor(num / (log2(x) - d)^2), certified. Requires log2(x) > d.
inline u64 floor_div_log2_minus_sq(u64 num, u64 x, int d) {
    require(x >= 2, "floor_div_log2_minus_sq domain");
    require(floor_log2(x) >= d + 1 || (floor_log2(x) == d && x != (u64{1} << d)),
            "floor_div_log2_minus_sq: log2(x) <= d");
    for (int bits : {48, 72, 96, 110}) {
        Log2Bracket b = log2_bracket(x, bits);
        detail::clamp_bits(b, 48);
        int up = 48 - b.bits;
        u128 llo = (b.scaled_lo() << up) - (static_cast<u128>(d) << 48);
        u128 lhi = (b.scaled_hi() << up) - (static_cast<u128>(d) << 48);
        if (llo == 0) continue;  // log2(x) indistinguishable from d at this precision
        u128 sq_lo = llo * llo;  // Q96, exact
        u128 sq_hi = lhi * lhi;
        // Reduce the denominator to Q48 with outward rounding so the whole
        // quotient fits in 128 bits: floor(num/(sq/2^48)) = floor(num*2^48/sq).
        u128 den_lo = sq_lo >> 48;
        u128 den_hi = (sq_hi >> 48) + ((sq_hi & ((u128{1} << 48) - 1)) != 0 ? 1 : 0);
        if (den_lo == 0) continue;
        u128 dividend = static_cast<u128>(num) << 48;
        u64 flo = static_cast<u64>(dividend / den_hi);
        u64 fhi = static_cast<u64>(dividend / den_lo);
        if (flo == fhi) return flo;
    }
    throw contract_violation("floor_div_log2_minus_sq: interval refinement exhausted");
}

// Smallest t >= 2 with t^5 >= k (k >= 1). Since t^5 >= ceil(x) iff t^5 >= x
// for integer t^5, this yields ceil(x^(4/5)) when k = ceil(x^4).
inline u64 min_t_pow5_at_least(u64 k) {
    require(k >= 1, "min_t_pow5_at_least domain");
    u64 t = 2;
    while (pow_u64(t, 5) < k) ++t;
    return t;
}

}  // namespace fgsort::exact
