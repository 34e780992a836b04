#pragma once

// Derivation of all structural constants from the block length m: segment
// length and count, frame geometry, pointer word width, heap degrees. All
// ceilings and floors of log expressions are integer-exact; a boundary
// off-by-one in the frame or pointer geometry would break the capacity
// guarantees that the rebalancing logic relies on.

#include <cstdint>

#include "exact_log.hpp"
#include "metered.hpp"

namespace fgsort {

enum class Variant : uint8_t {
    comparison_optimized,  // segment heap degree ceil((log2 m)^{4/5}), <= 5 levels
    move_optimized,        // segment heap degree ceil(log2 m), <= 4 levels
};

inline const char* variant_name(Variant v) {
    return v == Variant::comparison_optimized ? "cmp" : "move";
}

// Smallest q with t + t^2 + ... + t^q >= size (0 for an empty heap).
inline uint32_t heap_levels(uint64_t degree, uint64_t size) {
    require(degree >= 2, "heap degree must be at least 2");
    uint32_t q = 0;
    uint64_t cap = 0;
    while (cap < size) {
        cap = cap * degree + degree;
        ++q;
    }
    return q;
}

// floor(4m / (log2 m)^2), the pointer-memory budget a block of length m may use.
inline uint64_t pointer_bits_budget(uint64_t m) {
    return exact::floor_div_log2_minus_sq(4 * m, m, 0);
}

// floor(n / (log2(n/4))^2): the pointer block length the top-level sort
// reserves on each side. Covers every block it will ever sort (m <= n/4).
inline uint64_t driver_pointer_budget(uint64_t n) {
    require(n > (uint64_t{1} << 16), "driver_pointer_budget needs n > 2^16");
    return exact::floor_div_log2_minus_sq(n, n, 2);
}

struct SortParams {
    uint64_t block_len = 0;        // m
    uint64_t seg_len = 0;          // s, odd
    uint64_t seg_cap = 0;          // max number of active segments
    uint64_t seg_mem_len = 0;      // S = seg_cap * seg_len
    uint32_t frame_block_len = 0;  // r
    uint64_t frame_block_cap = 0;  // 2^(r-1) frame blocks
    uint64_t frame_len = 0;        // R = frame_block_cap * r
    uint32_t ptr_width = 0;        // bits per pointer word
    uint64_t ptr_count = 0;        // one word per frame slot
    uint64_t ptr_mem_bits = 0;     // frame_len * ptr_width
    uint32_t seg_heap_degree = 0;
    uint32_t seg_heap_levels_cap = 0;  // 5 at the derived degree, 4 at ceil(log m)
    uint32_t build_heap_degree = 0;
    uint32_t build_heap_levels = 0;

    uint64_t seg_half() const { return seg_len / 2; }
    uint64_t buffer_need() const { return frame_len + seg_mem_len; }

    static SortParams derive(uint64_t m, Variant variant) {
        require(m > (uint64_t{1} << 16), "derive: block length must exceed 2^16");
        uint64_t l4 = exact::ceil_log2_pow4(m);
        SortParams p = geometry(m, (l4 % 2 == 1) ? l4 : l4 + 1);
        require(p.seg_len <= m, "derive: segment longer than block");
        p.seg_heap_degree =
            variant == Variant::comparison_optimized
                ? static_cast<uint32_t>(exact::min_t_pow5_at_least(l4))
                : static_cast<uint32_t>(exact::ceil_log2(m));
        p.seg_heap_levels_cap = variant == Variant::comparison_optimized ? 5 : 4;
        require(heap_levels(p.seg_heap_degree, p.seg_len) <= p.seg_heap_levels_cap,
                "derive: segment heap too deep");
        p.build_heap_degree = static_cast<uint32_t>(exact::ceil_log2(m));
        p.build_heap_levels = heap_levels(p.build_heap_degree, m);
        require(p.ptr_mem_bits <= pointer_bits_budget(m),
                "derive: pointer memory exceeds its budget");
        return p;
    }

    // Reduced-parameter harness: same geometry formulas with the segment
    // length (and heap degree) forced to tiny values so rebalancing paths can
    // be tested exhaustively. The pointer-budget bound is intentionally not
    // enforced here; callers allocate whatever ptr_mem_bits asks for.
    static SortParams with_seg_len(uint64_t m, uint64_t s, uint32_t t_seg) {
        require(s >= 3 && s % 2 == 1, "with_seg_len: segment length must be odd and >= 3");
        require(2 * m >= s, "with_seg_len: block too short for this segment length");
        require(t_seg >= 2, "with_seg_len: heap degree must be at least 2");
        SortParams p = geometry(m, s);
        p.seg_heap_degree = t_seg;
        p.seg_heap_levels_cap = heap_levels(t_seg, s);  // structural cap only
        p.build_heap_degree = 5;
        p.build_heap_levels = heap_levels(5, m);
        return p;
    }

private:
    static SortParams geometry(uint64_t m, uint64_t s) {
        SortParams p;
        p.block_len = m;
        p.seg_len = s;
        p.seg_cap = 2 * m / s;
        p.seg_mem_len = p.seg_cap * p.seg_len;
        require(p.seg_mem_len <= 2 * m, "segment memory exceeds 2m");
        p.frame_block_len = 1 + static_cast<uint32_t>(exact::ceil_log2_ratio(2 * m, s));
        p.frame_block_cap = uint64_t{1} << (p.frame_block_len - 1);
        require(p.seg_cap <= p.frame_block_cap, "frame cannot index all segments");
        p.frame_len = p.frame_block_cap * p.frame_block_len;
        p.ptr_width = 1 + static_cast<uint32_t>(exact::floor_log2(p.seg_cap));
        p.ptr_count = p.frame_len;
        p.ptr_mem_bits = p.frame_len * p.ptr_width;
        // Capacity: the structure can hold all m elements even if every
        // segment sat at its floor(s/2) minimum.
        require(m <= p.seg_cap + (p.seg_cap + 1) * (s / 2),
                "segment capacity cannot absorb the block");
        return p;
    }
};

}  // namespace fgsort
