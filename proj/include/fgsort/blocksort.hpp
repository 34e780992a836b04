#pragma once

// Sorts a block A of m elements using a buffer region (all elements >= the
// separator) and a bit memory for segment pointers, with 2m*log m + o(m log m)
// comparisons and O(m) moves.
//
// Insertion phase: every element of A is routed through two binary searches
// in the frame (a sorted sparse sample), one pointer read, and one binary
// search inside its target segment, then stored with exactly 2 moves. When a
// segment fills up it is split around its median, the median joins the frame,
// and an overfull frame block triggers a rebalancing of the smallest
// enclosing tree subarray that can absorb it. Extraction walks the frame left
// to right and drains each segment through a multi-root heap.
//
// Hole discipline: there is exactly one vacant slot ("the hole") once the
// first insertion has parked a buffer element in aside cell 0. Every move
// chain starts by rescuing the buffer element that is about to be overwritten
// into the current hole. Whenever a procedure would leave the hole's stale
// copy looking like an active element in territory that binary searches probe
// (frame or segments), it finishes with one extra tidy move so the parked
// hole always reads as a buffer element. The stale copy left in A after each
// insertion needs no tidy: nothing probes the consumed prefix of A.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "heaps.hpp"
#include "metered.hpp"
#include "params.hpp"
#include "ptrmem.hpp"
#include "select.hpp"

namespace fgsort {

// Splits a full segment around a median that has already been taken out of
// it. On entry [seg_lo, seg_lo+s) holds s-1 actives followed by one buffer
// element, the fresh segment [new_lo, new_lo+s) holds buffer elements only,
// and `hole` is a vacant slot outside both segments. Exactly floor(s/2)
// "large" actives (>= median, with equals split so both halves come out at
// floor(s/2)) end up leading the fresh segment; the smalls stay in place.
// Costs at most 3s-3 comparisons and 3*floor(s/2) moves; returns the new
// hole, which is always seg_lo + floor(s/2).
template <class T>
std::size_t halve_segment(MeteredArray<T>& a, std::size_t seg_lo, std::size_t s, ARef median,
                          std::size_t new_lo, std::size_t hole) {
    const std::size_t half = s / 2;
    std::size_t strictly_small = 0;
    for (std::size_t i = 0; i + 1 < s; ++i)
        if (a.less(slot_ref(seg_lo + i), median)) ++strictly_small;
    require(strictly_small <= half, "halve_segment: median rank violated");
    std::size_t equal_quota = half - strictly_small;  // equals that count as small

    auto is_small = [&](std::size_t slot) {
        if (a.less(slot_ref(slot), median)) return true;
        if (a.less(median, slot_ref(slot))) return false;
        if (equal_quota > 0) {
            --equal_quota;
            return true;
        }
        return false;
    };

    std::size_t a1_end = seg_lo;       // [seg_lo, a1_end) settled smalls
    std::size_t u_end = seg_lo + s - 1;  // [a1_end, u_end) unexamined
    std::size_t b2 = new_lo;           // next untouched buffer of the fresh segment
    for (std::size_t moved = 0; moved < half; ++moved) {
        std::size_t cand = u_end - 1;
        if (is_small(cand)) {
            std::size_t scan = a1_end;
            while (is_small(scan)) ++scan;
            require(scan < cand, "halve_segment: no large element before the small one");
            a.assign(hole, b2);
            a.assign(b2, scan);
            a.assign(scan, cand);
            a1_end = scan + 1;  // everything left of the large element is settled
        } else {
            a.assign(hole, b2);
            a.assign(b2, cand);
        }
        hole = cand;
        ++b2;
        u_end = cand;
    }
    require(hole == seg_lo + half, "halve_segment: unexpected final hole");
    return hole;
}

// After a level-i rebalancing spreads alpha actives over 2^i blocks, block b
// (0-based within the subarray) receives floor(alpha/2^i), plus one if b is
// among the first alpha mod 2^i blocks.
inline uint64_t redistribution_quota(uint64_t alpha, uint32_t level, uint64_t block) {
    uint64_t base = alpha >> level;
    uint64_t rem = alpha & ((uint64_t{1} << level) - 1);
    return base + (block < rem ? 1 : 0);
}

// Test instrumentation: tracks, per tree node, how many frame insertions the
// node's subarray received since it was last covered by a redistribution.
// Each redistribution at level i must have been preceded by at least 2^(i-1)
// insertions in its subarray.
struct ChargingTracker {
    bool enabled = false;
    uint32_t levels = 0;                         // frame_block_len - 1
    std::vector<uint64_t> block_inserts;         // 0-based block index
    std::vector<std::vector<uint64_t>> snapshot;  // [level][start >> level]

    void reset(uint32_t frame_block_len, uint64_t frame_block_cap) {
        levels = frame_block_len - 1;
        block_inserts.assign(frame_block_cap, 0);
        snapshot.assign(levels + 1, {});
        for (uint32_t e = 0; e <= levels; ++e)
            snapshot[e].assign((frame_block_cap >> e) + 1, 0);
    }
    uint64_t subarray_sum(uint32_t level, std::size_t start) const {
        uint64_t s = 0;
        for (std::size_t b = start; b < start + (std::size_t{1} << level); ++b)
            s += block_inserts[b];
        return s;
    }
    void on_insert(std::size_t block0) { block_inserts[block0] += 1; }
    void on_redistribute(uint32_t level, std::size_t start) {
        uint64_t now = subarray_sum(level, start);
        require(now - snapshot[level][start >> level] >= (uint64_t{1} << (level - 1)),
                "frame rebalancing fired without enough insertions");
        for (uint32_t e = 0; e <= level; ++e) {
            std::size_t width = std::size_t{1} << e;
            for (std::size_t b = start; b < start + (std::size_t{1} << level); b += width)
                snapshot[e][b >> e] = subarray_sum(e, b);
        }
    }
};

template <class T>
class BlockSorter {
public:
    struct Regions {
        std::size_t a_lo = 0;
        std::size_t buf_lo = 0;
        std::size_t buf_len = 0;
        std::size_t sep = 0;
    };

    BlockSorter(MeteredArray<T>& a, const SortParams& p, const Regions& r,
                PointerMemory<T>& ptr, bool paranoid = false)
        : a_(&a), p_(p), r_(r), ptr_(&ptr), paranoid_(paranoid) {
        buf_end_ = r_.buf_lo + r_.buf_len;
        out_ = r_.a_lo;
        require(r_.buf_len >= p_.buffer_need(), "buffer too short for frame + segments");
        require(ptr_->capacity_bits() >= p_.ptr_mem_bits, "pointer memory too small");
        require(ptr_->word_width() == p_.ptr_width, "pointer word width mismatch");
        require(p_.seg_cap >= 1, "segment memory has no room");
        charging_.reset(p_.frame_block_len, p_.frame_block_cap);
        charging_.enabled = paranoid_;
        if (paranoid_) {
            // Separator precondition: every block element strictly below it,
            // every buffer element at or above it.
            for (std::size_t i = 0; i < p_.block_len; ++i)
                require(a_->peek(r_.a_lo + i) < a_->peek(r_.sep),
                        "block element not below the separator");
            for (std::size_t i = 0; i < r_.buf_len; ++i)
                require(!(a_->peek(r_.buf_lo + i) < a_->peek(r_.sep)),
                        "buffer element below the separator");
        }
    }

    bool insertion_done() const { return inserted_ == p_.block_len; }

    void run() {
        while (!insertion_done()) insert_next();
        extract_all();
    }

    // Route A[a_lo + inserted] into its segment: two frame searches, one
    // pointer read, one segment search, two moves.
    void insert_next() {
        require(!insertion_done(), "insert_next past the end of A");
        PhaseScope<T> ph(*a_, Phase::insert);
        const std::size_t src = r_.a_lo + inserted_;
        const ARef probe = slot_ref(src);
        const std::size_t r = p_.frame_block_len;

        std::size_t block_j = 1;
        if (g_ >= 2) block_j = 1 + count_block_leaders_below(probe);

        std::size_t bstart = (block_j - 1) * r;
        std::size_t within = count_below(*a_, frame_slot(bstart), r, probe);

        std::ptrdiff_t ell;
        uint64_t seg_ord;
        if (within == 0) {
            require(block_j == 1, "element below a non-first block leader");
            ell = -1;
            seg_ord = 0;
        } else {
            ell = static_cast<std::ptrdiff_t>(bstart + within - 1);
            seg_ord = ptr_->read_word(static_cast<uint64_t>(ell));
            require(seg_ord >= 1 && seg_ord < next_ordinal_, "dangling segment pointer");
        }

        const std::size_t sb = seg_base(seg_ord);
        const std::size_t h = count_below(*a_, sb, p_.seg_len, sep_ref());
        require(h + 1 <= p_.seg_len, "segment overfull before insertion");

        save_to_hole(sb + h);
        a_->assign(sb + h, src);
        hole_ = src;
        ++inserted_;

        if (h + 1 == p_.seg_len) rebalance_segment(ell, block_j, seg_ord);
    }

    void extract_all() {
        PhaseScope<T> ph(*a_, Phase::extract);
        extract_segment(0);
        for (std::size_t pos = 0; pos < p_.frame_len; ++pos) {
            if (!a_->less(frame_slot(pos), r_.sep)) continue;  // buffer slot
            save_to_hole(out_);
            a_->assign(out_, frame_slot(pos));
            hole_ = frame_slot(pos);
            ++out_;
            uint64_t ord = ptr_->read_word(pos);
            require(ord >= 1 && ord < next_ordinal_, "dangling segment pointer");
            extract_segment(ord);
        }
        require(out_ == r_.a_lo + p_.block_len, "extraction did not refill A exactly");
        if (hole_) {  // hand the parked buffer element back, emptying aside 0
            a_->assign(slot_ref(*hole_), aside_ref(0));
            hole_.reset();
        }
    }

    // -- introspection (uncounted; tests and verification only) --------------

    uint64_t frame_actives() const { return f_; }
    uint64_t frame_blocks_active() const { return g_; }
    uint64_t frame_actives_peak() const { return f_max_; }
    uint64_t segments_allocated() const { return next_ordinal_; }
    std::size_t inserted() const { return inserted_; }
    std::size_t out_cursor() const { return out_; }
    std::optional<std::size_t> hole() const { return hole_; }
    const SortParams& params() const { return p_; }
    std::size_t frame_slot(std::size_t pos) const { return r_.buf_lo + pos; }
    std::size_t seg_base(uint64_t ordinal) const {
        return buf_end_ - static_cast<std::size_t>(ordinal + 1) * p_.seg_len;
    }

    // Full structural verification via uncounted peeks: frame sortedness and
    // contiguity, block occupancy windows, segment occupancy windows,
    // pointer-word consistency and segment range nesting. Throws on the
    // first violation. Valid between public operations of the insertion
    // phase.
    void verify_structure() const {
        const T& sep = a_->peek(r_.sep);
        const std::size_t r = p_.frame_block_len;
        // Frame shape.
        uint64_t f_seen = 0;
        const T* prev = nullptr;
        std::vector<std::size_t> active_pos;
        for (std::size_t b = 0; b < p_.frame_block_cap; ++b) {
            std::size_t cnt = 0;
            bool buffer_seen = false;
            for (std::size_t q = 0; q < r; ++q) {
                std::size_t pos = b * r + q;
                bool active = is_active_peek(frame_slot(pos));
                if (active) {
                    require(!buffer_seen, "frame block actives not left-justified");
                    ++cnt;
                    active_pos.push_back(pos);
                    const T& v = a_->peek(frame_slot(pos));
                    if (prev) require(!(v < *prev), "frame actives out of order");
                    prev = &v;
                } else {
                    buffer_seen = true;
                }
            }
            if (b < g_) {
                require(cnt >= 1, "active frame block without actives");
                require(cnt <= r - 1, "frame block past its capacity");
            } else {
                require(cnt == 0, "active element beyond the active block zone");
            }
            f_seen += cnt;
        }
        require(f_seen == f_, "frame active count drifted");
        require(f_ + 1 == next_ordinal_, "frame/segment accounting drifted");
        require(next_ordinal_ <= p_.seg_cap, "more segments than the memory allows");
        require(f_ <= p_.frame_block_cap, "frame holds more actives than blocks");
        // Pointer words: NIL exactly on buffer positions, ordinals unique.
        std::vector<bool> seen_ord(next_ordinal_, false);
        for (std::size_t pos = 0; pos < p_.frame_len; ++pos) {
            uint64_t w = ptr_->peek_word(pos);
            if (!is_active_peek(frame_slot(pos))) {
                require(w == 0, "buffer frame slot with a live pointer");
            } else {
                require(w >= 1 && w < next_ordinal_, "active frame slot with bad pointer");
                require(!seen_ord[w], "segment referenced twice");
                seen_ord[w] = true;
            }
        }
        // Segments: occupancy windows, left-justified, value ranges.
        verify_segment(0, f_ == 0);
        for (std::size_t i = 0; i < active_pos.size(); ++i) {
            uint64_t ord = ptr_->peek_word(active_pos[i]);
            std::size_t h = verify_segment(ord, false);
            const T& lo = a_->peek(frame_slot(active_pos[i]));
            const T* hi = i + 1 < active_pos.size() ? &a_->peek(frame_slot(active_pos[i + 1]))
                                                    : nullptr;
            for (std::size_t q = 0; q < h; ++q) {
                const T& v = a_->peek(seg_base(ord) + q);
                require(!(v < lo), "segment element below its frame anchor");
                if (hi) require(!(*hi < v), "segment element above the next frame anchor");
            }
        }
        // Segment zone never collides with the frame.
        require(buf_end_ - next_ordinal_ * p_.seg_len >= r_.buf_lo + p_.frame_len,
                "segments ran into the frame");
        (void)sep;
    }

private:
    ARef sep_ref() const { return slot_ref(r_.sep); }

    bool is_active_peek(std::size_t slot) const {
        if (hole_ && *hole_ == slot) return false;  // parked hole reads as buffer
        return a_->peek(slot) < a_->peek(r_.sep);
    }

    // # settled actives of a segment + occupancy window check.
    std::size_t verify_segment(uint64_t ord, bool still_filling) const {
        std::size_t sb = seg_base(ord);
        std::size_t h = 0;
        bool buffer_seen = false;
        for (std::size_t q = 0; q < p_.seg_len; ++q) {
            if (is_active_peek(sb + q)) {
                require(!buffer_seen, "segment actives not left-justified");
                ++h;
            } else {
                buffer_seen = true;
            }
        }
        if (!still_filling) {
            require(h >= p_.seg_half(), "segment under half full");
            require(h <= p_.seg_len - 1, "segment has no room left");
        }
        return h;
    }

    // Rescue the element at `slot` into the current hole; `slot` becomes the
    // hole. The very first rescue parks it in aside cell 0 for the whole run.
    void save_to_hole(std::size_t slot) {
        if (hole_) {
            a_->assign(*hole_, slot);
        } else {
            a_->assign(aside_ref(0), slot_ref(slot));
        }
        hole_ = slot;
    }

    // Binary search over the leaders of blocks 2..g (leader of block b sits
    // at frame position (b-1)*r): count of leaders strictly below the probe.
    std::size_t count_block_leaders_below(ARef probe) {
        const std::size_t len = g_ - 1;
        std::size_t cnt = 0;
        std::size_t step = 1;
        while (step << 1 <= len) step <<= 1;
        for (; step > 0; step >>= 1) {
            std::size_t cand = cnt + step;
            if (cand <= len && a_->less(slot_ref(frame_slot(cand * p_.frame_block_len)), probe))
                cnt = cand;
        }
        return cnt;
    }

    // Split the full segment `seg_ord` whose frame anchor sits at frame
    // position ell (-1 when the segment has no anchor), inside block_j.
    void rebalance_segment(std::ptrdiff_t ell, std::size_t block_j, uint64_t seg_ord) {
        PhaseScope<T> ph(*a_, Phase::seg_rebalance);
        const std::size_t r = p_.frame_block_len;
        const std::size_t s = p_.seg_len;
        const std::size_t bstart = (block_j - 1) * r;

        std::size_t block_cnt = count_below(*a_, frame_slot(bstart), r, sep_ref());
        require(block_cnt < r, "frame block has no room for the median");
        const std::size_t ellp = bstart + block_cnt;  // leftmost buffer of the block
        require(static_cast<std::ptrdiff_t>(ellp) >= ell + 1, "anchor beyond its block");

        const std::size_t sb = seg_base(seg_ord);
        {
            PhaseScope<T> sel(*a_, Phase::select);
            select_rank(*a_, sb, sb + s, s / 2 + 1);  // median parked at sb+s-1
        }

        // Swap the median out, bring the block's buffer element in, shift the
        // in-between actives (and their pointer words) one position right.
        ARef cell = a_->free_aside();
        a_->assign(cell, slot_ref(sb + s - 1));
        a_->assign(sb + s - 1, frame_slot(ellp));
        for (std::size_t q = ellp; q-- > static_cast<std::size_t>(ell + 1);)
            a_->assign(frame_slot(q + 1), frame_slot(q));
        a_->assign(slot_ref(frame_slot(ell + 1)), cell);
        for (std::size_t q = ellp; q-- > static_cast<std::size_t>(ell + 1);)
            ptr_->move_word(q, q + 1);

        require(next_ordinal_ < p_.seg_cap, "segment memory exhausted");
        const uint64_t nord = next_ordinal_++;
        require(buf_end_ - next_ordinal_ * s >= r_.buf_lo + p_.frame_len,
                "segment allocation ran into the frame");
        ptr_->write_word(static_cast<uint64_t>(ell + 1), nord);

        ++f_;
        if (f_ > f_max_) f_max_ = f_;
        if (block_j > g_) g_ = block_j;
        if (charging_.enabled) charging_.on_insert(block_j - 1);

        std::size_t hole = halve_segment(*a_, sb, s, slot_ref(frame_slot(ell + 1)),
                                         seg_base(nord), *hole_);
        // Tidy: the stale copy at the hole reads as an active; pull the
        // segment's trailing buffer element down so the parked hole reads as
        // a buffer again.
        a_->assign(hole, sb + s - 1);
        hole_ = sb + s - 1;

        if (block_cnt + 1 == r) rebalance_frame(block_j);
        if (paranoid_) verify_structure();
    }

    // Even out the smallest enclosing tree subarray that can absorb block_j.
    void rebalance_frame(std::size_t block_j) {
        PhaseScope<T> ph(*a_, Phase::frame_rebalance);
        const std::size_t r = p_.frame_block_len;
        const std::size_t j0 = block_j - 1;

        uint32_t level = 1;
        std::size_t start = (j0 >> 1) << 1;
        uint64_t alpha = block_active_count(start) + block_active_count(start + 1);
        while (alpha > static_cast<uint64_t>(r - level) << level) {
            ++level;
            require(level <= static_cast<uint32_t>(r - 1), "frame root overflowed");
            std::size_t nstart = (j0 >> level) << level;
            std::size_t half = std::size_t{1} << (level - 1);
            std::size_t sib = (nstart == start) ? start + half : nstart;
            for (std::size_t b = sib; b < sib + half; ++b) alpha += block_active_count(b);
            start = nstart;
        }

        const std::size_t width = std::size_t{1} << level;
        const std::size_t sub_lo = start * r;
        const std::size_t sub_hi = (start + width) * r;
        bool moved = false;

        // Collect all actives (with their pointer words) to the right end.
        std::size_t w = sub_hi;
        for (std::size_t pos = sub_hi; pos-- > sub_lo;) {
            if (!a_->less(frame_slot(pos), r_.sep)) continue;
            --w;
            if (pos != w) {
                save_to_hole(frame_slot(w));
                a_->assign(frame_slot(w), frame_slot(pos));
                hole_ = frame_slot(pos);
                ptr_->move_word(pos, w);
                moved = true;
            }
        }
        require(sub_hi - w == alpha, "collected active count mismatch");

        // Deal them back: alpha/2^i per block, the first alpha mod 2^i blocks
        // get one extra, actives left-justified.
        std::size_t src = sub_hi - static_cast<std::size_t>(alpha);
        std::size_t first_buffer_slot = 0;
        for (std::size_t b = 0; b < width; ++b) {
            uint64_t quota = redistribution_quota(alpha, level, b);
            require(quota <= r - level, "redistribution quota over threshold");
            for (uint64_t q = 0; q < quota; ++q) {
                std::size_t dst = sub_lo + b * r + static_cast<std::size_t>(q);
                if (dst != src) {
                    save_to_hole(frame_slot(dst));
                    a_->assign(frame_slot(dst), frame_slot(src));
                    hole_ = frame_slot(src);
                    ptr_->move_word(src, dst);
                    moved = true;
                }
                ++src;
            }
            if (b == 0) first_buffer_slot = sub_lo + quota;
        }
        if (g_ < start + width) g_ = start + width;

        if (moved) {
            // Park the hole on a real buffer slot so its stale copy cannot be
            // mistaken for an active element by later searches. Every block
            // keeps at least one trailing buffer slot (quota <= r - level);
            // at most one of the first two candidates can be the hole itself.
            std::size_t cand = frame_slot(first_buffer_slot);
            if (hole_ && *hole_ == cand) {
                uint64_t q1 = redistribution_quota(alpha, level, 1);
                cand = frame_slot(sub_lo + r + static_cast<std::size_t>(q1));
            }
            save_to_hole(cand);
        }
        if (charging_.enabled) charging_.on_redistribute(level, start);
    }

    uint64_t block_active_count(std::size_t block0) {
        return count_below(*a_, frame_slot(block0 * p_.frame_block_len), p_.frame_block_len,
                           sep_ref());
    }

    // Drain one segment, in order, into A at the output cursor.
    void extract_segment(uint64_t ord) {
        const std::size_t sb = seg_base(ord);
        const std::size_t h = count_below(*a_, sb, p_.seg_len, sep_ref());
        if (h == 0) return;
        require(heap_levels(p_.seg_heap_degree, h) <= p_.seg_heap_levels_cap,
                "segment heap deeper than its level cap");
        HeapView<T> hv{a_, sb, false, true, p_.seg_heap_degree, h};
        heaps::heapify(hv);
        for (std::size_t i = 0; i < h; ++i) {
            require(hole_.has_value(), "extraction without a hole");
            hole_ = heaps::extract_top_refill(hv, out_, *hole_);
            if (paranoid_)
                require(a_->peek(out_) < a_->peek(r_.sep), "buffer element extracted early");
            ++out_;
        }
    }

    MeteredArray<T>* a_;
    SortParams p_;
    Regions r_;
    PointerMemory<T>* ptr_;
    bool paranoid_ = false;
    std::size_t buf_end_ = 0;

    uint64_t f_ = 0;      // active frame elements
    uint64_t g_ = 0;      // active frame blocks
    uint64_t f_max_ = 0;
    uint64_t next_ordinal_ = 1;  // segment 0 is pre-allocated
    std::size_t inserted_ = 0;
    std::size_t out_ = 0;
    std::optional<std::size_t> hole_;  // empty: the hole is aside cell 0

public:
    ChargingTracker charging_;
};

}  // namespace fgsort
