#pragma once

// Top-level in-place sort. Arrays of at most 2^16 elements go straight to the
// short heapsort. Larger arrays first collect their P smallest and P largest
// elements into two sorted flanks that simulate a P-bit pointer memory, then
// run a partition loop: pick the rank-ceil(n_i/4) element as separator, move
// the strictly-smaller elements to the front, sort them as a block using the
// greater-or-equal zone as buffer memory, restore the flanks' order, split
// off the elements equal to the separator, and iterate on the rest until the
// unsorted zone fits a short block.

#include <cstdint>
#include <vector>

#include "blocksort.hpp"
#include "heaps.hpp"
#include "metered.hpp"
#include "params.hpp"
#include "ptrmem.hpp"
#include "select.hpp"

namespace fgsort {

struct SortOptions {
    Variant variant = Variant::comparison_optimized;
    bool paranoid = false;  // structural verification after rebalances (tests)
};

struct PlacedInterval {
    std::size_t lo = 0, hi = 0;  // [lo, hi)
};

struct DriverStats {
    uint64_t iterations = 0;
    uint64_t sum_unsorted_len = 0;  // sum of n_i over all partition rounds
    uint64_t ptr_elems = 0;         // P, elements per pointer flank
    bool all_equal_exit = false;
    bool routed_short = false;                 // n <= 2^16, sorted directly
    std::vector<PlacedInterval> placements;    // final zones fixed per round
};

struct SortReport {
    uint64_t n = 0;
    Variant variant = Variant::comparison_optimized;
    uint64_t comparisons = 0;
    uint64_t moves = 0;
    uint32_t aside_peak = 0;
    PhaseTotals phases;
    DriverStats stats;
};

namespace driver_detail {

constexpr uint64_t short_limit = uint64_t{1} << 16;

template <class T>
class Driver {
public:
    Driver(MeteredArray<T>& a, const SortOptions& opt) : a_(&a), opt_(opt) {}

    DriverStats run() {
        const std::size_t n = a_->size();
        if (n <= short_limit) {
            stats_.routed_short = true;
            PhaseScope<T> ph(*a_, Phase::short_sort);
            heaps::short_sort(*a_, 0, n);
            return stats_;
        }
        const uint64_t P = driver_pointer_budget(n);
        stats_.ptr_elems = P;
        require(2 * P + 1 < n, "pointer flanks would swallow the array");
        build_pointer_memory(P);

        // One comparison decides whether anything is left to sort: if the
        // largest left-flank element reaches the right flank, every element
        // in between equals both and the array is already sorted.
        if (!a_->less(static_cast<std::size_t>(P - 1), n - static_cast<std::size_t>(P))) {
            stats_.all_equal_exit = true;
            return stats_;
        }
        if (opt_.paranoid) check_flanks(P, n);

        cur_ = static_cast<std::size_t>(P);
        std::size_t unsorted = n - 2 * static_cast<std::size_t>(P);
        while (unsorted > short_limit) {
            std::size_t next = partition_round(cur_, unsorted, P, n);
            require(4 * next <= 3 * unsorted, "partition did not shed a quarter");
            unsorted = next;
        }
        if (unsorted > 1) {
            PhaseScope<T> ph(*a_, Phase::short_sort);
            heaps::short_sort(*a_, cur_, cur_ + unsorted);
        }
        require(stats_.sum_unsorted_len <= 4 * n, "partition rounds exceeded their mass budget");
        return stats_;
    }

private:
    // Collect the P largest elements to the right end, then the P smallest
    // to the left end (mirrored), each with a shrinking degree-ceil(log2 n)
    // heap aborted after P extractions.
    void build_pointer_memory(uint64_t P) {
        PhaseScope<T> ph(*a_, Phase::build_ptr);
        const std::size_t n = a_->size();
        const uint32_t t = static_cast<uint32_t>(exact::ceil_log2(n));
        std::vector<std::size_t> scratch;
        scratch.reserve(2 + heap_levels(t, n));
        HeapView<T> right{a_, 0, false, false, t, n};
        heaps::pull_extremes(right, static_cast<std::size_t>(P), scratch);
        HeapView<T> left{a_, n - static_cast<std::size_t>(P) - 1, true, true, t,
                         n - static_cast<std::size_t>(P)};
        heaps::pull_extremes(left, static_cast<std::size_t>(P), scratch);
    }

    // One round: pivot selection, partition, block sort, flank restore,
    // equal-zone split. Returns the next unsorted length; advances cur_.
    std::size_t partition_round(std::size_t cur, std::size_t n_i, uint64_t P, std::size_t n) {
        ++stats_.iterations;
        stats_.sum_unsorted_len += n_i;
        {
            PhaseScope<T> sel(*a_, Phase::select);
            select_rank(*a_, cur, cur + n_i, (n_i + 3) / 4);
        }
        const std::size_t sep = cur + n_i - 1;

        std::size_t n_less = collect_smaller(cur, sep);
        const std::size_t n_ge = n_i - 1 - n_less;
        require(3 * static_cast<int64_t>(n_less) - 1 <= static_cast<int64_t>(n_ge),
                "buffer zone shorter than the block needs");

        if (n_less > short_limit) {
            SortParams params = SortParams::derive(n_less, opt_.variant);
            require(params.ptr_mem_bits <= P, "block wants more pointer bits than exist");
            PointerMemory<T> pm(*a_, 0, n - static_cast<std::size_t>(P), params.ptr_mem_bits,
                                params.ptr_width);
            typename BlockSorter<T>::Regions regions;
            regions.a_lo = cur;
            regions.buf_lo = cur + n_less;
            regions.buf_len = n_ge;
            regions.sep = sep;
            BlockSorter<T> sorter(*a_, params, regions, pm, opt_.paranoid);
            sorter.run();
            pm.clear_all();  // restores both flanks to sorted order
            if (opt_.paranoid) check_flanks(P, n);
        } else if (n_less > 1) {
            PhaseScope<T> ph(*a_, Phase::short_sort);
            heaps::short_sort(*a_, cur, cur + n_less);
        }

        std::size_t n_eq = split_equals(cur + n_less, sep);
        stats_.placements.push_back(PlacedInterval{cur, cur + n_less + 1 + n_eq});
        cur_ = cur + n_less + 1 + n_eq;
        return n_ge - n_eq;
    }

    // Move the elements strictly below the separator to the front of
    // [lo, sep). One comparison per element; 2 moves per collected element
    // plus one when anything moved at all.
    std::size_t collect_smaller(std::size_t lo, std::size_t sep) {
        PhaseScope<T> ph(*a_, Phase::partition);
        std::size_t w = lo;
        while (w < sep && a_->less(w, sep)) ++w;
        std::size_t collected = w - lo;
        bool escaped = false;
        std::size_t hole = 0;
        for (std::size_t e = w + 1; e < sep; ++e) {
            if (!a_->less(e, sep)) continue;
            if (!escaped) {
                a_->assign(aside_ref(0), slot_ref(w));
                escaped = true;
            } else if (hole != w) {
                a_->assign(hole, w);
            }
            a_->assign(w, e);
            hole = e;
            ++w;
            ++collected;
        }
        if (escaped) a_->assign(slot_ref(hole), aside_ref(0));
        return collected;
    }

    // Move the separator next to the sorted block and gather the elements
    // equal to it right after; everything greater stays in the tail zone.
    // The zone [b_lo, sep) holds only elements >= the separator.
    std::size_t split_equals(std::size_t b_lo, std::size_t sep) {
        PhaseScope<T> ph(*a_, Phase::partition);
        require(b_lo < sep, "empty greater-or-equal zone");
        ARef cell = a_->free_aside();
        a_->assign(cell, slot_ref(b_lo));  // first zone element steps aside
        a_->assign(b_lo, sep);             // separator takes its final slot
        std::size_t hole = sep;
        std::size_t w = b_lo + 1;
        for (std::size_t e = w; e < sep; ++e) {
            if (a_->less(b_lo, e)) continue;  // strictly greater stays
            if (e != w) {
                if (hole != w) a_->assign(hole, w);
                a_->assign(w, e);
                hole = e;
            }
            ++w;
        }
        // The put-aside element is the last one scanned.
        if (!a_->less(slot_ref(b_lo), cell)) {
            if (hole != w) a_->assign(hole, w);
            a_->assign(slot_ref(w), cell);
            ++w;
        } else {
            a_->assign(slot_ref(hole), cell);
        }
        return w - (b_lo + 1);
    }

    // Both flanks sorted and strictly divided (uncounted; paranoid runs).
    void check_flanks(uint64_t P, std::size_t n) const {
        for (std::size_t i = 1; i < P; ++i) {
            require(!(a_->peek(i) < a_->peek(i - 1)), "left flank lost its order");
            require(!(a_->peek(n - i) < a_->peek(n - i - 1)), "right flank lost its order");
        }
        require(a_->peek(static_cast<std::size_t>(P - 1)) < a_->peek(n - static_cast<std::size_t>(P)),
                "flank divide no longer strict");
    }

    MeteredArray<T>* a_;
    SortOptions opt_;
    DriverStats stats_;
    std::size_t cur_ = 0;
};

}  // namespace driver_detail

template <class T>
SortReport sort_metered(MeteredArray<T>& a, const SortOptions& opt = {}) {
    driver_detail::Driver<T> d(a, opt);
    SortReport rep;
    rep.n = a.size();
    rep.variant = opt.variant;
    Checkpoint before = a.checkpoint();
    rep.stats = d.run();
    CostDelta delta = a.delta(before);
    rep.comparisons = delta.comparisons;
    rep.moves = delta.moves;
    rep.aside_peak = a.aside_peak();
    rep.phases = a.phase_totals();
    require(!a.aside_occupied(0) && !a.aside_occupied(1), "aside cells left occupied");
    return rep;
}

template <class T>
SortReport sort_values(std::vector<T>& data, const SortOptions& opt = {}) {
    MeteredArray<T> a(std::move(data));
    SortReport rep = sort_metered(a, opt);
    data = a.take();
    return rep;
}

}  // namespace fgsort
