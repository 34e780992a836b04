#pragma once

// Deterministic in-place selection (median of medians, groups of five) with
// worst-case linear comparisons and moves. Used for segment medians and for
// the driver's pivot of each partition round. After select_rank the element
// of the requested 1-based rank sits in the last slot of the range and the
// range holds a permutation of its former content.
//
// Group medians are located with an index-only insertion sort (comparisons
// but no element moves), the pivot is a three-way partition so duplicate-
// heavy ranges finish in one round.

#include <array>
#include <cstddef>

#include "metered.hpp"

namespace fgsort {
namespace select_detail {

// Sort indices of the (at most 5) slots [lo, lo+cnt) by element value;
// returns them in ascending order. No element moves.
template <class T>
std::array<std::size_t, 5> sorted_index5(MeteredArray<T>& a, std::size_t lo, std::size_t cnt) {
    std::array<std::size_t, 5> idx{};
    for (std::size_t i = 0; i < cnt; ++i) idx[i] = lo + i;
    for (std::size_t i = 1; i < cnt; ++i) {
        std::size_t j = i;
        while (j > 0 && a.less(idx[j], idx[j - 1])) {
            std::size_t t = idx[j];
            idx[j] = idx[j - 1];
            idx[j - 1] = t;
            --j;
        }
    }
    return idx;
}

// Three-way partition of [lo, hi) around the pivot parked at hi-1.
// Afterwards [lo, lt) < pivot, [lt, gt] == pivot, (gt, hi) > pivot.
template <class T>
void partition3(MeteredArray<T>& a, std::size_t lo, std::size_t hi, std::size_t& lt,
                std::size_t& gt) {
    ARef pivot = slot_ref(hi - 1);
    lt = lo;
    std::size_t i = lo;
    std::size_t ge = hi - 1;  // zone [ge, hi-1) holds > pivot
    while (i < ge) {
        if (a.less(slot_ref(i), pivot)) {
            if (i != lt) a.swap_slots(i, lt);
            ++lt;
            ++i;
        } else if (a.less(pivot, slot_ref(i))) {
            --ge;
            if (i != ge) a.swap_slots(i, ge);
        } else {
            ++i;
        }
    }
    if (ge != hi - 1) a.swap_slots(ge, hi - 1);  // pivot joins the equal zone
    gt = ge;
}

// Returns an index holding an element of the given rank; [lo, hi) permuted.
template <class T>
std::size_t select_at(MeteredArray<T>& a, std::size_t lo, std::size_t hi, std::size_t rank) {
    while (true) {
        std::size_t len = hi - lo;
        if (len <= 5) return sorted_index5(a, lo, len)[rank - 1];

        // Gather group medians at the front of the range.
        std::size_t g = 0;
        for (std::size_t b = lo; b < hi; b += 5) {
            std::size_t cnt = hi - b < 5 ? hi - b : 5;
            std::size_t med = sorted_index5(a, b, cnt)[(cnt - 1) / 2];
            if (med != lo + g) a.swap_slots(med, lo + g);
            ++g;
        }
        std::size_t piv = select_at(a, lo, lo + g, (g + 1) / 2);
        if (piv != hi - 1) a.swap_slots(piv, hi - 1);

        std::size_t lt = 0, gt = 0;
        partition3(a, lo, hi, lt, gt);
        std::size_t pos = lo + rank - 1;
        if (pos < lt) {
            hi = lt;  // rank unchanged
        } else if (pos <= gt) {
            return pos;  // inside the equal zone: any slot there has the value
        } else {
            rank -= gt + 1 - lo;
            lo = gt + 1;
        }
    }
}

}  // namespace select_detail

// Places an element of the given 1-based rank at slot hi-1.
template <class T>
void select_rank(MeteredArray<T>& a, std::size_t lo, std::size_t hi, std::size_t rank) {
    require(lo < hi && rank >= 1 && rank <= hi - lo, "select_rank: rank out of range");
    std::size_t idx = select_detail::select_at(a, lo, hi, rank);
    if (idx != hi - 1) a.swap_slots(idx, hi - 1);
}

}  // namespace fgsort
