#pragma once

// Multi-root t-ary implicit heaps, used in three roles:
//   - segment extraction: min-heap over a segment's active prefix; each
//     extraction rescues one buffer element into the previous hole and leaves
//     a new hole in some leaf (the heap never shrinks, buffer elements float
//     in through leaf holes and lose every comparison against actives);
//   - pointer-memory building: max-heap (or mirrored min-heap) over a region,
//     shrinking extraction via the special path, aborted after the wanted
//     number of extreme elements has been collected;
//   - short blocks: the same shrinking heapsort with degree 5.
//
// Node e (1-based) has father floor((e-1)/t) when that is >= 1; nodes 1..t
// are roots; sons of e are t*e+1 .. t*e+t, truncated at the heap size.

#include <cstdint>
#include <vector>

#include "metered.hpp"

namespace fgsort {

template <class T>
struct HeapView {
    MeteredArray<T>* arr;
    std::size_t anchor;  // slot of node 1
    bool mirrored;       // node i sits at anchor - (i-1) instead of anchor + (i-1)
    bool min_at_top;
    uint32_t degree;
    std::size_t size;

    std::size_t slot_of(std::size_t node) const {
        return mirrored ? anchor - (node - 1) : anchor + (node - 1);
    }
    // Does node x belong strictly above node y?
    bool wins(std::size_t x, std::size_t y) const {
        return min_at_top ? arr->less(slot_of(x), slot_of(y))
                          : arr->less(slot_of(y), slot_of(x));
    }
    // Does node y belong strictly above the element at `ref`?
    bool node_wins_ref(std::size_t y, ARef ref) const {
        return min_at_top ? arr->less(slot_ref(slot_of(y)), ref)
                          : arr->less(ref, slot_ref(slot_of(y)));
    }
};

namespace heaps {

// Index of the winning node among the sons of `node` within the first
// `limit` nodes; 0 when there are none. Costs (#sons - 1) comparisons.
template <class T>
std::size_t best_son(const HeapView<T>& h, std::size_t node, std::size_t limit) {
    std::size_t first = static_cast<std::size_t>(h.degree) * node + 1;
    if (first > limit) return 0;
    std::size_t last = static_cast<std::size_t>(h.degree) * node + h.degree;
    if (last > limit) last = limit;
    std::size_t best = first;
    for (std::size_t c = first + 1; c <= last; ++c)
        if (h.wins(c, best)) best = c;
    return best;
}

// Establish the heap property bottom-up. Costs at most degree comparisons
// and 3 moves per node visited along each settle-down walk.
template <class T>
void heapify(HeapView<T>& h) {
    if (h.size <= h.degree) return;  // roots only
    for (std::size_t e = (h.size - 1) / h.degree; e >= 1; --e) {
        std::size_t cur = e;
        while (true) {
            std::size_t best = best_son(h, cur, h.size);
            if (best == 0 || !h.wins(best, cur)) break;
            h.arr->swap_slots(h.slot_of(cur), h.slot_of(best));
            cur = best;
        }
    }
}

// One extraction step of the non-shrinking segment heap. The buffer element
// waiting at out_slot is rescued into the current hole, the top element moves
// to out_slot, and the vacancy walks down a winning-son chain to a leaf.
// Returns the slot of the new leaf hole. Costs at most
// levels*(degree-1) comparisons and 2 + (levels-1) moves.
template <class T>
std::size_t extract_top_refill(HeapView<T>& h, std::size_t out_slot, std::size_t hole) {
    h.arr->assign(hole, out_slot);
    std::size_t roots = h.size < h.degree ? h.size : h.degree;
    std::size_t best = 1;
    for (std::size_t c = 2; c <= roots; ++c)
        if (h.wins(c, best)) best = c;
    h.arr->assign(out_slot, h.slot_of(best));
    std::size_t cur = best;
    while (true) {
        std::size_t son = best_son(h, cur, h.size);
        if (son == 0) break;
        h.arr->assign(h.slot_of(cur), h.slot_of(son));
        cur = son;
    }
    return h.slot_of(cur);
}

// Shrinking extraction: pull the `count` top elements to the tail of the
// region in sorted order (ascending for a max-heap; the mirrored min-heap
// produces an ascending prefix). After the top of a full heap is removed,
// the last node's element is re-inserted along the special path -- the
// root-to-leaf chain of winning sons -- located with at most
// levels*(degree-1) comparisons, a binary search over the path with
// 1 + floor(log2 path) comparisons, and at most levels + 2 moves.
template <class T>
void pull_extremes(HeapView<T>& h, std::size_t count, std::vector<std::size_t>& path_scratch) {
    require(count <= h.size, "pull_extremes: count exceeds heap size");
    heapify(h);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t last = h.size;
        std::size_t roots = last < h.degree ? last : h.degree;
        std::size_t best = 1;
        for (std::size_t c = 2; c <= roots; ++c)
            if (h.wins(c, best)) best = c;
        if (best == last) {  // the winner already sits in the last node
            --h.size;
            continue;
        }
        // Special path inside the heap without its last node.
        path_scratch.clear();
        path_scratch.push_back(best);
        for (std::size_t cur = best;;) {
            std::size_t son = best_son(h, cur, last - 1);
            if (son == 0) break;
            path_scratch.push_back(son);
            cur = son;
        }
        // Binary search: how many path values below the root beat the last
        // node's element? (path values are monotone in winning order)
        ARef x = slot_ref(h.slot_of(last));
        std::size_t wins_cnt = 0;
        {
            std::size_t len = path_scratch.size() - 1;  // candidates v2..vk
            std::size_t step = 1;
            while (len > 0 && step << 1 <= len) step <<= 1;
            for (; len > 0 && step > 0; step >>= 1) {
                std::size_t cand = wins_cnt + step;
                if (cand <= len && h.node_wins_ref(path_scratch[cand], x)) wins_cnt = cand;
            }
        }
        ARef cell = h.arr->free_aside();
        h.arr->assign(cell, x);
        h.arr->assign(h.slot_of(last), h.slot_of(path_scratch[0]));
        for (std::size_t j = 0; j < wins_cnt; ++j)
            h.arr->assign(h.slot_of(path_scratch[j]), h.slot_of(path_scratch[j + 1]));
        h.arr->assign(slot_ref(h.slot_of(path_scratch[wins_cnt])), cell);
        --h.size;
    }
}

// Sort a short range ascending with the degree-5 multi-root heapsort.
// Degree 5 keeps the heap within 7 levels for any admissible length.
template <class T>
void short_sort(MeteredArray<T>& a, std::size_t lo, std::size_t hi) {
    require(hi >= lo && hi - lo <= (std::size_t{1} << 16), "short_sort: range too long");
    std::size_t len = hi - lo;
    if (len <= 1) return;
    static_assert(5 + 25 + 125 + 625 + 3125 + 15625 + 78125 >= (1 << 16),
                  "seven levels cover the short range");
    HeapView<T> h{&a, lo, false, false, 5, len};
    std::vector<std::size_t> scratch;
    scratch.reserve(8);
    pull_extremes(h, len, scratch);
}

}  // namespace heaps
}  // namespace fgsort
