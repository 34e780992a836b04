#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fgsort/heaps.hpp"
#include "fgsort/params.hpp"

using namespace fgsort;

namespace {

// Verify the heap property on actives: every node with sons is not beaten by
// any of them (uncounted).
template <class T>
bool heap_property_holds(const HeapView<T>& h) {
    for (std::size_t e = 1; e <= h.size; ++e) {
        std::size_t first = static_cast<std::size_t>(h.degree) * e + 1;
        for (std::size_t c = first; c <= first + h.degree - 1 && c <= h.size; ++c) {
            const auto& father = h.arr->peek(h.slot_of(e));
            const auto& son = h.arr->peek(h.slot_of(c));
            bool son_beats = h.min_at_top ? son < father : father < son;
            if (son_beats) return false;
        }
    }
    return true;
}

// Segment-extraction harness: [0, s) segment (h actives, then buffers),
// [s, s+h) output slots holding buffer elements, s+h the separator,
// s+h+1 the initial hole.
struct SegRig {
    MeteredArray<uint64_t> arr;
    std::size_t s, h;
    static SegRig make(std::vector<uint64_t> actives, std::size_t s) {
        std::size_t h = actives.size();
        std::vector<uint64_t> data;
        data.insert(data.end(), actives.begin(), actives.end());
        for (std::size_t i = h; i < s; ++i) data.push_back(5000 + i);  // segment buffers
        for (std::size_t i = 0; i < h; ++i) data.push_back(6000 + i);  // out zone
        data.push_back(1000);  // separator
        data.push_back(7000);  // initial hole (stale buffer content)
        return SegRig{MeteredArray<uint64_t>(std::move(data)), s, h};
    }
    std::size_t out_base() const { return s; }
    std::size_t sep() const { return s + h; }
    std::size_t hole0() const { return s + h + 1; }
};

}  // namespace

TEST_CASE("heapify: all roots means zero cost") {
    MeteredArray<uint64_t> a(std::vector<uint64_t>{5, 3, 4});
    HeapView<uint64_t> h{&a, 0, false, true, 3, 3};
    heaps::heapify(h);
    CHECK(a.comparisons() == 0);
    CHECK(a.moves() == 0);
}

TEST_CASE("heapify: two-root degenerate binary heap") {
    MeteredArray<uint64_t> a(std::vector<uint64_t>{6, 5, 4, 3, 2, 1});
    HeapView<uint64_t> h{&a, 0, false, true, 2, 6};
    heaps::heapify(h);
    CHECK(heap_property_holds(h));
}

TEST_CASE("heapify comparisons stay below 2x size at degree 11") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 1 + rng() % 160001;
        std::vector<uint64_t> data(n);
        for (auto& x : data) x = rng();
        MeteredArray<uint64_t> a(std::move(data));
        HeapView<uint64_t> h{&a, 0, false, true, 11, n};
        Checkpoint cp = a.checkpoint();
        heaps::heapify(h);
        CHECK(a.delta(cp).comparisons < 2 * n);
        CHECK(heap_property_holds(h));
    }
}

TEST_CASE("segment extraction emits actives in order within per-call budgets") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t h_cnt = 1 + rng() % 7;
        std::vector<uint64_t> actives(h_cnt);
        for (auto& x : actives) x = rng() % 900;
        std::vector<uint64_t> expect = actives;
        std::sort(expect.begin(), expect.end());
        SegRig rig = SegRig::make(actives, 9);
        const uint32_t t = 3;
        HeapView<uint64_t> hv{&rig.arr, 0, false, true, t, rig.h};
        heaps::heapify(hv);
        std::size_t hole = rig.hole0();
        uint32_t levels = heap_levels(t, rig.h);
        for (std::size_t i = 0; i < rig.h; ++i) {
            Checkpoint cp = rig.arr.checkpoint();
            hole = heaps::extract_top_refill(hv, rig.out_base() + i, hole);
            CostDelta d = rig.arr.delta(cp);
            CHECK(d.comparisons <= 5 * (t - 1));
            CHECK(d.comparisons <= static_cast<uint64_t>(levels) * (t - 1));
            CHECK(d.moves <= 6);
            CHECK(rig.arr.peek(rig.out_base() + i) == expect[i]);
        }
        // The rescued buffer elements ended up inside the heap zone; the
        // final hole is a leaf of the segment.
        CHECK(hole < rig.s);
    }
}

TEST_CASE("single-active segment extraction") {
    SegRig rig = SegRig::make({7}, 5);
    HeapView<uint64_t> hv{&rig.arr, 0, false, true, 3, 1};
    heaps::heapify(hv);
    Checkpoint cp = rig.arr.checkpoint();
    std::size_t hole = heaps::extract_top_refill(hv, rig.out_base(), rig.hole0());
    CHECK(rig.arr.peek(rig.out_base()) == 7);
    CHECK(rig.arr.delta(cp).moves <= 2);
    CHECK(hole == 0);
}

TEST_CASE("pull_extremes: full run sorts the region") {
    std::mt19937_64 rng(51);
    std::vector<std::size_t> scratch;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng() % 500;
        std::vector<uint64_t> data(n);
        for (auto& x : data) x = rng() % 300;
        std::vector<uint64_t> expect = data;
        std::sort(expect.begin(), expect.end());
        MeteredArray<uint64_t> a(std::move(data));
        HeapView<uint64_t> h{&a, 0, false, false, 5, n};
        heaps::pull_extremes(h, n, scratch);
        for (std::size_t i = 0; i < n; ++i) CHECK(a.peek(i) == expect[i]);
        CHECK_FALSE(a.aside_occupied(0));
    }
}

TEST_CASE("pull_extremes: largest 64 of 4096 collect at the tail, ascending") {
    std::mt19937_64 rng(61);
    std::vector<uint64_t> data(4096);
    for (auto& x : data) x = rng();
    std::vector<uint64_t> expect = data;
    std::sort(expect.begin(), expect.end());
    MeteredArray<uint64_t> a(std::move(data));
    HeapView<uint64_t> h{&a, 0, false, false, 12, 4096};
    std::vector<std::size_t> scratch;
    heaps::pull_extremes(h, 64, scratch);
    for (std::size_t i = 0; i < 64; ++i) CHECK(a.peek(4096 - 64 + i) == expect[4096 - 64 + i]);
}

TEST_CASE("pull_extremes mirrored: smallest 64 collect at the front, ascending") {
    std::mt19937_64 rng(71);
    std::vector<uint64_t> data(4096);
    for (auto& x : data) x = rng();
    std::vector<uint64_t> expect = data;
    std::sort(expect.begin(), expect.end());
    MeteredArray<uint64_t> a(std::move(data));
    HeapView<uint64_t> h{&a, 4095, true, true, 12, 4096};
    std::vector<std::size_t> scratch;
    heaps::pull_extremes(h, 64, scratch);
    for (std::size_t i = 0; i < 64; ++i) CHECK(a.peek(i) == expect[i]);
}

TEST_CASE("short_sort: trivial lengths cost nothing") {
    MeteredArray<uint64_t> a(std::vector<uint64_t>{});
    heaps::short_sort(a, 0, 0);
    MeteredArray<uint64_t> b(std::vector<uint64_t>{9});
    heaps::short_sort(b, 0, 1);
    CHECK(a.comparisons() + a.moves() + b.comparisons() + b.moves() == 0);
}

TEST_CASE("short_sort: all 5040 permutations of seven keys, with cost bounds") {
    std::vector<uint64_t> perm{1, 2, 3, 4, 5, 6, 7};
    const double m = 7;
    const double cmp_bound = 2 * m * std::log2(m) + 6.25 * m;
    const double move_bound = 9.75 * m;
    do {
        MeteredArray<uint64_t> a{std::vector<uint64_t>(perm)};
        heaps::short_sort(a, 0, 7);
        for (std::size_t i = 0; i < 7; ++i) CHECK(a.peek(i) == i + 1);
        CHECK(static_cast<double>(a.comparisons()) <= cmp_bound);
        CHECK(static_cast<double>(a.moves()) <= move_bound);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("short_sort: cost bounds across lengths and shapes") {
    std::mt19937_64 rng(81);
    for (std::size_t m : {std::size_t{2},  std::size_t{3},   std::size_t{26},
                          std::size_t{126}, std::size_t{1000}, std::size_t{4096}}) {
        for (int shape = 0; shape < 4; ++shape) {
            std::vector<uint64_t> data(m);
            for (std::size_t i = 0; i < m; ++i)
                data[i] = shape == 0   ? rng() % (m * 2)
                          : shape == 1 ? i
                          : shape == 2 ? m - i
                                       : 3;
            std::vector<uint64_t> expect = data;
            std::sort(expect.begin(), expect.end());
            MeteredArray<uint64_t> a(std::move(data));
            heaps::short_sort(a, 0, m);
            for (std::size_t i = 0; i < m; ++i) CHECK(a.peek(i) == expect[i]);
            double md = static_cast<double>(m);
            CHECK(static_cast<double>(a.comparisons()) <= 2 * md * std::log2(md) + 6.25 * md);
            CHECK(static_cast<double>(a.moves()) <= 9.75 * md);
        }
    }
}

TEST_CASE("short_sort rejects over-long ranges") {
    MeteredArray<uint64_t> a(std::vector<uint64_t>(65537, 0));
    CHECK_THROWS_AS(heaps::short_sort(a, 0, 65537), contract_violation);
}
