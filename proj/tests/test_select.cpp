#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "fgsort/select.hpp"

using namespace fgsort;

namespace {

void check_select(std::vector<uint64_t> data, std::size_t rank) {
    std::vector<uint64_t> sorted = data;
    std::sort(sorted.begin(), sorted.end());
    MeteredArray<uint64_t> a(std::move(data));
    std::size_t n = a.size();
    select_rank(a, 0, n, rank);
    CHECK(a.peek(n - 1) == sorted[rank - 1]);
    std::vector<uint64_t> now = a.raw_slots();
    std::sort(now.begin(), now.end());
    CHECK(now == sorted);
    CHECK_FALSE(a.aside_occupied(0));
    CHECK_FALSE(a.aside_occupied(1));
}

}  // namespace

TEST_CASE("single element") {
    MeteredArray<uint64_t> a(std::vector<uint64_t>{42});
    select_rank(a, 0, 1, 1);
    CHECK(a.peek(0) == 42);
    CHECK(a.moves() == 0);
}

TEST_CASE("rank 2 of [3,1,2] lands 2 in the last slot") {
    check_select({3, 1, 2}, 2);
}

TEST_CASE("all permutations of three, every rank") {
    std::vector<uint64_t> perm{1, 2, 3};
    std::sort(perm.begin(), perm.end());
    do {
        for (std::size_t rank = 1; rank <= 3; ++rank) check_select(perm, rank);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("all-equal range: permutation preserved, any slot content valid") {
    check_select(std::vector<uint64_t>(17, 7), 9);
    check_select(std::vector<uint64_t>(100, 7), 1);
}

TEST_CASE("random ranges against the sorted oracle") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + rng() % 400;
        std::vector<uint64_t> data(n);
        uint64_t span = 1 + rng() % 50;  // heavy duplicates on small spans
        for (auto& x : data) x = rng() % span;
        std::size_t rank = 1 + rng() % n;
        check_select(data, rank);
    }
}

TEST_CASE("sub-range selection leaves the rest untouched") {
    std::vector<uint64_t> data{9, 8, 7, 5, 1, 4, 2, 6, 0, 3};
    MeteredArray<uint64_t> a{std::vector<uint64_t>(data)};
    select_rank(a, 3, 8, 2);  // slots 3..7 hold {5,1,4,2,6}; rank 2 is 2
    CHECK(a.peek(7) == 2);
    CHECK(a.peek(0) == 9);
    CHECK(a.peek(1) == 8);
    CHECK(a.peek(2) == 7);
    CHECK(a.peek(8) == 0);
    CHECK(a.peek(9) == 3);
}

TEST_CASE("linear cost: per-element constants are flat across lengths") {
    std::mt19937_64 rng(77);
    double max_c = 0, max_m = 0;
    for (std::size_t len : {std::size_t{1000}, std::size_t{10000}, std::size_t{100000},
                            std::size_t{1000000}}) {
        std::vector<uint64_t> data(len);
        for (auto& x : data) x = rng();
        MeteredArray<uint64_t> a(std::move(data));
        Checkpoint cp = a.checkpoint();
        select_rank(a, 0, len, len / 2);
        CostDelta d = a.delta(cp);
        double c = static_cast<double>(d.comparisons) / static_cast<double>(len);
        double m = static_cast<double>(d.moves) / static_cast<double>(len);
        max_c = std::max(max_c, c);
        max_m = std::max(max_m, m);
    }
    // Worst-case linear algorithm: fixed caps, far above the typical value
    // but far below anything superlinear would produce at 10^6.
    CHECK(max_c <= 40.0);
    CHECK(max_m <= 40.0);
}

TEST_CASE("adversarial shapes stay linear") {
    for (std::size_t len : {std::size_t{1000}, std::size_t{32768}}) {
        for (int shape = 0; shape < 3; ++shape) {
            std::vector<uint64_t> data(len);
            for (std::size_t i = 0; i < len; ++i)
                data[i] = shape == 0 ? i : (shape == 1 ? len - i : i % 4);
            MeteredArray<uint64_t> a(std::move(data));
            Checkpoint cp = a.checkpoint();
            select_rank(a, 0, len, (len + 3) / 4);
            CostDelta d = a.delta(cp);
            CHECK(static_cast<double>(d.comparisons) / len <= 40.0);
            CHECK(static_cast<double>(d.moves) / len <= 40.0);
        }
    }
}

TEST_CASE("rank bounds fault") {
    MeteredArray<uint64_t> a(std::vector<uint64_t>{1, 2});
    CHECK_THROWS_AS(select_rank(a, 0, 2, 0), contract_violation);
    CHECK_THROWS_AS(select_rank(a, 0, 2, 3), contract_violation);
}
