#include <doctest.h>

#include <algorithm>
#include <random>

#include "fgsort/bench.hpp"

using namespace fgsort;
using namespace fgsort::bench;

TEST_CASE("distribution parsing") {
    CHECK(parse_dist("random").has_value());
    CHECK(parse_dist("sorted").has_value());
    CHECK(parse_dist("reverse").has_value());
    CHECK(parse_dist("organ-pipe").has_value());
    CHECK(parse_dist("few-distinct(4)")->param == 4);
    CHECK(parse_dist("sawtooth(32)")->param == 32);
    CHECK_FALSE(parse_dist("few-distinct").has_value());
    CHECK_FALSE(parse_dist("few-distinct(0)").has_value());
    CHECK_FALSE(parse_dist("bogus").has_value());
    CHECK_FALSE(parse_dist("sawtooth(x)").has_value());
}

TEST_CASE("generators are deterministic and shaped as promised") {
    Dist rnd = *parse_dist("random");
    auto a = generate_keys(rnd, 5000, 42);
    auto b = generate_keys(rnd, 5000, 42);
    CHECK(a == b);
    auto c = generate_keys(rnd, 5000, 43);
    CHECK(a != c);
    // random is a permutation of 0..n-1 (all distinct)
    auto s = a;
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == i);

    auto sorted = generate_keys(*parse_dist("sorted"), 10, 1);
    for (std::size_t i = 0; i < 10; ++i) CHECK(sorted[i] == i);
    auto eq = generate_keys(*parse_dist("few-distinct(1)"), 100, 7);
    for (auto v : eq) CHECK(v == 0);
    auto saw = generate_keys(*parse_dist("sawtooth(4)"), 8, 7);
    CHECK(saw == std::vector<uint64_t>{0, 1, 2, 3, 0, 1, 2, 3});
}

TEST_CASE("verification accepts correct runs and flags mutations") {
    Dist rnd = *parse_dist("random");
    std::vector<Tagged> input = tag_keys(generate_keys(rnd, 2000, 3));
    std::vector<Tagged> work = input;
    MeteredArray<Tagged> arr(std::move(work));
    sort_metered(arr);
    CHECK(verify_run(input, arr).ok);

    std::vector<Tagged> mutated = arr.raw_slots();
    std::swap(mutated[10], mutated[1500]);
    MeteredArray<Tagged> bad(std::move(mutated));
    VerifyResult vr = verify_run(input, bad);
    CHECK_FALSE(vr.ok);

    // Dropping an element is caught by the permutation check even when the
    // result is sorted.
    std::vector<Tagged> dropped = arr.raw_slots();
    dropped[0] = dropped[1];
    MeteredArray<Tagged> bad2(std::move(dropped));
    CHECK_FALSE(verify_run(input, bad2).ok);
}

TEST_CASE("trial records carry every field in the fixed order") {
    TrialConfig cfg;
    cfg.n = 4096;
    cfg.dist = *parse_dist("random");
    cfg.seed = 9;
    TrialRecord rec = run_trial(cfg);
    CHECK(rec.verified);
    std::string line = to_kv_line(rec);
    const char* keys[] = {"n=",          "dist=",        "seed=",          "variant=",
                          "algo=",       "comparisons=", "moves=",         "aside_peak=",
                          "build_ptr_",  "select_",      "insert_",        "seg_rebalance_",
                          "frame_rebalance_", "extract_", "partition_",    "short_sort_",
                          "glue_",       "wall_time_ns=", "verified="};
    std::size_t at = 0;
    for (const char* k : keys) {
        std::size_t found = line.find(k, at);
        CHECK(found != std::string::npos);
        at = found;
    }
    std::string csv = csv_header();
    CHECK(csv.find("n,dist,seed,variant,algo,comparisons,moves,aside_peak") == 0);
    CHECK(to_csv_row(rec).find(",random,9,cmp,fg,") != std::string::npos);
}

TEST_CASE("identical configs give identical counters") {
    TrialConfig cfg;
    cfg.n = 100000;
    cfg.dist = *parse_dist("sawtooth(1000)");
    cfg.seed = 5;
    TrialRecord a = run_trial(cfg);
    TrialRecord b = run_trial(cfg);
    CHECK(a.report.comparisons == b.report.comparisons);
    CHECK(a.report.moves == b.report.moves);
}

TEST_CASE("baseline sorters sort and report costs") {
    Dist rnd = *parse_dist("random");
    for (Algo algo : {Algo::heapsort, Algo::mergesort}) {
        TrialConfig cfg;
        cfg.n = 20000;
        cfg.dist = rnd;
        cfg.seed = 2;
        cfg.algo = algo;
        TrialRecord rec = run_trial(cfg);
        CHECK(rec.verified);
        CHECK(rec.report.comparisons > 0);
        CHECK(rec.report.moves > 0);
    }
}

TEST_CASE("fuzz: random configurations all verify") {
    std::mt19937_64 rng(1234);
    const char* dists[] = {"random", "sorted",       "reverse",
                           "organ-pipe", "few-distinct(3)", "sawtooth(17)"};
    int big_budget = 12;
    for (int i = 0; i < 400; ++i) {
        TrialConfig cfg;
        double u = static_cast<double>(rng() % 10000) / 10000.0;
        // log-uniform in [0, 4096], plus a few larger runs
        cfg.n = static_cast<std::size_t>(std::pow(2.0, u * 12.0)) - 1;
        if (i % 37 == 0 && big_budget > 0) {
            --big_budget;
            cfg.n = 65537 + rng() % 35000;
        }
        cfg.dist = *parse_dist(dists[rng() % 6]);
        cfg.seed = rng();
        cfg.variant = rng() % 2 ? Variant::comparison_optimized : Variant::move_optimized;
        TrialRecord rec = run_trial(cfg);
        if (!rec.verified) {
            CAPTURE(cfg.n);
            CAPTURE(cfg.dist.text);
            CAPTURE(cfg.seed);
            CHECK(rec.verified);
            break;
        }
        CHECK(rec.report.aside_peak <= 2);
    }
}

TEST_CASE("recorded constants are positive and select constants are sane") {
    double c_sel = 0, m_sel = 0;
    measure_select_constants(c_sel, m_sel);
    CHECK(c_sel > 0);
    CHECK(m_sel > 0);
    CHECK(c_sel <= 40.0);
    CHECK(m_sel <= 40.0);
}
