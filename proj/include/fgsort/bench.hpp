#pragma once

// Harness pieces shared by the CLI and the test suites: input generators,
// tagged elements for permutation checking, oracle verification, baseline
// comparison sorters, record formatting, and the recorded-constants file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "driver.hpp"

namespace fgsort::bench {

// Element with an original-index tag. The comparator consults only the key,
// so instrumented runs count exactly what a plain key run would.
struct Tagged {
    uint64_t key = 0;
    uint32_t tag = 0;
    bool operator<(const Tagged& o) const { return key < o.key; }
};

// ---------------------------------------------------------------- inputs --

struct Dist {
    enum class Kind { random_perm, sorted, reverse, few_distinct, sawtooth, organ_pipe };
    Kind kind = Kind::random_perm;
    uint64_t param = 0;
    std::string text;
};

inline std::optional<Dist> parse_dist(const std::string& s) {
    Dist d;
    d.text = s;
    auto paren = s.find('(');
    std::string name = paren == std::string::npos ? s : s.substr(0, paren);
    if (paren != std::string::npos) {
        auto close = s.find(')', paren);
        if (close == std::string::npos || close != s.size() - 1) return std::nullopt;
        try {
            d.param = std::stoull(s.substr(paren + 1, close - paren - 1));
        } catch (...) {
            return std::nullopt;
        }
    }
    if (name == "random") d.kind = Dist::Kind::random_perm;
    else if (name == "sorted") d.kind = Dist::Kind::sorted;
    else if (name == "reverse") d.kind = Dist::Kind::reverse;
    else if (name == "few-distinct") d.kind = Dist::Kind::few_distinct;
    else if (name == "sawtooth") d.kind = Dist::Kind::sawtooth;
    else if (name == "organ-pipe") d.kind = Dist::Kind::organ_pipe;
    else return std::nullopt;
    if ((d.kind == Dist::Kind::few_distinct || d.kind == Dist::Kind::sawtooth) && d.param == 0)
        return std::nullopt;
    return d;
}

inline std::vector<uint64_t> generate_keys(const Dist& d, std::size_t n, uint64_t seed) {
    std::vector<uint64_t> keys(n);
    std::mt19937_64 rng(seed);
    switch (d.kind) {
        case Dist::Kind::random_perm:
            for (std::size_t i = 0; i < n; ++i) keys[i] = i;
            for (std::size_t i = n; i > 1; --i) {
                std::size_t j = static_cast<std::size_t>(rng() % i);
                std::swap(keys[i - 1], keys[j]);
            }
            break;
        case Dist::Kind::sorted:
            for (std::size_t i = 0; i < n; ++i) keys[i] = i;
            break;
        case Dist::Kind::reverse:
            for (std::size_t i = 0; i < n; ++i) keys[i] = n - 1 - i;
            break;
        case Dist::Kind::few_distinct:
            for (std::size_t i = 0; i < n; ++i) keys[i] = rng() % d.param;
            break;
        case Dist::Kind::sawtooth:
            for (std::size_t i = 0; i < n; ++i) keys[i] = i % d.param;
            break;
        case Dist::Kind::organ_pipe:
            for (std::size_t i = 0; i < n; ++i) keys[i] = i < n - 1 - i ? i : n - 1 - i;
            break;
    }
    return keys;
}

inline std::vector<Tagged> tag_keys(const std::vector<uint64_t>& keys) {
    std::vector<Tagged> out(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        out[i] = Tagged{keys[i], static_cast<uint32_t>(i)};
    return out;
}

// ---------------------------------------------------------------- verify --

struct VerifyResult {
    bool ok = true;
    std::string message;
};

inline VerifyResult verify_run(const std::vector<Tagged>& input, const MeteredArray<Tagged>& out) {
    VerifyResult r;
    if (out.aside_occupied(0) || out.aside_occupied(1)) {
        return {false, "aside cell left occupied"};
    }
    if (out.aside_peak() > 2) return {false, "aside peak above 2"};
    const auto& slots = out.raw_slots();
    if (slots.size() != input.size()) return {false, "length changed"};
    for (std::size_t i = 1; i < slots.size(); ++i) {
        if (slots[i].key < slots[i - 1].key) {
            return {false, "output not sorted at index " + std::to_string(i)};
        }
    }
    auto norm = [](std::vector<Tagged> v) {
        std::sort(v.begin(), v.end(), [](const Tagged& a, const Tagged& b) {
            return a.key != b.key ? a.key < b.key : a.tag < b.tag;
        });
        return v;
    };
    std::vector<Tagged> a = norm(input), b = norm(slots);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].key != b[i].key || a[i].tag != b[i].tag) {
            return {false, "output is not a permutation of the input"};
        }
    }
    return r;
}

// ------------------------------------------------------------- baselines --

// Textbook binary heapsort through the metered store, for cost contrast.
template <class T>
void heapsort_baseline(MeteredArray<T>& a) {
    const std::size_t n = a.size();
    auto sift = [&](std::size_t root, std::size_t size) {
        std::size_t cur = root;
        while (true) {
            std::size_t l = 2 * cur + 1;
            if (l >= size) break;
            std::size_t big = l;
            if (l + 1 < size && a.less(l, l + 1)) big = l + 1;
            if (a.less(cur, big)) {
                a.swap_slots(cur, big);
                cur = big;
            } else {
                break;
            }
        }
    };
    if (n < 2) return;
    for (std::size_t i = n / 2; i-- > 0;) sift(i, n);
    for (std::size_t last = n - 1; last > 0; --last) {
        a.swap_slots(0, last);
        sift(0, last);
    }
}

// Top-down mergesort on a plain vector with its own counters. Not in-place:
// the auxiliary buffer holds n elements, and every copy into or out of it is
// counted as a move.
template <class T>
void mergesort_baseline(std::vector<T>& v, uint64_t& comparisons, uint64_t& moves) {
    std::vector<T> buf(v.size());
    auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> void {
        if (hi - lo < 2) return;
        std::size_t mid = lo + (hi - lo) / 2;
        self(self, lo, mid);
        self(self, mid, hi);
        std::size_t i = lo, j = mid, k = lo;
        while (i < mid && j < hi) {
            ++comparisons;
            if (v[j] < v[i]) {
                buf[k++] = v[j++];
            } else {
                buf[k++] = v[i++];
            }
            ++moves;
        }
        while (i < mid) { buf[k++] = v[i++]; ++moves; }
        while (j < hi) { buf[k++] = v[j++]; ++moves; }
        for (std::size_t q = lo; q < hi; ++q) { v[q] = buf[q]; ++moves; }
    };
    rec(rec, 0, v.size());
}

// ---------------------------------------------------------------- trials --

enum class Algo { fg, heapsort, mergesort };

inline const char* algo_name(Algo a) {
    switch (a) {
        case Algo::fg: return "fg";
        case Algo::heapsort: return "heapsort";
        case Algo::mergesort: return "mergesort";
    }
    return "?";
}

inline std::optional<Algo> parse_algo(const std::string& s) {
    if (s == "fg") return Algo::fg;
    if (s == "heapsort") return Algo::heapsort;
    if (s == "mergesort") return Algo::mergesort;
    return std::nullopt;
}

struct TrialConfig {
    std::size_t n = 0;
    Dist dist;
    uint64_t seed = 1;
    Variant variant = Variant::comparison_optimized;
    Algo algo = Algo::fg;
    bool verify = true;
    bool paranoid = false;
};

struct TrialRecord {
    TrialConfig config;
    SortReport report;
    uint64_t wall_ns = 0;
    bool verified = false;
    std::string verify_message;
};

inline TrialRecord run_trial(const TrialConfig& cfg) {
    TrialRecord rec;
    rec.config = cfg;
    std::vector<Tagged> input = tag_keys(generate_keys(cfg.dist, cfg.n, cfg.seed));
    auto t0 = std::chrono::steady_clock::now();
    if (cfg.algo == Algo::mergesort) {
        std::vector<Tagged> v = input;
        SortReport rep;
        rep.n = cfg.n;
        rep.variant = cfg.variant;
        mergesort_baseline(v, rep.comparisons, rep.moves);
        rec.report = rep;
        rec.wall_ns = static_cast<uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
                .count());
        if (cfg.verify) {
            MeteredArray<Tagged> out(std::move(v));
            VerifyResult vr = verify_run(input, out);
            rec.verified = vr.ok;
            rec.verify_message = vr.message;
        }
        return rec;
    }
    MeteredArray<Tagged> arr(input);  // copy; the original stays for verification
    if (cfg.algo == Algo::fg) {
        SortOptions opt;
        opt.variant = cfg.variant;
        opt.paranoid = cfg.paranoid;
        rec.report = sort_metered(arr, opt);
    } else {
        Checkpoint before = arr.checkpoint();
        heapsort_baseline(arr);
        CostDelta d = arr.delta(before);
        rec.report.n = cfg.n;
        rec.report.variant = cfg.variant;
        rec.report.comparisons = d.comparisons;
        rec.report.moves = d.moves;
        rec.report.aside_peak = arr.aside_peak();
        rec.report.phases = arr.phase_totals();
    }
    rec.wall_ns = static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
            .count());
    if (cfg.verify) {
        VerifyResult vr = verify_run(input, arr);
        rec.verified = vr.ok;
        rec.verify_message = vr.message;
    }
    return rec;
}

// --------------------------------------------------------------- records --

inline const Phase report_phases[] = {Phase::build_ptr,      Phase::select,
                                      Phase::insert,         Phase::seg_rebalance,
                                      Phase::frame_rebalance, Phase::extract,
                                      Phase::partition,      Phase::short_sort,
                                      Phase::glue};

inline std::string to_kv_line(const TrialRecord& r) {
    std::ostringstream os;
    os << "n=" << r.config.n << " dist=" << r.config.dist.text << " seed=" << r.config.seed
       << " variant=" << variant_name(r.config.variant) << " algo=" << algo_name(r.config.algo)
       << " comparisons=" << r.report.comparisons << " moves=" << r.report.moves
       << " aside_peak=" << r.report.aside_peak;
    for (Phase p : report_phases) {
        auto i = static_cast<std::size_t>(p);
        os << " " << phase_name(p) << "_comparisons=" << r.report.phases.comparisons[i] << " "
           << phase_name(p) << "_moves=" << r.report.phases.moves[i];
    }
    os << " wall_time_ns=" << r.wall_ns;
    if (r.config.verify) os << " verified=" << (r.verified ? "ok" : "VIOLATION");
    return os.str();
}

inline std::string csv_header() {
    std::ostringstream os;
    os << "n,dist,seed,variant,algo,comparisons,moves,aside_peak";
    for (Phase p : report_phases)
        os << "," << phase_name(p) << "_comparisons," << phase_name(p) << "_moves";
    os << ",wall_time_ns,verified";
    return os.str();
}

inline std::string to_csv_row(const TrialRecord& r) {
    std::ostringstream os;
    os << r.config.n << "," << r.config.dist.text << "," << r.config.seed << ","
       << variant_name(r.config.variant) << "," << algo_name(r.config.algo) << ","
       << r.report.comparisons << "," << r.report.moves << "," << r.report.aside_peak;
    for (Phase p : report_phases) {
        auto i = static_cast<std::size_t>(p);
        os << "," << r.report.phases.comparisons[i] << "," << r.report.phases.moves[i];
    }
    os << "," << r.wall_ns << "," << (r.config.verify ? (r.verified ? "ok" : "VIOLATION") : "-");
    return os.str();
}

// ------------------------------------------------------------- constants --

// Recorded constants, per (distribution, variant):
//   C1: comparison slack over 2n log2 n, per n*(log2 n)^{4/5}, at n = 2^18
//   C2: moves per element at n = 2^18
//   C_sel / M_sel: selection comparisons and moves per element at 10^5
struct BaselineEntry {
    double c1 = 0, c2 = 0, c_sel = 0, m_sel = 0;
};

inline std::string baseline_key(const Dist& d, Variant v) {
    return d.text + "|" + variant_name(v);
}

inline void measure_select_constants(double& c_sel, double& m_sel) {
    const std::size_t len = 100000;
    Dist d;
    d.kind = Dist::Kind::random_perm;
    d.text = "random";
    MeteredArray<uint64_t> a(generate_keys(d, len, 12345));
    Checkpoint before = a.checkpoint();
    select_rank(a, 0, len, len / 2);
    CostDelta delta = a.delta(before);
    c_sel = static_cast<double>(delta.comparisons) / static_cast<double>(len);
    m_sel = static_cast<double>(delta.moves) / static_cast<double>(len);
}

inline BaselineEntry measure_entry(const Dist& dist, Variant variant) {
    const std::size_t n = std::size_t{1} << 18;
    TrialConfig cfg;
    cfg.n = n;
    cfg.dist = dist;
    cfg.seed = 1;
    cfg.variant = variant;
    cfg.verify = false;
    TrialRecord rec = run_trial(cfg);
    BaselineEntry e;
    double logn = std::log2(static_cast<double>(n));
    e.c1 = (static_cast<double>(rec.report.comparisons) - 2.0 * n * logn) /
           (static_cast<double>(n) * std::pow(logn, 0.8));
    e.c2 = static_cast<double>(rec.report.moves) / static_cast<double>(n);
    measure_select_constants(e.c_sel, e.m_sel);
    return e;
}

}  // namespace fgsort::bench
