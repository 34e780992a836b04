#pragma once

// Instrumented element store. Every element of the input lives either in one
// of the n slots or in one of two aside cells; there is no other element
// storage anywhere in the library. The only primitives that touch elements
// are less() and assign(), and each one bumps the corresponding counter, so
// the counters are exact by construction.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fgsort {

class contract_violation : public std::logic_error {
public:
    explicit contract_violation(const char* what) : std::logic_error(what) {}
};

inline void require(bool cond, const char* what) {
    if (!cond) throw contract_violation(what);
}

// Cost attribution buckets. "glue" is the driver's own bookkeeping; the rest
// correspond to the phases reported by the CLI.
enum class Phase : uint8_t {
    glue = 0,
    build_ptr,
    select,
    insert,
    seg_rebalance,
    frame_rebalance,
    extract,
    partition,
    short_sort,
};

inline constexpr std::size_t phase_count = 9;

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::glue: return "glue";
        case Phase::build_ptr: return "build_ptr";
        case Phase::select: return "select";
        case Phase::insert: return "insert";
        case Phase::seg_rebalance: return "seg_rebalance";
        case Phase::frame_rebalance: return "frame_rebalance";
        case Phase::extract: return "extract";
        case Phase::partition: return "partition";
        case Phase::short_sort: return "short_sort";
    }
    return "?";
}

// Reference to a slot or to one of the two aside cells.
struct ARef {
    std::size_t index = 0;
    bool is_aside = false;
};

constexpr ARef slot_ref(std::size_t i) { return ARef{i, false}; }
constexpr ARef aside_ref(std::size_t cell) { return ARef{cell, true}; }

struct Checkpoint {
    uint64_t comparisons = 0;
    uint64_t moves = 0;
    uint32_t aside_peak = 0;
};

struct CostDelta {
    uint64_t comparisons = 0;
    uint64_t moves = 0;
};

struct PhaseTotals {
    std::array<uint64_t, phase_count> comparisons{};
    std::array<uint64_t, phase_count> moves{};

    uint64_t total_comparisons() const {
        uint64_t s = 0;
        for (auto c : comparisons) s += c;
        return s;
    }
    uint64_t total_moves() const {
        uint64_t s = 0;
        for (auto m : moves) s += m;
        return s;
    }
};

template <class T>
class MeteredArray {
public:
    explicit MeteredArray(std::vector<T> data) : slots_(std::move(data)) {}

    std::size_t size() const { return slots_.size(); }

    // Strict key comparison; exactly one counter tick per call.
    bool less(ARef a, ARef b) {
        bump_comparison();
        return get(a) < get(b);
    }
    bool less(std::size_t i, std::size_t j) {
        bump_comparison();
        return slot(i) < slot(j);
    }

    // One element move. The source keeps a stale copy if it is a slot; an
    // aside source is emptied, so the cell can be reused.
    void assign(ARef dst, ARef src) {
        const T& v = get(src);
        if (dst.is_aside) {
            require(dst.index < 2, "aside index out of range");
            require(!aside_[dst.index].has_value(),
                    "assign would overwrite an occupied aside cell");
            aside_[dst.index] = v;
            on_aside_occupied();
        } else {
            require(dst.index < slots_.size(), "slot index out of range");
            slots_[dst.index] = v;
        }
        if (src.is_aside) {
            aside_[src.index].reset();
            --aside_occupied_;
        }
        bump_move();
    }
    void assign(std::size_t dst, std::size_t src) {
        require(dst < slots_.size() && src < slots_.size(), "slot index out of range");
        slots_[dst] = slots_[src];
        bump_move();
    }

    // Swap through a free aside cell: exactly 3 moves.
    void swap_slots(std::size_t i, std::size_t j) {
        ARef cell = free_aside();
        assign(cell, slot_ref(i));
        assign(slot_ref(i), slot_ref(j));
        assign(slot_ref(j), cell);
    }

    ARef free_aside() const {
        if (!aside_[0].has_value()) return aside_ref(0);
        require(!aside_[1].has_value(), "no free aside cell");
        return aside_ref(1);
    }

    bool aside_occupied(std::size_t cell) const {
        require(cell < 2, "aside index out of range");
        return aside_[cell].has_value();
    }

    Checkpoint checkpoint() const { return Checkpoint{comparisons_, moves_, aside_peak_}; }

    CostDelta delta(const Checkpoint& since) const {
        return CostDelta{comparisons_ - since.comparisons, moves_ - since.moves};
    }

    uint64_t comparisons() const { return comparisons_; }
    uint64_t moves() const { return moves_; }
    uint32_t aside_peak() const { return aside_peak_; }

    Phase phase() const { return phase_; }
    void set_phase(Phase p) { phase_ = p; }
    const PhaseTotals& phase_totals() const { return phases_; }

    // Uncounted observers. These exist for oracles, invariant verification
    // and reporting; algorithm code must never read elements through them.
    const T& peek(std::size_t i) const {
        require(i < slots_.size(), "slot index out of range");
        return slots_[i];
    }
    const T& peek(ARef r) const { return get(r); }
    const T& peek_aside(std::size_t cell) const {
        require(cell < 2 && aside_[cell].has_value(), "peek of empty aside cell");
        return *aside_[cell];
    }
    const std::vector<T>& raw_slots() const { return slots_; }

    // Move the data out; both aside cells must be empty again.
    std::vector<T> take() {
        require(!aside_[0].has_value() && !aside_[1].has_value(),
                "take() with occupied aside cell");
        return std::move(slots_);
    }

private:
    const T& get(ARef r) const {
        if (r.is_aside) {
            require(r.index < 2, "aside index out of range");
            require(aside_[r.index].has_value(), "reference to empty aside cell");
            return *aside_[r.index];
        }
        return slot(r.index);
    }
    const T& slot(std::size_t i) const {
        require(i < slots_.size(), "slot index out of range");
        return slots_[i];
    }

    void bump_comparison() {
        ++comparisons_;
        ++phases_.comparisons[static_cast<std::size_t>(phase_)];
    }
    void bump_move() {
        ++moves_;
        ++phases_.moves[static_cast<std::size_t>(phase_)];
    }
    void on_aside_occupied() {
        ++aside_occupied_;
        if (aside_occupied_ > aside_peak_) aside_peak_ = aside_occupied_;
    }

    std::vector<T> slots_;
    std::array<std::optional<T>, 2> aside_;
    uint64_t comparisons_ = 0;
    uint64_t moves_ = 0;
    uint32_t aside_occupied_ = 0;
    uint32_t aside_peak_ = 0;
    Phase phase_ = Phase::glue;
    PhaseTotals phases_;
};

// Scoped phase attribution; restores the previous phase on exit.
template <class T>
class PhaseScope {
public:
    PhaseScope(MeteredArray<T>& a, Phase p) : arr_(a), prev_(a.phase()) { arr_.set_phase(p); }
    ~PhaseScope() { arr_.set_phase(prev_); }
    PhaseScope(const PhaseScope&) = delete;
    PhaseScope& operator=(const PhaseScope&) = delete;

private:
    MeteredArray<T>& arr_;
    Phase prev_;
};

// Uniform binary search over [lo, lo+len): returns the number of elements
// strictly smaller than the probe, assuming the range is a sorted prefix of
// such elements followed by elements all >= the probe (buffer elements act
// as +infinity because every probe is an active element). Worst case cost is
// 1 + floor(log2 len) comparisons, never more.
template <class T>
std::size_t count_below(MeteredArray<T>& a, std::size_t lo, std::size_t len, ARef probe) {
    std::size_t cnt = 0;
    std::size_t step = std::size_t{1};
    while (step << 1 <= len && (step << 1) != 0) step <<= 1;  // bit_floor(len)
    for (; step > 0; step >>= 1) {
        std::size_t cand = cnt + step;
        if (cand <= len && a.less(slot_ref(lo + cand - 1), probe)) cnt = cand;
    }
    return cnt;
}

}  // namespace fgsort
