#pragma once

// A P-bit memory simulated by two sorted element regions. Pairing the j-th
// element of the left region with the j-th of the right region encodes one
// bit: swapped order means 1, natural order means 0. Reading costs a single
// comparison; writing costs one comparison plus, when the stored bit differs,
// one swap (3 moves). On top of the bits sit fixed-width pointer words that
// hold segment ordinals (0 is NIL).
//
// Precondition for existence: every left-region element is strictly smaller
// than every right-region element, so a pair is never ambiguous.

#include <cstdint>

#include "metered.hpp"

namespace fgsort {

template <class T>
class PointerMemory {
public:
    PointerMemory(MeteredArray<T>& a, std::size_t left_base, std::size_t right_base,
                  uint64_t capacity_bits, uint32_t word_width)
        : arr_(&a),
          left_(left_base),
          right_(right_base),
          bits_(capacity_bits),
          width_(word_width) {
        require(width_ >= 1 && width_ <= 63, "pointer word width out of range");
    }

    uint64_t capacity_bits() const { return bits_; }
    uint32_t word_width() const { return width_; }
    uint64_t word_count() const { return bits_ / width_; }

    bool read_bit(uint64_t j) {
        require(j < bits_, "bit index out of range");
        return arr_->less(right_ + j, left_ + j);  // swapped pair encodes 1
    }

    void set_bit(uint64_t j, bool v) {
        if (read_bit(j) != v) arr_->swap_slots(left_ + j, right_ + j);
    }

    // Word k occupies bits [k*width, (k+1)*width), most significant first.
    uint64_t read_word(uint64_t k) {
        require(k < word_count(), "word index out of range");
        uint64_t v = 0;
        for (uint32_t b = 0; b < width_; ++b) v = (v << 1) | (read_bit(k * width_ + b) ? 1 : 0);
        return v;
    }

    void write_word(uint64_t k, uint64_t v) {
        require(k < word_count(), "word index out of range");
        require(v < (uint64_t{1} << width_), "word value does not fit");
        for (uint32_t b = 0; b < width_; ++b)
            set_bit(k * width_ + b, (v >> (width_ - 1 - b)) & 1);
    }

    // Read-and-clear the source word, then encode its value at the target.
    uint64_t move_word(uint64_t src, uint64_t dst) {
        require(src < word_count() && dst < word_count(), "word index out of range");
        require(src != dst, "move_word onto itself");
        uint64_t v = 0;
        for (uint32_t b = 0; b < width_; ++b) {
            uint64_t j = src * width_ + b;
            bool bit = read_bit(j);
            if (bit) arr_->swap_slots(left_ + j, right_ + j);  // clear
            v = (v << 1) | (bit ? 1 : 0);
        }
        write_word(dst, v);
        return v;
    }

    // Reset every bit; both regions end up sorted again because each pair is
    // restored to its natural order.
    void clear_all() {
        for (uint64_t j = 0; j < bits_; ++j) set_bit(j, false);
    }

    // Uncounted observers for verification code.
    bool peek_bit(uint64_t j) const {
        require(j < bits_, "bit index out of range");
        return arr_->peek(right_ + j) < arr_->peek(left_ + j);
    }
    uint64_t peek_word(uint64_t k) const {
        require(k < word_count(), "word index out of range");
        uint64_t v = 0;
        for (uint32_t b = 0; b < width_; ++b) v = (v << 1) | (peek_bit(k * width_ + b) ? 1 : 0);
        return v;
    }

private:
    MeteredArray<T>* arr_;
    std::size_t left_;
    std::size_t right_;
    uint64_t bits_;
    uint32_t width_;
};

}  // namespace fgsort
