#pragma once

// Packed bit vector backed by 64-bit words. Bit i lives in word i/64 at bit
// position i%64, so dumping the words as little-endian bytes yields a stream
// where bit j sits in byte j/8 at position j%8 -- the on-disk layout.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bp5 {

class BitArray {
 public:
  BitArray() = default;
  explicit BitArray(std::uint64_t bits) : size_(bits), words_((bits + 63) / 64, 0) {}

  std::uint64_t size() const { return size_; }

  bool get(std::uint64_t i) const {
    check(i);
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  void set(std::uint64_t i, bool v) {
    check(i);
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  void fill(bool v) {
    const std::uint64_t w = v ? ~std::uint64_t{0} : std::uint64_t{0};
    for (auto& word : words_) word = w;
    mask_tail();
  }

  std::uint64_t count_ones() const {
    std::uint64_t n = 0;
    for (auto word : words_) n += static_cast<std::uint64_t>(std::popcount(word));
    return n;
  }

  // Unused high bits of the last word are kept zero, so word-wise equality
  // is bit-string equality.
  bool operator==(const BitArray&) const = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void check(std::uint64_t i) const {
    if (i >= size_) throw std::out_of_range("BitArray: bit index out of range");
  }

  void mask_tail() {
    if (!words_.empty() && (size_ & 63) != 0) {
      words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
    }
  }

  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace bp5
