#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace moca {

/// Growable bit set used for relation rows (predecessor sets).
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}

  bool test(std::size_t i) const {
    std::size_t w = i / 64;
    return w < words_.size() && ((words_[w] >> (i % 64)) & 1u);
  }
  void set(std::size_t i) {
    std::size_t w = i / 64;
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (i % 64);
  }
  void reset(std::size_t i) {
    std::size_t w = i / 64;
    if (w < words_.size()) words_[w] &= ~(std::uint64_t{1} << (i % 64));
  }
  Bits& operator|=(const Bits& o) {
    if (o.words_.size() > words_.size()) words_.resize(o.words_.size(), 0);
    for (std::size_t w = 0; w < o.words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }
  /// this &= ~o
  Bits& subtract(const Bits& o) {
    std::size_t n = std::min(words_.size(), o.words_.size());
    for (std::size_t w = 0; w < n; ++w) words_[w] &= ~o.words_[w];
    return *this;
  }
  bool intersects(const Bits& o) const {
    std::size_t n = std::min(words_.size(), o.words_.size());
    for (std::size_t w = 0; w < n; ++w)
      if (words_[w] & o.words_[w]) return true;
    return false;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool operator==(const Bits& o) const {
    std::size_t n = std::max(words_.size(), o.words_.size());
    for (std::size_t w = 0; w < n; ++w) {
      std::uint64_t a = w < words_.size() ? words_[w] : 0;
      std::uint64_t b = w < o.words_.size() ? o.words_[w] : 0;
      if (a != b) return false;
    }
    return true;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        int b = std::countr_zero(bits);
        fn(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  std::vector<int> to_vector() const {
    std::vector<int> out;
    for_each([&](std::size_t i) { out.push_back(static_cast<int>(i)); });
    return out;
  }

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace moca
