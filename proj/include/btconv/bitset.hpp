#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "btconv/error.hpp"

namespace btconv {

// Fixed-size bitset over {0..size-1}. The tag keeps cell sets and vertex
// sets from mixing at compile time.
template <class Tag>
class BasicBitset {
 public:
  BasicBitset() = default;
  explicit BasicBitset(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}
  BasicBitset(std::size_t size, std::initializer_list<std::size_t> members)
      : BasicBitset(size) {
    for (std::size_t m : members) insert(m);
  }

  static BasicBitset full(std::size_t size) {
    BasicBitset b(size);
    for (auto& w : b.words_) w = ~std::uint64_t{0};
    b.trim();
    return b;
  }

  template <class It>
  static BasicBitset from_members(std::size_t size, It first, It last) {
    BasicBitset b(size);
    for (; first != last; ++first) b.insert(static_cast<std::size_t>(*first));
    return b;
  }
  static BasicBitset from_members(std::size_t size, const std::vector<std::size_t>& m) {
    return from_members(size, m.begin(), m.end());
  }

  std::size_t size() const { return size_; }

  bool contains(std::size_t i) const {
    return i < size_ && ((words_[i / 64] >> (i % 64)) & 1u);
  }
  void insert(std::size_t i) {
    check_index(i);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  void erase(std::size_t i) {
    check_index(i);
    words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  // Smallest member >= from, or size() if none.
  std::size_t next(std::size_t from) const {
    if (from >= size_) return size_;
    std::size_t wi = from / 64;
    std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from % 64));
    while (true) {
      if (w) return wi * 64 + static_cast<std::size_t>(std::countr_zero(w));
      if (++wi == words_.size()) return size_;
      w = words_[wi];
    }
  }
  std::size_t first() const { return next(0); }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = first(); i < size_; i = next(i + 1)) f(i);
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  BasicBitset& operator|=(const BasicBitset& o) {
    check_same(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  BasicBitset& operator&=(const BasicBitset& o) {
    check_same(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  BasicBitset& operator-=(const BasicBitset& o) {
    check_same(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  friend BasicBitset operator|(BasicBitset a, const BasicBitset& b) { return a |= b; }
  friend BasicBitset operator&(BasicBitset a, const BasicBitset& b) { return a &= b; }
  friend BasicBitset operator-(BasicBitset a, const BasicBitset& b) { return a -= b; }

  BasicBitset complement() const {
    BasicBitset c(size_);
    for (std::size_t i = 0; i < words_.size(); ++i) c.words_[i] = ~words_[i];
    c.trim();
    return c;
  }

  bool is_subset_of(const BasicBitset& o) const {
    check_same(o);
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  bool is_disjoint(const BasicBitset& o) const {
    check_same(o);
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return false;
    return true;
  }
  bool intersects(const BasicBitset& o) const { return !is_disjoint(o); }

  friend bool operator==(const BasicBitset& a, const BasicBitset& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

  // "{0,3,7}", used by diagnostics and tests.
  std::string to_string() const {
    std::string s = "{";
    bool first_member = true;
    for_each([&](std::size_t i) {
      if (!first_member) s += ",";
      s += std::to_string(i);
      first_member = false;
    });
    return s + "}";
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= size_)
      throw ValidationError("index " + std::to_string(i) + " outside universe of size " +
                            std::to_string(size_));
  }
  void check_same(const BasicBitset& o) const {
    if (size_ != o.size_)
      throw Error("set operands over different universes (" + std::to_string(size_) +
                  " vs " + std::to_string(o.size_) + ")");
  }
  void trim() {
    if (size_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct CellTag {};
struct VertexTag {};

using Region = BasicBitset<CellTag>;
using VertexSet = BasicBitset<VertexTag>;

using CellId = std::size_t;
using VertexId = std::size_t;

}  // namespace btconv
