#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace flowlb {

/// Subset of a universe of at most 64 points.
using Mask = std::uint64_t;

inline constexpr int kMaxPoints = 64;

inline constexpr Mask bit(int i) { return Mask{1} << i; }
inline int popcount(Mask m) { return std::popcount(m); }
inline int lowest(Mask m) { return std::countr_zero(m); }
inline bool contains(Mask m, int i) { return (m >> i) & 1U; }
inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }
inline Mask full_mask(int n) { return n >= 64 ? ~Mask{0} : bit(n) - 1; }

template <class F>
inline void for_each_bit(Mask m, F&& f) {
  while (m) {
    int i = std::countr_zero(m);
    f(i);
    m &= m - 1;
  }
}

/// Fixed-width bitset over an arbitrary universe, sized at runtime.
class ElementSet {
 public:
  ElementSet() = default;
  explicit ElementSet(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t universe() const { return n_; }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w_) c += std::popcount(x);
    return c;
  }
  bool empty() const {
    for (auto x : w_)
      if (x) return false;
    return true;
  }
  bool subset_of(const ElementSet& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  ElementSet& operator|=(const ElementSet& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  ElementSet& operator&=(const ElementSet& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  friend bool operator==(const ElementSet&, const ElementSet&) = default;
  friend auto operator<=>(const ElementSet& a, const ElementSet& b) {
    return a.w_ <=> b.w_;
  }

  std::vector<int> elements() const {
    std::vector<int> out;
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      auto x = w_[wi];
      while (x) {
        out.push_back(static_cast<int>(wi * 64 + std::countr_zero(x)));
        x &= x - 1;
      }
    }
    return out;
  }

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : w_) h = (h ^ x) * 1099511628211ULL;
    return h;
  }

  const std::vector<std::uint64_t>& words() const { return w_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

struct ElementSetHash {
  std::size_t operator()(const ElementSet& s) const { return s.hash(); }
};

/// Plain union-find with path halving; used for joins and block merging.
class UnionFind {
 public:
  explicit UnionFind(int n) : p_(n) {
    for (int i = 0; i < n; ++i) p_[i] = i;
  }
  int find(int x) {
    while (p_[x] != x) {
      p_[x] = p_[p_[x]];
      x = p_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    p_[b] = a;
    return true;
  }

 private:
  std::vector<int> p_;
};

}  // namespace flowlb
