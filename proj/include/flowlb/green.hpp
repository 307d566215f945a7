#pragma once

#include <map>
#include <vector>

#include "monoid.hpp"

namespace flowlb {

/// Green's relations as canonical partitions of the element set
/// (classes sorted by least element, members ascending).
struct GreenClasses {
  std::vector<std::vector<int>> R, L, J, H;
  std::vector<int> r_of, l_of, j_of, h_of;
  std::vector<ElementSet> j_ideal;  // M a M for each J-class

  bool r_equiv(int a, int b) const { return r_of[a] == r_of[b]; }
  bool l_equiv(int a, int b) const { return l_of[a] == l_of[b]; }
  bool h_equiv(int a, int b) const { return h_of[a] == h_of[b]; }
  bool j_equiv(int a, int b) const { return j_of[a] == j_of[b]; }
  /// J_a <= J_b, i.e. MaM is contained in MbM.
  bool j_leq(int a, int b) const { return j_ideal[j_of[a]].subset_of(j_ideal[j_of[b]]); }
};

namespace detail {

inline void classes_from_keys(const std::vector<ElementSet>& key, std::vector<std::vector<int>>& cls,
                              std::vector<int>& of) {
  std::map<ElementSet, int> id;
  of.assign(key.size(), -1);
  for (std::size_t a = 0; a < key.size(); ++a) {
    auto [it, fresh] = id.emplace(key[a], static_cast<int>(cls.size()));
    if (fresh) cls.emplace_back();
    cls[it->second].push_back(static_cast<int>(a));
    of[a] = it->second;
  }
}

}  // namespace detail

inline GreenClasses green_classes(const FiniteMonoid& m) {
  const int n = m.size();
  std::vector<ElementSet> right(n, ElementSet(n)), left(n, ElementSet(n)), two(n, ElementSet(n));
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < n; ++s) {
      right[a].set(m.mul(a, s));
      left[a].set(m.mul(s, a));
    }
  for (int a = 0; a < n; ++a)
    for (int b : left[a].elements()) two[a] |= right[b];

  GreenClasses g;
  detail::classes_from_keys(right, g.R, g.r_of);
  detail::classes_from_keys(left, g.L, g.l_of);
  detail::classes_from_keys(two, g.J, g.j_of);
  for (auto& cls : g.J) g.j_ideal.push_back(two[cls.front()]);

  std::map<std::pair<int, int>, int> hid;
  g.h_of.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    auto [it, fresh] = hid.emplace(std::make_pair(g.r_of[a], g.l_of[a]), static_cast<int>(g.H.size()));
    if (fresh) g.H.emplace_back();
    g.H[it->second].push_back(a);
    g.h_of[a] = it->second;
  }
  return g;
}

}  // namespace flowlb
