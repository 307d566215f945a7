#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "green.hpp"
#include "group_mapping.hpp"
#include "monoid.hpp"

namespace flowlb {

inline constexpr int kZeroEntry = -1;

/// Coordinates J ~ M0(G, A, B, C) for a regular J-class J.
/// Group elements are indexed 0..|G|-1 with 0 the identity; sandwich[b][a]
/// is a group index or kZeroEntry.
struct ReesCoordinates {
  std::vector<int> group_elements;  // M indices, [0] is the idempotent e
  FiniteMonoid group;
  int rows = 0, cols = 0;
  std::vector<std::vector<int>> sandwich;         // cols x rows
  std::vector<std::array<int, 3>> coords;         // per M element; {-1,-1,-1} outside J
  std::map<std::array<int, 3>, int> element_at;  // (a,g,b) -> M index

  int element(int a, int g, int b) const { return element_at.at({a, g, b}); }
  bool in_class(int x) const { return coords[x][0] >= 0; }
  int ginv(int g) const {
    for (int h = 0; h < group.size(); ++h)
      if (group.mul(g, h) == 0) return h;
    return -1;
  }
};

inline ReesCoordinates rees_coordinatize(const FiniteMonoid& m, const GreenClasses& gr,
                                         const std::vector<int>& jclass) {
  ReesCoordinates rc;
  const int n = m.size();
  // Rows: R-classes by least element. Columns: the column of e first.
  std::vector<int> row_ids, col_ids;
  for (int x : jclass)
    if (std::find(row_ids.begin(), row_ids.end(), gr.r_of[x]) == row_ids.end()) row_ids.push_back(gr.r_of[x]);
  int e = -1;
  for (int x : gr.R[row_ids[0]])
    if (is_idempotent(m, x)) {
      e = x;
      break;
    }
  if (e < 0) throw Error(ErrorCode::NotRegular, "first row has no idempotent");
  col_ids.push_back(gr.l_of[e]);
  for (int x : jclass)
    if (std::find(col_ids.begin(), col_ids.end(), gr.l_of[x]) == col_ids.end()) col_ids.push_back(gr.l_of[x]);
  rc.rows = static_cast<int>(row_ids.size());
  rc.cols = static_cast<int>(col_ids.size());
  auto row_of = [&](int x) { return static_cast<int>(std::find(row_ids.begin(), row_ids.end(), gr.r_of[x]) - row_ids.begin()); };
  auto col_of = [&](int x) { return static_cast<int>(std::find(col_ids.begin(), col_ids.end(), gr.l_of[x]) - col_ids.begin()); };
  auto hclass = [&](int a, int b) {
    std::vector<int> h;
    for (int x : jclass)
      if (row_of(x) == a && col_of(x) == b) h.push_back(x);
    return h;
  };
  auto pick = [&](const std::vector<int>& h) {
    for (int x : h)
      if (is_idempotent(m, x)) return x;
    return h.front();
  };

  rc.group_elements.push_back(e);
  for (int x : gr.H[gr.h_of[e]])
    if (x != e) rc.group_elements.push_back(x);
  const int gsz = static_cast<int>(rc.group_elements.size());
  std::vector<int> gidx(n, -1);
  for (int i = 0; i < gsz; ++i) gidx[rc.group_elements[i]] = i;
  std::vector<int> gt(static_cast<std::size_t>(gsz) * gsz);
  for (int i = 0; i < gsz; ++i)
    for (int k = 0; k < gsz; ++k) gt[static_cast<std::size_t>(i) * gsz + k] = gidx[m.mul(rc.group_elements[i], rc.group_elements[k])];
  std::vector<std::string> gnames;
  for (int x : rc.group_elements) gnames.push_back(m.name(x));
  rc.group = FiniteMonoid(gsz, std::move(gt), 0, {}, gnames);

  std::vector<int> r(rc.rows), q(rc.cols);
  for (int a = 0; a < rc.rows; ++a) r[a] = a == 0 ? e : pick(hclass(a, 0));
  for (int b = 0; b < rc.cols; ++b) q[b] = b == 0 ? e : pick(hclass(0, b));

  rc.sandwich.assign(rc.cols, std::vector<int>(rc.rows, kZeroEntry));
  for (int b = 0; b < rc.cols; ++b)
    for (int a = 0; a < rc.rows; ++a) {
      int p = m.mul(q[b], r[a]);
      if (gidx[p] >= 0) rc.sandwich[b][a] = gidx[p];
    }
  for (int b = 0; b < rc.cols; ++b)
    if (std::all_of(rc.sandwich[b].begin(), rc.sandwich[b].end(), [](int v) { return v == kZeroEntry; }))
      throw Error(ErrorCode::NotRegular, "sandwich column " + std::to_string(b) + " is zero");
  for (int a = 0; a < rc.rows; ++a) {
    bool any = false;
    for (int b = 0; b < rc.cols; ++b) any |= rc.sandwich[b][a] != kZeroEntry;
    if (!any) throw Error(ErrorCode::NotRegular, "sandwich row " + std::to_string(a) + " is zero");
  }

  rc.coords.assign(n, {-1, -1, -1});
  for (int x : jclass) {
    int a = row_of(x), b = col_of(x);
    for (int gi = 0; gi < gsz; ++gi)
      if (m.mul(m.mul(r[a], rc.group_elements[gi]), q[b]) == x) {
        rc.coords[x] = {a, gi, b};
        rc.element_at[{a, gi, b}] = x;
        break;
      }
    if (rc.coords[x][0] < 0) throw Error(ErrorCode::NotRegular, "element " + m.name(x) + " has no coordinates");
  }
  return rc;
}

inline ReesCoordinates rees_coordinatize(const FiniteMonoid& m, const GroupMappingCert& cert) {
  return rees_coordinatize(m, green_classes(m), cert.regular_class);
}

// ---------------------------------------------------------------------------
// Construction of M0(G, A, B, C) with an identity adjoined.

/// Elements: 0 = adjoined identity "I", then triples (a,g,b) in
/// lexicographic order, then the zero "0". Names look like a0_g_b1.
/// `sandwich[b][a]` is a group index or kZeroEntry. Generators are given
/// as (name, element index) pairs.
inline FiniteMonoid rees_matrix_monoid(const FiniteMonoid& group, int rows, int cols,
                                       const std::vector<std::vector<int>>& sandwich,
                                       std::vector<std::pair<std::string, int>> generators) {
  const int g = group.size();
  const int n = 2 + rows * g * cols;
  const int zero = n - 1;
  auto idx = [&](int a, int h, int b) { return 1 + (a * g + h) * cols + b; };
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  std::vector<std::array<int, 3>> tr(n, {-1, -1, -1});
  for (int a = 0; a < rows; ++a)
    for (int h = 0; h < g; ++h)
      for (int b = 0; b < cols; ++b) tr[idx(a, h, b)] = {a, h, b};
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      int v;
      if (x == 0) v = y;
      else if (y == 0) v = x;
      else if (x == zero || y == zero) v = zero;
      else {
        auto [a, h, b] = tr[x];
        auto [a2, h2, b2] = tr[y];
        int c = sandwich[b][a2];
        v = c == kZeroEntry ? zero : idx(a, group.mul(group.mul(h, c), h2), b2);
      }
      table[static_cast<std::size_t>(x) * n + y] = v;
    }
  std::vector<std::string> names(n);
  names[0] = "I";
  names[zero] = "0";
  for (int a = 0; a < rows; ++a)
    for (int h = 0; h < g; ++h)
      for (int b = 0; b < cols; ++b)
        names[idx(a, h, b)] = "a" + std::to_string(a) + "_" + group.name(h) + "_b" + std::to_string(b);
  return FiniteMonoid(n, std::move(table), 0, std::move(generators), std::move(names));
}

/// Cyclic group Z_k with elements named 1, g, g2, ...
inline FiniteMonoid cyclic_group(int k) {
  std::vector<int> t(static_cast<std::size_t>(k) * k);
  std::vector<std::string> names(k);
  for (int i = 0; i < k; ++i) {
    names[i] = i == 0 ? "1" : (i == 1 ? "g" : "g" + std::to_string(i));
    for (int j = 0; j < k; ++j) t[static_cast<std::size_t>(i) * k + j] = (i + j) % k;
  }
  std::vector<std::pair<std::string, int>> gens;
  if (k > 1) gens.emplace_back("g", 1);
  return FiniteMonoid(k, std::move(t), 0, std::move(gens), std::move(names));
}

/// The running example M1 = M0(Z2, 2, 2, [[1,1],[1,g]]) with identity,
/// generated by x = a0_1_b0, y = a1_1_b1 and the zero z.
inline FiniteMonoid m1_monoid() {
  auto z2 = cyclic_group(2);
  // index of (a,h,b) is 1 + (a*2 + h)*2 + b
  return rees_matrix_monoid(z2, 2, 2, {{0, 0}, {0, 1}}, {{"x", 1}, {"y", 6}, {"z", 9}});
}

}  // namespace flowlb
