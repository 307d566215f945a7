#pragma once

#include <string>
#include <vector>

#include "green.hpp"
#include "group_mapping.hpp"
#include "monoid.hpp"
#include "set_partition.hpp"

namespace flowlb {

/// Right action of M on the distinguished R-class, in local point indices
/// 0..|R|-1 (ascending element order). Products leaving R are undefined.
struct RAction {
  const FiniteMonoid* monoid = nullptr;
  std::vector<int> R;        // local -> element
  std::vector<int> local;    // element -> local or -1
  std::vector<int> table;    // |M| x |R|
  std::vector<int> h_class;  // local -> H-class id in M

  int k() const { return static_cast<int>(R.size()); }
  int act(int r, int z) const { return r < 0 ? kUndefined : table[static_cast<std::size_t>(z) * k() + r]; }
  const int* map_of(int z) const { return &table[static_cast<std::size_t>(z) * k()]; }
  std::vector<int> element_map(int z) const { return {map_of(z), map_of(z) + k()}; }
  std::vector<std::vector<int>> letter_maps() const {
    std::vector<std::vector<int>> out;
    for (int x = 0; x < monoid->num_generators(); ++x) out.push_back(element_map(monoid->generator_element(x)));
    return out;
  }
  bool h_equiv(int r, int s) const { return h_class[r] == h_class[s]; }

  /// Image mask of a set of points under z.
  Mask image(Mask y, int z) const {
    Mask out = 0;
    const int* f = map_of(z);
    for_each_bit(y, [&](int r) {
      if (f[r] >= 0) out |= bit(f[r]);
    });
    return out;
  }

  PointNamer namer() const {
    return [this](int r) { return monoid->name(R[r]); };
  }
  int lookup(const std::string& name) const {
    for (int r = 0; r < k(); ++r)
      if (monoid->name(R[r]) == name) return r;
    return -1;
  }
};

inline RAction make_r_action(const FiniteMonoid& m, const GroupMappingCert& cert, const GreenClasses& g) {
  RAction ra;
  ra.monoid = &m;
  ra.R = cert.distinguished_R;
  if (ra.k() > kMaxPoints) throw Error(ErrorCode::TooLarge, "|R| exceeds " + std::to_string(kMaxPoints));
  ra.local.assign(m.size(), -1);
  for (int i = 0; i < ra.k(); ++i) ra.local[ra.R[i]] = i;
  ra.table.resize(static_cast<std::size_t>(m.size()) * ra.k());
  for (int z = 0; z < m.size(); ++z)
    for (int r = 0; r < ra.k(); ++r) ra.table[static_cast<std::size_t>(z) * ra.k() + r] = ra.local[m.mul(ra.R[r], z)];
  for (int r : ra.R) ra.h_class.push_back(g.h_of[r]);
  return ra;
}

}  // namespace flowlb
