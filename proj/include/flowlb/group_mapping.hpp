#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "green.hpp"
#include "monoid.hpp"

namespace flowlb {

struct SeparationWitness {
  int m, n, point;  // m*point != n*point (left) or point*m != point*n (right)
};

struct GroupMappingCert {
  std::vector<int> ideal;          // I = J u {0}, ascending
  std::vector<int> regular_class;  // J, the nonzero part of I
  std::optional<int> zero;
  std::vector<int> distinguished_R;
  std::vector<int> max_subgroup;  // an H-class of J containing an idempotent
  int subgroup_identity = -1;
  std::vector<SeparationWitness> left_witnesses, right_witnesses;
};

struct NotGroupMapping {
  std::string reason;  // no-nontrivial-group | left-unfaithful | right-unfaithful | no-0-minimal-regular-ideal
};

using GroupMappingResult = std::variant<GroupMappingCert, NotGroupMapping>;

inline std::optional<int> find_zero(const FiniteMonoid& m) {
  for (int z = 0; z < m.size(); ++z) {
    bool ok = true;
    for (int a = 0; a < m.size() && ok; ++a) ok = m.mul(z, a) == z && m.mul(a, z) == z;
    if (ok) return z;
  }
  return std::nullopt;
}

namespace detail {

// Separation witnesses for all pairs, or nullopt if some pair is not separated.
inline std::optional<std::vector<SeparationWitness>> separate(const FiniteMonoid& m,
                                                              const std::vector<int>& ideal,
                                                              bool left) {
  std::vector<SeparationWitness> out;
  for (int a = 0; a < m.size(); ++a)
    for (int b = a + 1; b < m.size(); ++b) {
      bool found = false;
      for (int i : ideal) {
        bool differ = left ? m.mul(a, i) != m.mul(b, i) : m.mul(i, a) != m.mul(i, b);
        if (differ) {
          out.push_back({a, b, i});
          found = true;
          break;
        }
      }
      if (!found) return std::nullopt;
    }
  return out;
}

}  // namespace detail

/// Decides the group mapping property. Without a zero element the minimal
/// ideal plays the role of I, provided it is a proper ideal.
inline GroupMappingResult check_group_mapping(const FiniteMonoid& m, const GreenClasses& g) {
  if (is_aperiodic(m)) return NotGroupMapping{"no-nontrivial-group"};
  auto zero = find_zero(m);

  std::vector<int> candidates;
  for (int j = 0; j < static_cast<int>(g.J.size()); ++j) {
    const auto& cls = g.J[j];
    if (zero && cls.size() == 1 && cls[0] == *zero) continue;
    bool minimal = true;
    for (int x : g.j_ideal[j].elements())
      if (g.j_of[x] != j && !(zero && x == *zero)) minimal = false;
    if (!minimal) continue;
    if (!zero && static_cast<int>(cls.size()) == m.size()) continue;  // I would be all of M
    auto idem = std::find_if(cls.begin(), cls.end(), [&](int x) { return is_idempotent(m, x); });
    if (idem == cls.end()) continue;
    if (g.H[g.h_of[*idem]].size() < 2) continue;
    candidates.push_back(j);
  }
  if (candidates.empty()) return NotGroupMapping{"no-0-minimal-regular-ideal"};

  std::string first_failure;
  for (int j : candidates) {
    GroupMappingCert c;
    c.zero = zero;
    c.regular_class = g.J[j];
    c.ideal = c.regular_class;
    if (zero) c.ideal.push_back(*zero);
    std::sort(c.ideal.begin(), c.ideal.end());
    auto lw = detail::separate(m, c.ideal, true);
    if (!lw) {
      if (first_failure.empty()) first_failure = "left-unfaithful";
      continue;
    }
    auto rw = detail::separate(m, c.ideal, false);
    if (!rw) {
      if (first_failure.empty()) first_failure = "right-unfaithful";
      continue;
    }
    c.left_witnesses = std::move(*lw);
    c.right_witnesses = std::move(*rw);
    // Least element of J with a nontrivial H-class fixes R.
    int least = -1;
    for (int x : c.regular_class)
      if (g.H[g.h_of[x]].size() > 1) {
        least = x;
        break;
      }
    c.distinguished_R = g.R[g.r_of[least]];
    for (int x : c.distinguished_R)
      if (is_idempotent(m, x)) {
        c.subgroup_identity = x;
        c.max_subgroup = g.H[g.h_of[x]];
        break;
      }
    return c;
  }
  return NotGroupMapping{first_failure};
}

inline GroupMappingResult check_group_mapping(const FiniteMonoid& m) {
  return check_group_mapping(m, green_classes(m));
}

/// Convenience: the certificate or an Error naming the failed condition.
inline GroupMappingCert require_group_mapping(const FiniteMonoid& m) {
  auto r = check_group_mapping(m);
  if (auto* bad = std::get_if<NotGroupMapping>(&r))
    throw Error(ErrorCode::NotGroupMapping, bad->reason);
  return std::get<GroupMappingCert>(r);
}

// ---------------------------------------------------------------------------
// RLM(M)

struct RLM {
  std::vector<std::vector<int>> l_classes;  // L-classes of J, canonical order
  PartialAction action;                     // M acting on l_classes
  FiniteMonoid monoid;                      // faithful quotient
  std::vector<int> quotient;                // M element -> RLM element
};

inline RLM rlm(const FiniteMonoid& m, const GroupMappingCert& cert, const GreenClasses& g) {
  RLM out;
  std::map<int, int> point_of_lclass;
  for (int x : cert.regular_class) {
    auto [it, fresh] = point_of_lclass.emplace(g.l_of[x], static_cast<int>(out.l_classes.size()));
    if (fresh) out.l_classes.emplace_back();
    out.l_classes[it->second].push_back(x);
  }
  const int pts = static_cast<int>(out.l_classes.size());
  ElementSet in_j(m.size());
  for (int x : cert.regular_class) in_j.set(x);

  out.action.points = pts;
  out.action.monoid_size = m.size();
  out.action.table.assign(static_cast<std::size_t>(pts) * m.size(), kUndefined);
  for (int p = 0; p < pts; ++p)
    for (int s = 0; s < m.size(); ++s) {
      int y = m.mul(out.l_classes[p].front(), s);
      out.action.table[static_cast<std::size_t>(p) * m.size() + s] =
          in_j.test(y) ? point_of_lclass.at(g.l_of[y]) : kUndefined;
    }

  std::map<std::vector<int>, int> elem_of;
  std::vector<std::vector<int>> maps;
  std::vector<std::string> names;
  out.quotient.resize(m.size());
  for (int s = 0; s < m.size(); ++s) {
    std::vector<int> f(pts);
    for (int p = 0; p < pts; ++p) f[p] = out.action.act(p, s);
    auto [it, fresh] = elem_of.emplace(f, static_cast<int>(maps.size()));
    if (fresh) {
      maps.push_back(f);
      names.push_back(m.name(s));
    }
    out.quotient[s] = it->second;
  }
  const int k = static_cast<int>(maps.size());
  std::vector<int> table(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      std::vector<int> f(pts);
      for (int p = 0; p < pts; ++p) f[p] = maps[a][p] == kUndefined ? kUndefined : maps[b][maps[a][p]];
      table[static_cast<std::size_t>(a) * k + b] = elem_of.at(f);
    }
  std::vector<std::pair<std::string, int>> gens;
  for (auto& [nm, e] : m.generators()) gens.emplace_back(nm, out.quotient[e]);
  out.monoid = FiniteMonoid(k, std::move(table), out.quotient[m.identity()], std::move(gens),
                            m.has_names() ? names : std::vector<std::string>{});
  return out;
}

}  // namespace flowlb
