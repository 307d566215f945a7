#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "monoid.hpp"

namespace flowlb {

/// K_G(T) for a submonoid T of M: the least submonoid of T closed under
/// weak conjugation s -> asb, bsa for a,b in T with aba = a.
inline ElementSet kG(const FiniteMonoid& m, const ElementSet& t) {
  std::vector<int> te = t.elements();
  std::vector<std::pair<int, int>> wc;  // all (a,b) with aba = a, computed once
  for (int a : te)
    for (int b : te)
      if (m.mul(m.mul(a, b), a) == a) wc.emplace_back(a, b);

  ElementSet k(m.size());
  std::vector<int> members, work;
  auto add = [&](int s) {
    if (!k.test(s)) {
      k.set(s);
      members.push_back(s);
      work.push_back(s);
    }
  };
  add(m.identity());
  while (!work.empty()) {
    int s = work.back();
    work.pop_back();
    for (auto [a, b] : wc) {
      add(m.mul(m.mul(a, s), b));
      add(m.mul(m.mul(b, s), a));
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      int u = members[i];
      add(m.mul(s, u));
      add(m.mul(u, s));
    }
  }
  return k;
}

inline ElementSet kG(const FiniteMonoid& m) {
  ElementSet all(m.size());
  for (int i = 0; i < m.size(); ++i) all.set(i);
  return kG(m, all);
}

struct TypeIOracle {
  enum class Kind { Trivial, Declared };
  Kind kind = Kind::Trivial;
  std::vector<std::vector<int>> declared;

  static TypeIOracle trivial() { return {}; }
  static TypeIOracle declare(std::vector<std::vector<int>> subsets) {
    return {Kind::Declared, std::move(subsets)};
  }
  std::string describe() const { return kind == Kind::Trivial ? "trivial" : "declared"; }
};

/// Oracle file: a JSON list of element-index arrays.
inline TypeIOracle load_oracle(const std::string& path) {
  auto j = detail::parse_json(detail::read_file(path));
  try {
    return TypeIOracle::declare(j.get<std::vector<std::vector<int>>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("oracle file: ") + e.what());
  }
}

inline bool is_submonoid(const FiniteMonoid& m, const ElementSet& s) {
  if (!s.test(m.identity())) return false;
  auto el = s.elements();
  for (int a : el)
    for (int b : el)
      if (!s.test(m.mul(a, b))) return false;
  return true;
}

inline std::vector<ElementSet> type_i_candidates(const FiniteMonoid& m, const TypeIOracle& o) {
  std::vector<ElementSet> out;
  if (o.kind == TypeIOracle::Kind::Trivial) {
    ElementSet one(m.size());
    one.set(m.identity());
    out.push_back(one);
    return out;
  }
  for (const auto& d : o.declared) {
    ElementSet s(m.size());
    for (int x : d) {
      if (x < 0 || x >= m.size()) throw Error(ErrorCode::NotASubmonoid, "element out of range");
      s.set(x);
    }
    if (!is_submonoid(m, s)) throw Error(ErrorCode::NotASubmonoid, "declared subset is not a submonoid");
    out.push_back(s);
  }
  return out;
}

struct LoopableCert {
  int element = -1;
  int level = 0;
  std::vector<std::pair<ElementSet, ElementSet>> chain;  // (Type I submonoid, its K_G)
};

/// n-loopability of s inside the submonoid `ambient` of M. Declared
/// candidates are consulted at every depth if they lie inside the ambient.
inline std::optional<LoopableCert> n_loopable(const FiniteMonoid& m, const ElementSet& ambient, int s, int n,
                                              const std::vector<ElementSet>& candidates) {
  if (!ambient.test(s)) return std::nullopt;
  if (n == 0) return LoopableCert{s, 0, {}};
  for (const auto& t : candidates) {
    if (!t.subset_of(ambient)) continue;
    ElementSet k = kG(m, t);
    if (!k.test(s)) continue;
    if (auto inner = n_loopable(m, k, s, n - 1, candidates)) {
      LoopableCert c{s, n, {}};
      c.chain.emplace_back(t, k);
      c.chain.insert(c.chain.end(), inner->chain.begin(), inner->chain.end());
      return c;
    }
  }
  return std::nullopt;
}

inline std::optional<LoopableCert> n_loopable(const FiniteMonoid& m, int s, int n, const TypeIOracle& o) {
  ElementSet all(m.size());
  for (int i = 0; i < m.size(); ++i) all.set(i);
  return n_loopable(m, all, s, n, type_i_candidates(m, o));
}

/// Memoizing certifier bound to one monoid, level and oracle.
class LoopableCertifier {
 public:
  LoopableCertifier(const FiniteMonoid& m, int level, TypeIOracle oracle)
      : m_(&m), level_(level), oracle_(std::move(oracle)), cands_(type_i_candidates(m, oracle_)) {}

  int level() const { return level_; }
  const TypeIOracle& oracle() const { return oracle_; }

  bool certified(int s) const {
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    ElementSet all(m_->size());
    for (int i = 0; i < m_->size(); ++i) all.set(i);
    bool ok = n_loopable(*m_, all, s, level_, cands_).has_value();
    memo_.emplace(s, ok);
    return ok;
  }

 private:
  const FiniteMonoid* m_;
  int level_;
  TypeIOracle oracle_;
  std::vector<ElementSet> cands_;
  mutable std::map<int, bool> memo_;
};

}  // namespace flowlb
