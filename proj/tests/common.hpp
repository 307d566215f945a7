#pragma once

// Shared fixtures for the test binaries.

#include <memory>
#include <string>
#include <vector>

#include "flowlb/flowlb.hpp"

namespace flowlb::testing {

inline const std::string kData = FLOWLB_DATA_DIR;

/// A group mapping monoid with its certificate and Green classes, kept
/// alive together because EvalContext holds references into them.
struct Instance {
  FiniteMonoid m;
  GreenClasses g;
  GroupMappingCert cert;
  explicit Instance(FiniteMonoid mon) : m(std::move(mon)), g(green_classes(m)), cert(require_group_mapping(m)) {}
  std::unique_ptr<EvalContext> context(int level, TypeIOracle o = TypeIOracle::trivial()) const {
    return std::make_unique<EvalContext>(m, cert, g, level, std::move(o));
  }
};

inline std::vector<std::vector<int>> words_up_to(int letters, int max_len) {
  std::vector<std::vector<int>> out{{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (static_cast<int>(out[i].size()) == max_len) continue;
    for (int x = 0; x < letters; ++x) {
      auto w = out[i];
      w.push_back(x);
      out.push_back(w);
    }
  }
  return out;
}

/// Terms with at most `size` letters and at most one ω+★ (whose body is a
/// nonempty word): all words, and u (v)^w* w.
inline std::vector<FlowTerm> small_terms(int letters, int size) {
  std::vector<FlowTerm> out;
  auto ws = words_up_to(letters, size);
  for (const auto& w : ws) out.push_back(FlowTerm::word(w));
  for (const auto& u : ws)
    for (const auto& v : ws) {
      if (v.empty() || u.size() + v.size() > static_cast<std::size_t>(size)) continue;
      FlowTerm body = FlowTerm::word(v);
      if (body.is_proper_power()) continue;
      for (const auto& w : ws) {
        if (u.size() + v.size() + w.size() > static_cast<std::size_t>(size)) continue;
        out.push_back(FlowTerm::concat(FlowTerm::concat(FlowTerm::word(u), FlowTerm::omega_star(body)), FlowTerm::word(w)));
      }
    }
  return out;
}

}  // namespace flowlb::testing
