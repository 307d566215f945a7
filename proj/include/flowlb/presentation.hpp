#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "flow_explicit.hpp"
#include "monoid.hpp"
#include "r_action.hpp"
#include "set_partition.hpp"

namespace flowlb {

/// Partial deterministic automaton over the generator alphabet of M.
struct PartialAutomaton {
  std::vector<std::string> state_names;
  std::vector<std::string> alphabet;  // letter names, in generator order
  std::vector<int> delta;             // states x letters, -1 when undefined

  int states() const { return static_cast<int>(state_names.size()); }
  int letters() const { return static_cast<int>(alphabet.size()); }
  int next(int q, int x) const { return delta[static_cast<std::size_t>(q) * letters() + x]; }
  void set(int q, int x, int q2) { delta[static_cast<std::size_t>(q) * letters() + x] = q2; }

  static PartialAutomaton empty(int n, const std::vector<std::string>& alphabet) {
    PartialAutomaton a;
    for (int q = 0; q < n; ++q) a.state_names.push_back("q" + std::to_string(q));
    a.alphabet = alphabet;
    a.delta.assign(static_cast<std::size_t>(n) * alphabet.size(), -1);
    return a;
  }
  int state_index(const std::string& s) const {
    for (int q = 0; q < states(); ++q)
      if (state_names[q] == s) return q;
    return -1;
  }
};

using FlowLabeling = std::vector<SetPartition>;  // indexed by state

inline std::vector<std::string> alphabet_of(const FiniteMonoid& m) {
  std::vector<std::string> a;
  for (int x = 0; x < m.num_generators(); ++x) a.push_back(m.generator_name(x));
  return a;
}

// ---------------------------------------------------------------------------
// File formats

inline PartialAutomaton automaton_from_json(const nlohmann::ordered_json& j, const FiniteMonoid& m) {
  PartialAutomaton a;
  try {
    const auto& st = j.at("states");
    if (st.is_number_integer()) {
      for (int q = 0; q < st.get<int>(); ++q) a.state_names.push_back(std::to_string(q));
    } else {
      for (const auto& s : st) a.state_names.push_back(s.is_string() ? s.get<std::string>() : s.dump());
    }
    std::vector<std::string> alpha = j.at("alphabet").get<std::vector<std::string>>();
    if (alpha.size() != static_cast<std::size_t>(m.num_generators()))
      throw Error(ErrorCode::InvalidArgument, "alphabet size differs from the generator count");
    for (const auto& x : alpha)
      if (!m.letter_index(x)) throw Error(ErrorCode::InvalidArgument, "alphabet letter '" + x + "' is not a generator");
    a.alphabet = alphabet_of(m);
    a.delta.assign(static_cast<std::size_t>(a.states()) * a.letters(), -1);
    auto state_of = [&](const nlohmann::ordered_json& v) {
      int q = v.is_number_integer() ? v.get<int>() : a.state_index(v.get<std::string>());
      if (v.is_number_integer() && !st.is_number_integer()) q = a.state_index(std::to_string(q));
      if (q < 0 || q >= a.states()) throw Error(ErrorCode::ParseError, "unknown state " + v.dump());
      return q;
    };
    for (const auto& t : j.at("delta")) {
      if (!t.is_array() || t.size() != 3) throw Error(ErrorCode::ParseError, "delta entries are [q, x, q'] triples");
      int q = state_of(t[0]);
      auto x = m.letter_index(t[1].get<std::string>());
      if (!x) throw Error(ErrorCode::ParseError, "unknown letter " + t[1].dump());
      int q2 = state_of(t[2]);
      if (a.next(q, *x) >= 0 && a.next(q, *x) != q2)
        throw Error(ErrorCode::ParseError, "nondeterministic transition at " + a.state_names[q] + "," + t[1].dump());
      a.set(q, *x, q2);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("automaton: ") + e.what());
  }
  return a;
}

inline PartialAutomaton load_automaton(const std::string& path, const FiniteMonoid& m) {
  return automaton_from_json(detail::parse_json(detail::read_file(path)), m);
}

inline nlohmann::ordered_json automaton_to_json(const PartialAutomaton& a) {
  nlohmann::ordered_json d = nlohmann::ordered_json::array();
  for (int q = 0; q < a.states(); ++q)
    for (int x = 0; x < a.letters(); ++x)
      if (a.next(q, x) >= 0) d.push_back({a.state_names[q], a.alphabet[x], a.state_names[a.next(q, x)]});
  return {{"states", a.state_names}, {"alphabet", a.alphabet}, {"delta", d}};
}

/// Labeling file: an object mapping state names to set-partition text.
inline FlowLabeling labeling_from_json(const nlohmann::ordered_json& j, const PartialAutomaton& a, const RAction& ra) {
  FlowLabeling f(a.states(), SetPartition::bottom(ra.k()));
  std::vector<bool> seen(a.states(), false);
  try {
    for (const auto& [name, val] : j.items()) {
      int q = a.state_index(name);
      if (q < 0) throw Error(ErrorCode::ParseError, "labeling names unknown state '" + name + "'");
      f[q] = parse_set_partition(val.get<std::string>(), ra.k(), [&](const std::string& s) { return ra.lookup(s); });
      seen[q] = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("labeling: ") + e.what());
  }
  for (int q = 0; q < a.states(); ++q)
    if (!seen[q]) throw Error(ErrorCode::ParseError, "labeling misses state '" + a.state_names[q] + "'");
  return f;
}

inline FlowLabeling load_labeling(const std::string& path, const PartialAutomaton& a, const RAction& ra) {
  return labeling_from_json(detail::parse_json(detail::read_file(path)), a, ra);
}

inline nlohmann::ordered_json labeling_to_json(const FlowLabeling& f, const PartialAutomaton& a, const RAction& ra) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (int q = 0; q < a.states(); ++q) j[a.state_names[q]] = to_text(f[q], ra.namer());
  return j;
}

// ---------------------------------------------------------------------------
// Transition monoid

/// Transition monoid of the automaton as a monoid of partial maps on the
/// states, generated by the letters. Element 0 is the identity.
struct TransitionMonoid {
  FiniteMonoid monoid;
  std::vector<std::vector<int>> maps;
};

inline TransitionMonoid transition_monoid(const PartialAutomaton& a, std::size_t max_size = 1u << 16) {
  const int n = a.states();
  std::vector<std::vector<int>> maps;
  std::map<std::vector<int>, int> index;
  auto add = [&](std::vector<int> f) {
    auto it = index.find(f);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(maps.size());
    index.emplace(f, id);
    maps.push_back(std::move(f));
    if (maps.size() > max_size) throw Error(ErrorCode::TooLarge, "transition monoid too large");
    return id;
  };
  std::vector<int> idm(n);
  for (int q = 0; q < n; ++q) idm[q] = q;
  add(idm);
  std::vector<int> letter_ids;
  for (int x = 0; x < a.letters(); ++x) {
    std::vector<int> f(n);
    for (int q = 0; q < n; ++q) f[q] = a.next(q, x);
    letter_ids.push_back(add(f));
  }
  for (std::size_t i = 0; i < maps.size(); ++i)
    for (int x = 0; x < a.letters(); ++x) {
      std::vector<int> f(n);
      for (int q = 0; q < n; ++q) f[q] = maps[i][q] < 0 ? -1 : a.next(maps[i][q], x);
      add(f);
    }
  const int sz = static_cast<int>(maps.size());
  std::vector<int> table(static_cast<std::size_t>(sz) * sz);
  for (int i = 0; i < sz; ++i)
    for (int j = 0; j < sz; ++j) {
      std::vector<int> f(n);
      for (int q = 0; q < n; ++q) f[q] = maps[i][q] < 0 ? -1 : maps[j][maps[i][q]];
      table[static_cast<std::size_t>(i) * sz + j] = index.at(f);
    }
  std::vector<std::pair<std::string, int>> gens;
  for (int x = 0; x < a.letters(); ++x) gens.emplace_back(a.alphabet[x], letter_ids[x]);
  return {FiniteMonoid(sz, std::move(table), 0, std::move(gens)), std::move(maps)};
}

// ---------------------------------------------------------------------------
// Complete flows

struct FlowViolation {
  enum class Kind { Ok, EdgeViolation, SinkViolation, NotFullyDefined, Presentation };
  Kind kind = Kind::Ok;
  int q = -1, x = -1, q2 = -1, r = -1, s = -1;
  std::string message;
  bool ok() const { return kind == Kind::Ok; }
};

inline const char* to_string(FlowViolation::Kind k) {
  switch (k) {
    case FlowViolation::Kind::Ok: return "OK";
    case FlowViolation::Kind::EdgeViolation: return "EDGE_VIOLATION";
    case FlowViolation::Kind::SinkViolation: return "SINK_VIOLATION";
    case FlowViolation::Kind::NotFullyDefined: return "NOT_FULLY_DEFINED";
    case FlowViolation::Kind::Presentation: return "PRESENTATION_VIOLATION";
  }
  return "?";
}

inline void require_alphabet(const PartialAutomaton& a, const RAction& ra) {
  if (a.alphabet != alphabet_of(*ra.monoid))
    throw Error(ErrorCode::InvalidArgument, "automaton alphabet does not match the generators");
}

inline FlowViolation verify_complete_flow(const PartialAutomaton& a, const FlowLabeling& f, const RAction& ra) {
  require_alphabet(a, ra);
  if (static_cast<int>(f.size()) != a.states()) throw Error(ErrorCode::InvalidArgument, "labeling size");
  auto nm = ra.namer();
  const auto maps = ra.letter_maps();
  for (int q = 0; q < a.states(); ++q)
    for (int x = 0; x < a.letters(); ++x) {
      int q2 = a.next(q, x);
      FlowViolation v;
      v.q = q;
      v.x = x;
      if (q2 < 0) {
        Mask img = ra.image(f[q].carrier(), ra.monoid->generator_element(x));
        if (img) {
          v.kind = FlowViolation::Kind::SinkViolation;
          v.message = "SINK_VIOLATION(" + a.state_names[q] + "," + a.alphabet[x] + "): " + to_text(f[q], nm) +
                      " has points surviving " + a.alphabet[x];
          return v;
        }
        continue;
      }
      if (!free_stable(maps[x], f[q], f[q2])) {
        v.kind = FlowViolation::Kind::EdgeViolation;
        v.q2 = q2;
        v.message = "EDGE_VIOLATION(" + a.state_names[q] + "," + a.alphabet[x] + "): " + to_text(f[q], nm) + " -> " +
                    to_text(f[q2], nm) + " is not stable under " + a.alphabet[x];
        return v;
      }
    }
  Mask covered = 0;
  for (const auto& l : f) covered |= l.carrier();
  for (int r = 0; r < ra.k(); ++r)
    if (!contains(covered, r)) {
      FlowViolation v;
      v.kind = FlowViolation::Kind::NotFullyDefined;
      v.r = r;
      v.message = "NOT_FULLY_DEFINED(" + nm(r) + ")";
      return v;
    }
  return {};
}

/// No label may hold two distinct H-equivalent points in one block.
inline FlowViolation check_presentation(const PartialAutomaton& a, const FlowLabeling& f, const RAction& ra) {
  auto nm = ra.namer();
  for (int q = 0; q < a.states(); ++q)
    for (Mask blk : f[q].blocks()) {
      int found_r = -1, found_s = -1;
      for_each_bit(blk, [&](int r) {
        for_each_bit(blk & ~(bit(r + 1) - 1), [&](int s) {
          if (found_r < 0 && ra.h_equiv(r, s)) found_r = r, found_s = s;
        });
      });
      if (found_r >= 0) {
        FlowViolation v;
        v.kind = FlowViolation::Kind::Presentation;
        v.q = q;
        v.r = found_r;
        v.s = found_s;
        v.message = "PRESENTATION_VIOLATION at " + a.state_names[q] + ": block " +
                    to_text(SetPartition::one_block(ra.k(), blk), nm) + " holds " + nm(found_r) + " H " +
                    nm(found_s);
        return v;
      }
    }
  return {};
}

/// Little Boxes: product automaton on all state tuples, labels met.
inline std::pair<PartialAutomaton, FlowLabeling> product_flows(
    const std::vector<std::pair<PartialAutomaton, FlowLabeling>>& xs, const RAction& ra) {
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "empty product");
  for (const auto& [a, f] : xs) {
    auto v = verify_complete_flow(a, f, ra);
    if (!v.ok()) throw Error(ErrorCode::InvalidArgument, "product factor is not a complete flow: " + v.message);
  }
  const auto& alpha = xs.front().first.alphabet;
  std::vector<int> radix;
  int total = 1;
  for (const auto& p : xs) {
    radix.push_back(p.first.states());
    total *= p.first.states();
  }
  auto decode = [&](int id) {
    std::vector<int> t(xs.size());
    for (std::size_t i = xs.size(); i-- > 0;) {
      t[i] = id % radix[i];
      id /= radix[i];
    }
    return t;
  };
  auto encode = [&](const std::vector<int>& t) {
    int id = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) id = id * radix[i] + t[i];
    return id;
  };
  PartialAutomaton a = PartialAutomaton::empty(total, alpha);
  FlowLabeling f(total);
  for (int id = 0; id < total; ++id) {
    auto t = decode(id);
    std::string name = "(";
    SetPartition lab = SetPartition::top(ra.k());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      name += (i ? "," : "") + xs[i].first.state_names[t[i]];
      lab = sp_meet(lab, xs[i].second[t[i]]);
    }
    a.state_names[id] = name + ")";
    f[id] = lab;
    for (int x = 0; x < a.letters(); ++x) {
      std::vector<int> u(xs.size());
      bool def = true;
      for (std::size_t i = 0; i < xs.size() && def; ++i) {
        u[i] = xs[i].first.next(t[i], x);
        def = u[i] >= 0;
      }
      if (def) a.set(id, x, encode(u));
    }
  }
  auto v = verify_complete_flow(a, f, ra);
  if (!v.ok()) throw Error(ErrorCode::InvalidArgument, "product is not a complete flow (bug): " + v.message);
  return {a, f};
}

/// Least complete flow covering each r at state cover[r], if the sink
/// condition allows one. Every complete flow with that coverage lies above
/// it pointwise.
inline std::optional<std::vector<int>> least_complete_flow(const PartialAutomaton& a, const LatticePtr& lat,
                                                           const std::vector<detail::ClosureTable>& letter_tables,
                                                           const std::vector<int>& cover, const RAction& ra) {
  std::vector<int> F(a.states(), lat->bottom());
  std::vector<Mask> seed(a.states(), 0);
  for (int r = 0; r < ra.k(); ++r) seed[cover[r]] |= bit(r);
  for (int q = 0; q < a.states(); ++q) F[q] = lat->index_of(SetPartition::discrete(ra.k(), seed[q]));
  bool changed = true;
  while (changed) {
    changed = false;
    for (int q = 0; q < a.states(); ++q)
      for (int x = 0; x < a.letters(); ++x) {
        int q2 = a.next(q, x);
        if (q2 < 0) continue;
        auto [s, t] = letter_tables[x](F[q], F[q2]);
        changed |= detail::raise(*lat, F, q, q2, s, t);
      }
  }
  for (int q = 0; q < a.states(); ++q)
    for (int x = 0; x < a.letters(); ++x)
      if (a.next(q, x) < 0 && ra.image(lat->at(F[q]).carrier(), ra.monoid->generator_element(x))) return std::nullopt;
  return F;
}

// ---------------------------------------------------------------------------
// Parameterized relational morphisms and admissible partitions

/// Φ = (φ0, φ1) into the transformation monoid (Q, N) together with a
/// partition on the states of D_Φ.
struct Presentation {
  std::vector<std::string> state_names;
  TransitionMonoid target;                  // (Q, N)
  std::vector<Mask> preimage;               // q φ0^{-1} ⊆ R
  std::vector<std::pair<int, int>> phi1;    // graph of φ1 ⊆ M x N
  std::vector<std::pair<int, int>> dstates; // #φ0 = {(r, q) : r ∈ q φ0^{-1}}
  std::vector<int> block;                   // 𝒫 class per D-state

  int dstate(int r, int q) const {
    for (std::size_t i = 0; i < dstates.size(); ++i)
      if (dstates[i] == std::pair<int, int>{r, q}) return static_cast<int>(i);
    return -1;
  }
};

/// Submonoid of M x N generated by the letter pairs ([x]_M, [x]_N).
inline std::vector<std::pair<int, int>> canonical_phi1(const FiniteMonoid& m, const FiniteMonoid& n) {
  std::set<std::pair<int, int>> seen{{m.identity(), n.identity()}};
  std::vector<std::pair<int, int>> out{{m.identity(), n.identity()}};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int x = 0; x < m.num_generators(); ++x) {
      std::pair<int, int> p{m.mul(out[i].first, m.generator_element(x)), n.mul(out[i].second, n.generator_element(x))};
      if (seen.insert(p).second) out.push_back(p);
    }
  std::sort(out.begin(), out.end());
  return out;
}

/// Checks Φ is a parameterized relational morphism whose letter images
/// cover, and that 𝒫 is admissible. Throws NOT_ADMISSIBLE with a replay.
inline void check_admissible(const Presentation& p, const RAction& ra) {
  const FiniteMonoid& m = *ra.monoid;
  const FiniteMonoid& n = p.target.monoid;
  const int nq = static_cast<int>(p.preimage.size());
  auto nm = ra.namer();
  Mask covered = 0;
  for (Mask a : p.preimage) covered |= a;
  if (covered != full_mask(ra.k())) throw Error(ErrorCode::InvalidArgument, "φ0 is not fully defined");
  for (auto [mm, nn] : p.phi1)
    for (int q = 0; q < nq; ++q) {
      Mask img = ra.image(p.preimage[q], mm);
      int q2 = p.target.maps[nn][q];
      if (img && (q2 < 0 || !subset(img, p.preimage[q2])))
        throw Error(ErrorCode::InvalidArgument, "element of φ1 does not cover at state " + p.state_names[q]);
    }
  for (std::size_t i = 0; i < p.dstates.size(); ++i)
    for (std::size_t j = i + 1; j < p.dstates.size(); ++j)
      if (p.block[i] == p.block[j] && p.dstates[i].second != p.dstates[j].second)
        throw Error(ErrorCode::NotAdmissible, "cross-state block: (" + nm(p.dstates[i].first) + "," +
                                                  p.state_names[p.dstates[i].second] + ") ~ (" +
                                                  nm(p.dstates[j].first) + "," + p.state_names[p.dstates[j].second] +
                                                  ")");
  // Generator labels suffice: every label of φ1 factors through them and
  // prefixes of a defined transition stay defined.
  for (int q = 0; q < nq; ++q)
    for (int x = 0; x < m.num_generators(); ++x) {
      const int mx = m.generator_element(x);
      const int q2 = p.target.maps[n.generator_element(x)][q];
      if (q2 < 0) continue;
      std::map<int, int> fwd, bwd;  // source block -> target block and back
      for_each_bit(p.preimage[q], [&](int r) {
        int r2 = ra.act(r, mx);
        if (r2 < 0) return;
        int s = p.dstate(r, q), t = p.dstate(r2, q2);
        if (t < 0) throw Error(ErrorCode::InvalidArgument, "transition leaves #φ0");
        int bs = p.block[s], bt = p.block[t];
        auto replay = [&](const char* why, int other) {
          return "(" + nm(r) + "," + p.state_names[q] + ") and (" + nm(other) + "," + p.state_names[q] +
                 ") read " + m.generator_name(x) + ": " + why;
        };
        auto f = fwd.find(bs);
        if (f != fwd.end() && f->second != bt) {
          int other = -1;
          for_each_bit(p.preimage[q], [&](int o) {
            if (other < 0 && o != r && p.block[p.dstate(o, q)] == bs && ra.act(o, mx) >= 0) other = o;
          });
          throw Error(ErrorCode::NotAdmissible, replay("same class, images split (not a congruence)", other));
        }
        auto b = bwd.find(bt);
        if (b != bwd.end() && b->second != bs) {
          int other = -1;
          for_each_bit(p.preimage[q], [&](int o) {
            int o2 = ra.act(o, mx);
            if (other < 0 && o2 >= 0 && p.block[p.dstate(o, q)] != bs && p.block[p.dstate(o2, q2)] == bt) other = o;
          });
          throw Error(ErrorCode::NotAdmissible, replay("different classes, images merged (not injective)", other));
        }
        fwd[bs] = bt;
        bwd[bt] = bs;
      });
    }
}

inline Presentation flow_to_presentation(const PartialAutomaton& a, const FlowLabeling& f, const RAction& ra) {
  auto v = verify_complete_flow(a, f, ra);
  if (!v.ok()) throw Error(ErrorCode::InvalidArgument, "not a complete flow: " + v.message);
  Presentation p;
  p.state_names = a.state_names;
  p.target = transition_monoid(a);
  p.phi1 = canonical_phi1(*ra.monoid, p.target.monoid);
  for (int q = 0; q < a.states(); ++q) {
    p.preimage.push_back(f[q].carrier());
    for_each_bit(f[q].carrier(), [&](int r) {
      p.dstates.emplace_back(r, q);
      p.block.push_back(0);
    });
  }
  // classes: (q, block of qF)
  std::map<std::pair<int, int>, int> cls;
  for (std::size_t i = 0; i < p.dstates.size(); ++i) {
    auto [r, q] = p.dstates[i];
    auto key = std::make_pair(q, f[q].block_of(r));
    auto it = cls.emplace(key, static_cast<int>(cls.size())).first;
    p.block[i] = it->second;
  }
  check_admissible(p, ra);
  return p;
}

/// Fixes n_x as the first N-element paired with [x]_M in φ1.
inline std::pair<PartialAutomaton, FlowLabeling> presentation_to_flow(const Presentation& p, const RAction& ra) {
  check_admissible(p, ra);
  const FiniteMonoid& m = *ra.monoid;
  PartialAutomaton a = PartialAutomaton::empty(static_cast<int>(p.preimage.size()), alphabet_of(m));
  a.state_names = p.state_names;
  for (int x = 0; x < m.num_generators(); ++x) {
    int nx = -1;
    for (auto [mm, nn] : p.phi1)
      if (mm == m.generator_element(x)) {
        nx = nn;
        break;
      }
    if (nx < 0) throw Error(ErrorCode::InvalidArgument, "φ1 has no image for letter " + m.generator_name(x));
    for (int q = 0; q < a.states(); ++q) a.set(q, x, p.target.maps[nx][q]);
  }
  FlowLabeling f;
  for (int q = 0; q < a.states(); ++q) {
    std::map<int, Mask> blocks;
    for_each_bit(p.preimage[q], [&](int r) { blocks[p.block[p.dstate(r, q)]] |= bit(r); });
    std::vector<Mask> bs;
    for (auto& [id, msk] : blocks) bs.push_back(msk);
    f.push_back(SetPartition::from_blocks(ra.k(), std::move(bs)));
  }
  return {a, f};
}

/// Every transition map of `a` is one of the maps of N.
inline bool embeds_in(const PartialAutomaton& a, const TransitionMonoid& n) {
  auto tm = transition_monoid(a);
  std::set<std::vector<int>> target(n.maps.begin(), n.maps.end());
  for (const auto& f : tm.maps)
    if (!target.count(f)) return false;
  return true;
}

}  // namespace flowlb
