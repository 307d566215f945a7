#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <unordered_map>
#include <string>
#include <utility>
#include <vector>

#include "flow_term.hpp"
#include "group_mapping.hpp"
#include "loopable.hpp"
#include "monoid.hpp"
#include "r_action.hpp"
#include "set_partition.hpp"

namespace flowlb {

struct SymbolicCounters {
  std::uint64_t stabilizations = 0, merges = 0, backflows = 0, evaluations = 0;
};

struct SymbolicStats {
  std::atomic<std::uint64_t> stabilizations{0};
  std::atomic<std::uint64_t> merges{0};
  std::atomic<std::uint64_t> backflows{0};
  std::atomic<std::uint64_t> evaluations{0};

  SymbolicCounters snapshot() const {
    return {stabilizations.load(), merges.load(), backflows.load(), evaluations.load()};
  }
};

/// Everything the symbolic backend needs to act on single elements of L.
class EvalContext {
 public:
  EvalContext(const FiniteMonoid& m, const GroupMappingCert& cert, const GreenClasses& g, int level,
              TypeIOracle oracle = TypeIOracle::trivial())
      : monoid(m),
        cert(cert),
        ra(make_r_action(m, cert, g)),
        level(level),
        certifier(m, level, std::move(oracle)),
        words(shortest_words(m)) {
    const int k = ra.k();
    collide.assign(k, 0);
    for (int z = 0; z < m.size(); ++z) {
      const int* f = ra.map_of(z);
      for (int r = 0; r < k; ++r)
        for (int s = r + 1; s < k; ++s)
          if (f[r] >= 0 && f[r] == f[s]) {
            collide[r] |= bit(s);
            collide[s] |= bit(r);
          }
    }
  }
  EvalContext(const EvalContext&) = delete;
  EvalContext& operator=(const EvalContext&) = delete;

  int k() const { return ra.k(); }
  int word_element(const std::vector<int>& letters) const { return monoid.eval_word(letters); }

  const FiniteMonoid& monoid;
  const GroupMappingCert& cert;
  RAction ra;
  int level;
  LoopableCertifier certifier;
  std::vector<FlowTerm> vacuum_terms;
  mutable SymbolicStats stats;
  // fn_stabilize memo; cleared whenever vacuum_terms change
  mutable std::mutex memo_mutex;
  mutable std::unordered_map<SetPartition, SetPartition, SetPartitionHash> stabilize_memo;
  void set_vacuum_terms(std::vector<FlowTerm> ts) {
    vacuum_terms = std::move(ts);
    std::lock_guard<std::mutex> lock(memo_mutex);
    stabilize_memo.clear();
  }
  std::vector<Mask> collide;  // r ~ s when rz = sz lies in R for some z
  std::vector<std::vector<int>> words;
};

/// Result of pushing an element forward: the image partition (blocks
/// joined where their images meet) plus any source pairs that collided.
struct StepResult {
  SetPartition value;
  std::vector<std::pair<int, int>> merges;
};

inline StepResult act_element(const EvalContext& ctx, const SetPartition& l, int z) {
  const int k = ctx.k();
  const int* f = ctx.ra.map_of(z);
  std::vector<int> owner(k, -1), owner_src(k, -1);
  UnionFind uf(k);
  StepResult out;
  Mask img_all = 0;
  for (int i = 0; i < l.num_blocks(); ++i) {
    int first = -1;
    for_each_bit(l.blocks()[i], [&](int r) {
      int p = f[r];
      if (p < 0) return;
      img_all |= bit(p);
      if (first < 0) first = p;
      uf.unite(first, p);
      if (owner[p] < 0) {
        owner[p] = i;
        owner_src[p] = r;
      } else if (owner[p] != i) {
        out.merges.emplace_back(owner_src[p], r);
      }
    });
  }
  std::vector<Mask> acc(k, 0);
  for_each_bit(img_all, [&](int p) { acc[uf.find(p)] |= bit(p); });
  std::vector<Mask> blocks;
  for (Mask m : acc)
    if (m) blocks.push_back(m);
  out.value = SetPartition::from_blocks(k, std::move(blocks));
  return out;
}

inline StepResult act_word(const EvalContext& ctx, const SetPartition& l, const std::vector<int>& letters) {
  return act_element(ctx, l, ctx.word_element(letters));
}

/// Least coarsening in which no element of M sends two distinct blocks to
/// a common point of R.
inline SetPartition word_stabilize(const EvalContext& ctx, const SetPartition& l) {
  const int k = ctx.k();
  UnionFind uf(k);
  for (Mask b : l.blocks()) {
    int r0 = lowest(b);
    for_each_bit(b, [&](int r) { uf.unite(r0, r); });
  }
  const Mask y = l.carrier();
  bool merged = false;
  for_each_bit(y, [&](int r) {
    for_each_bit(ctx.collide[r] & y, [&](int s) { merged |= uf.unite(r, s); });
  });
  if (!merged) return l;
  ctx.stats.merges.fetch_add(1, std::memory_order_relaxed);
  std::vector<Mask> acc(k, 0);
  for_each_bit(y, [&](int r) { acc[uf.find(r)] |= bit(r); });
  std::vector<Mask> blocks;
  for (Mask m : acc)
    if (m) blocks.push_back(m);
  return SetPartition::from_blocks(k, std::move(blocks));
}

namespace detail {

struct EvalOut {
  SetPartition value;
  std::vector<std::pair<int, int>> source_merges;
};

inline EvalOut evaluate(const EvalContext& ctx, const SetPartition& l, const FlowTerm& t, bool vacuum_mode);

inline SetPartition stabilize_mode(const EvalContext& ctx, const SetPartition& l, bool vacuum_mode);

// Forces (j, j) to be stable for the word element s: each block's image
// inside one block, distinct blocks into distinct blocks.
inline SetPartition self_inject(const EvalContext& ctx, SetPartition j, int s) {
  const int* f = ctx.ra.map_of(s);
  while (true) {
    const int nb = j.num_blocks();
    UnionFind uf(nb);
    bool changed = false;
    std::vector<int> src_of(nb, -1);
    for (int b = 0; b < nb; ++b) {
      int tgt0 = -1;
      for_each_bit(j.blocks()[b], [&](int r) {
        if (f[r] < 0 || !j.in_carrier(f[r])) return;
        int t = j.block_of(f[r]);
        if (tgt0 < 0) tgt0 = t;
        changed |= uf.unite(tgt0, t);
        if (src_of[t] < 0) src_of[t] = b;
        else changed |= uf.unite(src_of[t], b);
      });
    }
    if (!changed) return j;
    std::vector<Mask> acc(nb, 0);
    for (int b = 0; b < nb; ++b) acc[uf.find(b)] |= j.blocks()[b];
    std::vector<Mask> blocks;
    for (Mask m : acc)
      if (m) blocks.push_back(m);
    j = SetPartition::from_blocks(j.universe(), std::move(blocks));
  }
}

inline void require_loopable(const EvalContext& ctx, const FlowTerm& body) {
  if (body.is_word()) {
    int s = ctx.word_element(body.letters());
    if (!ctx.certifier.certified(s))
      throw Error(ErrorCode::NotLoopable, "(" + to_text(body, ctx.monoid) + ")^w*");
  } else if (ctx.level > 0) {
    throw Error(ErrorCode::NotLoopable, "(" + to_text(body, ctx.monoid) + ")^w* has a non-word body");
  }
}

inline void require_loopable_all(const EvalContext& ctx, const FlowTerm& t) {
  for (const auto& a : t.atoms())
    if (!a.is_letter()) {
      require_loopable(ctx, *a.body);
      require_loopable_all(ctx, *a.body);
    }
}

inline EvalOut evaluate(const EvalContext& ctx, const SetPartition& l, const FlowTerm& t, bool vacuum_mode) {
  ctx.stats.evaluations.fetch_add(1, std::memory_order_relaxed);
  const FiniteMonoid& m = ctx.monoid;
  EvalOut out;
  SetPartition cur = l;
  int prefix = m.identity();  // word read so far, while no ω+★ has occurred
  bool prefix_valid = true;
  for (const auto& atom : t.atoms()) {
    if (atom.is_letter()) {
      int z = m.generator_element(atom.letter);
      auto step = act_element(ctx, cur, z);
      if (!step.merges.empty() && prefix_valid && prefix == m.identity())
        out.source_merges.insert(out.source_merges.end(), step.merges.begin(), step.merges.end());
      cur = stabilize_mode(ctx, step.value, vacuum_mode);
      if (prefix_valid) prefix = m.mul(prefix, z);
      continue;
    }
    const FlowTerm& body = *atom.body;
    if (body.is_word()) {
      const int s = ctx.word_element(body.letters());
      const int e = omega(m, s);
      SetPartition mu = stabilize_mode(ctx, act_element(ctx, cur, e).value, vacuum_mode);
      while (true) {
        SetPartition j = sp_join(mu, act_element(ctx, mu, s).value);
        SetPartition next = stabilize_mode(ctx, self_inject(ctx, j, s), vacuum_mode);
        if (next == mu) break;
        mu = std::move(next);
      }
      if (prefix_valid) {
        // Source blocks whose images land in one block of mu must merge.
        const int me = m.mul(prefix, e);
        const int* f = ctx.ra.map_of(me);
        std::vector<int> seen_src(mu.num_blocks(), -1);
        for (Mask b : l.blocks()) {
          int rep = lowest(b);
          for_each_bit(b, [&](int r) {
            if (f[r] < 0 || !mu.in_carrier(f[r])) return;
            int tb = mu.block_of(f[r]);
            if (seen_src[tb] < 0) seen_src[tb] = rep;
            else if (seen_src[tb] != rep && !l.same_block(seen_src[tb], rep))
              out.source_merges.emplace_back(seen_src[tb], rep);
          });
        }
      }
      cur = std::move(mu);
    } else {
      // Non-word body: the answer dominates the join of the eventual cycle
      // of iterated actions from cur.
      std::map<SetPartition, int> seen;
      std::vector<SetPartition> seq;
      SetPartition y = cur;
      while (!seen.count(y)) {
        seen.emplace(y, static_cast<int>(seq.size()));
        seq.push_back(y);
        y = evaluate(ctx, y, body, vacuum_mode).value;
      }
      SetPartition mu = seq[seen.at(y)];
      for (std::size_t i = seen.at(y) + 1; i < seq.size(); ++i) mu = sp_join(mu, seq[i]);
      mu = stabilize_mode(ctx, mu, vacuum_mode);
      while (true) {
        SetPartition next = stabilize_mode(ctx, sp_join(mu, evaluate(ctx, mu, body, vacuum_mode).value), vacuum_mode);
        if (next == mu) break;
        mu = std::move(next);
      }
      cur = std::move(mu);
    }
    prefix_valid = false;
  }
  out.value = std::move(cur);
  return out;
}

}  // namespace detail

/// Under-approximation c <= F_n of the vacuum: word collisions plus the
/// domains of ctx.vacuum_terms, iterated to a fixed point.
inline SetPartition fn_stabilize(const EvalContext& ctx, const SetPartition& l) {
  ctx.stats.stabilizations.fetch_add(1, std::memory_order_relaxed);
  {
    std::lock_guard<std::mutex> lock(ctx.memo_mutex);
    auto it = ctx.stabilize_memo.find(l);
    if (it != ctx.stabilize_memo.end()) return it->second;
  }
  SetPartition cur = word_stabilize(ctx, l);
  bool changed = !ctx.vacuum_terms.empty();
  while (changed) {
    changed = false;
    for (const auto& t : ctx.vacuum_terms) {
      auto r = detail::evaluate(ctx, cur, t, true);
      if (!r.source_merges.empty()) {
        cur = word_stabilize(ctx, merge_pairs(cur, r.source_merges));
        changed = true;
      }
    }
  }
  std::lock_guard<std::mutex> lock(ctx.memo_mutex);
  ctx.stabilize_memo.emplace(l, cur);
  return cur;
}

namespace detail {
inline SetPartition stabilize_mode(const EvalContext& ctx, const SetPartition& l, bool vacuum_mode) {
  return vacuum_mode ? word_stabilize(ctx, l) : fn_stabilize(ctx, l);
}
}  // namespace detail

struct ActResult {
  SetPartition source;  // the (possibly coarsened) element actually acted on
  SetPartition value;
  bool coarsened = false;
};

/// Forward flow of a stabilized element along the term, with back-flow
/// onto the source handled by coarsen-and-replay.
inline ActResult act_term(const EvalContext& ctx, const SetPartition& l, const FlowTerm& t) {
  detail::require_loopable_all(ctx, t);
  ActResult res;
  res.source = fn_stabilize(ctx, l);
  res.coarsened = !(res.source == l);
  while (true) {
    auto out = detail::evaluate(ctx, res.source, t, false);
    if (out.source_merges.empty()) {
      res.value = std::move(out.value);
      return res;
    }
    ctx.stats.backflows.fetch_add(1, std::memory_order_relaxed);
    res.source = fn_stabilize(ctx, merge_pairs(res.source, out.source_merges));
    res.coarsened = true;
  }
}

// ---------------------------------------------------------------------------
// Set interpretation in P(M)

inline ElementSet set_product(const FiniteMonoid& m, const ElementSet& a, const ElementSet& b) {
  ElementSet out(m.size());
  auto be = b.elements();
  for (int x : a.elements())
    for (int y : be) out.set(m.mul(x, y));
  return out;
}

inline ElementSet interp_lambda(const FiniteMonoid& m, const FlowTerm& t) {
  ElementSet acc(m.size());
  acc.set(m.identity());
  for (const auto& a : t.atoms()) {
    if (a.is_letter()) {
      ElementSet x(m.size());
      x.set(m.generator_element(a.letter));
      acc = set_product(m, acc, x);
      continue;
    }
    ElementSet s = interp_lambda(m, *a.body);
    // idempotent power in the power monoid
    ElementSet p = s;
    while (true) {
      ElementSet pp = set_product(m, p, p);
      if (pp == p) break;
      p = set_product(m, p, s);
    }
    ElementSet u(m.size());  // union of all powers, including the identity
    u.set(m.identity());
    while (true) {
      ElementSet next = u;
      next |= set_product(m, u, s);
      if (next == u) break;
      u = std::move(next);
    }
    acc = set_product(m, acc, set_product(m, p, u));
  }
  return acc;
}

inline ElementSet interp_lambda(const EvalContext& ctx, const FlowTerm& t) { return interp_lambda(ctx.monoid, t); }

enum class ProbeOutcome { Equal, LhsSubset, RhsSubset, Incomparable };

inline const char* to_string(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::Equal: return "EQUAL";
    case ProbeOutcome::LhsSubset: return "LHS\xE2\x8A\x82RHS";
    case ProbeOutcome::RhsSubset: return "RHS\xE2\x8A\x82LHS";
    case ProbeOutcome::Incomparable: return "INCOMPARABLE";
  }
  return "?";
}

struct ProbeReport {
  Mask lhs = 0, rhs = 0;
  ProbeOutcome outcome = ProbeOutcome::Equal;
};

/// Compares carrier(ℓ·τ) with carrier(ℓ)·τΛ.
inline ProbeReport conjecture_probe(const EvalContext& ctx, const SetPartition& l, const FlowTerm& t) {
  ProbeReport r;
  r.lhs = act_term(ctx, l, t).value.carrier();
  for (int z : interp_lambda(ctx, t).elements()) r.rhs |= ctx.ra.image(l.carrier(), z);
  if (r.lhs == r.rhs) r.outcome = ProbeOutcome::Equal;
  else if (subset(r.lhs, r.rhs)) r.outcome = ProbeOutcome::LhsSubset;
  else if (subset(r.rhs, r.lhs)) r.outcome = ProbeOutcome::RhsSubset;
  else r.outcome = ProbeOutcome::Incomparable;
  return r;
}

}  // namespace flowlb
