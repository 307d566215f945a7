#pragma once

#include <cassert>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "error.hpp"
#include "set_partition.hpp"

namespace flowlb {

/// The lattice L = SP over k points, enumerated and indexed, with meet and
/// order tables. Flow relations refer to elements by index.
class MaterializedLattice {
 public:
  explicit MaterializedLattice(int k, int bound = kDefaultLatticeBound)
      : k_(k), elems_(materialize_lattice(k, bound)) {
    n_ = static_cast<int>(elems_.size());
    w_ = (n_ + 63) / 64;
    for (int i = 0; i < n_; ++i) index_.emplace(elems_[i], i);
    bottom_ = index_.at(SetPartition::bottom(k));
    top_ = index_.at(SetPartition::top(k));
    meet_.resize(static_cast<std::size_t>(n_) * n_);
    join_.resize(static_cast<std::size_t>(n_) * n_);
    up_.assign(static_cast<std::size_t>(n_) * w_, 0);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        meet_[static_cast<std::size_t>(a) * n_ + b] = index_.at(sp_meet(elems_[a], elems_[b]));
        join_[static_cast<std::size_t>(a) * n_ + b] = index_.at(sp_join(elems_[a], elems_[b]));
        if (sp_leq(elems_[a], elems_[b])) up_[static_cast<std::size_t>(a) * w_ + (b >> 6)] |= std::uint64_t{1} << (b & 63);
      }
  }

  int points() const { return k_; }
  int size() const { return n_; }
  int words() const { return w_; }
  int top() const { return top_; }
  int bottom() const { return bottom_; }
  const SetPartition& at(int i) const { return elems_[i]; }
  int index_of(const SetPartition& p) const { return index_.at(p); }
  int meet(int a, int b) const { return meet_[static_cast<std::size_t>(a) * n_ + b]; }
  int join(int a, int b) const { return join_[static_cast<std::size_t>(a) * n_ + b]; }
  bool leq(int a, int b) const { return (up_[static_cast<std::size_t>(a) * w_ + (b >> 6)] >> (b & 63)) & 1U; }
  /// Bitset row of elements above a.
  const std::uint64_t* up(int a) const { return &up_[static_cast<std::size_t>(a) * w_]; }
  const std::vector<SetPartition>& elements() const { return elems_; }

 private:
  int k_, n_ = 0, w_ = 0, top_ = 0, bottom_ = 0;
  std::vector<SetPartition> elems_;
  std::unordered_map<SetPartition, int, SetPartitionHash> index_;
  std::vector<int> meet_, join_;
  std::vector<std::uint64_t> up_;
};

using LatticePtr = std::shared_ptr<const MaterializedLattice>;

inline LatticePtr make_lattice(int k, int bound = kDefaultLatticeBound) {
  return std::make_shared<const MaterializedLattice>(k, bound);
}

/// A meet-closed relation on L (an element of C(L^2)), stored as one
/// bitset row of targets per source.
class FlowRelation {
 public:
  FlowRelation() = default;
  explicit FlowRelation(LatticePtr lat)
      : lat_(std::move(lat)), rows_(static_cast<std::size_t>(lat_->size()) * lat_->words(), 0) {}

  const LatticePtr& lattice() const { return lat_; }
  int n() const { return lat_->size(); }
  bool has(int a, int b) const {
    return (rows_[static_cast<std::size_t>(a) * lat_->words() + (b >> 6)] >> (b & 63)) & 1U;
  }
  void add(int a, int b) {
    rows_[static_cast<std::size_t>(a) * lat_->words() + (b >> 6)] |= std::uint64_t{1} << (b & 63);
  }
  const std::uint64_t* row(int a) const { return &rows_[static_cast<std::size_t>(a) * lat_->words()]; }
  std::uint64_t* row(int a) { return &rows_[static_cast<std::size_t>(a) * lat_->words()]; }
  bool row_empty(int a) const {
    for (int w = 0; w < lat_->words(); ++w)
      if (row(a)[w]) return false;
    return true;
  }

  template <class F>
  void for_row(int a, F&& f) const {
    const auto* r = row(a);
    for (int w = 0; w < lat_->words(); ++w) {
      auto x = r[w];
      while (x) {
        f(w * 64 + std::countr_zero(x));
        x &= x - 1;
      }
    }
  }
  template <class F>
  void for_pairs(F&& f) const {
    for (int a = 0; a < n(); ++a) for_row(a, [&](int b) { f(a, b); });
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : rows_) c += std::popcount(x);
    return c;
  }
  const std::vector<std::uint64_t>& bits() const { return rows_; }
  std::vector<std::uint64_t>& bits() { return rows_; }

  friend bool operator==(const FlowRelation& a, const FlowRelation& b) { return a.rows_ == b.rows_; }
  std::size_t hash() const {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : rows_) h = (h ^ x) * 1099511628211ULL;
    return h;
  }

 private:
  LatticePtr lat_;
  std::vector<std::uint64_t> rows_;
};

struct FlowRelationHash {
  std::size_t operator()(const FlowRelation& f) const { return f.hash(); }
};

inline void require_same_lattice(const FlowRelation& f, const FlowRelation& g) {
  if (f.lattice() != g.lattice()) throw Error(ErrorCode::LatticeMismatch, "relations over different lattices");
}

inline bool is_meet_closed(const FlowRelation& f) {
  const auto& L = *f.lattice();
  if (!f.has(L.top(), L.top())) return false;
  std::vector<std::pair<int, int>> ps;
  f.for_pairs([&](int a, int b) { ps.emplace_back(a, b); });
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      if (!f.has(L.meet(ps[i].first, ps[j].first), L.meet(ps[i].second, ps[j].second))) return false;
  return true;
}

#ifndef NDEBUG
#define FLOWLB_CHECK_MEET_CLOSED(f) assert(is_meet_closed(f))
#else
#define FLOWLB_CHECK_MEET_CLOSED(f) ((void)0)
#endif

/// Partial identity on a meet-closed subset (given by membership).
inline FlowRelation partial_identity(const LatticePtr& lat, const std::vector<bool>& member) {
  FlowRelation f(lat);
  for (int a = 0; a < lat->size(); ++a)
    if (member[a]) f.add(a, a);
  return f;
}

inline FlowRelation identity_flow(const LatticePtr& lat) {
  return partial_identity(lat, std::vector<bool>(lat->size(), true));
}

/// Bottom of C(L^2): every pair is stable.
inline FlowRelation all_pairs(const LatticePtr& lat) {
  FlowRelation f(lat);
  for (int a = 0; a < lat->size(); ++a)
    for (int b = 0; b < lat->size(); ++b) f.add(a, b);
  return f;
}

/// Stability of (U,P) -> (Y,Q) for free flow along a partial point map
/// (-1 for points leaving R): Ux ⊆ Y and x induces an injective partial
/// map U/P -> Y/Q.
inline bool free_stable(const std::vector<int>& map, const SetPartition& u, const SetPartition& v) {
  std::vector<int> def;
  Mask img = 0;
  for_each_bit(u.carrier(), [&](int r) {
    if (map[r] >= 0) {
      img |= bit(map[r]);
      def.push_back(r);
    }
  });
  if (!subset(img, v.carrier())) return false;
  for (std::size_t i = 0; i < def.size(); ++i)
    for (std::size_t j = i + 1; j < def.size(); ++j)
      if (u.same_block(def[i], def[j]) != v.same_block(map[def[i]], map[def[j]])) return false;
  return true;
}

inline FlowRelation free_flow(const LatticePtr& lat, const std::vector<int>& map) {
  FlowRelation f(lat);
  for (int a = 0; a < lat->size(); ++a)
    for (int b = 0; b < lat->size(); ++b)
      if (free_stable(map, lat->at(a), lat->at(b))) f.add(a, b);
  return f;
}

inline FlowRelation compose(const FlowRelation& f, const FlowRelation& g) {
  require_same_lattice(f, g);
  FlowRelation h(f.lattice());
  const int w = f.lattice()->words();
  for (int a = 0; a < f.n(); ++a) {
    auto* out = h.row(a);
    f.for_row(a, [&](int c) {
      const auto* gr = g.row(c);
      for (int i = 0; i < w; ++i) out[i] |= gr[i];
    });
  }
  FLOWLB_CHECK_MEET_CLOSED(h);
  return h;
}

inline FlowRelation compose(std::initializer_list<const FlowRelation*> fs) {
  auto it = fs.begin();
  FlowRelation h = **it;
  for (++it; it != fs.end(); ++it) h = compose(h, **it);
  return h;
}

/// Join in C(L^2): intersection of stable sets.
inline FlowRelation join_flows(const std::vector<FlowRelation>& fs) {
  if (fs.empty()) throw Error(ErrorCode::InvalidArgument, "join of empty list");
  FlowRelation h = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) {
    require_same_lattice(h, fs[i]);
    auto& hb = h.bits();
    const auto& fb = fs[i].bits();
    for (std::size_t j = 0; j < hb.size(); ++j) hb[j] &= fb[j];
  }
  FLOWLB_CHECK_MEET_CLOSED(h);
  return h;
}

inline FlowRelation join_flows(const FlowRelation& f, const FlowRelation& g) { return join_flows({f, g}); }

/// f <= g in closure order: every g-stable pair is f-stable.
inline bool flow_leq(const FlowRelation& f, const FlowRelation& g) {
  require_same_lattice(f, g);
  const auto& fb = f.bits();
  const auto& gb = g.bits();
  for (std::size_t j = 0; j < fb.size(); ++j)
    if (gb[j] & ~fb[j]) return false;
  return true;
}

inline std::vector<bool> domain(const FlowRelation& f) {
  std::vector<bool> d(f.n());
  for (int a = 0; a < f.n(); ++a) d[a] = !f.row_empty(a);
  return d;
}

inline std::vector<bool> fixed_points(const FlowRelation& f) {
  std::vector<bool> d(f.n());
  for (int a = 0; a < f.n(); ++a) d[a] = f.has(a, a);
  return d;
}

inline FlowRelation backflow(const FlowRelation& f) { return partial_identity(f.lattice(), domain(f)); }
inline FlowRelation star(const FlowRelation& f) { return partial_identity(f.lattice(), fixed_points(f)); }

/// Closure of (a,b): meet of all stable pairs above it.
inline std::pair<int, int> closure(const FlowRelation& f, int a, int b) {
  const auto& L = *f.lattice();
  const int w = L.words();
  int ra = L.top(), rb = L.top();
  const auto* upa = L.up(a);
  const auto* upb = L.up(b);
  for (int i = 0; i < w; ++i) {
    auto cs = upa[i];
    while (cs) {
      int c = i * 64 + std::countr_zero(cs);
      cs &= cs - 1;
      const auto* r = f.row(c);
      bool any = false;
      for (int j = 0; j < w; ++j) {
        auto ds = r[j] & upb[j];
        while (ds) {
          int d = j * 64 + std::countr_zero(ds);
          ds &= ds - 1;
          rb = L.meet(rb, d);
          any = true;
        }
      }
      if (any) ra = L.meet(ra, c);
    }
  }
  return {ra, rb};
}

inline int forward(const FlowRelation& f, int l) { return closure(f, l, f.lattice()->bottom()).second; }
inline int backward(const FlowRelation& f, int l) { return closure(f, l, f.lattice()->bottom()).first; }

inline FlowRelation omega_flow(const FlowRelation& f) {
  // Powers until one is idempotent; squaring alone can cycle.
  FlowRelation p = f;
  while (true) {
    FlowRelation pp = compose(p, p);
    if (pp == p) return p;
    p = compose(p, f);
  }
}

inline FlowRelation omega_star(const FlowRelation& f) { return compose(omega_flow(f), star(f)); }

inline FlowRelation flow_power(const FlowRelation& f, int k) {
  FlowRelation p = identity_flow(f.lattice());
  for (int i = 0; i < k; ++i) p = compose(p, f);
  return p;
}

/// Diagnostic listing of stable pairs.
inline std::string dump(const FlowRelation& f, const PointNamer& name) {
  std::string s;
  const auto& L = *f.lattice();
  f.for_pairs([&](int a, int b) { s += to_text(L.at(a), name) + "  ->  " + to_text(L.at(b), name) + "\n"; });
  return s;
}

// ---------------------------------------------------------------------------
// L-automata

struct LEdge {
  int src, dst;
  FlowRelation label;
};

struct LAutomaton {
  int states = 0;
  std::vector<LEdge> edges;
};

namespace detail {

/// Moves the labels of an edge up to its closure (a, b). A loop carries one
/// label, which must lie above both.
inline bool raise(const MaterializedLattice& L, std::vector<int>& F, int src, int dst, int a, int b) {
  if (src == dst) b = a = L.join(a, b);
  bool changed = false;
  if (a != F[src]) F[src] = a, changed = true;
  if (b != F[dst]) F[dst] = b, changed = true;
  return changed;
}

/// Closure of every pair, precomputed for repeated least-flow runs.
class ClosureTable {
 public:
  explicit ClosureTable(const FlowRelation& f) : n_(f.n()), t_(static_cast<std::size_t>(n_) * n_) {
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) t_[static_cast<std::size_t>(a) * n_ + b] = closure(f, a, b);
  }
  std::pair<int, int> operator()(int a, int b) const { return t_[static_cast<std::size_t>(a) * n_ + b]; }

 private:
  int n_;
  std::vector<std::pair<int, int>> t_;
};

inline std::vector<int> least_flow_tables(const LAutomaton& A, const std::vector<ClosureTable>& tabs,
                                          std::vector<int> F) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < A.edges.size(); ++e) {
      const auto& E = A.edges[e];
      auto [a, b] = tabs[e](F[E.src], F[E.dst]);
      changed |= raise(*E.label.lattice(), F, E.src, E.dst, a, b);
    }
  }
  return F;
}

inline std::vector<ClosureTable> tables_for(const LAutomaton& A) {
  std::vector<ClosureTable> t;
  t.reserve(A.edges.size());
  for (auto& e : A.edges) t.emplace_back(e.label);
  return t;
}

}  // namespace detail

/// Least flow above a seed labeling (lattice indices per state).
inline std::vector<int> least_flow(const LAutomaton& A, std::vector<int> seed) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : A.edges) {
      auto [a, b] = closure(e.label, seed[e.src], seed[e.dst]);
      changed |= detail::raise(*e.label.lattice(), seed, e.src, e.dst, a, b);
    }
  }
  return seed;
}

inline FlowRelation sample2(const LAutomaton& A, int q, int q2, const LatticePtr& lat) {
  if (q == q2) throw Error(ErrorCode::SameState, "sample2 needs distinct states");
  auto tabs = detail::tables_for(A);
  FlowRelation f(lat);
  std::vector<int> seed(A.states, lat->bottom());
  for (int a = 0; a < lat->size(); ++a)
    for (int b = 0; b < lat->size(); ++b) {
      seed[q] = a;
      seed[q2] = b;
      auto F = detail::least_flow_tables(A, tabs, seed);
      if (F[q] == a && F[q2] == b) f.add(a, b);
    }
  return f;
}

inline FlowRelation sample1(const LAutomaton& A, int q, const LatticePtr& lat) {
  auto tabs = detail::tables_for(A);
  FlowRelation f(lat);
  std::vector<int> seed(A.states, lat->bottom());
  for (int a = 0; a < lat->size(); ++a) {
    seed[q] = a;
    if (detail::least_flow_tables(A, tabs, seed)[q] == a) f.add(a, a);
  }
  return f;
}

}  // namespace flowlb
