#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "bits.hpp"
#include "error.hpp"

namespace flowlb {

/// An element (Y, P) of the set-partition lattice over R = {0..k-1}.
/// Blocks are kept in canonical order (by least element); block_of is the
/// derived per-point block id (-1 outside the carrier).
class SetPartition {
 public:
  SetPartition() = default;
  explicit SetPartition(int universe) : k_(universe), block_of_(universe, -1) {}

  static SetPartition from_blocks(int universe, std::vector<Mask> blocks) {
    SetPartition p(universe);
    Mask seen = 0;
    for (Mask b : blocks) {
      if (b == 0) throw Error(ErrorCode::InvalidArgument, "empty block");
      if (b & seen) throw Error(ErrorCode::InvalidArgument, "blocks overlap");
      if (!subset(b, full_mask(universe))) throw Error(ErrorCode::InvalidArgument, "block outside R");
      seen |= b;
    }
    std::sort(blocks.begin(), blocks.end(), [](Mask a, Mask b) { return lowest(a) < lowest(b); });
    p.blocks_ = std::move(blocks);
    p.carrier_ = seen;
    p.reindex();
    return p;
  }
  static SetPartition bottom(int universe) { return SetPartition(universe); }
  static SetPartition top(int universe) { return one_block(universe, full_mask(universe)); }
  static SetPartition point(int universe, int r) { return one_block(universe, bit(r)); }
  static SetPartition one_block(int universe, Mask y) {
    return y ? from_blocks(universe, {y}) : bottom(universe);
  }
  static SetPartition discrete(int universe, Mask y) {
    std::vector<Mask> b;
    for_each_bit(y, [&](int i) { b.push_back(bit(i)); });
    return from_blocks(universe, b);
  }

  int universe() const { return k_; }
  Mask carrier() const { return carrier_; }
  const std::vector<Mask>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int block_of(int r) const { return block_of_[r]; }
  bool in_carrier(int r) const { return block_of_[r] >= 0; }
  bool same_block(int r, int s) const { return block_of_[r] >= 0 && block_of_[r] == block_of_[s]; }
  bool is_bottom() const { return carrier_ == 0; }

  friend bool operator==(const SetPartition& a, const SetPartition& b) {
    return a.k_ == b.k_ && a.blocks_ == b.blocks_;
  }
  /// Worklist order: carrier size, then canonical block list.
  friend bool operator<(const SetPartition& a, const SetPartition& b) {
    int ca = popcount(a.carrier_), cb = popcount(b.carrier_);
    if (ca != cb) return ca < cb;
    return a.blocks_ < b.blocks_;
  }

  std::size_t hash() const {
    std::size_t h = static_cast<std::size_t>(k_) * 0x9e3779b97f4a7c15ULL;
    for (Mask b : blocks_) h = (h ^ b) * 1099511628211ULL;
    return h;
  }

 private:
  void reindex() {
    block_of_.assign(k_, -1);
    for (int i = 0; i < static_cast<int>(blocks_.size()); ++i)
      for_each_bit(blocks_[i], [&](int r) { block_of_[r] = i; });
  }

  int k_ = 0;
  Mask carrier_ = 0;
  std::vector<Mask> blocks_;
  std::vector<int> block_of_;
};

struct SetPartitionHash {
  std::size_t operator()(const SetPartition& p) const { return p.hash(); }
};

/// An element of the set flow lattice P(R).
struct SetElem {
  int universe = 0;
  Mask carrier = 0;
  friend bool operator==(const SetElem&, const SetElem&) = default;
};

inline void require_same_r(const SetPartition& a, const SetPartition& b) {
  if (a.universe() != b.universe()) throw Error(ErrorCode::RMismatch, "partitions over different R");
}

inline bool sp_leq(const SetPartition& a, const SetPartition& b) {
  require_same_r(a, b);
  if (!subset(a.carrier(), b.carrier())) return false;
  for (Mask blk : a.blocks())
    if (!subset(blk, b.blocks()[b.block_of(lowest(blk))])) return false;
  return true;
}

inline SetPartition sp_meet(const SetPartition& a, const SetPartition& b) {
  require_same_r(a, b);
  std::vector<Mask> out;
  for (Mask x : a.blocks())
    for (Mask y : b.blocks())
      if (x & y) out.push_back(x & y);
  return SetPartition::from_blocks(a.universe(), std::move(out));
}

inline SetPartition sp_join(const SetPartition& a, const SetPartition& b) {
  require_same_r(a, b);
  const int k = a.universe();
  UnionFind uf(k);
  for (const auto* p : {&a, &b})
    for (Mask blk : p->blocks()) {
      int r0 = lowest(blk);
      for_each_bit(blk, [&](int r) { uf.unite(r0, r); });
    }
  std::vector<Mask> acc(k, 0);
  for_each_bit(a.carrier() | b.carrier(), [&](int r) { acc[uf.find(r)] |= bit(r); });
  std::vector<Mask> out;
  for (Mask m : acc)
    if (m) out.push_back(m);
  return SetPartition::from_blocks(k, std::move(out));
}

/// Coarsening of `p` that merges the blocks containing each given pair.
inline SetPartition merge_pairs(const SetPartition& p, const std::vector<std::pair<int, int>>& pairs) {
  UnionFind uf(p.num_blocks());
  for (auto [r, s] : pairs) uf.unite(p.block_of(r), p.block_of(s));
  std::vector<Mask> acc(p.num_blocks(), 0);
  for (int i = 0; i < p.num_blocks(); ++i) acc[uf.find(i)] |= p.blocks()[i];
  std::vector<Mask> out;
  for (Mask m : acc)
    if (m) out.push_back(m);
  return SetPartition::from_blocks(p.universe(), std::move(out));
}

// ---------------------------------------------------------------------------
// Text form: {r1 r3 | r2} over {r1,r2,r3}; bottom is ⊥.

using PointNamer = std::function<std::string(int)>;

inline PointNamer index_namer() {
  return [](int r) { return "r" + std::to_string(r); };
}

inline std::string to_text(const SetPartition& p, const PointNamer& name) {
  if (p.is_bottom()) return "\xE2\x8A\xA5";
  std::string s = "{";
  for (int i = 0; i < p.num_blocks(); ++i) {
    if (i) s += " | ";
    bool first = true;
    for_each_bit(p.blocks()[i], [&](int r) {
      if (!first) s += " ";
      s += name(r);
      first = false;
    });
  }
  s += "} over {";
  bool first = true;
  for_each_bit(p.carrier(), [&](int r) {
    if (!first) s += ",";
    s += name(r);
    first = false;
  });
  return s + "}";
}

inline std::string to_text(const SetPartition& p) { return to_text(p, index_namer()); }

/// Inverse of to_text. `lookup` maps a point name to its index in R.
inline SetPartition parse_set_partition(const std::string& text, int universe,
                                        const std::function<int(const std::string&)>& lookup) {
  auto fail = [&](const std::string& why) -> SetPartition {
    throw Error(ErrorCode::ParseError, "set-partition '" + text + "': " + why);
  };
  std::string t = text;
  auto trim = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  };
  t = trim(t);
  if (t == "\xE2\x8A\xA5" || t == "bottom") return SetPartition::bottom(universe);
  if (t.empty() || t.front() != '{') return fail("expected '{'");
  auto close = t.find('}');
  if (close == std::string::npos) return fail("missing '}'");
  std::string body = t.substr(1, close - 1);
  std::string rest = trim(t.substr(close + 1));

  std::vector<Mask> blocks;
  std::size_t start = 0;
  while (true) {
    auto bar = body.find('|', start);
    std::string part = body.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    Mask blk = 0;
    std::size_t i = 0;
    while (i < part.size()) {
      while (i < part.size() && std::isspace(static_cast<unsigned char>(part[i]))) ++i;
      std::size_t j = i;
      while (j < part.size() && !std::isspace(static_cast<unsigned char>(part[j]))) ++j;
      if (j > i) {
        int r = lookup(part.substr(i, j - i));
        if (r < 0 || r >= universe) return fail("unknown point '" + part.substr(i, j - i) + "'");
        if (contains(blk, r)) return fail("repeated point");
        blk |= bit(r);
      }
      i = j;
    }
    if (!blk) return fail("empty block");
    blocks.push_back(blk);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  SetPartition p = SetPartition::from_blocks(universe, blocks);
  if (!rest.empty()) {
    if (rest.rfind("over", 0) != 0) return fail("expected 'over'");
    rest = trim(rest.substr(4));
    if (rest.size() < 2 || rest.front() != '{' || rest.back() != '}') return fail("bad carrier");
    std::string c = rest.substr(1, rest.size() - 2);
    Mask carrier = 0;
    std::size_t s = 0;
    while (s <= c.size()) {
      auto comma = c.find(',', s);
      std::string nm = trim(c.substr(s, comma == std::string::npos ? std::string::npos : comma - s));
      if (!nm.empty()) {
        int r = lookup(nm);
        if (r < 0 || r >= universe) return fail("unknown point '" + nm + "'");
        carrier |= bit(r);
      }
      if (comma == std::string::npos) break;
      s = comma + 1;
    }
    if (carrier != p.carrier()) return fail("carrier does not match blocks");
  }
  return p;
}

inline SetPartition parse_set_partition(const std::string& text, int universe) {
  return parse_set_partition(text, universe, [](const std::string& s) {
    if (s.size() < 2 || s[0] != 'r') return -1;
    try {
      return std::stoi(s.substr(1));
    } catch (...) {
      return -1;
    }
  });
}

// ---------------------------------------------------------------------------
// Materialization

inline constexpr int kDefaultLatticeBound = 6;

/// All partitions of the subset y, in restricted-growth order.
inline std::vector<SetPartition> partitions_of(int universe, Mask y) {
  std::vector<int> pts;
  for_each_bit(y, [&](int r) { pts.push_back(r); });
  std::vector<SetPartition> out;
  const int n = static_cast<int>(pts.size());
  if (n == 0) {
    out.push_back(SetPartition::bottom(universe));
    return out;
  }
  std::vector<int> rgs(n, 0);
  std::function<void(int, int)> rec = [&](int i, int maxb) {
    if (i == n) {
      std::vector<Mask> blocks(maxb + 1, 0);
      for (int j = 0; j < n; ++j) blocks[rgs[j]] |= bit(pts[j]);
      out.push_back(SetPartition::from_blocks(universe, blocks));
      return;
    }
    for (int b = 0; b <= maxb + 1; ++b) {
      rgs[i] = b;
      rec(i + 1, std::max(maxb, b));
    }
  };
  rgs[0] = 0;
  rec(1, 0);
  return out;
}

/// Every (Y,P) over R = {0..k-1}, ordered by carrier bitmask, then by
/// restricted-growth order of P. Size Bell(k+1).
inline std::vector<SetPartition> materialize_lattice(int k, int bound = kDefaultLatticeBound) {
  if (k > bound) throw Error(ErrorCode::TooLarge, "|R| = " + std::to_string(k) + " exceeds " + std::to_string(bound));
  std::vector<SetPartition> out;
  for (Mask y = 0; y <= full_mask(k); ++y) {
    auto ps = partitions_of(k, y);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

}  // namespace flowlb
