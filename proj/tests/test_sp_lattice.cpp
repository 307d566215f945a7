#include <gtest/gtest.h>

#include "flowlb/flowlb.hpp"

using namespace flowlb;

namespace {

SetPartition sp(int k, std::vector<Mask> blocks) { return SetPartition::from_blocks(k, std::move(blocks)); }

// Bell numbers from the Bell triangle.
std::vector<long> bell_numbers(int n) {
  std::vector<long> out{1};
  std::vector<long> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<long> next{row.back()};
    for (long v : row) next.push_back(next.back() + v);
    row = next;
    out.push_back(row.front());
  }
  return out;
}

// Join oracle: Warshall closure of the union of the two block relations.
SetPartition join_oracle(const SetPartition& a, const SetPartition& b) {
  const int k = a.universe();
  std::vector<std::vector<bool>> rel(k, std::vector<bool>(k, false));
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s) rel[r][s] = a.same_block(r, s) || b.same_block(r, s);
  for (int m = 0; m < k; ++m)
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) rel[r][s] = rel[r][s] || (rel[r][m] && rel[m][s]);
  std::vector<Mask> blocks;
  Mask done = 0;
  for (int r = 0; r < k; ++r) {
    if (!a.in_carrier(r) && !b.in_carrier(r)) continue;
    if (contains(done, r)) continue;
    Mask blk = bit(r);
    for (int s = 0; s < k; ++s)
      if (rel[r][s]) blk |= bit(s);
    done |= blk;
    blocks.push_back(blk);
  }
  return sp(k, blocks);
}

}  // namespace

TEST(SpLattice, OrderExamples) {
  const int k = 3;
  auto disc = SetPartition::discrete(k, 0b011), one = SetPartition::one_block(k, 0b011);
  EXPECT_TRUE(sp_leq(SetPartition::bottom(k), disc));
  EXPECT_TRUE(sp_leq(disc, one));
  EXPECT_FALSE(sp_leq(one, disc));
  EXPECT_FALSE(sp_leq(SetPartition::point(k, 0), SetPartition::point(k, 1)));
}

TEST(SpLattice, MeetJoinExamples) {
  const int k = 3;
  auto top = SetPartition::top(k), bot = SetPartition::bottom(k);
  auto a = sp(k, {0b011, 0b100}), b = SetPartition::one_block(k, 0b110);
  EXPECT_EQ(sp_meet(a, top), a);
  EXPECT_EQ(sp_join(a, bot), a);
  EXPECT_EQ(sp_join(a, b), top);
  EXPECT_EQ(sp_meet(SetPartition::one_block(k, 0b011), SetPartition::discrete(k, 0b011)),
            SetPartition::discrete(k, 0b011));
  try {
    sp_leq(SetPartition::top(2), top);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RMismatch);
  }
}

TEST(SpLattice, BellSizes) {
  auto bell = bell_numbers(7);
  EXPECT_EQ(bell[2], 2);
  EXPECT_EQ(bell[6], 203);
  for (int k = 1; k <= 5; ++k) {
    auto all = materialize_lattice(k);
    EXPECT_EQ(static_cast<long>(all.size()), bell[k + 1]) << k;
    std::unordered_set<SetPartition, SetPartitionHash> uniq(all.begin(), all.end());
    EXPECT_EQ(uniq.size(), all.size());
  }
  try {
    materialize_lattice(7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
}

TEST(SpLattice, LatticeLawsExhaustive) {
  for (int k = 1; k <= 3; ++k) {
    auto all = materialize_lattice(k);
    for (const auto& a : all) {
      EXPECT_EQ(sp_meet(a, a), a);
      EXPECT_EQ(sp_join(a, a), a);
      for (const auto& b : all) {
        EXPECT_EQ(sp_meet(a, b), sp_meet(b, a));
        EXPECT_EQ(sp_join(a, b), sp_join(b, a));
        EXPECT_EQ(sp_meet(a, sp_join(a, b)), a);
        EXPECT_EQ(sp_join(a, sp_meet(a, b)), a);
        EXPECT_EQ(sp_leq(a, b), sp_meet(a, b) == a);
        EXPECT_EQ(sp_join(a, b), join_oracle(a, b));
        for (const auto& c : all) {
          EXPECT_EQ(sp_meet(a, sp_meet(b, c)), sp_meet(sp_meet(a, b), c));
          EXPECT_EQ(sp_join(a, sp_join(b, c)), sp_join(sp_join(a, b), c));
        }
      }
    }
  }
}

TEST(SpLattice, Canonicalization) {
  const int k = 4;
  auto a = sp(k, {0b1000, 0b0101, 0b0010});
  auto b = sp(k, {0b0010, 0b1000, 0b0101});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.blocks(), (std::vector<Mask>{0b0101, 0b0010, 0b1000}));
  EXPECT_EQ(sp(k, a.blocks()), a);
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s) EXPECT_EQ(a.same_block(r, s), (a.block_of(r) == a.block_of(s)));
}

TEST(SpLattice, TextForm) {
  EXPECT_EQ(to_text(SetPartition::bottom(3)), "\xE2\x8A\xA5");
  auto a = sp(3, {0b101, 0b010});
  EXPECT_EQ(to_text(a), "{r0 r2 | r1} over {r0,r1,r2}");
  for (int k = 1; k <= 4; ++k)
    for (const auto& p : materialize_lattice(k)) EXPECT_EQ(parse_set_partition(to_text(p), k), p);
}

TEST(SpLattice, SetElements) {
  SetElem a{3, 0b011}, b{3, 0b110};
  EXPECT_EQ(a.carrier & b.carrier, Mask{0b010});
}
