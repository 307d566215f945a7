#include <gtest/gtest.h>

#include "common.hpp"

using namespace flowlb;
using flowlb::testing::Instance;
using flowlb::testing::kData;

namespace {

// Z_k with a zero adjoined: 0..k-1 the group, k the zero.
FiniteMonoid zk_zero(int k) {
  const int n = k + 1;
  std::vector<int> t(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a * n + b] = (a == k || b == k) ? k : (a + b) % k;
  return FiniteMonoid(n, t, 0, {{"g", 1 % k}, {"z", k}});
}

std::vector<FiniteMonoid> instances() {
  return {m1_monoid(), load_monoid(kData + "/z2zero.json"), load_monoid(kData + "/z3zero.json")};
}

}  // namespace

TEST(States, PointsAreSeeds) {
  Instance in(m1_monoid());
  auto ctx = in.context(0);
  auto gen = generate_states(*ctx, Budget{});
  for (int r = 0; r < ctx->k(); ++r) {
    EXPECT_EQ(gen.pool[r].parent, -1);
    EXPECT_TRUE(gen.pool[r].state.same_block(r, r));
    EXPECT_TRUE(sp_leq(SetPartition::point(ctx->k(), r), gen.pool[r].state));
  }
  EXPECT_FALSE(gen.exhausted);
}

TEST(States, TracesReplay) {
  for (auto& m : instances())
    for (int level = 0; level <= 1; ++level) {
      Instance in(m);
      auto ctx = in.context(level);
      auto gen = generate_states(*ctx, Budget{});
      for (int id = 0; id < static_cast<int>(gen.pool.size()); ++id)
        EXPECT_EQ(replay(*ctx, gen.trace(id, level)), gen.pool[id].state) << id;
    }
}

TEST(States, SymbolicBelowExplicit) {
  for (auto& m : instances())
    for (int level = 0; level <= 1; ++level) {
      Instance in(m);
      auto ctx = in.context(level);
      auto gen = generate_states(*ctx, Budget{});
      ExplicitEngine eng(ctx->ra, ctx->certifier);
      const auto& lat = *eng.lattice();
      for (const auto& rec : gen.pool) {
        int l = lat.index_of(rec.state);
        EXPECT_TRUE(eng.dominated(l)) << to_text(rec.state);
        EXPECT_TRUE(eng.is_stable(l));
      }
      // every explicit state sits under a maximal one
      for (int s : eng.states()) EXPECT_TRUE(eng.dominated(s));
    }
}

TEST(States, NoBadPairsOnM1) {
  Instance in(m1_monoid());
  for (int level = 0; level <= 1; ++level) {
    auto ctx = in.context(level);
    Budget b;
    b.exhaustive = true;
    auto gen = generate_states(*ctx, b);
    EXPECT_TRUE(gen.bad.empty());
    EXPECT_TRUE(bad_pairs(gen, ctx->ra, level).empty());
  }
}

TEST(States, HPairsAndPairStates) {
  Instance in(m1_monoid());
  auto ctx = in.context(0);
  const auto& ra = ctx->ra;
  int r = ra.lookup("a0_1_b0"), s = ra.lookup("a0_g_b0"), t = ra.lookup("a0_1_b1");
  EXPECT_EQ(h_pairs_in(ra, pair_state(ra.k(), r, s)), (std::vector<std::pair<int, int>>{{std::min(r, s), std::max(r, s)}}));
  EXPECT_TRUE(h_pairs_in(ra, pair_state(ra.k(), r, t)).empty());
  EXPECT_EQ(h_pairs_in(ra, SetPartition::top(ra.k())).size(), 2u);
  EXPECT_TRUE(h_pairs_in(ra, SetPartition::discrete(ra.k(), full_mask(ra.k()))).empty());
}

TEST(States, PointlikeCandidates) {
  const int k = 4;
  std::vector<SetPartition> st{SetPartition::point(k, 0), SetPartition::one_block(k, 0b0011),
                               SetPartition::one_block(k, 0b0111), SetPartition::discrete(k, 0b1100)};
  EXPECT_EQ(pointlike_candidates(st), std::vector<Mask>{0b0111});
  EXPECT_TRUE(pointlike_candidates({SetPartition::point(k, 1)}).empty());
}

TEST(States, LowerBoundErrors) {
  LowerBoundOptions o;
  try {
    lower_bound(load_monoid(kData + "/flipflop.json"), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotGroupMapping);
  }
  auto z7 = zk_zero(7);
  ASSERT_TRUE(std::holds_alternative<GroupMappingCert>(check_group_mapping(z7)));
  o.backend = Backend::Explicit;
  try {
    lower_bound(z7, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
  // the symbolic backend has no such limit
  o.backend = Backend::Symbolic;
  auto rep = lower_bound(z7, o);
  EXPECT_EQ(rep.point_names.size(), 7u);
}

TEST(States, BudgetMonotone) {
  Instance in(m1_monoid());
  std::size_t prev = 0;
  for (int letters = 1; letters <= 6; ++letters) {
    auto ctx = in.context(0);
    Budget b;
    b.max_letters = letters;
    auto gen = generate_states(*ctx, b);
    EXPECT_GE(gen.pool.size(), prev) << letters;
    prev = gen.pool.size();
  }
  auto ctx = in.context(0);
  Budget tiny;
  tiny.max_states = 2;
  auto gen = generate_states(*ctx, tiny);
  EXPECT_TRUE(gen.exhausted);
  EXPECT_EQ(gen.exhausted_reason, "state budget");
  EXPECT_LE(gen.pool.size(), 2u);
}

TEST(States, ReportIsDeterministic) {
  LowerBoundOptions o;
  o.max_level = 1;
  o.backend = Backend::Both;
  o.input_id = "m1";
  auto m = m1_monoid();
  auto a = report_to_json(lower_bound(m, o), m).dump();
  auto b = report_to_json(lower_bound(m, o), m).dump();
  EXPECT_EQ(a, b);
  auto j = nlohmann::json::parse(a);
  for (const char* key : {"tool", "version", "input", "tier", "bound", "partial", "R", "levels", "bad_pairs",
                          "pointlike_candidates"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["bound"], 1);
  EXPECT_EQ(j["levels"].size(), 2u);
  EXPECT_EQ(j["tier"], "EXACT-explicit+UNDER-APPROX-symbolic");
  auto text = report_to_text(lower_bound(m, o), m);
  EXPECT_NE(text.find("lower bound on complexity: 1"), std::string::npos);
}

TEST(States, LevelsShrink) {
  // the level-1 states of M1 are among the level-0 ones up to domination
  LowerBoundOptions o;
  o.max_level = 1;
  o.backend = Backend::Both;
  auto rep = lower_bound(m1_monoid(), o);
  ASSERT_EQ(rep.levels.size(), 2u);
  EXPECT_LE(rep.levels[1].explicit_states, rep.levels[0].explicit_states);
  for (const auto& lr : rep.levels) EXPECT_TRUE(lr.dominated.value_or(false));
}
