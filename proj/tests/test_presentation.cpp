#include <gtest/gtest.h>

#include <functional>

#include "common.hpp"

using namespace flowlb;
using flowlb::testing::kData;

namespace {

struct Pres : ::testing::Test {
  FiniteMonoid m = m1_monoid();
  GroupMappingCert cert = require_group_mapping(m);
  GreenClasses g = green_classes(m);
  RAction ra = make_r_action(m, cert, g);
  int k() const { return ra.k(); }

  std::pair<PartialAutomaton, FlowLabeling> load(const std::string& stem) const {
    auto a = load_automaton(kData + "/" + stem + ".automaton.json", m);
    return {a, load_labeling(kData + "/" + stem + ".labeling.json", a, ra)};
  }
  // one state, every letter loops
  PartialAutomaton loop1() const {
    auto a = PartialAutomaton::empty(1, alphabet_of(m));
    for (int x = 0; x < a.letters(); ++x) a.set(0, x, 0);
    return a;
  }
  // a pair of points some letter sends to one point
  std::optional<std::pair<int, int>> colliding(int& letter) const {
    auto maps = ra.letter_maps();
    for (int x = 0; x < static_cast<int>(maps.size()); ++x)
      for (int r = 0; r < k(); ++r)
        for (int s = r + 1; s < k(); ++s)
          if (maps[x][r] >= 0 && maps[x][r] == maps[x][s]) {
            letter = x;
            return std::make_pair(r, s);
          }
    return std::nullopt;
  }
};

Error expect_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorCode::InvalidArgument, "");
}

}  // namespace

TEST_F(Pres, Fixtures) {
  auto [pa, pf] = load("m1_points");
  EXPECT_TRUE(verify_complete_flow(pa, pf, ra).ok());
  EXPECT_TRUE(check_presentation(pa, pf, ra).ok());

  auto sink = load_automaton(kData + "/m1_sink.automaton.json", m);
  auto v = verify_complete_flow(sink, pf, ra);
  EXPECT_EQ(v.kind, FlowViolation::Kind::SinkViolation);
  EXPECT_EQ(v.message.rfind("SINK_VIOLATION(", 0), 0u);

  auto [ta, tf] = load("m1_top");
  EXPECT_TRUE(verify_complete_flow(ta, tf, ra).ok());
  auto p = check_presentation(ta, tf, ra);
  EXPECT_EQ(p.kind, FlowViolation::Kind::Presentation);
  EXPECT_TRUE(ra.h_equiv(p.r, p.s));
  EXPECT_NE(p.r, p.s);
}

TEST_F(Pres, FileRoundTrip) {
  auto [pa, pf] = load("m1_points");
  auto a2 = automaton_from_json(automaton_to_json(pa), m);
  EXPECT_EQ(a2.delta, pa.delta);
  EXPECT_EQ(a2.state_names, pa.state_names);
  EXPECT_EQ(labeling_from_json(labeling_to_json(pf, pa, ra), pa, ra), pf);
}

TEST_F(Pres, TwoStateExample) {
  // q0 reads every letter into q1, which loops; q1 carries the top.
  auto a = PartialAutomaton::empty(2, alphabet_of(m));
  for (int x = 0; x < a.letters(); ++x) {
    a.set(0, x, 1);
    a.set(1, x, 1);
  }
  for (Mask y = 1; y <= full_mask(k()); ++y) {
    FlowLabeling f{SetPartition::one_block(k(), y), SetPartition::top(k())};
    EXPECT_TRUE(verify_complete_flow(a, f, ra).ok()) << y;
  }
  int x = -1;
  auto c = colliding(x);
  ASSERT_TRUE(c.has_value());
  FlowLabeling bad{SetPartition::discrete(k(), bit(c->first) | bit(c->second)), SetPartition::top(k())};
  auto v = verify_complete_flow(a, bad, ra);
  EXPECT_EQ(v.kind, FlowViolation::Kind::EdgeViolation);
  EXPECT_EQ(v.q, 0);
  EXPECT_EQ(v.q2, 1);
}

TEST_F(Pres, NotFullyDefined) {
  auto a = loop1();
  auto v = verify_complete_flow(a, {SetPartition::bottom(k())}, ra);
  EXPECT_EQ(v.kind, FlowViolation::Kind::NotFullyDefined);
  EXPECT_EQ(v.r, 0);
  EXPECT_TRUE(verify_complete_flow(a, {SetPartition::top(k())}, ra).ok());
}

TEST_F(Pres, LittleBoxes) {
  auto points = load("m1_points");
  auto top = load("m1_top");
  // with a one-state top factor nothing changes
  auto [a1, f1] = product_flows({points, top}, ra);
  EXPECT_EQ(a1.states(), points.first.states());
  EXPECT_EQ(a1.delta, points.first.delta);
  EXPECT_EQ(f1, points.second);
  // squared: the diagonal keeps its labels, the rest meet to points that differ
  auto [a2, f2] = product_flows({points, points}, ra);
  const int n = points.first.states();
  ASSERT_EQ(a2.states(), n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      EXPECT_EQ(f2[i * n + j], i == j ? points.second[i] : SetPartition::bottom(k()));
  // the top flow alone fails as a presentation; its product with the points passes
  EXPECT_FALSE(check_presentation(top.first, top.second, ra).ok());
  auto [a3, f3] = product_flows({top, points}, ra);
  EXPECT_TRUE(check_presentation(a3, f3, ra).ok());
  // factors must be complete flows
  auto sink = std::make_pair(load_automaton(kData + "/m1_sink.automaton.json", m), points.second);
  EXPECT_EQ(expect_error([&] { product_flows({sink}, ra); }).code(), ErrorCode::InvalidArgument);
}

TEST_F(Pres, PresentationRoundTrip) {
  for (auto stem : {"m1_points", "m1_top"}) {
    auto [a, f] = load(stem);
    auto p = flow_to_presentation(a, f, ra);
    EXPECT_EQ(p.dstates.size(), static_cast<std::size_t>(k()));
    auto [a2, f2] = presentation_to_flow(p, ra);
    EXPECT_EQ(f2, f) << stem;
    EXPECT_TRUE(verify_complete_flow(a2, f2, ra).ok());
    EXPECT_TRUE(embeds_in(a2, p.target));
    EXPECT_TRUE(embeds_in(a, p.target));
  }
}

TEST_F(Pres, NotAdmissible) {
  {
    auto [a, f] = load("m1_points");
    auto p = flow_to_presentation(a, f, ra);
    std::fill(p.block.begin(), p.block.end(), 0);
    auto e = expect_error([&] { check_admissible(p, ra); });
    EXPECT_EQ(e.code(), ErrorCode::NotAdmissible);
    EXPECT_NE(std::string(e.what()).find("cross-state"), std::string::npos);
  }
  auto [ta, tf] = load("m1_top");
  auto base = flow_to_presentation(ta, tf, ra);
  {
    // discrete classes on the top flow: a colliding letter merges two of them
    auto p = base;
    for (std::size_t i = 0; i < p.block.size(); ++i) p.block[i] = static_cast<int>(i);
    auto e = expect_error([&] { check_admissible(p, ra); });
    EXPECT_EQ(e.code(), ErrorCode::NotAdmissible);
    EXPECT_NE(std::string(e.what()).find("not injective"), std::string::npos);
  }
  // some two-block split is not a congruence; every admissible one is
  // stable as a label
  int congruence_failures = 0;
  for (const auto& sp : materialize_lattice(k())) {
    if (sp.carrier() != full_mask(k())) continue;
    auto p = base;
    for (std::size_t i = 0; i < p.dstates.size(); ++i) p.block[i] = sp.block_of(p.dstates[i].first);
    try {
      check_admissible(p, ra);
      EXPECT_TRUE(verify_complete_flow(ta, {sp}, ra).ok()) << to_text(sp);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotAdmissible);
      if (std::string(e.what()).find("not a congruence") != std::string::npos) ++congruence_failures;
      EXPECT_FALSE(verify_complete_flow(ta, {sp}, ra).ok()) << to_text(sp);
    }
  }
  EXPECT_GT(congruence_failures, 0);
}

TEST_F(Pres, TransitionMonoid) {
  auto [ta, tf] = load("m1_top");
  auto tm = transition_monoid(ta);
  EXPECT_EQ(tm.monoid.size(), 1);
  EXPECT_TRUE(is_aperiodic(tm.monoid));
  auto [pa, pf] = load("m1_points");
  auto pm = transition_monoid(pa);
  EXPECT_LE(pm.monoid.size(), m.size());
  EXPECT_NO_THROW(validate(pm.monoid));
  EXPECT_TRUE(embeds_in(pa, pm));
  EXPECT_FALSE(embeds_in(pa, tm));
  // the points automaton is the action on R: letters act as in M
  for (int x = 0; x < pa.letters(); ++x)
    for (int q = 0; q < pa.states(); ++q) {
      int r = ra.lookup(pa.state_names[q].substr(2));
      int r2 = ra.act(r, m.generator_element(x));
      EXPECT_EQ(pa.next(q, x), r2 < 0 ? -1 : pa.state_index("q_" + ra.namer()(r2)));
    }
}

TEST_F(Pres, LeastCompleteFlow) {
  auto lat = make_lattice(k());
  std::vector<detail::ClosureTable> tabs;
  for (const auto& map : ra.letter_maps()) tabs.emplace_back(free_flow(lat, map));
  auto [pa, pf] = load("m1_points");
  std::vector<int> cover(k());
  for (int r = 0; r < k(); ++r) cover[r] = pa.state_index("q_" + ra.namer()(r));
  auto F = least_complete_flow(pa, lat, tabs, cover, ra);
  ASSERT_TRUE(F.has_value());
  for (int q = 0; q < pa.states(); ++q) EXPECT_EQ(lat->at((*F)[q]), pf[q]);

  auto a = loop1();
  auto G = least_complete_flow(a, lat, tabs, std::vector<int>(k(), 0), ra);
  ASSERT_TRUE(G.has_value());
  FlowLabeling gl{lat->at((*G)[0])};
  EXPECT_TRUE(verify_complete_flow(a, gl, ra).ok());
  // below every complete labeling of the same automaton
  for (int l = 0; l < lat->size(); ++l)
    EXPECT_TRUE(!verify_complete_flow(a, {lat->at(l)}, ra).ok() || lat->leq((*G)[0], l));

  // no transitions at all: x keeps points alive, so no complete flow exists
  auto none = PartialAutomaton::empty(1, alphabet_of(m));
  EXPECT_FALSE(least_complete_flow(none, lat, tabs, std::vector<int>(k(), 0), ra).has_value());
}

TEST_F(Pres, MalformedAutomata) {
  nlohmann::ordered_json j = {{"states", {"p", "q"}},
                              {"alphabet", {"x", "y", "z"}},
                              {"delta", {{"p", "x", "p"}, {"p", "x", "q"}}}};
  EXPECT_EQ(expect_error([&] { automaton_from_json(j, m); }).code(), ErrorCode::ParseError);
  j["delta"] = {{"p", "w", "p"}};
  EXPECT_EQ(expect_error([&] { automaton_from_json(j, m); }).code(), ErrorCode::ParseError);
  j["delta"] = {{"p", "x", "r"}};
  EXPECT_EQ(expect_error([&] { automaton_from_json(j, m); }).code(), ErrorCode::ParseError);
  j["alphabet"] = {"x", "y"};
  j["delta"] = nlohmann::ordered_json::array();
  EXPECT_EQ(expect_error([&] { automaton_from_json(j, m); }).code(), ErrorCode::InvalidArgument);
  auto a = loop1();
  nlohmann::ordered_json lab = nlohmann::ordered_json::object();
  EXPECT_EQ(expect_error([&] { labeling_from_json(lab, a, ra); }).code(), ErrorCode::ParseError);
}
