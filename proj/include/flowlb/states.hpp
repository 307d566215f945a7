#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "explicit_states.hpp"
#include "group_mapping.hpp"
#include "symbolic.hpp"

namespace flowlb {

inline constexpr const char* kVersion = "0.1.0";

enum class StepKind { Point, Forward, OrderIdeal, BackflowCoarsen };

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::Point: return "POINT";
    case StepKind::Forward: return "FORWARD";
    case StepKind::OrderIdeal: return "ORDER_IDEAL";
    case StepKind::BackflowCoarsen: return "BACKFLOW_COARSEN";
  }
  return "?";
}

struct TraceStep {
  StepKind kind = StepKind::Point;
  int r = -1, s = -1;  // POINT(r) or ORDER_IDEAL pair {r,s}
  FlowTerm term;       // FORWARD / BACKFLOW_COARSEN
};

struct StateTrace {
  SetPartition state;
  std::vector<TraceStep> steps;
  int level = 0;
};

struct Budget {
  int max_letters = 8;
  int max_depth = 2;
  std::size_t max_states = 20000;
  std::size_t max_operators = 4096;
  bool exhaustive = false;
};

struct BadPair {
  int r = -1, s = -1;
  int h_class = -1;
  StateTrace trace;
};

/// One state of the pool with a back pointer to the state it came from.
struct StateRecord {
  SetPartition state;
  int parent = -1;
  TraceStep step;
};

struct Generation {
  std::vector<StateRecord> pool;
  std::vector<FlowTerm> operators;
  bool exhausted = false;
  std::string exhausted_reason;
  std::vector<BadPair> bad;

  StateTrace trace(int id, int level) const {
    StateTrace t;
    t.state = pool[id].state;
    t.level = level;
    for (int i = id; i >= 0; i = pool[i].parent) t.steps.push_back(pool[i].step);
    std::reverse(t.steps.begin(), t.steps.end());
    return t;
  }
};

/// Forward operators within budget: letters, then ω+★ atoms. Word bodies
/// are taken one per element of M (shortest word); nested bodies are
/// concatenations of at most two chunks, at least one of them an atom.
inline std::vector<FlowTerm> forward_operators(const EvalContext& ctx, const Budget& b, bool& truncated) {
  const FiniteMonoid& m = ctx.monoid;
  truncated = false;
  std::vector<FlowTerm> letters, atoms1, words;
  for (int x = 0; x < m.num_generators(); ++x) letters.push_back(FlowTerm::letter(x));
  auto by_text = [&](std::vector<FlowTerm>& v) {
    std::sort(v.begin(), v.end(), [&](const FlowTerm& a, const FlowTerm& c) { return term_less(a, c, m); });
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  if (b.max_depth >= 1) {
    for (int s = 0; s < m.size(); ++s) {
      if (s == m.identity()) continue;
      const auto& w = ctx.words[s];
      if (w.empty() || static_cast<int>(w.size()) > b.max_letters) continue;
      words.push_back(FlowTerm::word(w));
      FlowTerm root = FlowTerm::word(w).root();
      if (!ctx.certifier.certified(m.eval_word(root.letters()))) continue;
      atoms1.push_back(FlowTerm::omega_star(root));
    }
  }
  by_text(words);
  by_text(atoms1);
  std::vector<FlowTerm> atoms2;
  if (b.max_depth >= 2 && ctx.level == 0) {
    std::vector<FlowTerm> chunks = words;
    chunks.insert(chunks.end(), atoms1.begin(), atoms1.end());
    for (const auto& a : atoms1) atoms2.push_back(FlowTerm::omega_star(a));
    for (const auto& c1 : chunks)
      for (const auto& c2 : chunks) {
        if (c1.is_word() && c2.is_word()) continue;
        if (c1.size() + c2.size() > b.max_letters) continue;
        atoms2.push_back(FlowTerm::omega_star(FlowTerm::concat(c1, c2)));
      }
    by_text(atoms2);
  }
  std::vector<FlowTerm> ops = letters;
  ops.insert(ops.end(), atoms1.begin(), atoms1.end());
  ops.insert(ops.end(), atoms2.begin(), atoms2.end());
  if (ops.size() > b.max_operators) {
    ops.resize(b.max_operators);
    truncated = true;
  }
  return ops;
}

/// Vacuum feedback terms: every word-body ω+★ operator, alone and behind
/// each nonempty word prefix.
inline std::vector<FlowTerm> vacuum_feedback(const EvalContext& ctx, const std::vector<FlowTerm>& ops) {
  const FiniteMonoid& m = ctx.monoid;
  std::vector<FlowTerm> out;
  for (const auto& t : ops) {
    if (t.is_word() || !t.atoms().front().body->is_word()) continue;
    out.push_back(t);
    for (int u = 0; u < m.size(); ++u)
      if (u != m.identity() && !ctx.words[u].empty()) out.push_back(FlowTerm::concat(FlowTerm::word(ctx.words[u]), t));
  }
  return out;
}

inline SetPartition pair_state(int k, int r, int s) { return SetPartition::one_block(k, bit(r) | bit(s)); }

/// Distinct H-equivalent pairs sharing a block.
inline std::vector<std::pair<int, int>> h_pairs_in(const RAction& ra, const SetPartition& l) {
  std::vector<std::pair<int, int>> out;
  for (Mask blk : l.blocks())
    for_each_bit(blk, [&](int r) {
      for_each_bit(blk & ~(bit(r + 1) - 1), [&](int s) {
        if (ra.h_equiv(r, s)) out.emplace_back(r, s);
      });
    });
  return out;
}

/// Replays a trace from its POINT seed.
inline SetPartition replay(const EvalContext& ctx, const StateTrace& t) {
  SetPartition cur;
  bool seeded = false;
  for (const auto& st : t.steps) {
    switch (st.kind) {
      case StepKind::Point:
        cur = fn_stabilize(ctx, SetPartition::point(ctx.k(), st.r));
        seeded = true;
        break;
      case StepKind::Forward: cur = act_term(ctx, cur, st.term).value; break;
      case StepKind::BackflowCoarsen: cur = act_term(ctx, cur, st.term).source; break;
      case StepKind::OrderIdeal:
        if (!cur.same_block(st.r, st.s)) throw Error(ErrorCode::InvalidArgument, "order-ideal step not below state");
        cur = fn_stabilize(ctx, pair_state(ctx.k(), st.r, st.s));
        break;
    }
    if (!seeded) throw Error(ErrorCode::InvalidArgument, "trace does not start at a point");
  }
  return cur;
}

/// Worklist closure of the points under forward flow by the budgeted
/// operators and the pair form of the order-ideal rule. Installs the vacuum
/// feedback terms into ctx.
inline Generation generate_states(EvalContext& ctx, const Budget& b) {
  Generation g;
  bool truncated = false;
  g.operators = forward_operators(ctx, b, truncated);
  if (truncated) {
    g.exhausted = true;
    g.exhausted_reason = "operator budget";
  }
  ctx.set_vacuum_terms(vacuum_feedback(ctx, g.operators));

  const int k = ctx.k();
  std::map<SetPartition, int> index;
  std::set<std::pair<SetPartition, int>> work;  // (carrier size, canonical form) order
  std::set<std::pair<int, int>> reported;
  bool stop = false;

  auto add = [&](SetPartition s, int parent, TraceStep step) {
    if (stop || index.count(s)) return;
    if (g.pool.size() >= b.max_states) {
      g.exhausted = true;
      g.exhausted_reason = "state budget";
      stop = true;
      return;
    }
    int id = static_cast<int>(g.pool.size());
    index.emplace(s, id);
    g.pool.push_back({s, parent, std::move(step)});
    work.emplace(s, id);
    for (auto [r, q] : h_pairs_in(ctx.ra, s)) {
      if (!reported.insert({r, q}).second) continue;
      g.bad.push_back({r, q, ctx.ra.h_class[r], g.trace(id, ctx.level)});
      if (!b.exhaustive) stop = true;
    }
  };

  for (int r = 0; r < k; ++r) {
    TraceStep st;
    st.kind = StepKind::Point;
    st.r = r;
    add(fn_stabilize(ctx, SetPartition::point(k, r)), -1, st);
  }
  while (!work.empty() && !stop) {
    auto [l, id] = *work.begin();
    work.erase(work.begin());
    for (const auto& t : g.operators) {
      if (stop) break;
      auto res = act_term(ctx, l, t);
      int src = id;
      if (res.coarsened && !(res.source == l)) {
        TraceStep st;
        st.kind = StepKind::BackflowCoarsen;
        st.term = t;
        add(res.source, id, st);
        auto it = index.find(res.source);
        if (it == index.end()) break;
        src = it->second;
      }
      TraceStep st;
      st.kind = StepKind::Forward;
      st.term = t;
      add(res.value, src, st);
    }
    for (Mask blk : l.blocks())
      for_each_bit(blk, [&](int r) {
        for_each_bit(blk & ~(bit(r + 1) - 1), [&](int s) {
          TraceStep st;
          st.kind = StepKind::OrderIdeal;
          st.r = r;
          st.s = s;
          add(fn_stabilize(ctx, pair_state(k, r, s)), id, st);
        });
      });
  }
  return g;
}

inline std::vector<BadPair> bad_pairs(const Generation& g, const RAction& ra, int level) {
  std::vector<BadPair> out;
  std::set<std::pair<int, int>> seen;
  for (int id = 0; id < static_cast<int>(g.pool.size()); ++id)
    for (auto [r, s] : h_pairs_in(ra, g.pool[id].state))
      if (seen.insert({r, s}).second) out.push_back({r, s, ra.h_class[r], g.trace(id, level)});
  return out;
}

/// Blocks with at least two points; every subset of one is a candidate.
inline std::vector<Mask> pointlike_candidates(const std::vector<SetPartition>& states) {
  std::set<Mask> blocks;
  for (const auto& l : states)
    for (Mask b : l.blocks())
      if (popcount(b) >= 2) blocks.insert(b);
  // keep the maximal ones
  std::vector<Mask> out;
  for (Mask b : blocks) {
    bool covered = false;
    for (Mask c : blocks)
      if (c != b && subset(b, c)) covered = true;
    if (!covered) out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lower bound report

enum class Backend { Explicit, Symbolic, Both };

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::Explicit: return "explicit";
    case Backend::Symbolic: return "symbolic";
    case Backend::Both: return "both";
  }
  return "?";
}

inline constexpr int kExplicitMaxPoints = 6;

struct LowerBoundOptions {
  int max_level = 0;
  Backend backend = Backend::Symbolic;
  Budget budget;
  TypeIOracle oracle = TypeIOracle::trivial();
  std::string input_id = "<memory>";
  ExplicitOptions explicit_options;
};

struct LevelReport {
  int level = 0;
  bool symbolic_run = false, explicit_run = false;
  std::size_t symbolic_states = 0, operators = 0;
  bool exhausted = false;
  std::string exhausted_reason;
  std::vector<BadPair> bad;  // symbolic, with traces
  std::vector<SetPartition> symbolic_maximal;
  std::size_t explicit_states = 0, explicit_values = 0;
  std::vector<SetPartition> explicit_maximal;
  std::vector<std::pair<int, int>> explicit_bad;
  std::optional<bool> dominated;  // every symbolic state below an explicit one
  SymbolicCounters counters;
};

struct LowerBoundReport {
  std::string input_id;
  LowerBoundOptions options;
  std::vector<std::string> point_names;
  std::vector<LevelReport> levels;
  std::vector<Mask> pointlikes;
  int bound = 1;
  bool partial = false;

  std::string tier() const {
    switch (options.backend) {
      case Backend::Explicit: return "EXACT-explicit";
      case Backend::Symbolic: return "UNDER-APPROX-symbolic";
      case Backend::Both: return "EXACT-explicit+UNDER-APPROX-symbolic";
    }
    return "?";
  }
};

inline std::vector<SetPartition> maximal_of(const std::vector<SetPartition>& xs) {
  std::vector<SetPartition> out;
  for (const auto& a : xs) {
    bool top = true;
    for (const auto& b : xs)
      if (!(a == b) && sp_leq(a, b)) top = false;
    if (top) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline LowerBoundReport lower_bound(const FiniteMonoid& m, const LowerBoundOptions& opt) {
  const GreenClasses g = green_classes(m);
  auto gm = check_group_mapping(m, g);
  if (auto* bad = std::get_if<NotGroupMapping>(&gm)) throw Error(ErrorCode::NotGroupMapping, bad->reason);
  const GroupMappingCert& cert = std::get<GroupMappingCert>(gm);

  LowerBoundReport rep;
  rep.input_id = opt.input_id;
  rep.options = opt;
  std::vector<SetPartition> all_states;
  for (int n = 0; n <= opt.max_level; ++n) {
    EvalContext ctx(m, cert, g, n, opt.oracle);
    if (rep.point_names.empty())
      for (int r : ctx.ra.R) rep.point_names.push_back(m.name(r));
    if (opt.backend != Backend::Symbolic && ctx.k() > kExplicitMaxPoints)
      throw Error(ErrorCode::TooLarge, "explicit backend needs |R| <= " + std::to_string(kExplicitMaxPoints));
    LevelReport lr;
    lr.level = n;
    std::vector<SetPartition> sym;
    if (opt.backend != Backend::Explicit) {
      lr.symbolic_run = true;
      Generation gen = generate_states(ctx, opt.budget);
      lr.symbolic_states = gen.pool.size();
      lr.operators = gen.operators.size();
      lr.exhausted = gen.exhausted;
      lr.exhausted_reason = gen.exhausted_reason;
      lr.bad = gen.bad;
      for (const auto& rec : gen.pool) sym.push_back(rec.state);
      lr.symbolic_maximal = maximal_of(sym);
      lr.counters = ctx.stats.snapshot();
      all_states.insert(all_states.end(), sym.begin(), sym.end());
    }
    if (opt.backend != Backend::Symbolic) {
      lr.explicit_run = true;
      ExplicitEngine eng(ctx.ra, ctx.certifier, opt.explicit_options);
      const auto& lat = *eng.lattice();
      lr.explicit_states = eng.states().size();
      lr.explicit_values = eng.values().size();
      std::vector<SetPartition> ex;
      for (int s : eng.maximal_states()) ex.push_back(lat.at(s));
      std::sort(ex.begin(), ex.end());
      lr.explicit_maximal = ex;
      std::set<std::pair<int, int>> seen;
      for (int s : eng.states())
        for (auto pr : h_pairs_in(ctx.ra, lat.at(s))) seen.insert(pr);
      lr.explicit_bad.assign(seen.begin(), seen.end());
      if (lr.symbolic_run) {
        bool ok = true;
        for (const auto& s : sym) ok = ok && eng.dominated(lat.index_of(s));
        lr.dominated = ok;
      }
      if (opt.backend == Backend::Explicit) all_states.insert(all_states.end(), ex.begin(), ex.end());
    }
    if (!lr.bad.empty() || !lr.explicit_bad.empty()) rep.bound = std::max(rep.bound, n + 2);
    rep.partial = rep.partial || lr.exhausted;
    rep.levels.push_back(std::move(lr));
  }
  rep.pointlikes = pointlike_candidates(all_states);
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {
inline nlohmann::ordered_json mask_names(Mask y, const std::vector<std::string>& names) {
  auto a = nlohmann::ordered_json::array();
  for_each_bit(y, [&](int r) { a.push_back(names[r]); });
  return a;
}
}  // namespace detail

inline nlohmann::ordered_json trace_to_json(const StateTrace& t, const FiniteMonoid& m, const PointNamer& nm) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& s : t.steps) {
    nlohmann::ordered_json j;
    j["step"] = to_string(s.kind);
    if (s.kind == StepKind::Point) j["point"] = nm(s.r);
    if (s.kind == StepKind::OrderIdeal) j["pair"] = {nm(s.r), nm(s.s)};
    if (s.kind == StepKind::Forward || s.kind == StepKind::BackflowCoarsen) j["term"] = to_text(s.term, m);
    steps.push_back(j);
  }
  return {{"state", to_text(t.state, nm)}, {"level", t.level}, {"steps", steps}};
}

inline nlohmann::ordered_json report_to_json(const LowerBoundReport& rep, const FiniteMonoid& m) {
  const auto& names = rep.point_names;
  PointNamer nm = [&](int r) { return names[r]; };
  using J = nlohmann::ordered_json;
  J out;
  out["tool"] = "flowlb";
  out["version"] = kVersion;
  out["input"] = rep.input_id;
  const auto& o = rep.options;
  J oracle;
  oracle["kind"] = o.oracle.describe();
  if (o.oracle.kind == TypeIOracle::Kind::Declared) {
    J decl = J::array();
    for (const auto& d : o.oracle.declared) decl.push_back({{"elements", d}, {"tag", "UNVERIFIED-ASSERTION"}});
    oracle["declared"] = decl;
  }
  out["config"] = {{"max_level", o.max_level}, {"backend", to_string(o.backend)}, {"exhaustive", o.budget.exhaustive},
                   {"oracle", oracle}};
  out["budgets"] = {{"term_letters", o.budget.max_letters},
                    {"nesting", o.budget.max_depth},
                    {"max_states", o.budget.max_states},
                    {"max_operators", o.budget.max_operators},
                    {"explicit_max_values", o.explicit_options.max_values}};
  out["tier"] = rep.tier();
  out["bound"] = rep.bound;
  out["partial"] = rep.partial;
  out["R"] = names;
  J levels = J::array();
  J all_bad = J::array();
  for (const auto& lr : rep.levels) {
    J l;
    l["level"] = lr.level;
    if (lr.symbolic_run) {
      J bad = J::array();
      for (const auto& bp : lr.bad) {
        J b{{"r", names[bp.r]}, {"s", names[bp.s]}, {"h_class", bp.h_class}, {"trace", trace_to_json(bp.trace, m, nm)}};
        bad.push_back(b);
        all_bad.push_back(b);
      }
      J maxi = J::array();
      for (const auto& s : lr.symbolic_maximal) maxi.push_back(to_text(s, nm));
      l["symbolic"] = {{"tier", "UNDER-APPROX-symbolic"},
                       {"states", lr.symbolic_states},
                       {"operators", lr.operators},
                       {"exhausted", lr.exhausted},
                       {"exhausted_reason", lr.exhausted_reason},
                       {"maximal_states", maxi},
                       {"bad_pairs", bad},
                       {"counters",
                        {{"stabilizations", lr.counters.stabilizations},
                         {"merges", lr.counters.merges},
                         {"backflows", lr.counters.backflows},
                         {"evaluations", lr.counters.evaluations}}}};
    }
    if (lr.explicit_run) {
      J maxi = J::array();
      for (const auto& s : lr.explicit_maximal) maxi.push_back(to_text(s, nm));
      J bad = J::array();
      for (auto [r, s] : lr.explicit_bad) bad.push_back({{"r", names[r]}, {"s", names[s]}});
      l["explicit"] = {{"tier", "EXACT-explicit"},
                       {"states", lr.explicit_states},
                       {"flow_values", lr.explicit_values},
                       {"maximal_states", maxi},
                       {"bad_pairs", bad}};
    }
    if (lr.dominated) l["symbolic_below_explicit"] = *lr.dominated;
    levels.push_back(l);
  }
  out["levels"] = levels;
  out["bad_pairs"] = all_bad;
  J pl = J::array();
  for (Mask a : rep.pointlikes) pl.push_back(detail::mask_names(a, names));
  out["pointlike_candidates"] = pl;
  return out;
}

inline std::string report_to_text(const LowerBoundReport& rep, const FiniteMonoid& m) {
  const auto& names = rep.point_names;
  PointNamer nm = [&](int r) { return names[r]; };
  std::ostringstream os;
  os << "flowlb " << kVersion << "  input " << rep.input_id << "\n";
  os << "backend " << to_string(rep.options.backend) << "  tier " << rep.tier() << "  oracle "
     << rep.options.oracle.describe() << "\n";
  os << "budgets: letters " << rep.options.budget.max_letters << ", nesting " << rep.options.budget.max_depth
     << ", states " << rep.options.budget.max_states << ", operators " << rep.options.budget.max_operators << "\n";
  os << "|R| = " << names.size() << "\n";
  for (const auto& lr : rep.levels) {
    os << "level " << lr.level << ":";
    if (lr.symbolic_run)
      os << " symbolic " << lr.symbolic_states << " states / " << lr.operators << " operators"
         << (lr.exhausted ? " (budget exhausted: " + lr.exhausted_reason + ")" : "") << ", " << lr.bad.size()
         << " bad pairs;";
    if (lr.explicit_run)
      os << " explicit " << lr.explicit_states << " states, " << lr.explicit_bad.size() << " bad pairs;";
    if (lr.dominated) os << " symbolic below explicit: " << (*lr.dominated ? "yes" : "NO");
    os << "\n";
    for (const auto& bp : lr.bad) {
      os << "  bad pair " << names[bp.r] << " ~H " << names[bp.s] << " in " << to_text(bp.trace.state, nm) << "\n";
      for (const auto& st : bp.trace.steps) {
        os << "    " << to_string(st.kind);
        if (st.kind == StepKind::Point) os << " " << nm(st.r);
        if (st.kind == StepKind::OrderIdeal) os << " {" << nm(st.r) << "," << nm(st.s) << "}";
        if (st.kind == StepKind::Forward || st.kind == StepKind::BackflowCoarsen) os << " " << to_text(st.term, m);
        os << "\n";
      }
    }
  }
  os << "pointlike candidates: " << rep.pointlikes.size() << "\n";
  os << "lower bound on complexity: " << rep.bound << (rep.partial ? " (partial run)" : "") << "\n";
  return os.str();
}

}  // namespace flowlb
