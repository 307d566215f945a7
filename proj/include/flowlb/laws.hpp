#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "flow_explicit.hpp"
#include "r_action.hpp"

namespace flowlb {

/// Letter maps on k points; laws are checked in C(L^2) for L = SP over k.
struct LawInstance {
  std::string name;
  int k = 0;
  std::vector<std::vector<int>> maps;
};

/// Restriction of the right action on R to the first k points: images
/// outside the subset become undefined.
inline LawInstance restrict_instance(const RAction& ra, int k, std::string name) {
  if (k > ra.k()) k = ra.k();
  LawInstance inst{std::move(name), k, {}};
  for (const auto& full : ra.letter_maps()) {
    std::vector<int> m(k);
    for (int r = 0; r < k; ++r) m[r] = full[r] >= 0 && full[r] < k ? full[r] : -1;
    inst.maps.push_back(m);
  }
  return inst;
}

struct LawOptions {
  int depth = 3;          // pool depth for unary laws
  int binary_depth = 3;   // pool depth for pairwise laws
  std::size_t max_pool = 200000;
};

struct LawResult {
  std::string name;
  std::size_t checked = 0, failed = 0;
  std::string first_failure;
};

struct LawReport {
  std::string instance;
  int k = 0, lattice_size = 0;
  std::vector<std::size_t> pool_by_depth;  // cumulative
  std::vector<LawResult> results;
  bool ok() const {
    for (const auto& r : results)
      if (r.failed) return false;
    return true;
  }
};

/// Flows reachable from the letter flows (and I) by compose, join,
/// backflow, star and ω, layer by layer. Returns cumulative layers.
inline std::vector<std::vector<FlowRelation>> flow_pool(const LatticePtr& lat, const std::vector<FlowRelation>& gens,
                                                        int depth, std::size_t max_pool) {
  std::unordered_set<FlowRelation, FlowRelationHash> seen;
  std::vector<FlowRelation> all;
  auto add = [&](FlowRelation f) {
    if (seen.insert(f).second) {
      if (all.size() >= max_pool) throw Error(ErrorCode::BudgetExhausted, "law pool exceeds budget");
      all.push_back(std::move(f));
    }
  };
  add(identity_flow(lat));
  for (const auto& g : gens) add(g);
  std::vector<std::vector<FlowRelation>> layers{all};
  for (int d = 1; d <= depth; ++d) {
    const std::vector<FlowRelation> prev = all;
    for (const auto& f : prev) {
      add(backflow(f));
      add(star(f));
      add(omega_flow(f));
    }
    for (const auto& f : prev)
      for (const auto& g : prev) {
        add(compose(f, g));
        add(join_flows(f, g));
      }
    layers.push_back(all);
  }
  return layers;
}

namespace detail {

inline LAutomaton conjugated_star_automaton(const FlowRelation& f, const FlowRelation& g) {
  LAutomaton a;
  a.states = 3;
  a.edges.push_back({0, 1, omega_flow(compose(f, g))});
  a.edges.push_back({1, 2, f});
  a.edges.push_back({2, 1, g});
  return a;
}

/// Join of g^m over m >= 0 (finitely many distinct powers).
inline FlowRelation join_of_powers(const FlowRelation& g) {
  std::unordered_set<FlowRelation, FlowRelationHash> seen;
  FlowRelation p = identity_flow(g.lattice());
  FlowRelation acc = p;
  while (seen.insert(p).second) {
    acc = join_flows(acc, p);
    p = compose(p, g);
  }
  return acc;
}

}  // namespace detail

inline LawReport run_laws(const LawInstance& inst, const LawOptions& opt = {}) {
  auto lat = make_lattice(inst.k);
  std::vector<FlowRelation> gens;
  for (const auto& m : inst.maps) gens.push_back(free_flow(lat, m));
  const int pool_depth = std::max(opt.depth, opt.binary_depth);
  auto layers = flow_pool(lat, gens, pool_depth, opt.max_pool);
  const auto& unary = layers[opt.depth];
  const auto& binary = layers[opt.binary_depth];

  LawReport rep;
  rep.instance = inst.name;
  rep.k = inst.k;
  rep.lattice_size = lat->size();
  for (const auto& l : layers) rep.pool_by_depth.push_back(l.size());

  auto name = index_namer();
  std::vector<LawResult> res;
  auto law = [&](const std::string& nm) -> LawResult& {
    for (auto& r : res)
      if (r.name == nm) return r;
    res.push_back({nm, 0, 0, {}});
    return res.back();
  };
  auto check = [&](const std::string& nm, bool ok, const std::function<std::string()>& dumpf) {
    auto& r = law(nm);
    ++r.checked;
    if (!ok) {
      if (!r.failed) r.first_failure = dumpf();
      ++r.failed;
    }
  };

  const FlowRelation I = identity_flow(lat);
  for (const auto& g : unary) {
    auto d1 = [&] { return "g =\n" + dump(g, name); };
    const FlowRelation gs = star(g), gw = omega_flow(g), gws = omega_star(g), bg = backflow(g);
    check("identity: I g = g = g I", compose(I, g) == g && compose(g, I) == g, d1);
    check("meet-closed", is_meet_closed(g), d1);
    check("backflow below star", flow_leq(bg, gs), d1);
    {
      bool ok = true;
      std::unordered_set<FlowRelation, FlowRelationHash> seen;
      FlowRelation p = I;
      while (seen.insert(p).second) {
        ok = ok && flow_leq(p, gs);
        p = compose(p, g);
      }
      check("cheap (2): g^k <= join g^m <= g^*", ok && flow_leq(detail::join_of_powers(g), gs), d1);
    }
    check("cheap (4): g <= g^*, (g^*)^* = g^*", flow_leq(g, gs) && star(gs) == gs, d1);
    const FlowRelation h = compose(gws, gw);
    check("omega+star idempotent", compose(gws, gws) == gws && compose(h, h) == h, d1);
    check("omega+star R-class", compose(h, gws) == gws && compose(gws, h) == h, d1);
    check("omega+star: g^w+* g^w <= g^w+*", flow_leq(h, gws), d1);
    check("g^w <= g^w+*", flow_leq(gw, gws), d1);
    check("absorption: g g^w+* = g^w+*", compose(g, gws) == gws, d1);
    check("absorption: g^* g^w g = g^* g^w", compose({&gs, &gw, &g}) == compose(gs, gw), d1);
    check("absorption: g^w+* g^w g = g^w+* g^w = g g^w+* g^w",
          compose(h, g) == h && compose(g, h) == h, d1);
  }

  for (const auto& f : binary)
    for (const auto& g : binary) {
      auto d2 = [&] { return "f =\n" + dump(f, name) + "g =\n" + dump(g, name); };
      const FlowRelation fs = star(f), gs = star(g), jfg = join_flows(f, g);
      check("cheap (1): f <= f <-g <= f g^*",
            flow_leq(f, compose(f, backflow(g))) && flow_leq(compose(f, backflow(g)), compose(f, gs)), d2);
      {
        std::unordered_set<FlowRelation, FlowRelationHash> seen;
        FlowRelation p = I, acc = f;
        while (seen.insert(p).second) {
          acc = join_flows(acc, compose(f, p));
          p = compose(p, g);
        }
        FlowRelation jp = detail::join_of_powers(g);
        check("cheap (3): f <= join f g^k <= f join g^k <= f g^*",
              flow_leq(f, acc) && flow_leq(acc, compose(f, jp)) && flow_leq(compose(f, jp), compose(f, gs)), d2);
      }
      {
        FlowRelation a = star(jfg), b = compose(fs, gs), c = join_flows(fs, gs), d = compose(gs, fs);
        check("cheap (5): (f v g)^* = f^* g^* = f^* v g^* = g^* f^*", a == b && b == c && c == d, d2);
      }
      check("cheap (6): (f g^*)^* = f^* v g^* = (f^* g)^*",
            star(compose(f, gs)) == join_flows(fs, gs) && join_flows(fs, gs) == star(compose(fs, g)), d2);
      if (flow_leq(f, g)) {
        bool ok = flow_leq(fs, gs);
        check("cheap (4): star is order-preserving", ok, d2);
        bool mono = true;
        for (const auto& h : unary) mono = mono && flow_leq(compose(h, f), compose(h, g)) && flow_leq(compose(f, h), compose(g, h));
        check("ordered monoid: f <= g => hf <= hg, fh <= gh", mono, d2);
      }
      check("join is the least upper bound", flow_leq(f, jfg) && flow_leq(g, jfg), d2);
      auto A = detail::conjugated_star_automaton(f, g);
      check("conjugated star: A(q0,q2) = f (gf)^w+*", sample2(A, 0, 2, lat) == compose(f, omega_star(compose(g, f))),
            d2);
    }
  rep.results = std::move(res);
  return rep;
}

inline std::string law_table(const std::vector<LawReport>& reps) {
  std::ostringstream os;
  for (const auto& r : reps) {
    os << "instance " << r.instance << "  |R|=" << r.k << "  |L|=" << r.lattice_size << "  pool by depth:";
    for (auto c : r.pool_by_depth) os << " " << c;
    os << "\n";
    for (const auto& l : r.results)
      os << "  " << (l.failed ? "FAIL" : "pass") << "  " << l.name << "  (" << l.checked - l.failed << "/"
         << l.checked << ")\n";
    for (const auto& l : r.results)
      if (l.failed) os << "first failure of '" << l.name << "':\n" << l.first_failure;
  }
  return os.str();
}

}  // namespace flowlb
