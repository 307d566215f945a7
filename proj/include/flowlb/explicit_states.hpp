#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <unordered_set>
#include <vector>

#include "flow_explicit.hpp"
#include "flow_term.hpp"
#include "loopable.hpp"
#include "r_action.hpp"

namespace flowlb {

struct ExplicitOptions {
  std::size_t max_values = 100000;
};

/// Exact F_n-states over a materialized lattice.
///
/// F_n is found as a greatest fixed point: starting from the identity, the
/// monoid generated by the sandwiched letters F x F (closed under ω+★ of
/// loopable elements) is saturated, and F is replaced by the partial
/// identity on the intersection of all domains until nothing changes.
class ExplicitEngine {
 public:
  ExplicitEngine(const RAction& ra, const LoopableCertifier& cert, ExplicitOptions opt = {})
      : ra_(&ra), cert_(&cert), opt_(opt), lat_(make_lattice(ra.k())) {
    for (auto& map : ra.letter_maps()) letters_.push_back(free_flow(lat_, map));
    compute_vacuum();
    compute_states();
  }

  const LatticePtr& lattice() const { return lat_; }
  const FlowRelation& letter_flow(int x) const { return letters_[x]; }
  const FlowRelation& vacuum() const { return fn_; }
  bool is_stable(int l) const { return fn_.has(l, l); }
  int stabilize(int l) const { return backward(fn_, l); }
  const std::vector<FlowRelation>& values() const { return values_; }
  const std::vector<int>& states() const { return states_; }
  int rounds() const { return rounds_; }

  bool is_state(int l) const { return in_states_[l]; }
  /// Some st_n element lies above l.
  bool dominated(int l) const {
    for (int s : maximal_)
      if (lat_->leq(l, s)) return true;
    return false;
  }
  const std::vector<int>& maximal_states() const { return maximal_; }

  /// F x1 F x2 ... F for a word.
  FlowRelation word_value(const std::vector<int>& w) const {
    FlowRelation v = fn_;
    for (int x : w) v = compose(compose(v, letters_[x]), fn_);
    return v;
  }

  /// Standard interpretation of a term with the computed F_n.
  FlowRelation eval(const FlowTerm& t) const {
    FlowRelation v = fn_;
    for (const auto& a : t.atoms()) {
      if (a.is_letter()) {
        v = compose(compose(v, letters_[a.letter]), fn_);
      } else {
        if (!body_allowed(*a.body)) throw Error(ErrorCode::NotLoopable, "explicit ω+★ body not certified");
        v = compose(v, omega_star(eval(*a.body)));
      }
    }
    return v;
  }

  int forward_of(const FlowTerm& t, int l) const { return forward(eval(t), l); }

 private:
  bool body_allowed(const FlowTerm& b) const {
    if (b.is_word()) return cert_->certified(ra_->monoid->eval_word(b.letters()));
    return cert_->level() == 0;
  }

  std::vector<FlowRelation> saturate(const FlowRelation& f) const {
    const FiniteMonoid& m = *ra_->monoid;
    std::unordered_set<FlowRelation, FlowRelationHash> seen;
    std::vector<FlowRelation> out;
    std::deque<std::size_t> work;
    auto add = [&](FlowRelation v) {
      if (seen.insert(v).second) {
        out.push_back(std::move(v));
        work.push_back(out.size() - 1);
        if (out.size() > opt_.max_values)
          throw Error(ErrorCode::BudgetExhausted, "explicit flow monoid exceeds value budget");
      }
    };
    add(f);
    for (const auto& x : letters_) add(compose(compose(f, x), f));
    if (cert_->level() > 0) {
      // Word values paired with their element of M; ω+★ applies where the
      // element is certified.
      using Key = std::pair<FlowRelation, int>;
      struct KeyHash {
        std::size_t operator()(const Key& k) const { return k.first.hash() * 31 + static_cast<std::size_t>(k.second); }
      };
      std::vector<FlowRelation> sandwiched;
      for (const auto& x : letters_) sandwiched.push_back(compose(compose(f, x), f));
      std::unordered_set<Key, KeyHash> pairs;
      std::deque<Key> q;
      pairs.insert({f, m.identity()});
      q.push_back({f, m.identity()});
      while (!q.empty()) {
        auto [v, s] = q.front();
        q.pop_front();
        if (s != m.identity() || !(v == f)) {
          if (cert_->certified(s)) add(omega_star(v));
        }
        for (int x = 0; x < static_cast<int>(sandwiched.size()); ++x) {
          Key nk{compose(v, sandwiched[x]), m.mul(s, m.generator_element(x))};
          if (pairs.insert(nk).second) {
            q.push_back(nk);
            if (pairs.size() > opt_.max_values)
              throw Error(ErrorCode::BudgetExhausted, "explicit word values exceed value budget");
          }
        }
      }
    }
    while (!work.empty()) {
      std::size_t i = work.front();
      work.pop_front();
      if (cert_->level() == 0) add(omega_star(out[i]));
      for (std::size_t j = 0; j <= i && j < out.size(); ++j) {
        add(compose(out[i], out[j]));
        add(compose(out[j], out[i]));
      }
    }
    return out;
  }

  void compute_vacuum() {
    const int n = lat_->size();
    std::vector<bool> d(n, true);
    fn_ = identity_flow(lat_);
    while (true) {
      ++rounds_;
      values_ = saturate(fn_);
      std::vector<bool> nd = d;
      for (const auto& v : values_) {
        auto dom = domain(v);
        for (int a = 0; a < n; ++a) nd[a] = nd[a] && dom[a];
      }
      if (nd == d) break;
      d = nd;
      fn_ = partial_identity(lat_, d);
    }
  }

  void compute_states() {
    const int n = lat_->size();
    in_states_.assign(n, false);
    std::deque<int> work;
    auto add = [&](int l) {
      if (!in_states_[l]) {
        in_states_[l] = true;
        work.push_back(l);
      }
    };
    for (int r = 0; r < ra_->k(); ++r) add(stabilize(lat_->index_of(SetPartition::point(ra_->k(), r))));
    while (!work.empty()) {
      int l = work.front();
      work.pop_front();
      for (const auto& v : values_) add(forward(v, l));
      for (int a = 0; a < n; ++a)
        if (lat_->leq(a, l)) add(stabilize(a));
    }
    for (int a = 0; a < n; ++a)
      if (in_states_[a]) states_.push_back(a);
    for (int a : states_) {
      bool top = true;
      for (int b : states_)
        if (b != a && lat_->leq(a, b)) top = false;
      if (top) maximal_.push_back(a);
    }
  }

  const RAction* ra_;
  const LoopableCertifier* cert_;
  ExplicitOptions opt_;
  LatticePtr lat_;
  std::vector<FlowRelation> letters_;
  FlowRelation fn_;
  std::vector<FlowRelation> values_;
  std::vector<bool> in_states_;
  std::vector<int> states_, maximal_;
  int rounds_ = 0;
};

}  // namespace flowlb
