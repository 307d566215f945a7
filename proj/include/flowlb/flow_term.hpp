#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "error.hpp"
#include "monoid.hpp"

namespace flowlb {

/// Well-formed formula over the generator alphabet, kept right-flattened:
/// a term is a sequence of atoms, each a letter or an ω+★ of a body.
/// The empty sequence is ε.
class FlowTerm {
 public:
  struct Atom {
    int letter = -1;                         // >= 0 for a letter
    std::shared_ptr<const FlowTerm> body;    // set for ω+★
    bool is_letter() const { return letter >= 0; }
    friend bool operator==(const Atom& a, const Atom& b) {
      if (a.letter != b.letter) return false;
      if (a.is_letter()) return true;
      return *a.body == *b.body;
    }
  };

  FlowTerm() = default;

  static FlowTerm epsilon() { return {}; }
  static FlowTerm letter(int x) {
    FlowTerm t;
    t.atoms_.push_back({x, nullptr});
    return t;
  }
  static FlowTerm word(const std::vector<int>& letters) {
    FlowTerm t;
    for (int x : letters) t.atoms_.push_back({x, nullptr});
    return t;
  }
  static FlowTerm concat(const FlowTerm& a, const FlowTerm& b) {
    FlowTerm t = a;
    t.atoms_.insert(t.atoms_.end(), b.atoms_.begin(), b.atoms_.end());
    return t;
  }
  /// ω+★ of the primitive root of `body`; ε stays ε.
  static FlowTerm omega_star(const FlowTerm& body) {
    if (body.is_epsilon()) return epsilon();
    FlowTerm t;
    t.atoms_.push_back({-1, std::make_shared<const FlowTerm>(body.root())});
    return t;
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool is_epsilon() const { return atoms_.empty(); }
  bool is_word() const {
    for (auto& a : atoms_)
      if (!a.is_letter()) return false;
    return true;
  }
  std::vector<int> letters() const {
    std::vector<int> w;
    for (auto& a : atoms_) w.push_back(a.letter);
    return w;
  }
  /// Number of letter occurrences.
  int size() const {
    int s = 0;
    for (auto& a : atoms_) s += a.is_letter() ? 1 : a.body->size();
    return s;
  }
  /// Nesting depth of ω+★.
  int depth() const {
    int d = 0;
    for (auto& a : atoms_)
      if (!a.is_letter()) d = std::max(d, 1 + a.body->depth());
    return d;
  }

  /// True when the atom sequence is a k-fold repetition (k >= 2).
  bool is_proper_power() const { return root_length() < atoms_.size(); }
  FlowTerm root() const {
    FlowTerm t;
    t.atoms_.assign(atoms_.begin(), atoms_.begin() + static_cast<long>(root_length()));
    return t;
  }

  friend bool operator==(const FlowTerm& a, const FlowTerm& b) { return a.atoms_ == b.atoms_; }

 private:
  std::size_t root_length() const {
    const std::size_t n = atoms_.size();
    for (std::size_t p = 1; p < n; ++p) {
      if (n % p) continue;
      bool periodic = true;
      for (std::size_t i = p; i < n && periodic; ++i) periodic = atoms_[i] == atoms_[i - p];
      if (periodic) return p;
    }
    return n;
  }

  std::vector<Atom> atoms_;
};

inline std::string to_text(const FlowTerm& t, const FiniteMonoid& m) {
  if (t.is_epsilon()) return "\xCE\xB5";
  std::string s;
  for (const auto& a : t.atoms()) {
    if (!s.empty()) s += " ";
    s += a.is_letter() ? m.generator_name(a.letter) : "(" + to_text(*a.body, m) + ")^w*";
  }
  return s;
}

/// Order used by the worklist: size, then depth, then text.
inline bool term_less(const FlowTerm& a, const FlowTerm& b, const FiniteMonoid& m) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.depth() != b.depth()) return a.depth() < b.depth();
  return to_text(a, m) < to_text(b, m);
}

/// Parses `x y (x (y)^w*)^w* z`; ε (or an empty string) is the empty term.
inline FlowTerm parse_term(const std::string& text, const FiniteMonoid& m) {
  std::size_t i = 0;
  auto fail = [&](const std::string& why) -> FlowTerm {
    throw Error(ErrorCode::ParseError, "term '" + text + "' at " + std::to_string(i) + ": " + why);
  };
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto name_char = [](char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != '^';
  };
  std::function<FlowTerm()> seq = [&]() -> FlowTerm {
    FlowTerm t;
    while (true) {
      skip();
      if (i >= text.size() || text[i] == ')') return t;
      if (text[i] == '(') {
        ++i;
        FlowTerm body = seq();
        skip();
        if (i >= text.size() || text[i] != ')') return fail("expected ')'");
        ++i;
        if (text.compare(i, 3, "^w*") != 0) return fail("expected ^w*");
        i += 3;
        if (body.is_epsilon()) return fail("empty ω+★ body");
        t = FlowTerm::concat(t, FlowTerm::omega_star(body));
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && name_char(text[j])) ++j;
      std::string nm = text.substr(i, j - i);
      if (nm.empty()) return fail("unexpected character");
      i = j;
      if (nm == "\xCE\xB5") continue;
      auto x = m.letter_index(nm);
      if (!x) return fail("unknown letter '" + nm + "'");
      t = FlowTerm::concat(t, FlowTerm::letter(*x));
    }
  };
  FlowTerm t = seq();
  skip();
  if (i != text.size()) return fail("trailing input");
  return t;
}

}  // namespace flowlb
