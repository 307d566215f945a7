#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bits.hpp"
#include "error.hpp"

namespace flowlb {

/// Finite monoid given by its Cayley table over dense indices 0..size-1.
class FiniteMonoid {
 public:
  FiniteMonoid() = default;
  FiniteMonoid(int size, std::vector<int> table, int identity,
               std::vector<std::pair<std::string, int>> generators,
               std::vector<std::string> names = {})
      : n_(size),
        table_(std::move(table)),
        id_(identity),
        gens_(std::move(generators)),
        names_(std::move(names)) {}

  int size() const { return n_; }
  int identity() const { return id_; }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_ + b]; }
  const std::vector<int>& table() const { return table_; }

  const std::vector<std::pair<std::string, int>>& generators() const { return gens_; }
  int num_generators() const { return static_cast<int>(gens_.size()); }
  int generator_element(int letter) const { return gens_[letter].second; }
  const std::string& generator_name(int letter) const { return gens_[letter].first; }
  std::optional<int> letter_index(const std::string& name) const {
    for (int i = 0; i < num_generators(); ++i)
      if (gens_[i].first == name) return i;
    return std::nullopt;
  }

  bool has_names() const { return !names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }
  std::string name(int i) const { return names_.empty() ? std::to_string(i) : names_[i]; }
  std::optional<int> element_by_name(const std::string& s) const {
    for (int i = 0; i < n_; ++i)
      if (name(i) == s) return i;
    return std::nullopt;
  }

  /// Product of a word given as letter indices.
  int eval_word(const std::vector<int>& letters) const {
    int m = id_;
    for (int x : letters) m = mul(m, generator_element(x));
    return m;
  }

  friend bool operator==(const FiniteMonoid&, const FiniteMonoid&) = default;

 private:
  int n_ = 0;
  std::vector<int> table_;
  int id_ = 0;
  std::vector<std::pair<std::string, int>> gens_;
  std::vector<std::string> names_;
};

/// Submonoid generated by `gens` (always contains the identity).
inline ElementSet generated_submonoid(const FiniteMonoid& m, const std::vector<int>& gens) {
  ElementSet s(m.size());
  std::vector<int> stack{m.identity()};
  s.set(m.identity());
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    for (int g : gens) {
      int b = m.mul(a, g);
      if (!s.test(b)) {
        s.set(b);
        stack.push_back(b);
      }
    }
  }
  return s;
}

inline std::vector<int> generator_elements(const FiniteMonoid& m) {
  std::vector<int> g;
  for (auto& [_, e] : m.generators()) g.push_back(e);
  return g;
}

/// Structural validation; throws Error on the first violation.
/// Associativity is exhaustive up to 512 elements and sampled beyond.
inline void validate(const FiniteMonoid& m) {
  const int n = m.size();
  if (n <= 0) throw Error(ErrorCode::ParseError, "size must be positive");
  if (static_cast<long long>(m.table().size()) != static_cast<long long>(n) * n)
    throw Error(ErrorCode::ParseError, "table must be size x size");
  for (int v : m.table())
    if (v < 0 || v >= n) throw Error(ErrorCode::ParseError, "table entry out of range: " + std::to_string(v));
  if (m.identity() < 0 || m.identity() >= n)
    throw Error(ErrorCode::ParseError, "identity out of range");
  for (int a = 0; a < n; ++a)
    if (m.mul(m.identity(), a) != a || m.mul(a, m.identity()) != a)
      throw Error(ErrorCode::IdentityViolation, "identity fails at element " + std::to_string(a));
  auto assoc = [&](int a, int b, int c) {
    if (m.mul(m.mul(a, b), c) != m.mul(a, m.mul(b, c)))
      throw Error(ErrorCode::NotAssociative, "(" + std::to_string(a) + "," + std::to_string(b) +
                                                 "," + std::to_string(c) + ")");
  };
  if (n <= 512) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) assoc(a, b, c);
  } else {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<int> d(0, n - 1);
    for (int i = 0; i < 2'000'000; ++i) assoc(d(rng), d(rng), d(rng));
  }
  for (auto& [name, e] : m.generators())
    if (e < 0 || e >= n) throw Error(ErrorCode::BadGenerators, "generator " + name + " out of range");
  if (generated_submonoid(m, generator_elements(m)).count() != static_cast<std::size_t>(n))
    throw Error(ErrorCode::BadGenerators, "generators do not generate the monoid");
  if (m.has_names() && static_cast<int>(m.names().size()) != n)
    throw Error(ErrorCode::ParseError, "names must have one entry per element");
}

// ---------------------------------------------------------------------------
// Powers

struct CycleData {
  int index;   // smallest i with s^{i+p} = s^i
  int period;  // smallest such p
};

inline CycleData cycle_data(const FiniteMonoid& m, int s) {
  std::vector<int> seen(m.size(), 0);  // exponent at which each element appeared
  int x = s;
  for (int k = 1;; ++k) {
    if (seen[x]) return {seen[x], k - seen[x]};
    seen[x] = k;
    x = m.mul(x, s);
  }
}

/// Smallest positive exponent k with s^k idempotent.
inline int omega_exponent(const FiniteMonoid& m, int s) {
  auto [i, p] = cycle_data(m, s);
  int k = p;
  while (k < i) k += p;
  return k;
}

inline int power(const FiniteMonoid& m, int s, int k) {
  int r = m.identity();
  for (int i = 0; i < k; ++i) r = m.mul(r, s);
  return r;
}

inline int omega(const FiniteMonoid& m, int s) { return power(m, s, omega_exponent(m, s)); }

inline bool is_aperiodic_elt(const FiniteMonoid& m, int s) {
  int e = omega(m, s);
  return m.mul(e, s) == e;
}

inline bool is_aperiodic(const FiniteMonoid& m) {
  for (int s = 0; s < m.size(); ++s)
    if (!is_aperiodic_elt(m, s)) return false;
  return true;
}

inline bool is_idempotent(const FiniteMonoid& m, int s) { return m.mul(s, s) == s; }

/// Shortest word (letter indices) for every element, ties broken
/// shortlex by letter order.
inline std::vector<std::vector<int>> shortest_words(const FiniteMonoid& m) {
  std::vector<std::vector<int>> w(m.size());
  std::vector<bool> done(m.size(), false);
  std::deque<int> q{m.identity()};
  done[m.identity()] = true;
  while (!q.empty()) {
    int a = q.front();
    q.pop_front();
    for (int x = 0; x < m.num_generators(); ++x) {
      int b = m.mul(a, m.generator_element(x));
      if (!done[b]) {
        done[b] = true;
        w[b] = w[a];
        w[b].push_back(x);
        q.push_back(b);
      }
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Partial actions

inline constexpr int kUndefined = -1;

/// Right action of M on `points` by partial maps; act(p, m) or kUndefined.
struct PartialAction {
  int points = 0;
  int monoid_size = 0;
  std::vector<int> table;  // points x monoid_size

  int act(int p, int m) const {
    return p == kUndefined ? kUndefined : table[static_cast<std::size_t>(p) * monoid_size + m];
  }

  /// Checks act(p,1)=p and act(act(p,a),b) = act(p,ab).
  bool is_action_of(const FiniteMonoid& m) const {
    for (int p = 0; p < points; ++p) {
      if (act(p, m.identity()) != p) return false;
      for (int a = 0; a < m.size(); ++a)
        for (int b = 0; b < m.size(); ++b)
          if (act(act(p, a), b) != act(p, m.mul(a, b))) return false;
    }
    return true;
  }
};

// ---------------------------------------------------------------------------
// JSON file format

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t off) {
  int line = 1;
  for (std::size_t i = 0; i < off && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline nlohmann::ordered_json parse_json(const std::string& text) {
  try {
    return nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline FiniteMonoid monoid_from_json(const nlohmann::ordered_json& j) {
  try {
    int size = j.at("size").get<int>();
    int identity = j.at("identity").get<int>();
    std::vector<int> table;
    const auto& rows = j.at("table");
    if (!rows.is_array() || static_cast<int>(rows.size()) != size)
      throw Error(ErrorCode::ParseError, "table must have `size` rows");
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != size)
        throw Error(ErrorCode::ParseError, "every table row must have `size` entries");
      for (const auto& v : row) table.push_back(v.get<int>());
    }
    std::vector<std::pair<std::string, int>> gens;
    for (const auto& [k, v] : j.at("generators").items()) gens.emplace_back(k, v.get<int>());
    std::vector<std::string> names;
    if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
    FiniteMonoid m(size, std::move(table), identity, std::move(gens), std::move(names));
    validate(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

inline FiniteMonoid parse_monoid(const std::string& text) {
  return monoid_from_json(detail::parse_json(text));
}

inline FiniteMonoid load_monoid(const std::string& path) {
  return parse_monoid(detail::read_file(path));
}

/// Canonical text form; parse_monoid(to_text(m)) == m and the text
/// round-trips byte for byte.
inline std::string to_text(const FiniteMonoid& m) {
  using nlohmann::json;
  std::ostringstream o;
  o << "{\n  \"size\": " << m.size() << ",\n  \"identity\": " << m.identity()
    << ",\n  \"table\": [\n";
  for (int a = 0; a < m.size(); ++a) {
    o << "    [";
    for (int b = 0; b < m.size(); ++b) o << (b ? ", " : "") << m.mul(a, b);
    o << "]" << (a + 1 < m.size() ? ",\n" : "\n");
  }
  o << "  ],\n  \"generators\": {";
  for (int i = 0; i < m.num_generators(); ++i)
    o << (i ? ", " : "") << json(m.generator_name(i)).dump() << ": " << m.generator_element(i);
  o << "}";
  if (m.has_names()) {
    o << ",\n  \"names\": [";
    for (int i = 0; i < m.size(); ++i) o << (i ? ", " : "") << json(m.names()[i]).dump();
    o << "]";
  }
  o << "\n}\n";
  return o.str();
}

}  // namespace flowlb
