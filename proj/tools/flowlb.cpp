// flowlb command-line front end.
//
// Exit codes: 0 success, 1 parse/usage/other error, 2 NOT_GROUP_MAPPING,
// 3 budget exhausted (partial report still written), 4 certificate or law
// check rejected.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "flowlb/flowlb.hpp"

namespace {

using namespace flowlb;

enum Exit { kOk = 0, kFail = 1, kNotGm = 2, kBudget = 3, kRejected = 4 };

struct RunConfig {
  std::string input;
  int max_level = 0;
  std::string backend = "symbolic";
  std::string term_budget;  // "letters" or "letters,nesting"
  std::string oracle = "trivial";
  bool exhaustive = false;
  std::string out;
  std::string format = "json";
  bool auto_gm_note = false;
  std::string automaton, labeling;
  int law_points = 0;
  int law_depth = 3;
  std::size_t max_states = 0;
};

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write " + c.out);
  f << text;
}

TypeIOracle parse_oracle(const std::string& arg) {
  if (arg == "trivial") return TypeIOracle::trivial();
  if (arg.rfind("file:", 0) == 0) return load_oracle(arg.substr(5));
  throw Error(ErrorCode::InvalidArgument, "--typeI-oracle expects trivial or file:<path>");
}

Backend parse_backend(const std::string& s) {
  if (s == "explicit") return Backend::Explicit;
  if (s == "symbolic") return Backend::Symbolic;
  if (s == "both") return Backend::Both;
  throw Error(ErrorCode::InvalidArgument, "--backend expects explicit, symbolic or both");
}

void apply_term_budget(const std::string& s, Budget& b) {
  if (s.empty()) return;
  std::istringstream is(s);
  char comma = 0;
  if (!(is >> b.max_letters) || b.max_letters < 1) throw Error(ErrorCode::InvalidArgument, "bad --term-budget");
  if (is >> comma) {
    if (comma != ',' || !(is >> b.max_depth) || b.max_depth < 0)
      throw Error(ErrorCode::InvalidArgument, "--term-budget is LETTERS or LETTERS,NESTING");
  }
}

std::string gm_note(const FiniteMonoid& m, const std::string& input, const std::string& reason) {
  auto g = green_classes(m);
  nlohmann::ordered_json j;
  j["tool"] = "flowlb";
  j["version"] = kVersion;
  j["input"] = input;
  j["group_mapping"] = false;
  j["reason"] = reason;
  j["bound"] = nullptr;
  j["size"] = m.size();
  j["aperiodic"] = is_aperiodic(m);
  j["j_classes"] = g.J.size();
  j["h_classes"] = g.H.size();
  return j.dump(2) + "\n";
}

int cmd_analyze(const RunConfig& c) {
  FiniteMonoid m = load_monoid(c.input);
  LowerBoundOptions opt;
  opt.max_level = c.max_level;
  opt.backend = parse_backend(c.backend);
  opt.oracle = parse_oracle(c.oracle);
  opt.input_id = c.input;
  opt.budget.exhaustive = c.exhaustive;
  if (c.max_states) opt.budget.max_states = c.max_states;
  apply_term_budget(c.term_budget, opt.budget);
  LowerBoundReport rep;
  try {
    rep = lower_bound(m, opt);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotGroupMapping && c.auto_gm_note) {
      auto r = check_group_mapping(m);
      emit(c, gm_note(m, c.input, std::get<NotGroupMapping>(r).reason));
    }
    throw;
  }
  emit(c, c.format == "text" ? report_to_text(rep, m) : report_to_json(rep, m).dump(2) + "\n");
  if (!c.out.empty()) std::cerr << "bound " << rep.bound << "  tier " << rep.tier() << "\n";
  return rep.partial ? kBudget : kOk;
}

int cmd_verify(const RunConfig& c) {
  FiniteMonoid m = load_monoid(c.input);
  auto g = green_classes(m);
  auto gm = check_group_mapping(m, g);
  if (auto* bad = std::get_if<NotGroupMapping>(&gm)) throw Error(ErrorCode::NotGroupMapping, bad->reason);
  const auto& cert = std::get<GroupMappingCert>(gm);
  RAction ra = make_r_action(m, cert, g);
  PartialAutomaton a = load_automaton(c.automaton, m);
  FlowLabeling f = load_labeling(c.labeling, a, ra);
  FlowViolation v = verify_complete_flow(a, f, ra);
  if (v.ok()) v = check_presentation(a, f, ra);
  std::ostringstream os;
  if (v.ok()) {
    auto tm = transition_monoid(a);
    os << "OK  complete flow, presentation condition holds\n"
       << "states " << a.states() << "  transition monoid size " << tm.monoid.size()
       << (is_aperiodic(tm.monoid) ? "  (aperiodic)" : "  (not aperiodic)") << "\n";
  } else {
    os << to_string(v.kind) << "\n" << v.message << "\n";
  }
  emit(c, os.str());
  return v.ok() ? kOk : kRejected;
}

int cmd_laws(const RunConfig& c) {
  FiniteMonoid m = load_monoid(c.input);
  auto g = green_classes(m);
  auto gm = check_group_mapping(m, g);
  if (auto* bad = std::get_if<NotGroupMapping>(&gm)) throw Error(ErrorCode::NotGroupMapping, bad->reason);
  RAction ra = make_r_action(m, std::get<GroupMappingCert>(gm), g);
  int k = c.law_points > 0 ? c.law_points : (ra.k() <= 3 ? ra.k() : 2);
  if (k > 3) std::cerr << "warning: |R| = " << k << " is beyond the default sweep size\n";
  LawOptions lo;
  lo.depth = lo.binary_depth = c.law_depth;
  auto rep = run_laws(restrict_instance(ra, k, c.input + " restricted to " + std::to_string(k) + " points"), lo);
  emit(c, law_table({rep}));
  return rep.ok() ? kOk : kRejected;
}

int cmd_dump_green(const RunConfig& c) {
  FiniteMonoid m = load_monoid(c.input);
  auto g = green_classes(m);
  std::ostringstream os;
  auto list = [&](const std::vector<int>& xs) {
    std::string s = "{";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + m.name(xs[i]);
    return s + "}";
  };
  os << "|M| = " << m.size() << "  J-classes " << g.J.size() << "  R-classes " << g.R.size() << "  L-classes "
     << g.L.size() << "  H-classes " << g.H.size() << "\n";
  for (std::size_t j = 0; j < g.J.size(); ++j) {
    os << "J" << j << " " << list(g.J[j]) << "\n";
    for (const auto& h : g.H)
      if (g.j_of[h.front()] == static_cast<int>(j)) {
        bool idem = false;
        for (int x : h) idem = idem || is_idempotent(m, x);
        os << "  H " << list(h) << "  R" << g.r_of[h.front()] << " L" << g.l_of[h.front()]
           << (idem ? "  group" : "") << "\n";
      }
  }
  auto gm = check_group_mapping(m, g);
  if (auto* bad = std::get_if<NotGroupMapping>(&gm)) {
    os << "group mapping: no (" << bad->reason << ")\n";
  } else {
    const auto& cert = std::get<GroupMappingCert>(gm);
    os << "group mapping: yes\n  ideal " << list(cert.ideal) << "\n  distinguished R " << list(cert.distinguished_R)
       << "\n  maximal subgroup " << list(cert.max_subgroup) << "\n";
    auto r = rlm(m, cert, g);
    os << "  |RLM(M)| = " << r.monoid.size() << " acting on " << r.l_classes.size() << " L-classes\n";
  }
  emit(c, os.str());
  return kOk;
}

int cmd_dump_rees(const RunConfig& c) {
  FiniteMonoid m = load_monoid(c.input);
  auto cert = require_group_mapping(m);
  auto rc = rees_coordinatize(m, cert);
  std::ostringstream os;
  os << "G (" << rc.group.size() << "):";
  for (int x : rc.group_elements) os << " " << m.name(x);
  os << "\nrows " << rc.rows << "  cols " << rc.cols << "\nsandwich C[b][a]:\n";
  for (int b = 0; b < rc.cols; ++b) {
    os << " ";
    for (int a = 0; a < rc.rows; ++a) {
      int v = rc.sandwich[b][a];
      os << " " << (v == kZeroEntry ? std::string("0") : m.name(rc.group_elements[v]));
    }
    os << "\n";
  }
  for (int x = 0; x < m.size(); ++x)
    if (rc.in_class(x))
      os << m.name(x) << " = (a" << rc.coords[x][0] << ", " << m.name(rc.group_elements[rc.coords[x][1]]) << ", b"
         << rc.coords[x][2] << ")\n";
  emit(c, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowlb: lower bounds for group complexity via set-partition flows"};
  app.set_version_flag("--version", std::string(flowlb::kVersion));
  app.require_subcommand(1);
  RunConfig c;

  auto add_input = [&](CLI::App* s) {
    s->add_option("--input,input", c.input, "monoid file (JSON table)")->required()->check(CLI::ExistingFile);
    s->add_option("--out", c.out, "write output here instead of stdout");
  };
  auto* analyze = app.add_subcommand("analyze", "compute the certified lower bound");
  add_input(analyze);
  analyze->add_option("--max-level", c.max_level, "highest level n examined")->check(CLI::NonNegativeNumber);
  analyze->add_option("--backend", c.backend, "explicit | symbolic | both")
      ->check(CLI::IsMember({"explicit", "symbolic", "both"}));
  analyze->add_option("--term-budget", c.term_budget, "LETTERS[,NESTING] bound on generated terms");
  analyze->add_option("--typeI-oracle", c.oracle, "trivial | file:<path>");
  analyze->add_option("--max-states", c.max_states, "symbolic state pool limit");
  analyze->add_flag("--exhaustive", c.exhaustive, "keep generating after the first bad pair");
  analyze->add_option("--format", c.format, "json | text")->check(CLI::IsMember({"json", "text"}));
  analyze->add_flag("--auto-gm-note", c.auto_gm_note, "write a diagnostic note when the input is not group mapping");

  auto* verify = app.add_subcommand("verify", "check a complete flow and the presentation condition");
  add_input(verify);
  verify->add_option("--automaton", c.automaton, "automaton file")->required()->check(CLI::ExistingFile);
  verify->add_option("--labeling", c.labeling, "labeling file")->required()->check(CLI::ExistingFile);

  auto* laws = app.add_subcommand("laws", "run the flow law suite on the explicit backend");
  add_input(laws);
  laws->add_option("--points", c.law_points, "restrict R to its first k points (default: |R| if <= 3, else 2)");
  laws->add_option("--depth", c.law_depth, "pool depth")->check(CLI::Range(0, 4));

  auto* dg = app.add_subcommand("dump-green", "print Green's classes and the group mapping check");
  add_input(dg);
  auto* dr = app.add_subcommand("dump-rees", "print Rees coordinates of the distinguished ideal");
  add_input(dr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kFail;
  }

  try {
    if (*analyze) return cmd_analyze(c);
    if (*verify) return cmd_verify(c);
    if (*laws) return cmd_laws(c);
    if (*dg) return cmd_dump_green(c);
    if (*dr) return cmd_dump_rees(c);
  } catch (const flowlb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case flowlb::ErrorCode::NotGroupMapping: return kNotGm;
      case flowlb::ErrorCode::BudgetExhausted: return kBudget;
      default: return kFail;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kFail;
}
