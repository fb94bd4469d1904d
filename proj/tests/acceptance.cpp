#include "test_util.hpp"

#include "minimod/desugar.hpp"
#include "minimod/eval.hpp"
#include "minimod/nondep.hpp"

#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>

using namespace minimod;
using namespace minimod::test;

namespace {

constexpr int kRandomSignatures = 200;
constexpr std::uint32_t kSeed = 20240601;
constexpr std::size_t kMinCorpusWithOpens = 12;

struct Outcome {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string &what) {
    if (!ok) failures.push_back(what);
  }
};

std::string corpus(const std::string &stem) { return "corpus/" + stem + ".mml"; }

std::string golden(const std::string &name) {
  std::string text = read_text(test_path("golden/" + name + ".txt"));
  auto a = text.find("--- stdout\n");
  auto b = text.find("\n--- stderr\n");
  return text.substr(a + 11, b - a - 11);
}

std::string golden_stderr(const std::string &name) {
  std::string text = read_text(test_path("golden/" + name + ".txt"));
  return text.substr(text.find("\n--- stderr\n") + 12);
}

bool contains(const std::string &hay, const std::string &needle) {
  return hay.find(needle) != std::string::npos;
}

// ---------------------------------------------------------------------------

Outcome unexported_value() {
  Outcome o;
  CliResult r = run_in_test_dir({"infer", corpus("t01_unexported")});
  o.expect(r.code == kOk, "exit code");
  o.expect(r.out == "val y : int\n", "signature is exactly `val y : int`");
  o.expect(!contains(r.out, "x"), "no binding for x");
  o.expect(r.out == golden("t01_unexported.infer"), "golden");
  return o;
}

/// The aliases rendering parsed as a signature must match the checked module
/// in both directions.
bool aliases_round_trip(const std::string &src, std::string &why) {
  Session s;
  Env base = initial_env(s);
  Env env = base;
  TypedProgram typed = check_program(env, parse_program(src));
  std::string printed = print_signature(typed.signature, PrintMode::Aliases);
  Env penv = base;
  ModTypePtr reparsed;
  try {
    reparsed = type_signature(penv, parse_signature(printed));
  } catch (const Diagnostic &d) {
    why = std::string("re-check failed: ") + d.what() + "\n" + printed;
    return false;
  }
  ModTypePtr original = make_sig(typed.signature);
  try {
    match_modtype(base, original, reparsed);
    match_modtype(base, reparsed, original);
  } catch (const MatchError &m) {
    why = std::string("match failed: ") + m.what() + "\n" + printed;
    return false;
  }
  return true;
}

Outcome shadowing_workaround() {
  Outcome o;
  CliResult r = run_in_test_dir({"check", corpus("t02_shadowing")});
  o.expect(r.code == kOk, "t02 type-checks");
  int checked = 0, skipped = 0;
  for (const auto &f : corpus_files()) {
    std::string src = read_text(f);
    try {
      Session probe;
      check_program(probe, parse_program(src));
    } catch (const Diagnostic &) {
      continue;
    }
    if (contains(print_signature(check_source(src).typed.signature), "'_weak")) {
      ++skipped;
      continue;
    }
    std::string why;
    bool ok = aliases_round_trip(src, why);
    o.expect(ok, f.filename().string() + ": " + why);
    ++checked;
  }
  o.detail = std::to_string(checked) + " signatures re-checked, " + std::to_string(skipped) +
             " skipped for weak type variables";
  return o;
}

Outcome elimination_error() {
  Outcome o;
  CliResult r = run_in_test_dir({"check", "--no-color", corpus("t03_elim_error")});
  o.expect(r.code == kTypeError, "exit 1");
  o.expect(r.out.empty(), "nothing on stdout");
  std::smatch head, tail;
  std::regex intro(R"(The type (t/\d+) introduced by this open appears in the signature)");
  std::regex victim(R"(The value x has no valid type if (t/\d+) is hidden)");
  bool has_intro = std::regex_search(r.err, head, intro);
  bool has_victim = std::regex_search(r.err, tail, victim);
  o.expect(has_intro, "introduction line");
  o.expect(has_victim, "victim line");
  o.expect(has_intro && has_victim && head[1] == tail[1], "same name/stamp in both lines");
  if (has_intro) o.detail = "stamp " + head[1].str();
  return o;
}

Outcome functor_application() {
  Outcome o;
  CliResult a = run_in_test_dir({"infer", corpus("t04_functor_path")});
  o.expect(a.code == kOk, "F(A) accepted");
  o.expect(contains(a.out, "module B : sig val x : A.t end\n"), "F(A) : sig val x : A.t end");
  o.expect(a.out == golden("t04_functor_path.infer"), "F(A) golden");
  CliResult b = run_in_test_dir({"check", "--no-color", corpus("t05_functor_anon")});
  o.expect(b.code == kTypeError, "anonymous argument rejected");
  o.expect(contains(b.err, "has no valid type if"), "elimination error");
  o.expect(b.err == golden_stderr("t05_functor_anon.check"), "rejection golden");
  return o;
}

Outcome avoidance() {
  Outcome o;
  CliResult mn = run_in_test_dir({"infer", corpus("t06_avoid_mn")});
  o.expect(mn.out == "module M : sig type u type v end\nmodule N : sig type u type v = u end\n", "M/N");
  CliResult fg = run_in_test_dir({"infer", corpus("t07_avoid_fg")});
  for (const char *line : {"module FC : sig type u = Char.t type v = Char.t end\n",
                           "module GC : sig type u = Char.t type v = u end\n",
                           "module FI : sig type u type v end\n",
                           "module GI : sig type u type v = u end\n"})
    o.expect(contains(fg.out, line), line);
  o.expect(fg.out == golden("t07_avoid_fg.infer"), "FC/GC/FI/GI golden");
  return o;
}

Outcome destructive_substitution() {
  Outcome o;
  CliResult r = run_in_test_dir({"infer", corpus("t08_destructive")});
  o.expect(contains(r.out, "module type S = sig val f : int -> int end\n"), "S");
  o.expect(r.out == golden("t08_destructive.infer"), "golden");
  return o;
}

EvalResult evaluate(const std::string &stem, std::string &output) {
  Checked c = check_source(read_text(test_path(corpus(stem))));
  std::ostringstream out;
  EvalResult r = eval_program(c.typed.elaborated, out);
  output = out.str();
  return r;
}

Outcome non_evaluation() {
  Outcome o;
  o.expect(run_in_test_dir({"run", corpus("t09_sig_assert")}).code == kOk, "signature context exits 0");
  o.expect(run_in_test_dir({"run", corpus("t10_functor_assert")}).code == kOk, "type path exits 0");
  o.expect(run_in_test_dir({"run", corpus("t11_assert_struct")}).code == kRuntimeError,
           "structure context exits 3");
  std::string out;
  o.expect(evaluate("t09_sig_assert", out).effects == 0, "no effects from signature bodies");
  o.expect(evaluate("t10_functor_assert", out).effects == 0, "no effects from functor type paths");
  o.expect(evaluate("t08_destructive", out).effects == 0, "no effects from with-constraints");
  return o;
}

Outcome evaluator_semantics() {
  Outcome o;
  std::string out;
  EvalResult counter = evaluate("t12_counter", out);
  o.expect(!counter.uncaught && value_to_string(counter.exports.values.at("n")) == "1", "counter is 1");
  EvalResult interrupt = evaluate("t13_interrupt", out);
  o.expect(!interrupt.uncaught && value_to_string(interrupt.exports.values.at("result")) == "Error \"failed\"",
           "interrupt yields Error \"failed\"");
  EvalResult once = evaluate("t14_print_once", out);
  o.expect(out == "x" && once.effects == 1, "open body effect occurs once");
  return o;
}

// ---------------------------------------------------------------------------
// Dependency elimination as a supertype.

struct EliminationCheck {
  int events = 0;
  std::vector<std::string> problems;

  void operator()(const Env &env, const Ident &hidden, const Signature &before, const Signature &after) {
    ++events;
    if (mentions(hidden, after)) problems.push_back("hidden ident survives: " + hidden.unique_name());
    for (const auto &item : after) {
      std::vector<Ident> ids;
      collect_idents({item}, ids);
      for (const auto &id : ids)
        if (id == hidden) problems.push_back("hidden ident bound in result");
    }
    try {
      match_modtype(env, make_sig(before), make_sig(after));
    } catch (const MatchError &m) {
      problems.push_back(std::string("not a supertype: ") + m.what());
    }
  }
};

/// Random signatures over a hidden module H whose types are either abstract
/// or manifest to types outside H. A use of an abstract H type is avoidable
/// only when an earlier visible sibling is declared equal to exactly that type.
class SignatureGen {
public:
  SignatureGen(std::mt19937 &rng, Session &s, Env &env) : rng_(rng), s_(s), env_(env) {}

  struct Case {
    Ident hidden;
    Signature sig;
    bool should_fail = false;
  };

  Case make() {
    Case c;
    c.hidden = s_.fresh_hidden("M");
    Ident outer = s_.fresh_ident("o");
    env_.add_type(outer, TypeDecl{});
    outer_ = make_constr(path_ident(outer));

    Signature hsig;
    hidden_abstract_.clear();
    hidden_manifest_.clear();
    int nh = 1 + pick(3);
    for (int i = 0; i < nh; ++i) {
      std::string name = "h" + std::to_string(i);
      Ident id = s_.fresh_ident(name);
      TypePtr as_path = make_constr(path_dot(path_ident(c.hidden), name));
      if (coin()) {
        hsig.push_back(SType{id, TypeDecl{}, i, {}});
        hidden_abstract_.push_back(as_path);
      } else {
        hsig.push_back(SType{id, TypeDecl{{}, outside_type(1), {}}, i, {}});
        hidden_manifest_.push_back(as_path);
      }
    }
    env_.add_module(c.hidden, make_sig(hsig));

    siblings_.clear();
    rescued_.clear();
    c.sig = items(3 + pick(5), 1, c.should_fail);
    return c;
  }

private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 0; }

  TypePtr base(const Predef &pd) {
    switch (pick(3)) {
    case 0: return make_constr(pd.int_t);
    case 1: return make_constr(pd.bool_t);
    default: return outer_;
    }
  }

  TypePtr outside_type(int depth) {
    if (depth > 0 && pick(3) == 0) return make_arrow(base(env_.predef()), outside_type(depth - 1));
    return base(env_.predef());
  }

  /// A type that may refer to H, siblings, or the outside; `essential` is set
  /// when it mentions an abstract H type that no manifest can remove.
  TypePtr any_type(int depth, bool &essential) {
    if (depth > 0 && pick(4) == 0) {
      TypePtr a = any_type(depth - 1, essential);
      TypePtr b = any_type(depth - 1, essential);
      return coin() ? make_arrow(a, b) : make_tuple({a, b});
    }
    int choice = pick(4);
    if (choice == 0 && !hidden_abstract_.empty()) {
      TypePtr h = hidden_abstract_[static_cast<std::size_t>(pick(static_cast<int>(hidden_abstract_.size())))];
      if (!rescued_.count(h.get())) essential = true;
      return h;
    }
    if (choice == 1 && !hidden_manifest_.empty())
      return hidden_manifest_[static_cast<std::size_t>(pick(static_cast<int>(hidden_manifest_.size())))];
    if (choice == 2 && !siblings_.empty())
      return siblings_[static_cast<std::size_t>(pick(static_cast<int>(siblings_.size())))];
    return outside_type(0);
  }

  Signature items(int n, int depth, bool &should_fail) {
    Signature out;
    for (int i = 0; i < n; ++i) {
      int kind = pick(depth > 0 ? 5 : 4);
      std::string suffix = std::to_string(counter_++);
      bool essential = false;
      if (kind == 0) {
        Ident id = s_.fresh_ident("t" + suffix);
        std::optional<TypePtr> manifest;
        if (coin()) manifest = any_type(1, essential);
        out.push_back(SType{id, TypeDecl{{}, manifest, {}}, group_++, {}});
        if (manifest) rescued_.insert(manifest->get());
        siblings_.push_back(make_constr(path_ident(id)));
      } else if (kind == 1 || kind == 2) {
        Ident id = s_.fresh_ident("v" + suffix);
        out.push_back(SValue{id, Scheme{{}, any_type(2, essential)}, {}});
        should_fail = should_fail || essential;
      } else if (kind == 3) {
        if (coin()) {
          Ident id = s_.fresh_ident("E" + suffix);
          out.push_back(SExn{id, {any_type(1, essential)}, {}});
        } else {
          Ident id = s_.fresh_ident("d" + suffix);
          std::vector<ConstructorDecl> ctors{{"C" + suffix, {any_type(1, essential)}}, {"N" + suffix, {}}};
          out.push_back(SType{id, TypeDecl{{}, std::nullopt, ctors}, group_++, {}});
          siblings_.push_back(make_constr(path_ident(id)));
        }
        should_fail = should_fail || essential;
      } else {
        Ident id = s_.fresh_ident("S" + suffix);
        auto saved = siblings_;
        auto saved_rescued = rescued_;
        Signature inner = items(1 + pick(3), depth - 1, should_fail);
        siblings_ = saved;
        rescued_ = saved_rescued;
        out.push_back(SModule{id, make_sig(std::move(inner)), {}});
      }
    }
    return out;
  }

  std::mt19937 &rng_;
  Session &s_;
  Env &env_;
  TypePtr outer_;
  std::vector<TypePtr> hidden_abstract_, hidden_manifest_, siblings_;
  std::set<const Type *> rescued_;
  int counter_ = 0;
  int group_ = 1000;
};

Outcome nondep_supertype() {
  Outcome o;
  EliminationCheck check;
  int files_with_opens = 0;
  auto previous = set_elimination_observer(std::ref(check));
  for (const auto &f : corpus_files()) {
    int before = check.events;
    try {
      Session s;
      check_program(s, parse_program(read_text(f)));
    } catch (const Diagnostic &) {
    }
    if (check.events > before) ++files_with_opens;
  }
  set_elimination_observer(previous);
  o.expect(files_with_opens >= static_cast<int>(kMinCorpusWithOpens), "at least 12 corpus files eliminate");
  for (const auto &p : check.problems) o.expect(false, "corpus: " + p);

  std::mt19937 rng(kSeed);
  int succeeded = 0, rejected = 0;
  for (int i = 0; i < kRandomSignatures; ++i) {
    Session s;
    Env env = initial_env(s);
    SignatureGen gen(rng, s, env);
    SignatureGen::Case c = gen.make();
    std::string label = "random #" + std::to_string(i) + ": ";
    try {
      Signature out = nondep_signature(env, c.hidden, c.sig);
      ++succeeded;
      o.expect(!c.should_fail, label + "accepted a signature with an essential dependency");
      EliminationCheck one;
      one(env, c.hidden, c.sig, out);
      for (const auto &p : one.problems) o.expect(false, label + p);
      o.expect(out.size() == c.sig.size(), label + "items dropped");
    } catch (const EliminationError &e) {
      ++rejected;
      o.expect(c.should_fail, label + "rejected an avoidable dependency: " + e.what());
      o.expect(!e.victims().empty(), label + "no victims reported");
    }
  }
  o.detail = std::to_string(files_with_opens) + " corpus files, " + std::to_string(check.events) +
             " eliminations; random: " + std::to_string(succeeded) + " eliminated, " +
             std::to_string(rejected) + " rejected";
  o.expect(succeeded > 0 && rejected > 0, "generator covers both outcomes");
  return o;
}

// ---------------------------------------------------------------------------

std::string signature_or_error(const std::vector<StructItem> &items) {
  try {
    Session s;
    TypedProgram t = check_program(s, Program{items});
    return print_signature(t.signature, PrintMode::Plain) + "\n--\n" +
           print_signature(t.signature, PrintMode::Aliases);
  } catch (const Diagnostic &d) {
    return "error";
  }
}

Outcome desugar_round_trips() {
  Outcome o;
  int programs = 0;
  for (const auto &f : corpus_files()) {
    std::string name = f.filename().string();
    Program p = parse_program(read_text(f));
    std::string expected = signature_or_error(p.items);
    auto via_local = expand_local(introduce_local(p.items));
    auto via_private = expand_private(introduce_private(p.items));
    o.expect(signature_or_error(via_local) == expected, name + ": local round trip");
    o.expect(signature_or_error(via_private) == expected, name + ": private round trip");
    for (const auto &items : {introduce_local(p.items), introduce_private(p.items), via_local, via_private}) {
      std::string printed = print_source(items);
      try {
        Program again = parse_program(printed);
        o.expect(to_sexp(again) == to_sexp(Program{items}), name + ": print_source round trip");
        o.expect(signature_or_error(again.items) == expected, name + ": reparsed source signature");
      } catch (const Diagnostic &d) {
        o.expect(false, name + ": transformed source does not parse: " + d.what());
      }
    }
    ++programs;
  }
  o.detail = std::to_string(programs) + " programs";
  return o;
}

std::string full_suite_output() {
  std::string all;
  std::ifstream in(test_path("golden/cases.txt"));
  std::string line;
  while (std::getline(in, line)) {
    auto bar = line.find(" | ");
    if (bar == std::string::npos) continue;
    std::vector<std::string> args;
    std::istringstream words(line.substr(bar + 3));
    for (std::string w; words >> w;) args.push_back(w);
    all += line + "\n" + run_snapshot(args);
  }
  return all;
}

Outcome determinism() {
  Outcome o;
  std::string first = full_suite_output();
  std::string second = full_suite_output();
  o.expect(!first.empty(), "suite produced output");
  o.expect(first == second, "byte-identical runs");
  o.detail = std::to_string(first.size()) + " bytes compared";
  return o;
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *title;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {1, "unexported value", unexported_value},
      {2, "shadowing workaround and alias re-check", shadowing_workaround},
      {3, "dependency elimination error", elimination_error},
      {4, "functor application", functor_application},
      {5, "avoidance", avoidance},
      {6, "destructive substitution", destructive_substitution},
      {7, "non-evaluation of type contexts", non_evaluation},
      {8, "evaluator semantics", evaluator_semantics},
      {9, "nondep supertype property", nondep_supertype},
      {10, "desugaring round trips", desugar_round_trips},
      {11, "determinism", determinism},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    bool ok = o.failures.empty();
    failed += ok ? 0 : 1;
    std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << "  " << c.title;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    std::cout << "\n";
    for (std::size_t i = 0; i < o.failures.size() && i < 10; ++i) std::cout << "    - " << o.failures[i] << "\n";
  }
  return failed == 0 ? 0 : 1;
}
