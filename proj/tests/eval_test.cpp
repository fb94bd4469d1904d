#include "doctest.h"
#include "test_util.hpp"

#include "minimod/eval.hpp"

using namespace minimod;
using namespace minimod::test;

namespace {

struct Run {
  EvalResult result;
  std::string output;
};

Run run_source(const std::string &src) {
  Checked c = check_source(src);
  std::ostringstream out;
  EvalResult r = eval_program(c.typed.elaborated, out);
  return Run{std::move(r), out.str()};
}

std::string exported(const std::string &src, const std::string &name) {
  Run r = run_source(src);
  REQUIRE_FALSE(r.result.uncaught);
  auto it = r.result.exports.values.find(name);
  REQUIRE(it != r.result.exports.values.end());
  return value_to_string(it->second);
}

std::string eval_text(const std::string &expr_src) {
  Program p = parse_program("let _ = " + expr_src);
  const auto &let = std::get<SILet>(p.items.at(0).node);
  std::ostringstream out;
  return value_to_string(eval_expr(*let.bindings.at(0).body, out));
}

} // namespace

TEST_CASE("expressions") {
  CHECK(eval_text("1 + 2") == "3");
  CHECK(eval_text("(fun x y -> x - y) 10 4") == "6");
  CHECK(eval_text("if 1 < 2 then \"yes\" else \"no\"") == "\"yes\"");
  CHECK(eval_text("let rec f n = if n = 0 then 1 else n * f (n - 1) in f 5") == "120");
  CHECK(eval_text("match (1, true) with (x, false) -> 0 | (x, true) -> x") == "1");
}

TEST_CASE("assert false raises") {
  CHECK_THROWS_AS(eval_text("assert false"), UncaughtException);
  CHECK(eval_text("assert true") == "()");
}

TEST_CASE("match failure is a runtime error") {
  Run r = run_source("type t = A | B\nlet f A = 1\nlet x = f B");
  REQUIRE(r.result.uncaught);
  CHECK(std::string(r.result.uncaught->what()) == "Uncaught exception: Match_failure");
}

TEST_CASE("references and sequencing") {
  CHECK(exported("let r = ref 1\nlet () = r := !r + 41\nlet v = !r", "v") == "42");
}

TEST_CASE("counter hidden behind nested opens") {
  Run r = run_source(read_text(test_path("corpus/t12_counter.mml")));
  CHECK_FALSE(r.result.uncaught);
  CHECK(value_to_string(r.result.exports.values.at("n")) == "1");
  CHECK(r.output == "1");
}

TEST_CASE("interrupt handler yields the error result") {
  Run r = run_source(read_text(test_path("corpus/t13_interrupt.mml")));
  CHECK(value_to_string(r.result.exports.values.at("result")) == "Error \"failed\"");
}

TEST_CASE("open body effects happen once") {
  Run r = run_source(read_text(test_path("corpus/t14_print_once.mml")));
  CHECK(r.output == "x");
  CHECK(r.result.effects == 1);
  CHECK(value_to_string(r.result.exports.values.at("d")) == "4");
}

TEST_CASE("local exceptions are generative") {
  std::string src =
      "let mk () = let exception E in ((fun () -> raise E), (fun f -> try f (); false with E -> true))\n"
      "let (r1, c1) = mk ()\n"
      "let (r2, c2) = mk ()\n"
      "let own = c1 r1\n"
      "let other = try c1 r2 with _ -> false\n";
  CHECK(exported(src, "own") == "true");
  CHECK(exported(src, "other") == "false");
}

TEST_CASE("functor-made exceptions are generative") {
  Run r = run_source(read_text(test_path("corpus/t21_generative_exn.mml")));
  CHECK(r.output == "same no-cross");
}

TEST_CASE("type contexts are not evaluated") {
  Run sig = run_source("module type S = sig open struct let _ = assert false end end");
  CHECK_FALSE(sig.result.uncaught);
  CHECK(sig.result.effects == 0);
  Run functor = run_source(read_text(test_path("corpus/t10_functor_assert.mml")));
  CHECK_FALSE(functor.result.uncaught);
  CHECK(functor.result.effects == 0);
  Run structure = run_source(read_text(test_path("corpus/t11_assert_struct.mml")));
  REQUIRE(structure.result.uncaught);
  CHECK(structure.result.effects == 1);
}

TEST_CASE("hidden modules are not exported") {
  Run r = run_source("open struct let x = 3 end\nlet y = x");
  CHECK(r.result.exports.values.count("x") == 0);
  CHECK(r.result.exports.values.count("y") == 1);
  for (const auto &[name, _] : r.result.exports.modules) CHECK(name.find('#') == std::string::npos);
}

TEST_CASE("empty program") {
  Run r = run_source("");
  CHECK(r.output.empty());
  CHECK_FALSE(r.result.uncaught);
}
