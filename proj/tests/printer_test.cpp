#include "doctest.h"
#include "test_util.hpp"

#include "minimod/nondep.hpp"

using namespace minimod;
using namespace minimod::test;

namespace {

const char *kShadow = "type t = T1\nmodule M = struct type t = T2 let f T1 = T2 end";

std::string diagnostic_for(const std::string &src, bool color = false) {
  try {
    check_source(src);
  } catch (const Diagnostic &d) {
    return render_diagnostic(d, src, color);
  }
  return "";
}

} // namespace

TEST_CASE("type variables are named in order of appearance") {
  TypeNamer n;
  CHECK(n.name(7, true) == "'a");
  CHECK(n.name(3, true) == "'b");
  CHECK(n.name(7, true) == "'a");
  TypeNamer many;
  for (int i = 0; i < 26; ++i) many.name(i, true);
  CHECK(many.name(26, true) == "'a1");
  TypeNamer weak(true);
  CHECK(weak.name(1, false) == "'_weak1");
}

TEST_CASE("shadowed types print naively in plain mode") {
  CHECK(infer_source(kShadow, PrintMode::Plain) ==
        "type t = T1\nmodule M : sig\n  type t = T2\n  val f : t -> t\nend\n");
}

TEST_CASE("aliases mode inserts signature-local bindings") {
  CHECK(infer_source(kShadow, PrintMode::Aliases) ==
        "type t = T1\ntype t' := t\nmodule M : sig\n  type t = T2\n  val f : t' -> t\nend\n");
}

TEST_CASE("stamps mode disambiguates only clashing names") {
  std::string out = infer_source(kShadow, PrintMode::Stamps);
  CHECK(out.find("type t/") != std::string::npos);
  CHECK(out.find("val f : t/") != std::string::npos);
  CHECK(out.find("module M :") != std::string::npos);
}

TEST_CASE("alias names avoid existing primes") {
  std::string src = "type t = A\ntype t' = B\nmodule M = struct type t = C let f (x : t') A = C end";
  std::string out = infer_source(src, PrintMode::Aliases);
  CHECK(out.find("type t'' := t") != std::string::npos);
}

TEST_CASE("empty signature prints nothing") {
  CHECK(print_signature({}, PrintMode::Plain).empty());
  CHECK(print_signature({}, PrintMode::Aliases).empty());
}

TEST_CASE("layout: short signatures stay on one line") {
  CHECK(infer_source("module A = struct let x = 1 let y = true end") ==
        "module A : sig val x : int val y : bool end\n");
  CHECK(infer_source("module A = struct type t = T let x = T end") ==
        "module A : sig\n  type t = T\n  val x : t\nend\n");
  CHECK(infer_source("module A = struct module B = struct end end") ==
        "module A : sig\n  module B : sig end\nend\n");
}

TEST_CASE("mutually recursive types print with and") {
  CHECK(infer_source("type a = A of b | N and b = B of a") == "type a = A of b | N\nand b = B of a\n");
  CHECK(infer_source("type a = int and b = bool") == "type a = int\ntype b = bool\n");
}

TEST_CASE("elimination diagnostic") {
  std::string src = "open struct type t = T end\nlet x = T";
  std::string out = diagnostic_for(src);
  CHECK(out.find("1 | open struct type t = T end\n    ^^^^^^^^^^^^^^^^^^^^^^^^^^\n") == 0);
  CHECK(out.find("Error: The type t/") != std::string::npos);
  CHECK(out.find("introduced by this open appears in the signature") != std::string::npos);
  CHECK(out.find("Line 2, characters 4-5:") != std::string::npos);
  CHECK(out.find("The value x has no valid type if t/") != std::string::npos);
}

TEST_CASE("unify diagnostic") {
  std::string out = diagnostic_for("let y = 1 + \"s\"");
  CHECK(out == "File \"test.mml\", line 1, characters 12-15:\n1 | let y = 1 + \"s\"\n"
               "                ^^^\nError: This expression has type string but was expected of type int\n");
}

TEST_CASE("colored diagnostics") {
  std::string out = diagnostic_for("let y = z", true);
  CHECK(out.find("\x1b[1mError:\x1b[0m Unbound value z") != std::string::npos);
  CHECK(diagnostic_for("let y = z", false).find('\x1b') == std::string::npos);
}

TEST_CASE("syntax error diagnostic") {
  std::string src = "let x = (1 +";
  try {
    parse_program(src, "e.mml");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(render_diagnostic(e, src, false) ==
          "File \"e.mml\", line 1, characters 12-12:\n1 | let x = (1 +\n                ^\nError: Syntax error\n");
  }
}
