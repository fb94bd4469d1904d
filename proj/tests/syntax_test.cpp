#include "doctest.h"
#include "test_util.hpp"

#include "minimod/desugar.hpp"
#include "minimod/syntax.hpp"

using namespace minimod;
using namespace minimod::test;

namespace {

std::vector<Tok> kinds(std::string_view src) {
  std::vector<Tok> out;
  for (const auto &t : tokenize(src)) out.push_back(t.kind);
  return out;
}

} // namespace

TEST_CASE("lexer: empty input") { CHECK(tokenize("").empty()); }

TEST_CASE("lexer: extended open") {
  auto toks = tokenize("open struct let x = 3 end");
  std::vector<Tok> expected{Tok::Open, Tok::Struct, Tok::Let, Tok::Ident, Tok::Eq, Tok::Int, Tok::End};
  CHECK(kinds("open struct let x = 3 end") == expected);
  CHECK(toks[3].text == "x");
  CHECK(toks[5].int_value == 3);
}

TEST_CASE("lexer: signature-local binding") {
  std::vector<Tok> expected{Tok::Type, Tok::Ident, Tok::ColonEq, Tok::Ident};
  CHECK(kinds("type t := int") == expected);
}

TEST_CASE("lexer: comments, strings and primes") {
  auto toks = tokenize("(* a (* nested *) comment *) let t' = \"a\\nb\" 'a");
  REQUIRE(toks.size() == 5);
  CHECK(toks[1].text == "t'");
  CHECK(toks[3].kind == Tok::String);
  CHECK(toks[3].text == "a\nb");
  CHECK(toks[4].kind == Tok::TyVar);
}

TEST_CASE("lexer: spans are 0-based columns and 1-based lines") {
  auto toks = tokenize("let\n  x");
  REQUIRE(toks.size() == 2);
  CHECK(toks[1].span.start_line == 2);
  CHECK(toks[1].span.start_col == 2);
}

TEST_CASE("lexer: illegal character") {
  CHECK_THROWS_AS(tokenize("let x = 1 $ 2"), LexError);
  CHECK_THROWS_AS(tokenize("\"unterminated"), LexError);
}

TEST_CASE("parser: programs") {
  CHECK(to_sexp(parse_program("")) == "(program)");
  CHECK(to_sexp(parse_program("open struct let x = 3 end\nlet y = x")) ==
        "(program (open (struct (item-let (bind x = 3)))) (item-let (bind y = x)))");
  CHECK(to_sexp(parse_program("local let a = 1 in let b = a end")) ==
        "(program (local ( (item-let (bind a = 1))) ( (item-let (bind b = a)))))");
}

TEST_CASE("parser: a let-expression in a local head needs parentheses") {
  CHECK_NOTHROW(parse_program("local let a = (let z = 1 in z) in let b = a end"));
}

TEST_CASE("parser: syntax error at end of input") {
  try {
    parse_program("let x = (1 +");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(std::string(e.what()) == "Syntax error");
    CHECK(e.span().start_col == 12);
  }
}

TEST_CASE("parser: determinism") {
  for (const auto &f : corpus_files()) {
    std::string src = read_text(f);
    CHECK(to_sexp(parse_program(src)) == to_sexp(parse_program(src)));
  }
}

TEST_CASE("parser: signatures") {
  auto items = parse_signature("type t val f : t -> t type u := int");
  CHECK(items.size() == 3);
  CHECK_NOTHROW(parse_signature("open struct let _ = assert false end"));
}

TEST_CASE("print_source round trip over the corpus") {
  for (const auto &f : corpus_files()) {
    CAPTURE(f);
    Program p = parse_program(read_text(f));
    std::string printed = print_source(p);
    Program q = parse_program(printed);
    CHECK(to_sexp(p) == to_sexp(q));
    CHECK(print_source(q) == printed);
  }
}

TEST_CASE("print_source examples") {
  CHECK(print_source(Program{}) == "");
  CHECK(print_source(parse_program("open struct let x = 3 end\nlet y = x")) ==
        "open struct let x = 3 end\nlet y = x\n");
  std::string local = print_source(parse_program("local let a = 1 in let b = a end"));
  CHECK(local.rfind("local", 0) == 0);
  CHECK(local.find("\nin\n") != std::string::npos);
}
