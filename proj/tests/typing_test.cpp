#include "doctest.h"
#include "test_util.hpp"

#include "minimod/core_typing.hpp"
#include "minimod/desugar.hpp"
#include "minimod/nondep.hpp"

using namespace minimod;
using namespace minimod::test;

namespace {

std::string infer_type(const std::string &expr_src) {
  return infer_source("let it = " + expr_src);
}

TypeError::Kind type_error_kind(const std::string &src) {
  try {
    check_source(src);
  } catch (const TypeError &e) {
    return e.kind();
  }
  FAIL("expected a type error for: " << src);
  return TypeError::Kind::Other;
}

std::string error_message(const std::string &src) {
  try {
    check_source(src);
  } catch (const Diagnostic &e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("session stamps are monotone") {
  Session s;
  Ident a = s.fresh_ident("t");
  Ident b = s.fresh_ident("t");
  CHECK(a.stamp == 1);
  CHECK(b.stamp == 2);
  CHECK(a != b);
  CHECK(a.unique_name() == "t/1");
  CHECK(s.fresh_hidden("M").display_name() == "M#3");
}

TEST_CASE("strengthen and subst_module") {
  Session s;
  Env env = initial_env(s);
  Ident t = s.fresh_ident("t");
  Ident a = s.fresh_ident("A");
  ModTypePtr sig = make_sig({SType{t, {}, 0, {}}});
  env.add_module(a, sig);
  ModTypePtr strong = strengthen(env, sig, path_ident(a));
  CHECK(print_modtype(strong) == "sig type t = A.t end");

  Ident v = s.fresh_ident("x");
  ModTypePtr vals = make_sig({SValue{v, Scheme{{}, make_constr(env.lookup_type("int").value())}, {}}});
  CHECK(print_modtype(strengthen(env, vals, path_ident(a))) == "sig val x : int end");

  Ident x = s.fresh_ident("X");
  Ident u = s.fresh_ident("u");
  Ident w = s.fresh_ident("v");
  ModTypePtr body = make_sig({SType{u, TypeDecl{{}, make_constr(path_dot(path_ident(x), "t")), {}}, 0, {}},
                              SType{w, TypeDecl{{}, make_constr(path_ident(u)), {}}, 1, {}}});
  CHECK(print_modtype(subst_module(body, x, path_ident(a))) == "sig type u = A.t type v = u end");
  Ident other = s.fresh_ident("Y");
  CHECK(print_modtype(subst_module(body, other, path_ident(a))) == print_modtype(body));
}

TEST_CASE("match_modtype examples") {
  Session s;
  Env env = initial_env(s);
  auto modtype = [&](const std::string &text) {
    auto items = parse_signature(text);
    return type_signature(env, items);
  };
  CHECK_NOTHROW(match_modtype(env, modtype("type t = int val x : t"), modtype("type t")));
  CHECK_THROWS_AS(match_modtype(env, modtype(""), modtype("val f : int -> int")), MatchError);
  CHECK_THROWS_AS(match_modtype(env, modtype("val f : bool"), modtype("val f : int")), MatchError);
  CHECK_NOTHROW(match_modtype(env, modtype("val f : 'a -> 'a"), modtype("val f : int -> int")));
  CHECK_THROWS_AS(match_modtype(env, modtype("val f : int -> int"), modtype("val f : 'a -> 'a")),
                  MatchError);
}

TEST_CASE("core inference") {
  CHECK(infer_type("fun x -> x") == "val it : 'a -> 'a\n");
  CHECK(infer_type("fun f x -> f (f x)") == "val it : ('a -> 'a) -> 'a -> 'a\n");
  CHECK(infer_type("(1, true, \"s\")") == "val it : int * bool * string\n");
  CHECK(infer_type("let id x = x in (id 1, id true)") == "val it : int * bool\n");
}

TEST_CASE("value restriction yields weak variables") {
  CHECK(infer_source("let r = ref (fun x -> x)") == "val r : ('_weak1 -> '_weak1) ref\n");
}

TEST_CASE("generalization respects the environment") {
  CHECK(infer_source("let f x = let g y = (x, y) in g") == "val f : 'a -> 'b -> 'a * 'b\n");
}

TEST_CASE("unify errors") {
  CHECK(error_message("let y = 1 + \"s\"") ==
        "This expression has type string but was expected of type int");
  CHECK(type_error_kind("let f x = x x") == TypeError::Kind::Occurs);
  CHECK(type_error_kind("let y = z") == TypeError::Kind::Unbound);
}

TEST_CASE("type arity errors") {
  CHECK(type_error_kind("module type S = sig type 'a t val f : t -> t end") ==
        TypeError::Kind::TypeArity);
  CHECK(error_message("module type S = sig type 'a t val f : t -> t end")
            .find("expects 1 argument(s)") != std::string::npos);
}

TEST_CASE("manifest expansion during unification") {
  CHECK(infer_source("type t = A\nopen struct type t' = t end\nlet f (x : t') = let (y : t) = x in y") ==
        "type t = A\nval f : t -> t\n");
}

TEST_CASE("nonrec refers to the previous binding") {
  CHECK(infer_source("type t = int\nmodule M = struct type nonrec t = t * t end", PrintMode::Aliases) ==
        "type t = int\ntype t' := t\nmodule M : sig type t = t' * t' end\n");
}

TEST_CASE("functor application") {
  std::string f = "module F(X : sig type t val x : t end) = struct let x = X.x end\n";
  CHECK(infer_source(f + "module A = struct type t = T let x = T end\nmodule B = F(A)")
            .find("module B : sig val x : A.t end") != std::string::npos);
  CHECK_THROWS_AS(check_source(f + "module B = F(struct type t = T let x = T end)"), EliminationError);
  CHECK(type_error_kind("module A = struct end\nmodule B = A(A)") == TypeError::Kind::NotAFunctor);
}

TEST_CASE("ascription is opaque") {
  CHECK(infer_source("module M = (struct type t = int let x = 1 end : sig type t val x : t end)") ==
        "module M : sig type t val x : t end\n");
  CHECK(infer_source("module M = (struct let x = 1 end : sig end)") == "module M : sig end\n");
}

TEST_CASE("with constraints") {
  CHECK(infer_source("module type T = sig type t val f : t -> t end\nmodule type S = T with type t := int")
            .find("module type S = sig val f : int -> int end") != std::string::npos);
  CHECK(infer_source("module type T = sig type t val f : t -> t end\nmodule type S = T with type t = int")
            .find("module type S = sig type t = int val f : t -> t end") != std::string::npos);
  CHECK(type_error_kind("module type T = sig type t = bool end\nmodule type S = T with type t = int") ==
        TypeError::Kind::WithOnNonAbstract);
  CHECK(type_error_kind("module type T = sig end\nmodule type S = T with type t = int") ==
        TypeError::Kind::UnboundTypeInWith);
}

TEST_CASE("type_open") {
  CHECK(infer_source("open struct let x = 3 end\nlet y = x") == "val y : int\n");
  CHECK(infer_source("open struct end") == "");
  CHECK(type_error_kind("open functor (X : sig end) -> struct end") ==
        TypeError::Kind::CannotOpenFunctor);
}

TEST_CASE("include re-exports") {
  CHECK(infer_source("include struct let x = 1 type t = A end") == "val x : int\ntype t = A\n");
}

TEST_CASE("signature-level open eliminates manifests") {
  CHECK(infer_source("module type S = sig open struct type t = int -> int end val x : t val y : t end") ==
        "module type S = sig val x : int -> int val y : int -> int end\n");
}

TEST_CASE("empty program") { CHECK(infer_source("") == ""); }

TEST_CASE("hidden idents never reach the exported signature") {
  for (const auto &f : corpus_files()) {
    CAPTURE(f);
    std::string src = read_text(f);
    Program p = parse_program(src);
    Session s;
    try {
      TypedProgram t = check_program(s, p);
      std::vector<Ident> ids;
      collect_idents(t.signature, ids);
      for (const auto &id : ids) CHECK_FALSE(id.hidden);
    } catch (const Diagnostic &) {
    }
  }
}

TEST_CASE("elaboration binds hidden modules") {
  Checked c = check_source("open struct let x = 3 end\nlet y = x");
  std::string elab = print_source(c.typed.elaborated);
  CHECK(elab.find("module M#") != std::string::npos);
  CHECK(elab.find("open M#") != std::string::npos);
}
