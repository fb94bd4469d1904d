#include "doctest.h"
#include "test_util.hpp"

#include "minimod/core_typing.hpp"
#include "minimod/nondep.hpp"

using namespace minimod;
using namespace minimod::test;

namespace {

struct Fixture {
  Session s;
  Env env{initial_env(s)};
  Ident hidden = s.fresh_hidden("M");
  Ident t = s.fresh_ident("t");
  Ident s_id = s.fresh_ident("s");

  Fixture() {
    env.add_module(hidden, make_sig({SType{t, {}, 0, {}}, SType{s_id, {}, 1, {}}}));
  }
  TypePtr hidden_t() const { return make_constr(path_dot(path_ident(hidden), "t")); }
  TypePtr int_t() const { return make_constr(env.lookup_type("int").value()); }
  SType manifest(const Ident &id, TypePtr rhs) const { return SType{id, TypeDecl{{}, rhs, {}}, 0, {}}; }
};

} // namespace

TEST_CASE("nondep drops equalities through the hidden module") {
  Fixture f;
  Ident u = f.s.fresh_ident("u");
  Ident v = f.s.fresh_ident("v");
  Signature sig{f.manifest(u, f.hidden_t()), f.manifest(v, f.hidden_t())};
  CHECK(print_signature(nondep_signature(f.env, f.hidden, sig)) == "type u\ntype v\n");

  Signature sig2{f.manifest(u, f.hidden_t()), f.manifest(v, make_constr(path_ident(u)))};
  Signature out = nondep_signature(f.env, f.hidden, sig2);
  CHECK(print_signature(out) == "type u\ntype v = u\n");
  CHECK(item_ident(out[1]) == v);
}

TEST_CASE("nondep leaves unrelated signatures unchanged") {
  Fixture f;
  Ident y = f.s.fresh_ident("y");
  Signature sig{SValue{y, Scheme{{}, f.int_t()}, {}}};
  CHECK(print_signature(nondep_signature(f.env, f.hidden, sig)) == "val y : int\n");
}

TEST_CASE("nondep expands manifests of the hidden module") {
  Session s;
  Env env = initial_env(s);
  Ident outer = s.fresh_ident("t");
  env.add_type(outer, TypeDecl{});
  Ident hidden = s.fresh_hidden("M");
  Ident alias = s.fresh_ident("t'");
  env.add_module(hidden, make_sig({SType{alias, TypeDecl{{}, make_constr(path_ident(outer)), {}}, 0, {}}}));
  Ident x = s.fresh_ident("x");
  Signature sig{SValue{x, Scheme{{}, make_constr(path_dot(path_ident(hidden), "t'"))}, {}}};
  Signature out = nondep_signature(env, hidden, sig);
  CHECK_FALSE(mentions(hidden, out));
  CHECK(print_signature(out) == "val x : t\n");
}

TEST_CASE("nondep reports victims") {
  Fixture f;
  Ident x = f.s.fresh_ident("x");
  Signature sig{SValue{x, Scheme{{}, f.hidden_t()}, {}}};
  try {
    nondep_signature(f.env, f.hidden, sig);
    FAIL("expected an elimination error");
  } catch (const EliminationError &e) {
    REQUIRE(e.victims().size() == 1);
    CHECK(e.victims()[0].name == "x");
    CHECK(e.victims()[0].kind == Namespace::Value);
    REQUIRE(e.culprit());
    CHECK(*e.culprit() == f.t);
    CHECK(e.context() == "open");
  }
}

TEST_CASE("nondep rejects variants and exceptions through the hidden module") {
  Fixture f;
  Ident d = f.s.fresh_ident("d");
  Signature variant{SType{d, TypeDecl{{}, {}, std::vector<ConstructorDecl>{{"C", {f.hidden_t()}}}}, 0, {}}};
  CHECK_THROWS_AS(nondep_signature(f.env, f.hidden, variant), EliminationError);
  Ident e = f.s.fresh_ident("E");
  Signature exn{SExn{e, {f.hidden_t()}, {}}};
  CHECK_THROWS_AS(nondep_signature(f.env, f.hidden, exn), EliminationError);
}

TEST_CASE("nondep recurses into submodules") {
  Fixture f;
  Ident n = f.s.fresh_ident("N");
  Ident u = f.s.fresh_ident("u");
  Signature sig{SModule{n, make_sig({f.manifest(u, f.hidden_t())}), {}}};
  CHECK(print_signature(nondep_signature(f.env, f.hidden, sig)) == "module N : sig type u end\n");
}

TEST_CASE("mentions is syntactic") {
  Fixture f;
  CHECK_FALSE(mentions(f.hidden, f.int_t()));
  CHECK(mentions(f.hidden, make_arrow(f.hidden_t(), f.int_t())));
  Ident tp = f.s.fresh_ident("t'");
  f.env.add_type(tp, TypeDecl{{}, make_constr(path_dot(path_ident(f.hidden), "s")), {}});
  TypePtr raw = make_constr(path_ident(tp));
  CHECK_FALSE(mentions(f.hidden, raw));
  CHECK(mentions(f.hidden, expand_head(f.env, raw)));
}
