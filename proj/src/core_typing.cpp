#include "minimod/core_typing.hpp"

#include "minimod/nondep.hpp"
#include "minimod/printer.hpp"
#include "typer.hpp"

#include <algorithm>
#include <climits>

namespace minimod {

// ---------------------------------------------------------------------------
// Unification

TypePtr expand_head_once(const Env &env, const TypePtr &t0) {
  TypePtr t = repr(t0);
  if (t->kind != Type::Kind::Constr) return nullptr;
  auto decl = env.find_type(t->path);
  if (!decl || !decl->manifest || decl->arity() != t->args.size()) return nullptr;
  return replace_vars(*decl->manifest, decl->params, t->args);
}

TypePtr expand_head(const Env &env, const TypePtr &t) {
  TypePtr cur = repr(t);
  for (int guard = 0; guard < 1000; ++guard) {
    TypePtr next = expand_head_once(env, cur);
    if (!next) return cur;
    cur = repr(next);
  }
  return cur;
}

namespace {

bool occurs_adjust(const TypePtr &var, const TypePtr &t0) {
  TypePtr t = repr(t0);
  if (t == var) return true;
  if (t->kind == Type::Kind::Var) {
    if (t->level > var->level) t->level = var->level;
    return false;
  }
  for (const auto &a : t->args)
    if (occurs_adjust(var, a)) return true;
  return false;
}

void bind_var(const TypePtr &var, const TypePtr &t, const TypePtr &expected, const TypePtr &actual) {
  if (occurs_adjust(var, t)) throw UnifyError(TypeError::Kind::Occurs, expected, actual);
  var->link = t;
}

void unify_rec(const Env &env, const TypePtr &a0, const TypePtr &b0, int depth) {
  TypePtr a = repr(a0);
  TypePtr b = repr(b0);
  if (a == b) return;
  if (depth > 10000) throw UnifyError(TypeError::Kind::Unify, a, b);
  if (a->kind == Type::Kind::Var) return bind_var(a, b, a, b);
  if (b->kind == Type::Kind::Var) return bind_var(b, a, a, b);
  if (a->kind == Type::Kind::Constr && b->kind == Type::Kind::Constr &&
      path_equal(a->path, b->path) && a->args.size() == b->args.size()) {
    try {
      for (std::size_t i = 0; i < a->args.size(); ++i) unify_rec(env, a->args[i], b->args[i], depth + 1);
      return;
    } catch (const UnifyError &) {
      if (!expand_head_once(env, a)) throw;
    }
  }
  if (a->kind == Type::Kind::Constr) {
    if (TypePtr ea = expand_head_once(env, a)) return unify_rec(env, ea, b, depth + 1);
  }
  if (b->kind == Type::Kind::Constr) {
    if (TypePtr eb = expand_head_once(env, b)) return unify_rec(env, a, eb, depth + 1);
  }
  if (a->kind == b->kind && a->kind != Type::Kind::Constr && a->args.size() == b->args.size()) {
    for (std::size_t i = 0; i < a->args.size(); ++i) unify_rec(env, a->args[i], b->args[i], depth + 1);
    return;
  }
  throw UnifyError(TypeError::Kind::Unify, a, b);
}

void collect_free(const TypePtr &t0, int level, std::vector<int> &out) {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Var) {
    if (t->level > level && std::find(out.begin(), out.end(), t->var_id) == out.end())
      out.push_back(t->var_id);
    return;
  }
  for (const auto &a : t->args) collect_free(a, level, out);
}

void lower_levels(const TypePtr &t0, int level) {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Var) {
    if (t->level > level) t->level = level;
    return;
  }
  for (const auto &a : t->args) lower_levels(a, level);
}

} // namespace

void unify(const Env &env, const TypePtr &expected, const TypePtr &actual) {
  unify_rec(env, expected, actual, 0);
}

Scheme generalize(const InferState &state, const TypePtr &t) {
  Scheme s;
  collect_free(t, state.level, s.vars);
  s.body = t;
  return s;
}

Scheme monomorphic(const InferState &state, const TypePtr &t) {
  lower_levels(t, state.level);
  return Scheme{{}, t};
}

TypePtr instantiate(InferState &state, const Scheme &s) {
  if (s.vars.empty()) return s.body;
  std::vector<TypePtr> fresh;
  for (std::size_t i = 0; i < s.vars.size(); ++i) fresh.push_back(state.fresh());
  return replace_vars(s.body, s.vars, fresh);
}

bool is_nonexpansive(const Expr &e) {
  return std::visit(overloaded{
                        [](const ELit &) { return true; },
                        [](const EVar &) { return true; },
                        [](const EFun &) { return true; },
                        [](const EConstr &c) { return !c.arg || is_nonexpansive(**c.arg); },
                        [](const ETuple &t) {
                          return std::all_of(t.elems.begin(), t.elems.end(),
                                             [](const Expr &x) { return is_nonexpansive(x); });
                        },
                        [](const ELet &l) {
                          return is_nonexpansive(*l.body) &&
                                 std::all_of(l.bindings.begin(), l.bindings.end(), [](const Binding &b) {
                                   return !b.params.empty() || is_nonexpansive(*b.body);
                                 });
                        },
                        [](const auto &) { return false; },
                    },
                    e.node);
}

TypePtr infer_expr(Env &env, InferState &state, const Expr &e) {
  Typer typer(*state.session);
  typer.state().level = state.level;
  return typer.infer(env, e);
}

// ---------------------------------------------------------------------------
// Typer: core part

namespace {

std::string plural_args(std::size_t n) { return std::to_string(n) + " argument(s)"; }

ModPathSyntax qual_path(const std::vector<std::string> &qual) {
  ModPathSyntax p{MPName{qual[0]}};
  for (std::size_t i = 1; i < qual.size(); ++i) p = ModPathSyntax{MPDot{Box<ModPathSyntax>(p), qual[i]}};
  return p;
}

std::string long_name(const LongIdent &id) {
  std::string out;
  for (const auto &q : id.qual) out += q + ".";
  return out + id.name;
}

std::string modpath_text(const ModPathSyntax &p) {
  return std::visit(overloaded{
                        [](const MPName &n) { return n.name; },
                        [](const MPDot &d) { return modpath_text(*d.prefix) + "." + d.name; },
                        [](const MPApply &a) { return modpath_text(*a.functor) + "(" + modpath_text(*a.arg) + ")"; },
                    },
                    p.node);
}

} // namespace

void Typer::unify_at(const Env &env, const TypePtr &expected, const TypePtr &actual,
                     const SourceSpan &span) {
  try {
    unify(env, expected, actual);
  } catch (const UnifyError &err) {
    TypeNamer names;
    std::string a = type_to_string(actual, names);
    std::string x = type_to_string(expected, names);
    std::string msg = "This expression has type " + a + " but was expected of type " + x;
    if (err.kind() == TypeError::Kind::Occurs) msg += "\nThe type variable occurs inside " + a;
    throw TypeError(err.kind(), span, msg);
  }
}

PathPtr Typer::module_path(const Env &env, const ModPathSyntax &p, const SourceSpan &span) {
  return std::visit(
      overloaded{
          [&](const MPName &n) -> PathPtr {
            auto found = env.lookup_module(n.name);
            if (!found) throw TypeError(TypeError::Kind::Unbound, span, "Unbound module " + n.name);
            return *found;
          },
          [&](const MPDot &d) -> PathPtr {
            PathPtr prefix = module_path(env, *d.prefix, span);
            if (!env.find_component(prefix, Namespace::Module, d.name))
              throw TypeError(TypeError::Kind::Unbound, span, "Unbound module " + modpath_text(p));
            return path_dot(prefix, d.name);
          },
          [&](const MPApply &a) -> PathPtr {
            PathPtr f = module_path(env, *a.functor, span);
            PathPtr x = module_path(env, *a.arg, span);
            ModTypePtr fty = env.expand_modtype(env.find_module(f));
            const auto *fn = std::get_if<MFunctor>(&fty->node);
            if (!fn)
              throw TypeError(TypeError::Kind::NotAFunctor, span,
                              "The module " + modpath_text(*a.functor) + " is not a functor, it cannot be applied");
            try {
              match_modtype(env, strengthen(env, env.find_module(x), x), fn->param_type);
            } catch (const MatchError &m) {
              throw TypeError(TypeError::Kind::Other, span,
                              "Signature mismatch in functor argument " + modpath_text(*a.arg) + ":\n" + m.what());
            }
            return path_apply(f, x);
          },
      },
      p.node);
}

PathPtr Typer::type_path(const Env &env, const TEConstr &c, const SourceSpan &span) {
  if (c.qual) {
    PathPtr m = module_path(env, *c.qual, span);
    if (!env.find_component(m, Namespace::Type, c.name))
      throw TypeError(TypeError::Kind::Unbound, span,
                      "Unbound type constructor " + modpath_text(*c.qual) + "." + c.name);
    return path_dot(m, c.name);
  }
  auto found = env.lookup_type(c.name);
  if (!found) throw TypeError(TypeError::Kind::Unbound, span, "Unbound type constructor " + c.name);
  return *found;
}

TypePtr Typer::translate_type(const Env &env, const TypeExpr &t, TypeVarMap &vars, bool allow_new) {
  return std::visit(
      overloaded{
          [&](const TEVar &v) -> TypePtr {
            auto it = vars.find(v.name);
            if (it != vars.end()) return it->second;
            if (!allow_new)
              throw TypeError(TypeError::Kind::Unbound, t.span,
                              "The type variable '" + v.name + " is unbound in this type declaration");
            TypePtr fresh = state_.fresh();
            vars[v.name] = fresh;
            return fresh;
          },
          [&](const TEArrow &a) -> TypePtr {
            TypePtr from = translate_type(env, *a.from, vars, allow_new);
            return make_arrow(from, translate_type(env, *a.to, vars, allow_new));
          },
          [&](const TETuple &tu) -> TypePtr {
            std::vector<TypePtr> elems;
            for (const auto &e : tu.elems) elems.push_back(translate_type(env, e, vars, allow_new));
            return make_tuple(std::move(elems));
          },
          [&](const TEConstr &c) -> TypePtr {
            PathPtr p = type_path(env, c, t.span);
            auto decl = env.find_type(p);
            if (decl && decl->arity() != c.args.size()) {
              std::string name = c.qual ? modpath_text(*c.qual) + "." + c.name : c.name;
              throw TypeError(TypeError::Kind::TypeArity, t.span,
                              "The type constructor " + name + " expects " + plural_args(decl->arity()) +
                                  ",\nbut is here applied to " + plural_args(c.args.size()));
            }
            std::vector<TypePtr> args;
            for (const auto &a : c.args) args.push_back(translate_type(env, a, vars, allow_new));
            return make_constr(p, std::move(args));
          },
      },
      t.node);
}

TypePtr Typer::literal_type(const Env &env, const Literal &l) {
  const Predef &pd = env.predef();
  return std::visit(overloaded{
                        [&](std::int64_t) { return make_constr(pd.int_t); },
                        [&](const std::string &) { return make_constr(pd.string_t); },
                        [&](bool) { return make_constr(pd.bool_t); },
                        [&](Unit) { return make_constr(pd.unit_t); },
                    },
                    l);
}

ConstructorDesc Typer::constructor(const Env &env, const LongIdent &id, const SourceSpan &span) {
  std::optional<ConstructorDesc> d;
  if (id.qual.empty()) {
    d = env.lookup_constructor(id.name);
  } else {
    PathPtr m = module_path(env, qual_path(id.qual), span);
    d = env.lookup_constructor_in(m, id.name);
  }
  if (!d) throw TypeError(TypeError::Kind::Unbound, span, "Unbound constructor " + long_name(id));
  ConstructorDesc out = *d;
  if (!out.params.empty()) {
    std::vector<TypePtr> fresh;
    for (std::size_t i = 0; i < out.params.size(); ++i) fresh.push_back(state_.fresh());
    for (auto &a : out.args) a = replace_vars(a, out.params, fresh);
    out.result = replace_vars(out.result, out.params, fresh);
  }
  return out;
}

void Typer::pattern(Env &env, const Pattern &p, const TypePtr &expected, std::vector<PatBinding> &out) {
  auto unify_pat = [&](const TypePtr &actual) {
    try {
      unify(env, expected, actual);
    } catch (const UnifyError &) {
      TypeNamer names;
      std::string a = type_to_string(actual, names);
      std::string x = type_to_string(expected, names);
      throw TypeError(TypeError::Kind::Unify, p.span,
                      "This pattern matches values of type " + a +
                          " but a pattern was expected which matches values of type " + x);
    }
  };
  std::visit(
      overloaded{
          [&](const PWild &) {},
          [&](const PVar &v) { out.push_back(PatBinding{v.name, expected, p.span}); },
          [&](const PLit &l) { unify_pat(literal_type(env, l.value)); },
          [&](const PConstr &c) {
            ConstructorDesc d = constructor(env, c.ctor, p.span);
            unify_pat(d.result);
            std::size_t given = 0;
            if (c.arg) {
              const Pattern &arg = **c.arg;
              if (std::holds_alternative<PWild>(arg.node)) given = d.args.size();
              else if (d.args.size() > 1 && std::holds_alternative<PTuple>(arg.node))
                given = std::get<PTuple>(arg.node).elems.size();
              else given = 1;
            }
            if (given != d.args.size())
              throw TypeError(TypeError::Kind::ConstructorArity, p.span,
                              "The constructor " + long_name(c.ctor) + " expects " + plural_args(d.args.size()) +
                                  ",\nbut is applied here to " + plural_args(given));
            if (!c.arg) return;
            const Pattern &arg = **c.arg;
            if (std::holds_alternative<PWild>(arg.node)) return;
            if (d.args.size() == 1) return pattern(env, arg, d.args[0], out);
            const auto &elems = std::get<PTuple>(arg.node).elems;
            for (std::size_t i = 0; i < elems.size(); ++i) pattern(env, elems[i], d.args[i], out);
          },
          [&](const PTuple &t) {
            std::vector<TypePtr> elems;
            for (std::size_t i = 0; i < t.elems.size(); ++i) elems.push_back(state_.fresh());
            unify_pat(make_tuple(elems));
            for (std::size_t i = 0; i < t.elems.size(); ++i) pattern(env, t.elems[i], elems[i], out);
          },
          [&](const PAnnot &a) {
            unify_pat(translate_type(env, a.type, annot_vars_, true));
            pattern(env, *a.pat, expected, out);
          },
      },
      p.node);
}

namespace {

void bind_mono(Env &env, Session &s, const std::vector<PatBinding> &bs) {
  for (const auto &b : bs) env.add_value(s.fresh_ident(b.name), Scheme{{}, b.type});
}

} // namespace

TypePtr Typer::infer(Env &env, const Expr &e) { return infer_node(env, e); }

TypePtr Typer::infer_apply(Env &env, const Expr &e, const EApply &a) {
  TypePtr fn = infer(env, *a.fn);
  TypePtr head = expand_head(env, fn);
  TypePtr dom, cod;
  if (head->kind == Type::Kind::Arrow) {
    dom = head->args[0];
    cod = head->args[1];
  } else if (head->kind == Type::Kind::Var) {
    dom = state_.fresh();
    cod = state_.fresh();
    unify(env, head, make_arrow(dom, cod));
  } else {
    throw TypeError(TypeError::Kind::Unify, a.fn->span,
                    "This expression has type " + type_to_string(fn) +
                        "\nThis is not a function; it cannot be applied.");
  }
  (void)e;
  TypePtr arg = infer(env, *a.arg);
  unify_at(env, dom, arg, a.arg->span);
  return cod;
}

TypePtr Typer::infer_constr(Env &env, const Expr &e, const EConstr &c) {
  ConstructorDesc d = constructor(env, c.ctor, e.span);
  std::size_t given = 0;
  if (c.arg) {
    const Expr &arg = **c.arg;
    if (d.args.size() > 1 && std::holds_alternative<ETuple>(arg.node))
      given = std::get<ETuple>(arg.node).elems.size();
    else given = 1;
  }
  if (given != d.args.size())
    throw TypeError(TypeError::Kind::ConstructorArity, e.span,
                    "The constructor " + long_name(c.ctor) + " expects " + plural_args(d.args.size()) +
                        ",\nbut is applied here to " + plural_args(given));
  if (d.args.size() == 1) {
    TypePtr t = infer(env, **c.arg);
    unify_at(env, d.args[0], t, (*c.arg)->span);
  } else if (d.args.size() > 1) {
    const auto &elems = std::get<ETuple>((*c.arg)->node).elems;
    for (std::size_t i = 0; i < elems.size(); ++i) unify_at(env, d.args[i], infer(env, elems[i]), elems[i].span);
  }
  return d.result;
}

TypePtr Typer::infer_cases(Env &env, const TypePtr &scrutinee, const std::vector<Case> &cases,
                           bool all_exceptions) {
  TypePtr result = state_.fresh();
  TypePtr exn = make_constr(env.predef().exn_t);
  for (const auto &c : cases) {
    Env inner = env;
    std::vector<PatBinding> bs;
    pattern(inner, c.pat, (c.is_exception || all_exceptions) ? exn : scrutinee, bs);
    bind_mono(inner, session_, bs);
    unify_at(inner, result, infer(inner, *c.body), c.body->span);
  }
  return result;
}

TypePtr Typer::eliminate_local(Env &env, const Ident &hidden, const TypePtr &t, const SourceSpan &site,
                               const SourceSpan &body, const std::string &context) {
  TypePtr out = nondep_type(env, hidden, t);
  if (out) return out;
  auto culprit = culprit_in(env, hidden, t);
  std::optional<Ident> cid;
  Namespace kind = Namespace::Type;
  if (culprit) {
    cid = culprit->first;
    kind = culprit->second;
  }
  throw EliminationError(site, hidden, cid, kind, context, {Victim{Namespace::Value, "", body}});
}

std::vector<std::pair<PatBinding, Scheme>> Typer::let_bindings(Env &env, bool rec,
                                                               const std::vector<Binding> &bs) {
  auto infer_fn = [&](Env &scope, const Binding &b) -> TypePtr {
    if (b.params.empty()) return infer(scope, *b.body);
    Env inner = scope;
    std::vector<TypePtr> doms;
    for (const auto &p : b.params) {
      TypePtr d = state_.fresh();
      std::vector<PatBinding> pb;
      pattern(inner, p, d, pb);
      bind_mono(inner, session_, pb);
      doms.push_back(d);
    }
    TypePtr t = infer(inner, *b.body);
    for (auto it = doms.rbegin(); it != doms.rend(); ++it) t = make_arrow(*it, t);
    return t;
  };

  std::vector<PatBinding> bound;
  std::vector<bool> generalizable;
  state_.enter();
  if (rec) {
    Env scope = env;
    std::vector<TypePtr> pre;
    for (const auto &b : bs) {
      const Pattern *p = &b.pat;
      if (const auto *an = std::get_if<PAnnot>(&p->node)) p = &*an->pat;
      const auto *v = std::get_if<PVar>(&p->node);
      if (!v)
        throw TypeError(TypeError::Kind::Other, b.pat.span,
                        "Only variables are allowed as left-hand side of let rec");
      TypePtr t = state_.fresh();
      std::vector<PatBinding> pb;
      pattern(scope, b.pat, t, pb);
      scope.add_value(session_.fresh_ident(v->name), Scheme{{}, t});
      pre.push_back(t);
      bound.push_back(PatBinding{v->name, t, p->span});
    }
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const Binding &b = bs[i];
      if (b.params.empty() && !std::holds_alternative<EFun>(b.body->node))
        throw TypeError(TypeError::Kind::Other, b.body->span,
                        "This kind of expression is not allowed as right-hand side of let rec");
      unify_at(scope, pre[i], infer_fn(scope, b), b.body->span);
      generalizable.push_back(true);
    }
  } else {
    for (const auto &b : bs) {
      TypePtr t = infer_fn(env, b);
      std::vector<PatBinding> pb;
      pattern(env, b.pat, t, pb);
      bool gen = !b.params.empty() || is_nonexpansive(*b.body);
      for (auto &x : pb) {
        bound.push_back(x);
        generalizable.push_back(gen);
      }
    }
  }
  state_.leave();
  std::vector<std::pair<PatBinding, Scheme>> out;
  for (std::size_t i = 0; i < bound.size(); ++i) {
    Scheme s = generalizable[i] ? generalize(state_, bound[i].type) : monomorphic(state_, bound[i].type);
    out.emplace_back(bound[i], std::move(s));
  }
  return out;
}

TypePtr Typer::infer_node(Env &env, const Expr &e) {
  const Predef &pd = env.predef();
  return std::visit(
      overloaded{
          [&](const ELit &l) { return literal_type(env, l.value); },
          [&](const EVar &v) -> TypePtr {
            std::optional<ValueBinding> b;
            if (v.id.qual.empty()) {
              b = env.lookup_value(v.id.name);
            } else {
              PathPtr m = module_path(env, qual_path(v.id.qual), e.span);
              b = env.lookup_value_in(m, v.id.name);
            }
            if (!b) throw TypeError(TypeError::Kind::Unbound, e.span, "Unbound value " + long_name(v.id));
            return instantiate(state_, b->scheme);
          },
          [&](const EConstr &c) { return infer_constr(env, e, c); },
          [&](const EFun &f) -> TypePtr {
            Env inner = env;
            TypePtr dom = state_.fresh();
            std::vector<PatBinding> pb;
            pattern(inner, f.param, dom, pb);
            bind_mono(inner, session_, pb);
            return make_arrow(dom, infer(inner, *f.body));
          },
          [&](const EApply &a) { return infer_apply(env, e, a); },
          [&](const ETuple &t) -> TypePtr {
            std::vector<TypePtr> elems;
            for (const auto &x : t.elems) elems.push_back(infer(env, x));
            return make_tuple(std::move(elems));
          },
          [&](const ELet &l) -> TypePtr {
            Env inner = env;
            for (auto &[b, s] : let_bindings(env, l.rec, l.bindings))
              inner.add_value(session_.fresh_ident(b.name), s);
            return infer(inner, *l.body);
          },
          [&](const EMatch &m) -> TypePtr {
            TypePtr scrut = infer(env, *m.scrutinee);
            return infer_cases(env, scrut, m.cases, false);
          },
          [&](const ETry &t) -> TypePtr {
            TypePtr body = infer(env, *t.body);
            TypePtr handlers = infer_cases(env, make_constr(pd.exn_t), t.cases, true);
            unify_at(env, body, handlers, e.span);
            return body;
          },
          [&](const ERaise &r) -> TypePtr {
            unify_at(env, make_constr(pd.exn_t), infer(env, *r.arg), r.arg->span);
            return state_.fresh();
          },
          [&](const EAssert &a) -> TypePtr {
            if (const auto *lit = std::get_if<ELit>(&a.arg->node))
              if (const auto *b = std::get_if<bool>(&lit->value); b && !*b) return state_.fresh();
            unify_at(env, make_constr(pd.bool_t), infer(env, *a.arg), a.arg->span);
            return make_constr(pd.unit_t);
          },
          [&](const ESeq &s) -> TypePtr {
            infer(env, *s.first);
            return infer(env, *s.second);
          },
          [&](const EIf &i) -> TypePtr {
            unify_at(env, make_constr(pd.bool_t), infer(env, *i.cond), i.cond->span);
            TypePtr t = infer(env, *i.then_branch);
            if (i.else_branch) {
              unify_at(env, t, infer(env, **i.else_branch), (*i.else_branch)->span);
            } else {
              unify_at(env, make_constr(pd.unit_t), t, i.then_branch->span);
            }
            return t;
          },
          [&](const ELetModule &lm) -> TypePtr {
            ModuleResult r = module_expr(env, *lm.module);
            Env inner = env;
            Ident id = session_.fresh_ident(lm.name);
            inner.add_module(id, r.type);
            TypePtr body = infer(inner, *lm.body);
            TypePtr out = nondep_type(inner, id, body);
            if (!out)
              throw TypeError(TypeError::Kind::Escape, e.span,
                              "This let module expression has type " + type_to_string(body) +
                                  "\nIn this type, the locally bound module name " + lm.name +
                                  " escapes its scope");
            return out;
          },
          [&](const ELetException &le) -> TypePtr {
            Env inner = env;
            std::vector<TypePtr> args;
            if (le.arg) {
              TypeVarMap none;
              TypePtr a = translate_type(env, *le.arg, none, false);
              if (a->kind == Type::Kind::Tuple) args = a->args;
              else args.push_back(a);
            }
            inner.add_exception(session_.fresh_ident(le.name), std::move(args));
            return infer(inner, *le.body);
          },
          [&](const ELetOpen &lo) -> TypePtr {
            if (const auto *p = std::get_if<MEPath>(&lo.module->node)) {
              PathPtr path = module_path(env, p->path, lo.module->span);
              ModTypePtr mty = env.expand_modtype(env.find_module(path));
              const auto *sig = std::get_if<MSig>(&mty->node);
              if (!sig)
                throw TypeError(TypeError::Kind::CannotOpenFunctor, lo.module->span,
                                "This module is not a structure; it has type\n" + print_modtype(mty));
              Env inner = env;
              inner.open_signature(path, sig->items);
              return infer(inner, *lo.body);
            }
            OpenResult r = open(env, *lo.module);
            TypePtr body = infer(r.env, *lo.body);
            return eliminate_local(r.env, r.hidden, body, lo.module->span, lo.body->span, "open");
          },
      },
      e.node);
}

} // namespace minimod
