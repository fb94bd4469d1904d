#include "minimod/mod_typing.hpp"

#include "minimod/desugar.hpp"
#include "minimod/nondep.hpp"
#include "minimod/printer.hpp"
#include "typer.hpp"

#include <algorithm>
#include <set>

namespace minimod {

namespace {

thread_local EliminationObserver g_observer;

void notify(const Env &env, const Ident &hidden, const Signature &before, const Signature &after) {
  if (g_observer) g_observer(env, hidden, before, after);
}

TypeError mismatch(const SourceSpan &span, const MatchError &m, const std::string &what) {
  return TypeError(TypeError::Kind::Other, span, what + ":\n" + m.what());
}

std::vector<TypePtr> exception_args(const TypePtr &t) {
  if (t->kind == Type::Kind::Tuple) return t->args;
  return {t};
}

ModExpr path_expr(const std::string &name, const SourceSpan &span) {
  return ModExpr{span, MEPath{ModPathSyntax{MPName{name}}}};
}

const Signature &require_sig(const Env &env, const ModTypePtr &mty, const SourceSpan &span,
                             ModTypePtr &keep) {
  keep = env.expand_modtype(mty);
  const auto *sig = std::get_if<MSig>(&keep->node);
  if (!sig)
    throw TypeError(TypeError::Kind::CannotOpenFunctor, span,
                    "This module is not a structure; it has type\n" + print_modtype(keep));
  return sig->items;
}

} // namespace

// ---------------------------------------------------------------------------
// Module expressions

ModuleResult Typer::module_expr(Env &env, const ModExpr &m) {
  return std::visit(
      overloaded{
          [&](const MEPath &p) -> ModuleResult {
            PathPtr path = module_path(env, p.path, m.span);
            ModTypePtr mty = env.find_module(path);
            return ModuleResult{strengthen(env, mty, path), m};
          },
          [&](const MEStruct &s) -> ModuleResult {
            StructureResult r = structure(env, s.items);
            return ModuleResult{make_sig(std::move(r.sig)), ModExpr{m.span, MEStruct{std::move(r.elab)}}};
          },
          [&](const MEFunctor &f) -> ModuleResult {
            ModTypePtr pty = modtype(env, *f.param_type);
            Ident id = session_.fresh_ident(f.param);
            Env inner = env;
            inner.add_module(id, pty);
            ModuleResult body = module_expr(inner, *f.body);
            return ModuleResult{make_functor(id, pty, body.type),
                                ModExpr{m.span, MEFunctor{f.param, f.param_type, Box<ModExpr>(std::move(body.elab))}}};
          },
          [&](const MEApply &a) { return apply(env, m, a); },
          [&](const MEAscribe &a) -> ModuleResult {
            ModuleResult r = module_expr(env, *a.module);
            ModTypePtr target = modtype(env, *a.type);
            try {
              match_modtype(env, r.type, target);
            } catch (const MatchError &err) {
              throw mismatch(m.span, err, "Signature mismatch");
            }
            return ModuleResult{target, ModExpr{m.span, MEAscribe{Box<ModExpr>(std::move(r.elab)), a.type}}};
          },
      },
      m.node);
}

ModuleResult Typer::apply(Env &env, const ModExpr &m, const MEApply &a) {
  ModuleResult f = module_expr(env, *a.functor);
  ModTypePtr fty = env.expand_modtype(f.type);
  const auto *fn = std::get_if<MFunctor>(&fty->node);
  if (!fn)
    throw TypeError(TypeError::Kind::NotAFunctor, a.functor->span,
                    "This module is not a functor; it has type\n" + print_modtype(fty));
  ModuleResult arg = module_expr(env, *a.arg);
  ModExpr elab{m.span, MEApply{Box<ModExpr>(f.elab), Box<ModExpr>(arg.elab)}};

  if (const auto *p = std::get_if<MEPath>(&a.arg->node)) {
    PathPtr ap = module_path(env, p->path, a.arg->span);
    try {
      match_modtype(env, arg.type, fn->param_type);
    } catch (const MatchError &err) {
      throw mismatch(a.arg->span, err, "Signature mismatch in functor argument");
    }
    ModTypePtr res = subst_module(fn->result, fn->param, ap);
    if (const auto *fp = std::get_if<MEPath>(&a.functor->node))
      res = strengthen(env, res, path_apply(module_path(env, fp->path, a.functor->span), ap));
    return ModuleResult{res, std::move(elab)};
  }

  Ident hidden = session_.fresh_hidden("Arg");
  Env inner = env;
  inner.add_module(hidden, arg.type);
  try {
    match_modtype(inner, strengthen(inner, arg.type, path_ident(hidden)), fn->param_type);
  } catch (const MatchError &err) {
    throw mismatch(a.arg->span, err, "Signature mismatch in functor argument");
  }
  ModTypePtr res = subst_module(fn->result, fn->param, path_ident(hidden));
  try {
    res = nondep_modtype(inner, hidden, res);
  } catch (const EliminationError &err) {
    throw err.with_site(a.arg->span, "functor argument");
  }
  return ModuleResult{res, std::move(elab)};
}

OpenResult Typer::open(Env env, const ModExpr &m) {
  ModuleResult r = module_expr(env, m);
  ModTypePtr keep;
  const Signature &sig = require_sig(env, r.type, m.span, keep);
  Ident hidden = session_.fresh_hidden(kHiddenOpenName);
  env.add_module(hidden, r.type);
  env.open_signature(path_ident(hidden), sig);
  return OpenResult{hidden, sig, std::move(env), std::move(r.elab)};
}

// ---------------------------------------------------------------------------
// Module types

ModTypePtr Typer::modtype(Env &env, const ModTypeExpr &m) {
  return std::visit(
      overloaded{
          [&](const MTName &n) -> ModTypePtr {
            if (n.qual) {
              PathPtr q = module_path(env, *n.qual, m.span);
              if (!env.find_component(q, Namespace::ModType, n.name))
                throw TypeError(TypeError::Kind::Unbound, m.span, "Unbound module type " + n.name);
              return make_named(path_dot(q, n.name));
            }
            auto p = env.lookup_modtype(n.name);
            if (!p) throw TypeError(TypeError::Kind::Unbound, m.span, "Unbound module type " + n.name);
            return make_named(*p);
          },
          [&](const MTSig &s) { return make_sig(signature(env, s.items)); },
          [&](const MTFunctor &f) -> ModTypePtr {
            ModTypePtr pty = modtype(env, *f.param_type);
            Ident id = session_.fresh_ident(f.param);
            Env inner = env;
            inner.add_module(id, pty);
            return make_functor(id, pty, modtype(inner, *f.result));
          },
          [&](const MTWith &w) { return with_constraint(env, m, w); },
      },
      m.node);
}

ModTypePtr Typer::with_constraint(Env &env, const ModTypeExpr &m, const MTWith &w) {
  ModTypePtr base = env.expand_modtype(modtype(env, *w.base));
  const auto *sig = std::get_if<MSig>(&base->node);
  if (!sig) throw TypeError(TypeError::Kind::Other, m.span, "This module type is not a signature");
  Signature items = refresh_signature(session_, sig->items);
  std::size_t idx = items.size();
  for (std::size_t i = items.size(); i-- > 0;)
    if (const auto *t = std::get_if<SType>(&items[i]); t && t->id.name == w.type_name) {
      idx = i;
      break;
    }
  if (idx == items.size())
    throw TypeError(TypeError::Kind::UnboundTypeInWith, m.span,
                    "The signature constrained by with has no component named " + w.type_name);
  SType target = std::get<SType>(items[idx]);
  if (target.decl.arity() != w.params.size())
    throw TypeError(TypeError::Kind::TypeArity, m.span,
                    "In this with constraint, the new definition of " + w.type_name +
                        " does not match its original definition in the constrained signature");
  TypeVarMap vars;
  for (std::size_t i = 0; i < w.params.size(); ++i) vars[w.params[i]] = param_var(target.decl.params[i]);
  TypePtr rhs = translate_type(env, w.rhs, vars, false);
  if (w.mode == WithMode::Equal) {
    if (!target.decl.is_abstract())
      throw TypeError(TypeError::Kind::WithOnNonAbstract, m.span,
                      "The type " + w.type_name + " is not abstract and cannot be constrained with =");
    target.decl.manifest = rhs;
    items[idx] = target;
    return make_sig(std::move(items));
  }
  items.erase(items.begin() + static_cast<std::ptrdiff_t>(idx));
  TypeAbbrevSubst s{target.id, target.decl.params, rhs};
  return make_sig(s.signature(items));
}

// ---------------------------------------------------------------------------
// Type definitions

std::vector<SigItem> Typer::type_defs(Env &env, bool nonrec, const std::vector<TypeDefSyntax> &defs) {
  std::vector<Ident> ids;
  std::vector<std::vector<int>> params;
  Env scope = env;
  for (const auto &d : defs) {
    ids.push_back(session_.fresh_ident(d.name));
    std::vector<int> ps;
    for (std::size_t i = 0; i < d.params.size(); ++i) ps.push_back(session_.fresh_var_id());
    params.push_back(ps);
  }
  if (!nonrec)
    for (std::size_t i = 0; i < defs.size(); ++i) scope.add_type(ids[i], TypeDecl{params[i], {}, {}});

  std::vector<TypeDecl> decls;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    const TypeDefSyntax &d = defs[i];
    TypeVarMap vars;
    for (std::size_t j = 0; j < d.params.size(); ++j) vars[d.params[j]] = param_var(params[i][j]);
    TypeDecl decl;
    decl.params = params[i];
    if (d.manifest) decl.manifest = translate_type(scope, *d.manifest, vars, false);
    if (d.constructors) {
      std::vector<ConstructorDecl> cs;
      std::set<std::string> seen;
      for (const auto &c : *d.constructors) {
        if (!seen.insert(c.name).second)
          throw TypeError(TypeError::Kind::Other, c.span,
                          "Two constructors are named " + c.name);
        ConstructorDecl cd{c.name, {}};
        for (const auto &a : c.args) cd.args.push_back(translate_type(scope, a, vars, false));
        cs.push_back(std::move(cd));
      }
      decl.constructors = std::move(cs);
      if (decl.manifest) {
        auto other = scope.find_type(repr(*decl.manifest)->kind == Type::Kind::Constr
                                         ? repr(*decl.manifest)->path
                                         : path_ident(ids[i]));
        bool ok = repr(*decl.manifest)->kind == Type::Kind::Constr && other && other->constructors &&
                  other->constructors->size() == decl.constructors->size();
        for (std::size_t k = 0; ok && k < decl.constructors->size(); ++k)
          ok = (*other->constructors)[k].name == (*decl.constructors)[k].name &&
               (*other->constructors)[k].args.size() == (*decl.constructors)[k].args.size();
        if (!ok)
          throw TypeError(TypeError::Kind::Other, d.span,
                          "This variant definition does not match that of type " +
                              type_to_string(*decl.manifest));
      }
    }
    decls.push_back(std::move(decl));
  }

  int group = next_group_++;
  std::vector<SigItem> out;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    env.add_type(ids[i], decls[i]);
    out.push_back(SType{ids[i], decls[i], group, defs[i].span});
  }
  check_cycles(env, ids, defs);
  return out;
}

void Typer::check_cycles(const Env &env, const std::vector<Ident> &ids, const std::vector<TypeDefSyntax> &defs) {
  std::function<bool(const TypePtr &, std::vector<int> &)> reach = [&](const TypePtr &t0, std::vector<int> &stack) {
    TypePtr t = repr(t0);
    if (t->kind == Type::Kind::Constr && t->path->kind == Path::Kind::Ident) {
      int stamp = t->path->id.stamp;
      bool in_group = std::any_of(ids.begin(), ids.end(), [&](const Ident &i) { return i.stamp == stamp; });
      if (in_group) {
        if (std::find(stack.begin(), stack.end(), stamp) != stack.end()) return true;
        auto d = env.find_type(t->path);
        if (d && d->manifest) {
          stack.push_back(stamp);
          bool cyc = reach(*d->manifest, stack);
          stack.pop_back();
          if (cyc) return true;
        }
      }
    }
    for (const auto &a : t->args)
      if (reach(a, stack)) return true;
    return false;
  };
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto d = env.find_type(path_ident(ids[i]));
    if (!d || !d->manifest) continue;
    std::vector<int> stack{ids[i].stamp};
    if (reach(*d->manifest, stack))
      throw TypeError(TypeError::Kind::CyclicAbbrev, defs[i].span,
                      "The type abbreviation " + ids[i].name + " is cyclic");
  }
}

// ---------------------------------------------------------------------------
// Signatures

Signature Typer::signature(Env env, const std::vector<SigItemSurface> &items) {
  return signature_from(std::move(env), items, 0);
}

Signature Typer::signature_from(Env env, const std::vector<SigItemSurface> &items, std::size_t start) {
  Signature out;
  for (std::size_t i = start; i < items.size(); ++i) {
    const SigItemSurface &item = items[i];
    bool stop = false;
    std::visit(
        overloaded{
            [&](const SgVal &v) {
              TypeVarMap vars;
              TypePtr t = translate_type(env, v.type, vars, true);
              Scheme s;
              s.body = t;
              for (auto &[name, var] : vars) s.vars.push_back(repr(var)->var_id);
              std::sort(s.vars.begin(), s.vars.end());
              Ident id = session_.fresh_ident(v.name);
              env.add_value(id, s);
              out.push_back(SValue{id, s, item.span});
            },
            [&](const SgTypes &t) {
              for (auto &x : type_defs(env, t.nonrec, t.defs)) out.push_back(std::move(x));
            },
            [&](const SgTypeSubst &ts) {
              TypeVarMap vars;
              std::vector<int> params;
              for (const auto &p : ts.params) {
                params.push_back(session_.fresh_var_id());
                vars[p] = param_var(params.back());
              }
              TypePtr rhs = translate_type(env, ts.rhs, vars, false);
              Ident id = session_.fresh_ident(ts.name);
              env.add_type(id, TypeDecl{params, rhs, {}});
              Signature rest = signature_from(env, items, i + 1);
              TypeAbbrevSubst s{id, params, rhs};
              for (auto &x : s.signature(rest)) out.push_back(std::move(x));
              stop = true;
            },
            [&](const SgModule &m) {
              ModTypePtr mty = modtype(env, m.type);
              Ident id = session_.fresh_ident(m.name);
              env.add_module(id, mty);
              out.push_back(SModule{id, mty, item.span});
            },
            [&](const SgModType &m) {
              ModTypePtr mty = m.type ? modtype(env, *m.type) : nullptr;
              Ident id = session_.fresh_ident(m.name);
              env.add_modtype(id, mty);
              out.push_back(SModType{id, mty, item.span});
            },
            [&](const SgException &e) {
              std::vector<TypePtr> args;
              if (e.arg) {
                TypeVarMap none;
                args = exception_args(translate_type(env, *e.arg, none, false));
              }
              Ident id = session_.fresh_ident(e.name);
              env.add_exception(id, args);
              out.push_back(SExn{id, args, item.span});
            },
            [&](const SgOpen &o) {
              if (const auto *p = std::get_if<MEPath>(&o.module.node)) {
                PathPtr path = module_path(env, p->path, o.module.span);
                ModTypePtr keep;
                env.open_signature(path, require_sig(env, env.find_module(path), o.module.span, keep));
                return;
              }
              OpenResult r = open(env, o.module);
              Signature rest = signature_from(r.env, items, i + 1);
              try {
                Signature kept = nondep_signature(r.env, r.hidden, rest);
                notify(r.env, r.hidden, rest, kept);
                for (auto &x : kept) out.push_back(std::move(x));
              } catch (const EliminationError &err) {
                throw err.with_site(item.span, "open");
              }
              stop = true;
            },
            [&](const SgInclude &inc) {
              ModTypePtr keep;
              const Signature &sig = require_sig(env, modtype(env, inc.type), item.span, keep);
              for (auto &x : refresh_signature(session_, sig)) {
                env.add_item(x);
                out.push_back(std::move(x));
              }
            },
            [&](const SgLocal &l) {
              Signature hsig = signature(env, l.hidden);
              Ident hidden = session_.fresh_hidden(kHiddenOpenName);
              Env inner = env;
              inner.add_module(hidden, make_sig(hsig));
              inner.open_signature(path_ident(hidden), hsig);
              Signature body = signature(inner, l.body);
              Signature kept;
              try {
                kept = nondep_signature(inner, hidden, body);
                notify(inner, hidden, body, kept);
              } catch (const EliminationError &err) {
                throw err.with_site(item.span, "local");
              }
              for (auto &x : kept) {
                env.add_item(x);
                out.push_back(std::move(x));
              }
            },
        },
        item.node);
    if (stop) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structures

StructureResult Typer::structure(Env env, const std::vector<StructItem> &items) {
  return structure_from(std::move(env), items, 0);
}

StructureResult Typer::structure_from(Env env, const std::vector<StructItem> &items, std::size_t start) {
  Signature sig;
  std::vector<StructItem> elab;
  for (std::size_t i = start; i < items.size(); ++i) {
    const StructItem &item = items[i];
    std::optional<StructureResult> tail;
    std::visit(
        overloaded{
            [&](const SILet &l) {
              reset_annotation_vars();
              for (auto &[b, s] : let_bindings(env, l.rec, l.bindings)) {
                Ident id = session_.fresh_ident(b.name);
                env.add_value(id, s);
                sig.push_back(SValue{id, s, b.span});
              }
              elab.push_back(item);
            },
            [&](const SITypes &t) {
              for (auto &x : type_defs(env, t.nonrec, t.defs)) sig.push_back(std::move(x));
              elab.push_back(item);
            },
            [&](const SIModule &m) {
              ModExpr body = m.body;
              if (m.annot) body = ModExpr{m.body.span, MEAscribe{Box<ModExpr>(body), Box<ModTypeExpr>(*m.annot)}};
              for (auto it = m.params.rbegin(); it != m.params.rend(); ++it)
                body = ModExpr{item.span, MEFunctor{it->name, Box<ModTypeExpr>(it->type), Box<ModExpr>(body)}};
              ModuleResult r = module_expr(env, body);
              Ident id = session_.fresh_ident(m.name);
              env.add_module(id, r.type);
              sig.push_back(SModule{id, r.type, item.span});
              elab.push_back(StructItem{item.span, SIModule{m.name, {}, std::nullopt, std::move(r.elab)}});
            },
            [&](const SIModType &m) {
              ModTypePtr mty = modtype(env, m.type);
              Ident id = session_.fresh_ident(m.name);
              env.add_modtype(id, mty);
              sig.push_back(SModType{id, mty, item.span});
              elab.push_back(item);
            },
            [&](const SIException &e) {
              std::vector<TypePtr> args;
              if (e.arg) {
                TypeVarMap none;
                args = exception_args(translate_type(env, *e.arg, none, false));
              }
              Ident id = session_.fresh_ident(e.name);
              env.add_exception(id, args);
              sig.push_back(SExn{id, args, item.span});
              elab.push_back(item);
            },
            [&](const SIOpen &o) {
              if (const auto *p = std::get_if<MEPath>(&o.module.node)) {
                PathPtr path = module_path(env, p->path, o.module.span);
                ModTypePtr keep;
                env.open_signature(path, require_sig(env, env.find_module(path), o.module.span, keep));
                elab.push_back(item);
                return;
              }
              OpenResult r = open(env, o.module);
              StructureResult rest = structure_from(r.env, items, i + 1);
              Signature kept;
              try {
                kept = nondep_signature(rest.env, r.hidden, rest.sig);
                notify(rest.env, r.hidden, rest.sig, kept);
              } catch (const EliminationError &err) {
                throw err.with_site(item.span, "open");
              }
              std::string name = r.hidden.display_name();
              elab.push_back(StructItem{item.span, SIModule{name, {}, std::nullopt, std::move(r.elab)}});
              elab.push_back(StructItem{item.span, SIOpen{path_expr(name, o.module.span)}});
              for (auto &x : rest.elab) elab.push_back(std::move(x));
              for (auto &x : kept) sig.push_back(std::move(x));
              tail = StructureResult{{}, {}, std::move(rest.env)};
            },
            [&](const SIInclude &inc) {
              ModuleResult r = module_expr(env, inc.module);
              ModTypePtr keep;
              const Signature &included = require_sig(env, r.type, inc.module.span, keep);
              for (auto &x : refresh_signature(session_, included)) {
                env.add_item(x);
                sig.push_back(std::move(x));
              }
              elab.push_back(StructItem{item.span, SIInclude{std::move(r.elab)}});
            },
            [&](const SILocal &) {
              std::vector<StructItem> rest = expand_local({item});
              rest.insert(rest.end(), items.begin() + static_cast<std::ptrdiff_t>(i) + 1, items.end());
              tail = structure_from(env, rest, 0);
            },
            [&](const SIPrivate &) {
              std::vector<StructItem> rest = expand_private({item});
              rest.insert(rest.end(), items.begin() + static_cast<std::ptrdiff_t>(i) + 1, items.end());
              tail = structure_from(env, rest, 0);
            },
            [&](const SIExpr &x) {
              reset_annotation_vars();
              state_.enter();
              infer(env, x.expr);
              state_.leave();
              elab.push_back(item);
            },
        },
        item.node);
    if (tail) {
      for (auto &x : tail->sig) sig.push_back(std::move(x));
      for (auto &x : tail->elab) elab.push_back(std::move(x));
      return StructureResult{std::move(sig), std::move(elab), std::move(tail->env)};
    }
  }
  return StructureResult{std::move(sig), std::move(elab), std::move(env)};
}

// ---------------------------------------------------------------------------
// Public entry points

ModuleResult type_module_expr(Env &env, const ModExpr &m) {
  Typer t(env.session());
  return t.module_expr(env, m);
}

OpenResult type_open(Env &env, const ModExpr &m) {
  Typer t(env.session());
  return t.open(env, m);
}

StructureResult type_structure(Env &env, const std::vector<StructItem> &items) {
  Typer t(env.session());
  return t.structure(env, items);
}

ModTypePtr type_signature(Env &env, const std::vector<SigItemSurface> &items) {
  Typer t(env.session());
  return make_sig(t.signature(env, items));
}

ModTypePtr type_modtype(Env &env, const ModTypeExpr &m) {
  Typer t(env.session());
  return t.modtype(env, m);
}

TypedProgram check_program(Env &env, const Program &p) {
  Typer t(env.session());
  StructureResult r = t.structure(env, p.items);
  std::vector<Ident> ids;
  collect_idents(r.sig, ids);
  for (const auto &id : ids)
    if (id.hidden) throw std::logic_error("hidden identifier " + id.unique_name() + " in exported signature");
  return TypedProgram{Program{std::move(r.elab)}, std::move(r.sig), std::move(r.env)};
}

TypedProgram check_program(Session &session, const Program &p) {
  Env env = initial_env(session);
  return check_program(env, p);
}

EliminationObserver set_elimination_observer(EliminationObserver obs) {
  std::swap(obs, g_observer);
  return obs;
}

} // namespace minimod
