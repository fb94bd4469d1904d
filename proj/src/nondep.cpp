#include "minimod/nondep.hpp"

#include "minimod/core_typing.hpp"

namespace minimod {

EliminationError::EliminationError(SourceSpan span, Ident hidden, std::optional<Ident> culprit,
                                   Namespace culprit_kind, std::string context,
                                   std::vector<Victim> victims)
    : Diagnostic(std::move(span),
                 std::string("The ") + namespace_word(culprit_kind) + " " +
                     (culprit ? culprit->unique_name() : hidden.unique_name()) + " introduced by this " +
                     context + " appears in the signature"),
      hidden_(std::move(hidden)), culprit_(std::move(culprit)), culprit_kind_(culprit_kind),
      context_(std::move(context)), victims_(std::move(victims)) {}

EliminationError EliminationError::with_site(SourceSpan span, std::string context) const {
  return EliminationError(std::move(span), hidden_, culprit_, culprit_kind_, std::move(context), victims_);
}

bool mentions(const Ident &hidden, const TypePtr &t) { return type_mentions(t, hidden); }
bool mentions(const Ident &hidden, const ModTypePtr &m) { return modtype_mentions(m, hidden); }
bool mentions(const Ident &hidden, const Signature &s) { return signature_mentions(s, hidden); }

namespace {

PathPtr first_hidden_path(const TypePtr &t0, const Ident &hidden) {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Constr && path_mentions(t->path, hidden)) return t->path;
  for (const auto &a : t->args)
    if (PathPtr p = first_hidden_path(a, hidden)) return p;
  return nullptr;
}

std::optional<std::pair<Ident, Namespace>> culprit_of_path(const Env &env, const Ident &hidden,
                                                           const PathPtr &p0) {
  // Walk down to the component directly under `hidden`.
  PathPtr p = p0;
  Namespace ns = Namespace::Type;
  while (p && p->kind == Path::Kind::Apply) p = path_mentions(p->prefix, hidden) ? p->prefix : p->arg;
  if (!p) return std::nullopt;
  while (p->kind == Path::Kind::Dot && !(p->prefix->kind == Path::Kind::Ident && p->prefix->id == hidden)) {
    p = p->prefix;
    ns = Namespace::Module;
    while (p->kind == Path::Kind::Apply) p = path_mentions(p->prefix, hidden) ? p->prefix : p->arg;
  }
  if (p->kind != Path::Kind::Dot) return std::nullopt;
  ModTypePtr m = env.find_module(path_ident(hidden));
  if (!m) return std::nullopt;
  m = env.expand_modtype(m);
  const auto *sig = std::get_if<MSig>(&m->node);
  if (!sig) return std::nullopt;
  for (auto it = sig->items.rbegin(); it != sig->items.rend(); ++it)
    if (item_namespace(*it) == ns && item_ident(*it).name == p->field)
      return std::make_pair(item_ident(*it), ns);
  return std::nullopt;
}

bool match_pattern(const TypePtr &pat0, const TypePtr &t0, const std::vector<int> &params,
                   std::vector<TypePtr> &binds) {
  TypePtr pat = repr(pat0);
  TypePtr t = repr(t0);
  if (pat->kind == Type::Kind::Var) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i] != pat->var_id) continue;
      if (!binds[i]) {
        binds[i] = t;
        return true;
      }
      std::vector<TypePtr> none;
      return match_pattern(binds[i], t, {}, none);
    }
    return pat == t;
  }
  if (pat->kind != t->kind || pat->args.size() != t->args.size()) return false;
  if (pat->kind == Type::Kind::Constr && !path_equal(pat->path, t->path)) return false;
  for (std::size_t i = 0; i < pat->args.size(); ++i)
    if (!match_pattern(pat->args[i], t->args[i], params, binds)) return false;
  return true;
}

class Eliminator {
public:
  Eliminator(const Env &env, const Ident &hidden) : env_(env), hidden_(hidden) {}

  std::optional<TypePtr> first_failure;
  PathPtr first_failed_path;

  TypePtr type(const TypePtr &t0, bool reverse, int depth = 0) {
    TypePtr t = repr(t0);
    if (depth > 1000) return nullptr;
    if (t->kind == Type::Kind::Var) return t;
    if (t->kind == Type::Kind::Constr && path_mentions(t->path, hidden_)) {
      if (TypePtr e = expand_head_once(env_, t)) return type(e, reverse, depth + 1);
      if (reverse)
        if (TypePtr r = reverse_alias(t, depth)) return r;
      return nullptr;
    }
    std::vector<TypePtr> args;
    for (const auto &a : t->args) {
      TypePtr x = type(a, reverse, depth + 1);
      if (!x) {
        if (t->kind == Type::Kind::Constr)
          if (TypePtr e = expand_head_once(env_, t)) return type(e, reverse, depth + 1);
        return nullptr;
      }
      args.push_back(x);
    }
    auto out = std::make_shared<Type>(*t);
    out->args = std::move(args);
    return out;
  }

  Signature signature(const Signature &sig, std::vector<Victim> &victims) {
    std::size_t alias_mark = aliases_.size();
    Signature out;
    for (const auto &item : sig) {
      std::visit(
          overloaded{
              [&](const SValue &v) {
                TypePtr body = checked(v.scheme.body, true);
                if (!body) return victims.push_back(Victim{Namespace::Value, v.id.name, v.span});
                out.push_back(SValue{v.id, Scheme{v.scheme.vars, body}, v.span});
              },
              [&](const SType &t) {
                SType o = t;
                if (o.decl.manifest) {
                  TypePtr m = type(*o.decl.manifest, false);
                  if (m) o.decl.manifest = m;
                  else o.decl.manifest.reset();
                }
                if (o.decl.constructors) {
                  for (auto &c : *o.decl.constructors)
                    for (auto &a : c.args) {
                      TypePtr x = checked(a, true);
                      if (!x) {
                        victims.push_back(Victim{Namespace::Type, t.id.name, t.span});
                        return;
                      }
                      a = x;
                    }
                }
                if (t.decl.manifest) aliases_.emplace_back(t.id, t.decl);
                out.push_back(std::move(o));
              },
              [&](const SModule &m) {
                ModTypePtr x = modtype(m.type);
                if (!x) return victims.push_back(Victim{Namespace::Module, m.id.name, m.span});
                out.push_back(SModule{m.id, x, m.span});
              },
              [&](const SModType &m) {
                if (!m.type) return out.push_back(m);
                ModTypePtr x = modtype(m.type);
                if (!x) return victims.push_back(Victim{Namespace::ModType, m.id.name, m.span});
                out.push_back(SModType{m.id, x, m.span});
              },
              [&](const SExn &e) {
                SExn o = e;
                for (auto &a : o.args) {
                  TypePtr x = checked(a, true);
                  if (!x) return victims.push_back(Victim{Namespace::Exception, e.id.name, e.span});
                  a = x;
                }
                out.push_back(std::move(o));
              },
          },
          item);
    }
    aliases_.erase(aliases_.begin() + static_cast<std::ptrdiff_t>(alias_mark), aliases_.end());
    return out;
  }

  ModTypePtr modtype(const ModTypePtr &m) {
    return std::visit(overloaded{
                          [&](const MSig &s) -> ModTypePtr {
                            std::vector<Victim> inner;
                            Signature out = signature(s.items, inner);
                            if (!inner.empty()) return nullptr;
                            return make_sig(std::move(out));
                          },
                          [&](const MFunctor &f) -> ModTypePtr {
                            ModTypePtr p = modtype(f.param_type);
                            ModTypePtr r = p ? modtype(f.result) : nullptr;
                            if (!p || !r) return nullptr;
                            return make_functor(f.param, p, r);
                          },
                          [&](const MNamed &n) -> ModTypePtr {
                            if (!path_mentions(n.path, hidden_)) return m;
                            ModTypePtr e = env_.expand_modtype(m);
                            if (std::holds_alternative<MNamed>(e->node)) {
                              if (!first_failed_path) first_failed_path = n.path;
                              return nullptr;
                            }
                            return modtype(e);
                          },
                      },
                      m->node);
  }

private:
  const Env &env_;
  Ident hidden_;
  std::vector<std::pair<Ident, TypeDecl>> aliases_;

  TypePtr checked(const TypePtr &t, bool reverse) {
    TypePtr x = type(t, reverse);
    if (!x && !first_failure) first_failure = t;
    return x;
  }

  TypePtr reverse_alias(const TypePtr &t, int depth) {
    for (auto it = aliases_.rbegin(); it != aliases_.rend(); ++it) {
      const TypeDecl &d = it->second;
      std::vector<TypePtr> binds(d.params.size());
      if (!match_pattern(*d.manifest, t, d.params, binds)) continue;
      std::vector<TypePtr> args;
      bool ok = true;
      for (auto &b : binds) {
        TypePtr x = b ? type(b, true, depth + 1) : nullptr;
        if (!x) {
          ok = false;
          break;
        }
        args.push_back(x);
      }
      if (ok) return make_constr(path_ident(it->first), std::move(args));
    }
    return nullptr;
  }
};

} // namespace

std::optional<std::pair<Ident, Namespace>> culprit_in(const Env &env, const Ident &hidden,
                                                      const TypePtr &t) {
  PathPtr p = first_hidden_path(t, hidden);
  if (!p) return std::nullopt;
  return culprit_of_path(env, hidden, p);
}

TypePtr nondep_type(const Env &env, const Ident &hidden, const TypePtr &t) {
  Eliminator e(env, hidden);
  return e.type(t, false);
}

Signature nondep_signature(const Env &env, const Ident &hidden, const Signature &sig) {
  Eliminator e(env, hidden);
  std::vector<Victim> victims;
  Signature out = e.signature(sig, victims);
  if (victims.empty()) return out;
  std::optional<std::pair<Ident, Namespace>> culprit;
  if (e.first_failure) culprit = culprit_in(env, hidden, *e.first_failure);
  else if (e.first_failed_path) culprit = culprit_of_path(env, hidden, e.first_failed_path);
  if (!culprit) {
    // Fall back to the first offending type anywhere in the victims.
    for (const auto &item : sig) {
      if (!signature_mentions(Signature{item}, hidden)) continue;
      if (const auto *v = std::get_if<SValue>(&item)) culprit = culprit_in(env, hidden, v->scheme.body);
      if (culprit) break;
    }
  }
  std::optional<Ident> cid;
  Namespace kind = Namespace::Module;
  if (culprit) {
    cid = culprit->first;
    kind = culprit->second;
  }
  throw EliminationError(SourceSpan{}, hidden, cid, kind, "open", std::move(victims));
}

ModTypePtr nondep_modtype(const Env &env, const Ident &hidden, const ModTypePtr &m) {
  if (const auto *s = std::get_if<MSig>(&m->node)) return make_sig(nondep_signature(env, hidden, s->items));
  Eliminator e(env, hidden);
  ModTypePtr out = e.modtype(m);
  if (out) return out;
  std::optional<std::pair<Ident, Namespace>> culprit;
  if (e.first_failure) culprit = culprit_in(env, hidden, *e.first_failure);
  else if (e.first_failed_path) culprit = culprit_of_path(env, hidden, e.first_failed_path);
  std::optional<Ident> cid;
  Namespace kind = Namespace::Module;
  if (culprit) {
    cid = culprit->first;
    kind = culprit->second;
  }
  throw EliminationError(SourceSpan{}, hidden, cid, kind, "open",
                         {Victim{Namespace::Module, "", SourceSpan{}}});
}

} // namespace minimod
