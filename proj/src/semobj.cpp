#include "minimod/semobj.hpp"

#include "minimod/core_typing.hpp"
#include "minimod/printer.hpp"

#include <algorithm>
#include <climits>

namespace minimod {

// ---------------------------------------------------------------------------
// Paths

PathPtr path_ident(const Ident &id) {
  auto p = std::make_shared<Path>();
  p->kind = Path::Kind::Ident;
  p->id = id;
  return p;
}

PathPtr path_dot(PathPtr prefix, const std::string &field) {
  auto p = std::make_shared<Path>();
  p->kind = Path::Kind::Dot;
  p->prefix = std::move(prefix);
  p->field = field;
  return p;
}

PathPtr path_apply(PathPtr functor, PathPtr arg) {
  auto p = std::make_shared<Path>();
  p->kind = Path::Kind::Apply;
  p->prefix = std::move(functor);
  p->arg = std::move(arg);
  return p;
}

bool path_equal(const PathPtr &a, const PathPtr &b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
  case Path::Kind::Ident: return a->id == b->id;
  case Path::Kind::Dot: return a->field == b->field && path_equal(a->prefix, b->prefix);
  case Path::Kind::Apply: return path_equal(a->prefix, b->prefix) && path_equal(a->arg, b->arg);
  }
  return false;
}

bool path_mentions(const PathPtr &p, const Ident &id) {
  switch (p->kind) {
  case Path::Kind::Ident: return p->id == id;
  case Path::Kind::Dot: return path_mentions(p->prefix, id);
  case Path::Kind::Apply: return path_mentions(p->prefix, id) || path_mentions(p->arg, id);
  }
  return false;
}

std::string path_to_string(const PathPtr &p) {
  switch (p->kind) {
  case Path::Kind::Ident: return p->id.unique_name();
  case Path::Kind::Dot: return path_to_string(p->prefix) + "." + p->field;
  case Path::Kind::Apply:
    return path_to_string(p->prefix) + "(" + path_to_string(p->arg) + ")";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Types

TypePtr new_var(Session &s, int level) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Var;
  t->var_id = s.fresh_var_id();
  t->level = level;
  return t;
}

TypePtr make_arrow(TypePtr from, TypePtr to) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Arrow;
  t->args = {std::move(from), std::move(to)};
  return t;
}

TypePtr make_tuple(std::vector<TypePtr> elems) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Tuple;
  t->args = std::move(elems);
  return t;
}

TypePtr make_constr(PathPtr path, std::vector<TypePtr> args) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Constr;
  t->path = std::move(path);
  t->args = std::move(args);
  return t;
}

TypePtr repr(TypePtr t) {
  while (t->kind == Type::Kind::Var && t->link) t = t->link;
  return t;
}

TypePtr resolve(const TypePtr &t0) {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Var) return t;
  auto out = std::make_shared<Type>(*t);
  for (auto &a : out->args) a = resolve(a);
  return out;
}

TypePtr replace_vars(const TypePtr &t0, const std::vector<int> &ids,
                     const std::vector<TypePtr> &args) {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Var) {
    for (std::size_t i = 0; i < ids.size() && i < args.size(); ++i)
      if (ids[i] == t->var_id) return args[i];
    return t;
  }
  auto out = std::make_shared<Type>(*t);
  for (auto &a : out->args) a = replace_vars(a, ids, args);
  return out;
}

bool type_mentions(const TypePtr &t0, const Ident &id) {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Constr && path_mentions(t->path, id)) return true;
  for (const auto &a : t->args)
    if (type_mentions(a, id)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Signature helpers

const Ident &item_ident(const SigItem &item) {
  return std::visit([](const auto &i) -> const Ident & { return i.id; }, item);
}

Namespace item_namespace(const SigItem &item) {
  return std::visit(overloaded{
                        [](const SValue &) { return Namespace::Value; },
                        [](const SType &) { return Namespace::Type; },
                        [](const SModule &) { return Namespace::Module; },
                        [](const SModType &) { return Namespace::ModType; },
                        [](const SExn &) { return Namespace::Exception; },
                    },
                    item);
}

namespace {

bool is_last(const Signature &sig, std::size_t i) {
  Namespace ns = item_namespace(sig[i]);
  const std::string &name = item_ident(sig[i]).name;
  for (std::size_t j = i + 1; j < sig.size(); ++j)
    if (item_namespace(sig[j]) == ns && item_ident(sig[j]).name == name) return false;
  return true;
}

} // namespace

TypePtr param_var(int id) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Var;
  t->var_id = id;
  t->level = INT_MAX;
  return t;
}

std::vector<TypePtr> param_vars(const std::vector<int> &ids) {
  std::vector<TypePtr> out;
  for (int id : ids) out.push_back(param_var(id));
  return out;
}

ModTypePtr make_sig(Signature items) {
  return std::make_shared<const ModType>(ModType{MSig{std::move(items)}});
}

ModTypePtr make_functor(Ident param, ModTypePtr param_type, ModTypePtr result) {
  return std::make_shared<const ModType>(
      ModType{MFunctor{std::move(param), std::move(param_type), std::move(result)}});
}

ModTypePtr make_named(PathPtr path) {
  return std::make_shared<const ModType>(ModType{MNamed{std::move(path)}});
}

namespace {

bool decl_mentions(const TypeDecl &d, const Ident &id) {
  if (d.manifest && type_mentions(*d.manifest, id)) return true;
  if (d.constructors)
    for (const auto &c : *d.constructors)
      for (const auto &a : c.args)
        if (type_mentions(a, id)) return true;
  return false;
}

bool item_mentions(const SigItem &item, const Ident &id) {
  return std::visit(overloaded{
                        [&](const SValue &v) { return type_mentions(v.scheme.body, id); },
                        [&](const SType &t) { return decl_mentions(t.decl, id); },
                        [&](const SModule &m) { return modtype_mentions(m.type, id); },
                        [&](const SModType &m) { return m.type && modtype_mentions(m.type, id); },
                        [&](const SExn &e) {
                          return std::any_of(e.args.begin(), e.args.end(),
                                             [&](const TypePtr &a) { return type_mentions(a, id); });
                        },
                    },
                    item);
}

void collect_path(const PathPtr &p, std::vector<Ident> &out) {
  switch (p->kind) {
  case Path::Kind::Ident: out.push_back(p->id); break;
  case Path::Kind::Dot: collect_path(p->prefix, out); break;
  case Path::Kind::Apply:
    collect_path(p->prefix, out);
    collect_path(p->arg, out);
    break;
  }
}

void collect_type(const TypePtr &t0, std::vector<Ident> &out) {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Constr) collect_path(t->path, out);
  for (const auto &a : t->args) collect_type(a, out);
}

void collect_modtype(const ModTypePtr &m, std::vector<Ident> &out) {
  std::visit(overloaded{
                 [&](const MSig &s) { collect_idents(s.items, out); },
                 [&](const MFunctor &f) {
                   out.push_back(f.param);
                   collect_modtype(f.param_type, out);
                   collect_modtype(f.result, out);
                 },
                 [&](const MNamed &n) { collect_path(n.path, out); },
             },
             m->node);
}

} // namespace

bool modtype_mentions(const ModTypePtr &m, const Ident &id) {
  return std::visit(overloaded{
                        [&](const MSig &s) { return signature_mentions(s.items, id); },
                        [&](const MFunctor &f) {
                          return modtype_mentions(f.param_type, id) || modtype_mentions(f.result, id);
                        },
                        [&](const MNamed &n) { return path_mentions(n.path, id); },
                    },
                    m->node);
}

bool signature_mentions(const Signature &s, const Ident &id) {
  return std::any_of(s.begin(), s.end(), [&](const SigItem &i) { return item_mentions(i, id); });
}

void collect_idents(const Signature &s, std::vector<Ident> &out) {
  for (const auto &item : s) {
    out.push_back(item_ident(item));
    std::visit(overloaded{
                   [&](const SValue &v) { collect_type(v.scheme.body, out); },
                   [&](const SType &t) {
                     if (t.decl.manifest) collect_type(*t.decl.manifest, out);
                     if (t.decl.constructors)
                       for (const auto &c : *t.decl.constructors)
                         for (const auto &a : c.args) collect_type(a, out);
                   },
                   [&](const SModule &m) { collect_modtype(m.type, out); },
                   [&](const SModType &m) {
                     if (m.type) collect_modtype(m.type, out);
                   },
                   [&](const SExn &e) {
                     for (const auto &a : e.args) collect_type(a, out);
                   },
               },
               item);
  }
}

// ---------------------------------------------------------------------------
// Subst

PathPtr Subst::path(const PathPtr &p) const {
  switch (p->kind) {
  case Path::Kind::Ident: {
    auto it = paths_.find(p->id.stamp);
    return it == paths_.end() ? p : it->second;
  }
  case Path::Kind::Dot: {
    PathPtr q = path(p->prefix);
    return q == p->prefix ? p : path_dot(q, p->field);
  }
  case Path::Kind::Apply: {
    PathPtr f = path(p->prefix);
    PathPtr a = path(p->arg);
    return f == p->prefix && a == p->arg ? p : path_apply(f, a);
  }
  }
  return p;
}

TypePtr Subst::type(const TypePtr &t0) const {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Var || paths_.empty()) return t;
  auto out = std::make_shared<Type>(*t);
  if (out->kind == Type::Kind::Constr) out->path = path(t->path);
  for (auto &a : out->args) a = type(a);
  return out;
}

Scheme Subst::scheme(const Scheme &s) const { return Scheme{s.vars, type(s.body)}; }

TypeDecl Subst::decl(const TypeDecl &d) const {
  TypeDecl out = d;
  if (out.manifest) out.manifest = type(*out.manifest);
  if (out.constructors)
    for (auto &c : *out.constructors)
      for (auto &a : c.args) a = type(a);
  return out;
}

SigItem Subst::item(const SigItem &i) const {
  return std::visit(overloaded{
                        [&](const SValue &v) -> SigItem { return SValue{v.id, scheme(v.scheme), v.span}; },
                        [&](const SType &t) -> SigItem { return SType{t.id, decl(t.decl), t.group, t.span}; },
                        [&](const SModule &m) -> SigItem { return SModule{m.id, modtype(m.type), m.span}; },
                        [&](const SModType &m) -> SigItem {
                          return SModType{m.id, m.type ? modtype(m.type) : nullptr, m.span};
                        },
                        [&](const SExn &e) -> SigItem {
                          SExn out = e;
                          for (auto &a : out.args) a = type(a);
                          return out;
                        },
                    },
                    i);
}

Signature Subst::signature(const Signature &s) const {
  Signature out;
  out.reserve(s.size());
  for (const auto &i : s) out.push_back(item(i));
  return out;
}

ModTypePtr Subst::modtype(const ModTypePtr &m) const {
  if (paths_.empty()) return m;
  return std::visit(overloaded{
                        [&](const MSig &s) { return make_sig(signature(s.items)); },
                        [&](const MFunctor &f) {
                          return make_functor(f.param, modtype(f.param_type), modtype(f.result));
                        },
                        [&](const MNamed &n) { return make_named(path(n.path)); },
                    },
                    m->node);
}

TypePtr TypeAbbrevSubst::type(const TypePtr &t0) const {
  TypePtr t = repr(t0);
  if (t->kind == Type::Kind::Var) return t;
  std::vector<TypePtr> args;
  for (const auto &a : t->args) args.push_back(type(a));
  if (t->kind == Type::Kind::Constr && t->path->kind == Path::Kind::Ident && t->path->id == id)
    return replace_vars(body, params, args);
  auto out = std::make_shared<Type>(*t);
  out->args = std::move(args);
  return out;
}

Signature TypeAbbrevSubst::signature(const Signature &s) const {
  Signature out;
  for (const auto &i : s) {
    out.push_back(std::visit(
        overloaded{
            [&](const SValue &v) -> SigItem { return SValue{v.id, Scheme{v.scheme.vars, type(v.scheme.body)}, v.span}; },
            [&](const SType &t) -> SigItem {
              SType o = t;
              if (o.decl.manifest) o.decl.manifest = type(*o.decl.manifest);
              if (o.decl.constructors)
                for (auto &c : *o.decl.constructors)
                  for (auto &a : c.args) a = type(a);
              return o;
            },
            [&](const SModule &m) -> SigItem { return SModule{m.id, modtype(m.type), m.span}; },
            [&](const SModType &m) -> SigItem {
              return SModType{m.id, m.type ? modtype(m.type) : nullptr, m.span};
            },
            [&](const SExn &e) -> SigItem {
              SExn o = e;
              for (auto &a : o.args) a = type(a);
              return o;
            },
        },
        i));
  }
  return out;
}

ModTypePtr TypeAbbrevSubst::modtype(const ModTypePtr &m) const {
  return std::visit(overloaded{
                        [&](const MSig &s) { return make_sig(signature(s.items)); },
                        [&](const MFunctor &f) {
                          return make_functor(f.param, modtype(f.param_type), modtype(f.result));
                        },
                        [&](const MNamed &) { return m; },
                    },
                    m->node);
}

// ---------------------------------------------------------------------------
// Env

void Env::add_value(const Ident &id, Scheme scheme) {
  values_[id.name] = ValueBinding{path_ident(id), std::move(scheme)};
}

void Env::add_type(const Ident &id, TypeDecl decl) {
  PathPtr p = path_ident(id);
  types_[id.name] = p;
  bind_constructors(p, decl);
  type_decls_[id.stamp] = std::move(decl);
}

void Env::add_module(const Ident &id, ModTypePtr type) {
  modules_[id.name] = path_ident(id);
  register_deep(type);
  module_types_[id.stamp] = std::move(type);
}

void Env::add_modtype(const Ident &id, ModTypePtr type) {
  modtypes_[id.name] = path_ident(id);
  if (type) register_deep(type);
  modtype_defs_[id.stamp] = std::move(type);
}

void Env::add_exception(const Ident &id, std::vector<TypePtr> args) {
  ConstructorDesc d;
  d.name = id.name;
  d.args = std::move(args);
  d.result = make_constr(predef().exn_t);
  d.is_exception = true;
  d.exn_path = path_ident(id);
  constructors_[id.name] = std::move(d);
}

void Env::add_item(const SigItem &item) {
  std::visit(overloaded{
                 [&](const SValue &v) { add_value(v.id, v.scheme); },
                 [&](const SType &t) { add_type(t.id, t.decl); },
                 [&](const SModule &m) { add_module(m.id, m.type); },
                 [&](const SModType &m) { add_modtype(m.id, m.type); },
                 [&](const SExn &e) { add_exception(e.id, e.args); },
             },
             item);
}

void Env::register_item(const SigItem &item) {
  std::visit(overloaded{
                 [&](const SValue &) {},
                 [&](const SType &t) { type_decls_[t.id.stamp] = t.decl; },
                 [&](const SModule &m) {
                   register_deep(m.type);
                   module_types_[m.id.stamp] = m.type;
                 },
                 [&](const SModType &m) {
                   if (m.type) register_deep(m.type);
                   modtype_defs_[m.id.stamp] = m.type;
                 },
                 [&](const SExn &) {},
             },
             item);
}

void Env::register_deep(const ModTypePtr &m) {
  std::visit(overloaded{
                 [&](const MSig &s) {
                   for (const auto &i : s.items) register_item(i);
                 },
                 [&](const MFunctor &f) {
                   register_deep(f.param_type);
                   module_types_.emplace(f.param.stamp, f.param_type);
                   register_deep(f.result);
                 },
                 [&](const MNamed &) {},
             },
             m->node);
}

void Env::bind_constructors(const PathPtr &type_path, const TypeDecl &decl) {
  if (!decl.constructors) return;
  TypePtr result = make_constr(type_path, param_vars(decl.params));
  for (const auto &c : *decl.constructors) {
    ConstructorDesc d;
    d.name = c.name;
    d.params = decl.params;
    d.args = c.args;
    d.result = result;
    constructors_[c.name] = std::move(d);
  }
}

void Env::open_signature(const PathPtr &at, const Signature &sig) {
  Subst s = prefix_subst(sig, at);
  for (std::size_t i = 0; i < sig.size(); ++i) {
    SigItem item = s.item(sig[i]);
    register_item(sig[i]);
    bool last = is_last(sig, i);
    const Ident &id = item_ident(item);
    PathPtr p = last ? path_dot(at, id.name) : path_ident(id);
    std::visit(overloaded{
                   [&](const SValue &v) { values_[id.name] = ValueBinding{path_dot(at, id.name), v.scheme}; },
                   [&](const SType &t) {
                     types_[id.name] = p;
                     bind_constructors(p, t.decl);
                   },
                   [&](const SModule &) { modules_[id.name] = p; },
                   [&](const SModType &) { modtypes_[id.name] = p; },
                   [&](const SExn &e) {
                     ConstructorDesc d;
                     d.name = id.name;
                     d.args = e.args;
                     d.result = make_constr(predef().exn_t);
                     d.is_exception = true;
                     d.exn_path = path_dot(at, id.name);
                     constructors_[id.name] = std::move(d);
                   },
               },
               item);
  }
}

std::optional<ValueBinding> Env::lookup_value(const std::string &name) const {
  auto it = values_.find(name);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<PathPtr> Env::lookup_type(const std::string &name) const {
  auto it = types_.find(name);
  if (it == types_.end()) return std::nullopt;
  return it->second;
}

std::optional<PathPtr> Env::lookup_module(const std::string &name) const {
  auto it = modules_.find(name);
  if (it == modules_.end()) return std::nullopt;
  return it->second;
}

std::optional<PathPtr> Env::lookup_modtype(const std::string &name) const {
  auto it = modtypes_.find(name);
  if (it == modtypes_.end()) return std::nullopt;
  return it->second;
}

std::optional<ConstructorDesc> Env::lookup_constructor(const std::string &name) const {
  auto it = constructors_.find(name);
  if (it == constructors_.end()) return std::nullopt;
  return it->second;
}

std::optional<ValueBinding> Env::lookup_value_in(const PathPtr &module,
                                                 const std::string &name) const {
  auto c = find_component(module, Namespace::Value, name);
  if (!c) return std::nullopt;
  return ValueBinding{path_dot(module, name), std::get<SValue>(*c).scheme};
}

std::optional<ConstructorDesc> Env::lookup_constructor_in(const PathPtr &module,
                                                          const std::string &name) const {
  ModTypePtr m = find_module(module);
  if (!m) return std::nullopt;
  m = expand_modtype(m);
  const auto *sig = std::get_if<MSig>(&m->node);
  if (!sig) return std::nullopt;
  Subst s = prefix_subst(sig->items, module);
  for (std::size_t i = sig->items.size(); i-- > 0;) {
    const SigItem &item = sig->items[i];
    if (const auto *e = std::get_if<SExn>(&item); e && e->id.name == name) {
      ConstructorDesc d;
      d.name = name;
      for (const auto &a : e->args) d.args.push_back(s.type(a));
      d.result = make_constr(predef().exn_t);
      d.is_exception = true;
      d.exn_path = path_dot(module, name);
      return d;
    }
    if (const auto *t = std::get_if<SType>(&item); t && t->decl.constructors) {
      for (const auto &c : *t->decl.constructors) {
        if (c.name != name) continue;
        PathPtr tp = is_last(sig->items, i) ? path_dot(module, t->id.name) : path_ident(t->id);
        ConstructorDesc d;
        d.name = name;
        d.params = t->decl.params;
        for (const auto &a : c.args) d.args.push_back(s.type(a));
        d.result = make_constr(tp, param_vars(t->decl.params));
        return d;
      }
    }
  }
  return std::nullopt;
}

std::optional<TypeDecl> Env::find_type(const PathPtr &p) const {
  switch (p->kind) {
  case Path::Kind::Ident: {
    auto it = type_decls_.find(p->id.stamp);
    if (it == type_decls_.end()) return std::nullopt;
    return it->second;
  }
  case Path::Kind::Dot: {
    auto c = find_component(p->prefix, Namespace::Type, p->field);
    if (!c) return std::nullopt;
    return std::get<SType>(*c).decl;
  }
  case Path::Kind::Apply: return std::nullopt;
  }
  return std::nullopt;
}

ModTypePtr Env::find_module(const PathPtr &p) const {
  switch (p->kind) {
  case Path::Kind::Ident: {
    auto it = module_types_.find(p->id.stamp);
    return it == module_types_.end() ? nullptr : it->second;
  }
  case Path::Kind::Dot: {
    auto c = find_component(p->prefix, Namespace::Module, p->field);
    if (!c) return nullptr;
    return std::get<SModule>(*c).type;
  }
  case Path::Kind::Apply: {
    ModTypePtr f = find_module(p->prefix);
    if (!f) return nullptr;
    f = expand_modtype(f);
    const auto *fn = std::get_if<MFunctor>(&f->node);
    if (!fn) return nullptr;
    return subst_module(fn->result, fn->param, p->arg);
  }
  }
  return nullptr;
}

std::optional<ModTypePtr> Env::find_modtype(const PathPtr &p) const {
  switch (p->kind) {
  case Path::Kind::Ident: {
    auto it = modtype_defs_.find(p->id.stamp);
    if (it == modtype_defs_.end()) return std::nullopt;
    return it->second;
  }
  case Path::Kind::Dot: {
    auto c = find_component(p->prefix, Namespace::ModType, p->field);
    if (!c) return std::nullopt;
    return std::get<SModType>(*c).type;
  }
  case Path::Kind::Apply: return std::nullopt;
  }
  return std::nullopt;
}

ModTypePtr Env::expand_modtype(const ModTypePtr &m) const {
  ModTypePtr cur = m;
  for (int guard = 0; guard < 1000; ++guard) {
    const auto *n = std::get_if<MNamed>(&cur->node);
    if (!n) return cur;
    auto def = find_modtype(n->path);
    if (!def || !*def) return cur;
    cur = *def;
  }
  return cur;
}

std::optional<SigItem> Env::find_component(const PathPtr &module, Namespace ns,
                                           const std::string &name) const {
  ModTypePtr m = find_module(module);
  if (!m) return std::nullopt;
  m = expand_modtype(m);
  const auto *sig = std::get_if<MSig>(&m->node);
  if (!sig) return std::nullopt;
  for (std::size_t i = sig->items.size(); i-- > 0;) {
    const SigItem &item = sig->items[i];
    if (item_namespace(item) == ns && item_ident(item).name == name)
      return prefix_subst(sig->items, module).item(item);
  }
  return std::nullopt;
}

Subst prefix_subst(const Signature &sig, const PathPtr &at) {
  Subst s;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    Namespace ns = item_namespace(sig[i]);
    if (ns == Namespace::Value || ns == Namespace::Exception) continue;
    if (is_last(sig, i)) s.add(item_ident(sig[i]), path_dot(at, item_ident(sig[i]).name));
  }
  return s;
}

Signature refresh_signature(Session &session, const Signature &sig) {
  Subst s;
  Signature out;
  for (const auto &item : sig) {
    SigItem renamed = s.item(item);
    const Ident &old = item_ident(item);
    Ident fresh = old.hidden ? session.fresh_hidden(old.name) : session.fresh_ident(old.name);
    std::visit([&](auto &i) { i.id = fresh; }, renamed);
    s.add(old, path_ident(fresh));
    out.push_back(std::move(renamed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strengthening and substitution

ModTypePtr strengthen(const Env &env, const ModTypePtr &mty, const PathPtr &at) {
  ModTypePtr m = env.expand_modtype(mty);
  const auto *sig = std::get_if<MSig>(&m->node);
  if (!sig) return m;
  Signature out = sig->items;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!is_last(out, i)) continue;
    if (auto *t = std::get_if<SType>(&out[i])) {
      if (!t->decl.manifest)
        t->decl.manifest = make_constr(path_dot(at, t->id.name), param_vars(t->decl.params));
    } else if (auto *mod = std::get_if<SModule>(&out[i])) {
      mod->type = strengthen(env, mod->type, path_dot(at, mod->id.name));
    }
  }
  return make_sig(std::move(out));
}

ModTypePtr subst_module(const ModTypePtr &mty, const Ident &from, const PathPtr &to) {
  Subst s;
  s.add(from, to);
  return s.modtype(mty);
}

// ---------------------------------------------------------------------------
// Matching

const char *namespace_word(Namespace ns) {
  switch (ns) {
  case Namespace::Value: return "value";
  case Namespace::Type: return "type";
  case Namespace::Module: return "module";
  case Namespace::ModType: return "module type";
  case Namespace::Exception: return "exception";
  }
  return "component";
}

namespace {

class Matcher {
public:
  explicit Matcher(Session &s) : session_(s) {}

  void modtypes(Env env, const ModTypePtr &cand0, const ModTypePtr &target0, const std::string &where) {
    ModTypePtr cand = env.expand_modtype(cand0);
    ModTypePtr target = env.expand_modtype(target0);
    if (const auto *tn = std::get_if<MNamed>(&target->node)) {
      const auto *cn = std::get_if<MNamed>(&cand->node);
      if (!cn || !path_equal(cn->path, tn->path))
        fail(MatchError::Reason::KindMismatch, where,
             "Module types do not match: an abstract module type " + path_to_string(tn->path) +
                 " was expected");
      return;
    }
    const auto *ts = std::get_if<MSig>(&target->node);
    const auto *cs = std::get_if<MSig>(&cand->node);
    if (ts) {
      if (!cs) fail(MatchError::Reason::KindMismatch, where, "Modules do not match: a structure was expected, not a functor");
      signatures(env, cs->items, ts->items, where);
      return;
    }
    const auto &tf = std::get<MFunctor>(target->node);
    const auto *cf = std::get_if<MFunctor>(&cand->node);
    if (!cf) fail(MatchError::Reason::KindMismatch, where, "Modules do not match: a functor was expected");
    modtypes(env, tf.param_type, cf->param_type, where.empty() ? "functor parameter" : where + "(parameter)");
    Env inner = env;
    inner.add_module(tf.param, tf.param_type);
    ModTypePtr cres = subst_module(cf->result, cf->param, path_ident(tf.param));
    modtypes(inner, cres, tf.result, where);
  }

private:
  Session &session_;

  [[noreturn]] void fail(MatchError::Reason r, const std::string &where, const std::string &msg) {
    throw MatchError(r, where, msg);
  }

  static std::string qualify(const std::string &where, const std::string &name) {
    return where.empty() ? name : where + "." + name;
  }

  std::vector<TypePtr> skolems(std::size_t n) {
    std::vector<TypePtr> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(make_constr(path_ident(session_.fresh_hidden("'s"))));
    return out;
  }

  std::vector<TypePtr> fresh_vars(std::size_t n) {
    std::vector<TypePtr> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(new_var(session_, 0));
    return out;
  }

  bool unifies(const Env &env, const TypePtr &a, const TypePtr &b) {
    try {
      unify(env, a, b);
      return true;
    } catch (const UnifyError &) {
      return false;
    }
  }

  void signatures(Env &env, const Signature &cand, const Signature &target, const std::string &where) {
    for (const auto &c : cand) env.register_item(c);
    Subst s;
    std::vector<std::pair<const SigItem *, const SigItem *>> pairs;
    for (const auto &t : target) {
      Namespace ns = item_namespace(t);
      const std::string &name = item_ident(t).name;
      const SigItem *found = nullptr;
      for (auto it = cand.rbegin(); it != cand.rend(); ++it)
        if (item_namespace(*it) == ns && item_ident(*it).name == name) {
          found = &*it;
          break;
        }
      if (!found)
        fail(MatchError::Reason::Missing, qualify(where, name),
             std::string("The ") + namespace_word(ns) + " " + qualify(where, name) +
                 " is required but not provided");
      pairs.emplace_back(found, &t);
      if (ns == Namespace::Type || ns == Namespace::Module || ns == Namespace::ModType)
        s.add(item_ident(t), path_ident(item_ident(*found)));
    }
    for (auto [c, t0] : pairs) component(env, *c, s.item(*t0), where);
  }

  void component(Env &env, const SigItem &cand, const SigItem &target, const std::string &where) {
    std::string name = qualify(where, item_ident(target).name);
    std::visit(overloaded{
                   [&](const SValue &tv) {
                     const auto &cv = std::get<SValue>(cand);
                     TypePtr ct = replace_vars(cv.scheme.body, cv.scheme.vars, fresh_vars(cv.scheme.vars.size()));
                     TypePtr tt = replace_vars(tv.scheme.body, tv.scheme.vars, skolems(tv.scheme.vars.size()));
                     if (unifies(env, tt, ct)) return;
                     TypePtr ct2 = replace_vars(cv.scheme.body, cv.scheme.vars, fresh_vars(cv.scheme.vars.size()));
                     TypePtr tt2 = replace_vars(tv.scheme.body, tv.scheme.vars, fresh_vars(tv.scheme.vars.size()));
                     auto reason = unifies(env, tt2, ct2) ? MatchError::Reason::NotGeneralEnough
                                                         : MatchError::Reason::TypeMismatch;
                     fail(reason, name,
                          "Values do not match:\n  val " + name + " : " + scheme_to_string(cv.scheme) +
                              "\nis not included in\n  val " + name + " : " + scheme_to_string(tv.scheme));
                   },
                   [&](const SType &tt) { types(env, std::get<SType>(cand), tt, name); },
                   [&](const SModule &tm) { modtypes(env, std::get<SModule>(cand).type, tm.type, name); },
                   [&](const SModType &tm) {
                     const auto &cm = std::get<SModType>(cand);
                     if (!tm.type) return;
                     if (!cm.type)
                       fail(MatchError::Reason::TypeMismatch, name,
                            "Module type declarations do not match for " + name);
                     modtypes(env, cm.type, tm.type, name);
                     modtypes(env, tm.type, cm.type, name);
                   },
                   [&](const SExn &te) {
                     const auto &ce = std::get<SExn>(cand);
                     bool ok = ce.args.size() == te.args.size();
                     for (std::size_t i = 0; ok && i < te.args.size(); ++i) ok = unifies(env, te.args[i], ce.args[i]);
                     if (!ok)
                       fail(MatchError::Reason::TypeMismatch, name,
                            "Extension declarations do not match for exception " + name);
                   },
               },
               target);
  }

  void types(Env &env, const SType &c, const SType &t, const std::string &name) {
    if (c.decl.arity() != t.decl.arity())
      fail(MatchError::Reason::Arity, name,
           "Type declarations do not match: " + name + " has " + std::to_string(c.decl.arity()) +
               " parameter(s) but " + std::to_string(t.decl.arity()) + " are required");
    auto sk = skolems(t.decl.arity());
    auto mismatch = [&] {
      fail(MatchError::Reason::TypeMismatch, name, "Type declarations do not match for " + name);
    };
    TypePtr self = make_constr(path_ident(c.id), sk);
    if (t.decl.manifest && !unifies(env, replace_vars(*t.decl.manifest, t.decl.params, sk), self)) mismatch();
    if (t.decl.constructors) {
      if (!c.decl.constructors) mismatch();
      const auto &cc = *c.decl.constructors;
      const auto &tc = *t.decl.constructors;
      if (cc.size() != tc.size()) mismatch();
      for (std::size_t i = 0; i < tc.size(); ++i) {
        if (cc[i].name != tc[i].name || cc[i].args.size() != tc[i].args.size()) mismatch();
        for (std::size_t j = 0; j < tc[i].args.size(); ++j)
          if (!unifies(env, replace_vars(tc[i].args[j], t.decl.params, sk),
                       replace_vars(cc[i].args[j], c.decl.params, sk)))
            mismatch();
      }
    }
  }
};

} // namespace

void match_modtype(const Env &env, const ModTypePtr &candidate, const ModTypePtr &target) {
  Matcher(env.session()).modtypes(env, candidate, target, "");
}

// ---------------------------------------------------------------------------
// Builtins

Env initial_env(Session &session) {
  Env env(session);
  Predef pd;
  auto abstract_type = [&](const std::string &name, int arity) {
    Ident id = session.fresh_ident(name);
    TypeDecl d;
    for (int i = 0; i < arity; ++i) d.params.push_back(session.fresh_var_id());
    env.add_type(id, d);
    return path_ident(id);
  };
  pd.int_t = abstract_type("int", 0);
  pd.string_t = abstract_type("string", 0);
  pd.bool_t = abstract_type("bool", 0);
  pd.unit_t = abstract_type("unit", 0);
  pd.exn_t = abstract_type("exn", 0);
  pd.ref_t = abstract_type("ref", 1);
  env.set_predef(pd);

  auto variant = [&](const std::string &name, std::vector<std::pair<std::string, int>> ctors,
                     int arity) {
    Ident id = session.fresh_ident(name);
    TypeDecl d;
    for (int i = 0; i < arity; ++i) d.params.push_back(session.fresh_var_id());
    std::vector<ConstructorDecl> cs;
    for (auto &[cname, param] : ctors) {
      ConstructorDecl c{cname, {}};
      if (param >= 0) c.args.push_back(param_var(d.params[static_cast<std::size_t>(param)]));
      cs.push_back(std::move(c));
    }
    d.constructors = std::move(cs);
    env.add_type(id, d);
    return path_ident(id);
  };
  pd.option_t = variant("option", {{"None", -1}, {"Some", 0}}, 1);
  pd.result_t = variant("result", {{"Ok", 0}, {"Error", 1}}, 2);

  TypePtr int_ty = make_constr(pd.int_t);
  TypePtr string_ty = make_constr(pd.string_t);
  TypePtr bool_ty = make_constr(pd.bool_t);
  TypePtr unit_ty = make_constr(pd.unit_t);

  auto exception = [&](const std::string &name, std::vector<TypePtr> args) {
    Ident id = session.fresh_ident(name);
    env.add_exception(id, std::move(args));
    return path_ident(id);
  };
  env.set_predef(pd);
  pd.match_failure = exception("Match_failure", {});
  pd.assert_failure = exception("Assert_failure", {});
  pd.failure = exception("Failure", {string_ty});
  exception("Not_found", {});
  exception("Exit", {});
  env.set_predef(pd);

  auto value = [&](const std::string &name, Scheme s) { env.add_value(session.fresh_ident(name), std::move(s)); };
  auto mono = [](TypePtr t) { return Scheme{{}, std::move(t)}; };
  auto arrow2 = [](TypePtr a, TypePtr b, TypePtr r) { return make_arrow(a, make_arrow(b, r)); };
  value("+", mono(arrow2(int_ty, int_ty, int_ty)));
  value("-", mono(arrow2(int_ty, int_ty, int_ty)));
  value("*", mono(arrow2(int_ty, int_ty, int_ty)));
  value("=", mono(arrow2(int_ty, int_ty, bool_ty)));
  value("<", mono(arrow2(int_ty, int_ty, bool_ty)));
  value("not", mono(make_arrow(bool_ty, bool_ty)));
  auto poly = [&](auto build) {
    int a = session.fresh_var_id();
    return Scheme{{a}, build(param_var(a))};
  };
  auto ref_of = [&](TypePtr t) { return make_constr(pd.ref_t, {std::move(t)}); };
  value("ref", poly([&](TypePtr a) { return make_arrow(a, ref_of(a)); }));
  value("!", poly([&](TypePtr a) { return make_arrow(ref_of(a), a); }));
  value(":=", poly([&](TypePtr a) { return arrow2(ref_of(a), a, unit_ty); }));
  value("incr", mono(make_arrow(ref_of(int_ty), unit_ty)));
  value("decr", mono(make_arrow(ref_of(int_ty), unit_ty)));
  value("print", mono(make_arrow(string_ty, unit_ty)));
  value("print_int", mono(make_arrow(int_ty, unit_ty)));
  value("string_of_int", mono(make_arrow(int_ty, string_ty)));
  value("failwith", poly([&](TypePtr a) { return make_arrow(string_ty, a); }));
  return env;
}

} // namespace minimod
