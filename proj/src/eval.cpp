#include "minimod/eval.hpp"

#include <set>
#include <sstream>

namespace minimod {

namespace {

struct Raised {
  ValuePtr exn;
  SourceSpan span;
};

ValuePtr mk(Value v) { return std::make_shared<const Value>(std::move(v)); }
ValuePtr unit_value() {
  static const ValuePtr u = mk(Value{VUnit{}});
  return u;
}

std::string quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

const std::vector<std::pair<std::string, int>> kBuiltins = {
    {"+", 2},    {"-", 2},    {"*", 2},     {"=", 2},         {"<", 2},
    {"not", 1},  {"ref", 1},  {"!", 1},     {":=", 2},        {"incr", 1},
    {"decr", 1}, {"print", 1}, {"print_int", 1}, {"string_of_int", 1}, {"failwith", 1},
};

const std::vector<std::string> kBuiltinExceptions = {"Match_failure", "Assert_failure", "Failure", "Not_found",
                                                     "Exit"};

/// Names bound by a module type, used to cut a module value down to what an
/// ascription exposes.
struct Shape {
  bool functor = false;
  std::set<std::string> values, ctors, modtypes;
  std::map<std::string, std::shared_ptr<Shape>> modules;
};
using ShapePtr = std::shared_ptr<Shape>;
using LocalModTypes = std::map<std::string, const ModTypeExpr *>;

class Evaluator {
public:
  explicit Evaluator(std::ostream &out) : out_(out) {}

  int effects = 0;

  EnvPtr initial_env() {
    auto f = std::make_shared<Frame>();
    for (const auto &[name, arity] : kBuiltins) f->fields.values[name] = mk(Value{VBuiltin{name, {}}});
    for (const auto &name : kBuiltinExceptions) f->fields.ctors[name] = CtorBinding{fresh_tag(name)};
    return f;
  }

  EnvPtr items(const std::vector<StructItem> &items, EnvPtr env, StructFields &exports) {
    for (const auto &item : items) env = this->item(item, env, exports);
    return env;
  }

  ValuePtr expr(const Expr &e, const EnvPtr &env) {
    return std::visit(
        overloaded{
            [&](const ELit &l) { return literal(l.value); },
            [&](const EVar &v) { return find_value(env, v.id); },
            [&](const EConstr &c) {
              std::optional<ValuePtr> arg;
              if (c.arg) arg = expr(**c.arg, env);
              std::optional<CtorBinding> b = find_ctor(env, c.ctor);
              if (b && b->exn) return mk(Value{VExn{*b->exn, arg}});
              return mk(Value{VConstr{c.ctor.name, arg}});
            },
            [&](const EFun &f) { return mk(Value{VClosure{env, {&f.param}, &*f.body}}); },
            [&](const EApply &a) {
              ValuePtr fn = expr(*a.fn, env);
              ValuePtr arg = expr(*a.arg, env);
              return apply(fn, arg, e.span);
            },
            [&](const ETuple &t) {
              std::vector<ValuePtr> elems;
              for (const auto &x : t.elems) elems.push_back(expr(x, env));
              return mk(Value{VTuple{std::move(elems)}});
            },
            [&](const ELet &l) { return expr(*l.body, let_bindings(l.rec, l.bindings, env, nullptr)); },
            [&](const EMatch &m) { return match(m, env, e.span); },
            [&](const ETry &t) -> ValuePtr {
              try {
                return expr(*t.body, env);
              } catch (const Raised &r) {
                for (const auto &c : t.cases) {
                  auto f = std::make_shared<Frame>(Frame{env, {}});
                  if (matches(c.pat, r.exn, env, f->fields)) return expr(*c.body, f);
                }
                throw;
              }
            },
            [&](const ERaise &r) -> ValuePtr { throw Raised{expr(*r.arg, env), e.span}; },
            [&](const EAssert &a) -> ValuePtr {
              ++effects;
              ValuePtr v = expr(*a.arg, env);
              if (!std::get<VBool>(v->node).v) raise_builtin("Assert_failure", std::nullopt, e.span);
              return unit_value();
            },
            [&](const ESeq &s) {
              expr(*s.first, env);
              return expr(*s.second, env);
            },
            [&](const EIf &i) {
              if (std::get<VBool>(expr(*i.cond, env)->node).v) return expr(*i.then_branch, env);
              if (i.else_branch) return expr(**i.else_branch, env);
              return unit_value();
            },
            [&](const ELetModule &m) {
              auto f = std::make_shared<Frame>(Frame{env, {}});
              f->fields.modules[m.name] = module(*m.module, env);
              return expr(*m.body, f);
            },
            [&](const ELetException &x) {
              auto f = std::make_shared<Frame>(Frame{env, {}});
              f->fields.ctors[x.name] = CtorBinding{fresh_tag(x.name)};
              return expr(*x.body, f);
            },
            [&](const ELetOpen &o) {
              ModulePtr m = module(*o.module, env);
              auto f = std::make_shared<Frame>(Frame{env, std::get<StructFields>(m->node)});
              return expr(*o.body, f);
            },
        },
        e.node);
  }

  ExnTag fresh_tag(const std::string &name) { return ExnTag{++next_tag_, name}; }

private:
  std::ostream &out_;
  std::vector<ValuePtr> store_;
  int next_tag_ = 0;

  // -- lookup ----------------------------------------------------------------

  template <class F> static auto search(const EnvPtr &env, F f) -> decltype(f(env->fields)) {
    for (const Frame *fr = env.get(); fr; fr = fr->parent.get())
      if (auto r = f(fr->fields)) return r;
    return {};
  }

  ModulePtr find_module_name(const EnvPtr &env, const std::string &name) {
    ModulePtr m = search(env, [&](const StructFields &s) -> ModulePtr {
      auto it = s.modules.find(name);
      return it == s.modules.end() ? nullptr : it->second;
    });
    if (!m) throw std::logic_error("unbound module " + name + " at run time");
    return m;
  }

  static const StructFields &fields_of(const ModulePtr &m) { return std::get<StructFields>(m->node); }

  ModulePtr qualifier(const EnvPtr &env, const std::vector<std::string> &qual) {
    ModulePtr m = find_module_name(env, qual.front());
    for (std::size_t i = 1; i < qual.size(); ++i) m = fields_of(m).modules.at(qual[i]);
    return m;
  }

  ValuePtr find_value(const EnvPtr &env, const LongIdent &id) {
    if (!id.qual.empty()) return fields_of(qualifier(env, id.qual)).values.at(id.name);
    ValuePtr v = search(env, [&](const StructFields &s) -> ValuePtr {
      auto it = s.values.find(id.name);
      return it == s.values.end() ? nullptr : it->second;
    });
    if (!v) throw std::logic_error("unbound value " + id.name + " at run time");
    return v;
  }

  std::optional<CtorBinding> find_ctor(const EnvPtr &env, const LongIdent &id) {
    if (!id.qual.empty()) {
      const auto &ctors = fields_of(qualifier(env, id.qual)).ctors;
      auto it = ctors.find(id.name);
      if (it == ctors.end()) return std::nullopt;
      return it->second;
    }
    return search(env, [&](const StructFields &s) -> std::optional<CtorBinding> {
      auto it = s.ctors.find(id.name);
      if (it == s.ctors.end()) return std::nullopt;
      return it->second;
    });
  }

  std::optional<ModTypeDef> find_modtype(const EnvPtr &env, const MTName &n) {
    if (n.qual) {
      ModulePtr m = module_path(env, *n.qual);
      const auto &mts = fields_of(m).modtypes;
      auto it = mts.find(n.name);
      if (it == mts.end()) return std::nullopt;
      return it->second;
    }
    return search(env, [&](const StructFields &s) -> std::optional<ModTypeDef> {
      auto it = s.modtypes.find(n.name);
      if (it == s.modtypes.end()) return std::nullopt;
      return it->second;
    });
  }

  ModulePtr module_path(const EnvPtr &env, const ModPathSyntax &p) {
    return std::visit(overloaded{
                          [&](const MPName &n) { return find_module_name(env, n.name); },
                          [&](const MPDot &d) { return fields_of(module_path(env, *d.prefix)).modules.at(d.name); },
                          [&](const MPApply &a) {
                            return apply_functor(module_path(env, *a.functor), module_path(env, *a.arg));
                          },
                      },
                      p.node);
  }

  // -- modules ---------------------------------------------------------------

  ModulePtr module(const ModExpr &m, const EnvPtr &env) {
    return std::visit(overloaded{
                          [&](const MEPath &p) { return module_path(env, p.path); },
                          [&](const MEStruct &s) {
                            StructFields exports;
                            items(s.items, env, exports);
                            return std::make_shared<const ModuleValue>(ModuleValue{std::move(exports)});
                          },
                          [&](const MEFunctor &f) {
                            FunctorValue fv{env, {{f.param, &*f.param_type}}, &*f.body, nullptr};
                            return std::make_shared<const ModuleValue>(ModuleValue{std::move(fv)});
                          },
                          [&](const MEApply &a) {
                            ModulePtr fn = module(*a.functor, env);
                            return apply_functor(fn, module(*a.arg, env));
                          },
                          [&](const MEAscribe &a) { return restrict(module(*a.module, env), *a.type, env); },
                      },
                      m.node);
  }

  ModulePtr apply_functor(const ModulePtr &fn, const ModulePtr &arg) {
    const auto &f = std::get<FunctorValue>(fn->node);
    auto frame = std::make_shared<Frame>(Frame{f.env, {}});
    frame->fields.modules[f.params.front().first] = restrict(arg, *f.params.front().second, f.env);
    if (f.params.size() > 1) {
      FunctorValue rest{frame, {f.params.begin() + 1, f.params.end()}, f.body, f.result_type};
      return std::make_shared<const ModuleValue>(ModuleValue{std::move(rest)});
    }
    ModulePtr result = module(*f.body, frame);
    return f.result_type ? restrict(result, *f.result_type, frame) : result;
  }

  ShapePtr shape(const ModTypeExpr &mt, const EnvPtr &env, LocalModTypes &local) {
    return std::visit(
        overloaded{
            [&](const MTName &n) -> ShapePtr {
              if (!n.qual) {
                auto it = local.find(n.name);
                if (it != local.end()) return it->second ? shape(*it->second, env, local) : nullptr;
              }
              std::optional<ModTypeDef> def = find_modtype(env, n);
              if (!def || !def->expr) return nullptr;
              LocalModTypes none;
              return shape(*def->expr, def->env, none);
            },
            [&](const MTSig &s) -> ShapePtr {
              auto out = std::make_shared<Shape>();
              LocalModTypes inner = local;
              sig_shape(s.items, env, inner, *out);
              return out;
            },
            [&](const MTFunctor &) -> ShapePtr {
              auto out = std::make_shared<Shape>();
              out->functor = true;
              return out;
            },
            [&](const MTWith &w) { return shape(*w.base, env, local); },
        },
        mt.node);
  }

  void sig_shape(const std::vector<SigItemSurface> &items, const EnvPtr &env, LocalModTypes &local, Shape &out) {
    for (const auto &item : items) {
      std::visit(overloaded{
                     [&](const SgVal &v) { out.values.insert(v.name); },
                     [&](const SgTypes &t) {
                       for (const auto &d : t.defs)
                         if (d.constructors)
                           for (const auto &c : *d.constructors) out.ctors.insert(c.name);
                     },
                     [&](const SgTypeSubst &) {},
                     [&](const SgModule &m) { out.modules[m.name] = shape(m.type, env, local); },
                     [&](const SgModType &m) {
                       out.modtypes.insert(m.name);
                       local[m.name] = m.type ? &*m.type : nullptr;
                     },
                     [&](const SgException &e) { out.ctors.insert(e.name); },
                     [&](const SgOpen &) {},
                     [&](const SgInclude &i) {
                       ShapePtr s = shape(i.type, env, local);
                       if (!s) return;
                       out.values.insert(s->values.begin(), s->values.end());
                       out.ctors.insert(s->ctors.begin(), s->ctors.end());
                       out.modtypes.insert(s->modtypes.begin(), s->modtypes.end());
                       for (const auto &[k, v] : s->modules) out.modules[k] = v;
                     },
                     [&](const SgLocal &l) { sig_shape(l.body, env, local, out); },
                 },
                 item.node);
    }
  }

  static ModulePtr cut(const ModulePtr &m, const ShapePtr &s) {
    if (!s || s->functor || !std::holds_alternative<StructFields>(m->node)) return m;
    const auto &in = std::get<StructFields>(m->node);
    StructFields out;
    for (const auto &[k, v] : in.values)
      if (s->values.count(k)) out.values[k] = v;
    for (const auto &[k, v] : in.ctors)
      if (s->ctors.count(k)) out.ctors[k] = v;
    for (const auto &[k, v] : in.modtypes)
      if (s->modtypes.count(k)) out.modtypes[k] = v;
    for (const auto &[k, v] : in.modules) {
      auto it = s->modules.find(k);
      if (it != s->modules.end()) out.modules[k] = cut(v, it->second);
    }
    return std::make_shared<const ModuleValue>(ModuleValue{std::move(out)});
  }

  ModulePtr restrict(const ModulePtr &m, const ModTypeExpr &mt, const EnvPtr &env) {
    LocalModTypes local;
    return cut(m, shape(mt, env, local));
  }

  // -- structure items -------------------------------------------------------

  static bool exported(const std::string &name) { return name.find('#') == std::string::npos; }

  EnvPtr item(const StructItem &item, const EnvPtr &env, StructFields &exports) {
    return std::visit(
        overloaded{
            [&](const SILet &l) { return let_bindings(l.rec, l.bindings, env, &exports); },
            [&](const SITypes &t) -> EnvPtr {
              auto f = std::make_shared<Frame>(Frame{env, {}});
              for (const auto &d : t.defs)
                if (d.constructors)
                  for (const auto &c : *d.constructors) f->fields.ctors[c.name] = CtorBinding{};
              for (const auto &[k, v] : f->fields.ctors) exports.ctors[k] = v;
              return f;
            },
            [&](const SIModule &m) -> EnvPtr {
              ModulePtr value;
              if (!m.params.empty()) {
                FunctorValue fv{env, {}, &m.body, m.annot ? &*m.annot : nullptr};
                for (const auto &p : m.params) fv.params.emplace_back(p.name, &p.type);
                value = std::make_shared<const ModuleValue>(ModuleValue{std::move(fv)});
              } else {
                value = module(m.body, env);
                if (m.annot) value = restrict(value, *m.annot, env);
              }
              auto f = std::make_shared<Frame>(Frame{env, {}});
              f->fields.modules[m.name] = value;
              if (exported(m.name)) exports.modules[m.name] = value;
              return f;
            },
            [&](const SIModType &m) -> EnvPtr {
              auto f = std::make_shared<Frame>(Frame{env, {}});
              f->fields.modtypes[m.name] = ModTypeDef{&m.type, env};
              exports.modtypes[m.name] = f->fields.modtypes[m.name];
              return f;
            },
            [&](const SIException &e) -> EnvPtr {
              auto f = std::make_shared<Frame>(Frame{env, {}});
              f->fields.ctors[e.name] = CtorBinding{fresh_tag(e.name)};
              exports.ctors[e.name] = f->fields.ctors[e.name];
              return f;
            },
            [&](const SIOpen &o) -> EnvPtr {
              ModulePtr m = module(o.module, env);
              return std::make_shared<Frame>(Frame{env, fields_of(m)});
            },
            [&](const SIInclude &i) -> EnvPtr {
              ModulePtr m = module(i.module, env);
              const StructFields &fs = fields_of(m);
              for (const auto &[k, v] : fs.values) exports.values[k] = v;
              for (const auto &[k, v] : fs.modules) exports.modules[k] = v;
              for (const auto &[k, v] : fs.ctors) exports.ctors[k] = v;
              for (const auto &[k, v] : fs.modtypes) exports.modtypes[k] = v;
              return std::make_shared<Frame>(Frame{env, fs});
            },
            [&](const SILocal &l) -> EnvPtr {
              StructFields scratch;
              EnvPtr inner = items(l.hidden, env, scratch);
              StructFields body;
              items(l.body, inner, body);
              for (const auto &[k, v] : body.values) exports.values[k] = v;
              for (const auto &[k, v] : body.modules) exports.modules[k] = v;
              for (const auto &[k, v] : body.ctors) exports.ctors[k] = v;
              for (const auto &[k, v] : body.modtypes) exports.modtypes[k] = v;
              return std::make_shared<Frame>(Frame{env, std::move(body)});
            },
            [&](const SIPrivate &p) -> EnvPtr {
              StructFields scratch;
              return this->item(*p.item, env, scratch);
            },
            [&](const SIExpr &x) -> EnvPtr {
              expr(x.expr, env);
              return env;
            },
        },
        item.node);
  }

  EnvPtr let_bindings(bool rec, const std::vector<Binding> &bs, const EnvPtr &env, StructFields *exports) {
    auto f = std::make_shared<Frame>(Frame{env, {}});
    // Recursive closures capture the frame that will hold them.
    EnvPtr scope = rec ? EnvPtr(f) : env;
    StructFields bound;
    for (const auto &b : bs) {
      ValuePtr v;
      if (!b.params.empty()) {
        std::vector<const Pattern *> ps;
        for (const auto &p : b.params) ps.push_back(&p);
        v = mk(Value{VClosure{scope, std::move(ps), &*b.body}});
      } else {
        v = expr(*b.body, scope);
      }
      if (!matches(b.pat, v, env, bound)) raise_builtin("Match_failure", std::nullopt, b.span);
    }
    f->fields = std::move(bound);
    if (exports)
      for (const auto &[k, v] : f->fields.values) exports->values[k] = v;
    return f;
  }

  // -- core ------------------------------------------------------------------

  static ValuePtr literal(const Literal &l) {
    return std::visit(overloaded{
                          [](std::int64_t v) { return mk(Value{VInt{v}}); },
                          [](const std::string &s) { return mk(Value{VString{s}}); },
                          [](bool b) { return mk(Value{VBool{b}}); },
                          [](Unit) { return unit_value(); },
                      },
                      l);
  }

  [[noreturn]] void raise_builtin(const std::string &name, std::optional<ValuePtr> arg, const SourceSpan &span) {
    static const std::map<std::string, int> ids = [] {
      std::map<std::string, int> m;
      int i = 0;
      for (const auto &n : kBuiltinExceptions) m[n] = ++i;
      return m;
    }();
    throw Raised{mk(Value{VExn{ExnTag{ids.at(name), name}, std::move(arg)}}), span};
  }

  ValuePtr match(const EMatch &m, const EnvPtr &env, const SourceSpan &span) {
    ValuePtr v;
    try {
      v = expr(*m.scrutinee, env);
    } catch (const Raised &r) {
      for (const auto &c : m.cases) {
        if (!c.is_exception) continue;
        auto f = std::make_shared<Frame>(Frame{env, {}});
        if (matches(c.pat, r.exn, env, f->fields)) return expr(*c.body, f);
      }
      throw;
    }
    for (const auto &c : m.cases) {
      if (c.is_exception) continue;
      auto f = std::make_shared<Frame>(Frame{env, {}});
      if (matches(c.pat, v, env, f->fields)) return expr(*c.body, f);
    }
    raise_builtin("Match_failure", std::nullopt, span);
  }

  static bool equal(const ValuePtr &a, const ValuePtr &b) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const VInt &x) { return x.v == std::get<VInt>(b->node).v; },
            [&](const VBool &x) { return x.v == std::get<VBool>(b->node).v; },
            [&](const VString &x) { return x.v == std::get<VString>(b->node).v; },
            [&](const VUnit &) { return true; },
            [&](const VConstr &x) {
              const auto &y = std::get<VConstr>(b->node);
              if (x.name != y.name || x.arg.has_value() != y.arg.has_value()) return false;
              return !x.arg || equal(*x.arg, *y.arg);
            },
            [&](const VTuple &x) {
              const auto &y = std::get<VTuple>(b->node);
              for (std::size_t i = 0; i < x.elems.size(); ++i)
                if (!equal(x.elems[i], y.elems[i])) return false;
              return true;
            },
            [&](const VRef &x) { return x.cell == std::get<VRef>(b->node).cell; },
            [&](const VExn &x) { return x.tag.id == std::get<VExn>(b->node).tag.id; },
            [&](const auto &) -> bool { throw std::logic_error("compare: functional value"); },
        },
        a->node);
  }

  bool matches(const Pattern &p, const ValuePtr &v, const EnvPtr &env, StructFields &bound) {
    return std::visit(
        overloaded{
            [&](const PWild &) { return true; },
            [&](const PVar &x) {
              bound.values[x.name] = v;
              return true;
            },
            [&](const PLit &l) { return equal(literal(l.value), v); },
            [&](const PConstr &c) {
              std::optional<CtorBinding> b = find_ctor(env, c.ctor);
              std::optional<ValuePtr> arg;
              if (b && b->exn) {
                const auto *e = std::get_if<VExn>(&v->node);
                if (!e || e->tag.id != b->exn->id) return false;
                arg = e->arg;
              } else {
                const auto *k = std::get_if<VConstr>(&v->node);
                if (!k || k->name != c.ctor.name) return false;
                arg = k->arg;
              }
              if (!c.arg) return true;
              return arg && matches(**c.arg, *arg, env, bound);
            },
            [&](const PTuple &t) {
              const auto &elems = std::get<VTuple>(v->node).elems;
              for (std::size_t i = 0; i < t.elems.size(); ++i)
                if (!matches(t.elems[i], elems[i], env, bound)) return false;
              return true;
            },
            [&](const PAnnot &a) { return matches(*a.pat, v, env, bound); },
        },
        p.node);
  }

  ValuePtr apply(const ValuePtr &fn, const ValuePtr &arg, const SourceSpan &span) {
    if (const auto *c = std::get_if<VClosure>(&fn->node)) {
      auto f = std::make_shared<Frame>(Frame{c->env, {}});
      if (!matches(*c->params.front(), arg, c->env, f->fields)) raise_builtin("Match_failure", std::nullopt, span);
      if (c->params.size() > 1)
        return mk(Value{VClosure{f, {c->params.begin() + 1, c->params.end()}, c->body}});
      return expr(*c->body, f);
    }
    const auto &b = std::get<VBuiltin>(fn->node);
    std::vector<ValuePtr> args = b.args;
    args.push_back(arg);
    int arity = 1;
    for (const auto &[n, a] : kBuiltins)
      if (n == b.name) arity = a;
    if (static_cast<int>(args.size()) < arity) return mk(Value{VBuiltin{b.name, std::move(args)}});
    return builtin(b.name, args, span);
  }

  static std::int64_t as_int(const ValuePtr &v) { return std::get<VInt>(v->node).v; }

  ValuePtr builtin(const std::string &name, const std::vector<ValuePtr> &a, const SourceSpan &span) {
    if (name == "+") return mk(Value{VInt{as_int(a[0]) + as_int(a[1])}});
    if (name == "-") return mk(Value{VInt{as_int(a[0]) - as_int(a[1])}});
    if (name == "*") return mk(Value{VInt{as_int(a[0]) * as_int(a[1])}});
    if (name == "=") return mk(Value{VBool{equal(a[0], a[1])}});
    if (name == "<") return mk(Value{VBool{as_int(a[0]) < as_int(a[1])}});
    if (name == "not") return mk(Value{VBool{!std::get<VBool>(a[0]->node).v}});
    if (name == "ref") {
      store_.push_back(a[0]);
      return mk(Value{VRef{store_.size() - 1}});
    }
    if (name == "!") return store_.at(std::get<VRef>(a[0]->node).cell);
    if (name == ":=") {
      store_.at(std::get<VRef>(a[0]->node).cell) = a[1];
      return unit_value();
    }
    if (name == "incr" || name == "decr") {
      ValuePtr &cell = store_.at(std::get<VRef>(a[0]->node).cell);
      cell = mk(Value{VInt{as_int(cell) + (name == "incr" ? 1 : -1)}});
      return unit_value();
    }
    if (name == "print") {
      ++effects;
      out_ << std::get<VString>(a[0]->node).v;
      return unit_value();
    }
    if (name == "print_int") {
      ++effects;
      out_ << as_int(a[0]);
      return unit_value();
    }
    if (name == "string_of_int") return mk(Value{VString{std::to_string(as_int(a[0]))}});
    if (name == "failwith") raise_builtin("Failure", a[0], span);
    throw std::logic_error("unknown builtin " + name);
  }
};

} // namespace

UncaughtException::UncaughtException(SourceSpan span, ValuePtr exn)
    : Diagnostic(std::move(span), "Uncaught exception: " + value_to_string(exn)), exn_(std::move(exn)) {}

EvalResult eval_program(const Program &elab, std::ostream &out) {
  Evaluator ev(out);
  EvalResult result;
  result.env = ev.initial_env();
  try {
    result.env = ev.items(elab.items, result.env, result.exports);
  } catch (const Raised &r) {
    result.uncaught = UncaughtException(r.span, r.exn);
  }
  result.effects = ev.effects;
  return result;
}

ValuePtr eval_expr(const Expr &e, std::ostream &out) {
  Evaluator ev(out);
  EnvPtr env = ev.initial_env();
  try {
    return ev.expr(e, env);
  } catch (const Raised &r) {
    throw UncaughtException(r.span, r.exn);
  }
}

std::string value_to_string(const ValuePtr &v) {
  auto with_arg = [](const std::string &name, const std::optional<ValuePtr> &arg) {
    if (!arg) return name;
    std::string a = value_to_string(*arg);
    bool wrap = std::holds_alternative<VConstr>((*arg)->node) && std::get<VConstr>((*arg)->node).arg;
    return name + " " + (wrap ? "(" + a + ")" : a);
  };
  return std::visit(overloaded{
                        [](const VInt &x) { return std::to_string(x.v); },
                        [](const VBool &x) { return std::string(x.v ? "true" : "false"); },
                        [](const VString &x) { return quote(x.v); },
                        [](const VUnit &) { return std::string("()"); },
                        [](const VClosure &) { return std::string("<fun>"); },
                        [](const VBuiltin &) { return std::string("<fun>"); },
                        [&](const VConstr &x) { return with_arg(x.name, x.arg); },
                        [](const VTuple &x) {
                          std::string s = "(";
                          for (std::size_t i = 0; i < x.elems.size(); ++i)
                            s += (i ? ", " : "") + value_to_string(x.elems[i]);
                          return s + ")";
                        },
                        [](const VRef &) { return std::string("<ref>"); },
                        [&](const VExn &x) { return with_arg(x.tag.name, x.arg); },
                    },
                    v->node);
}

} // namespace minimod
