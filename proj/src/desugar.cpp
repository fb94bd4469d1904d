#include "minimod/desugar.hpp"

#include <functional>
#include <regex>
#include <sstream>

namespace minimod {

namespace {

std::string operator_ref(const std::string &op) {
  if (op.front() == '*' || op.back() == '*') return "( " + op + " )";
  return "(" + op + ")";
}

using LevelFn = std::function<std::vector<StructItem>(std::vector<StructItem>)>;

void walk_expr(Expr &e, const LevelFn &fn);
void walk_module(ModExpr &m, const LevelFn &fn);
std::vector<StructItem> walk_items(std::vector<StructItem> items, const LevelFn &fn);

void walk_item(StructItem &item, const LevelFn &fn) {
  std::visit(overloaded{
                 [&](SILet &l) {
                   for (auto &b : l.bindings) walk_expr(*b.body, fn);
                 },
                 [&](SITypes &) {},
                 [&](SIModule &m) { walk_module(m.body, fn); },
                 [&](SIModType &) {},
                 [&](SIException &) {},
                 [&](SIOpen &o) { walk_module(o.module, fn); },
                 [&](SIInclude &i) { walk_module(i.module, fn); },
                 [&](SILocal &l) {
                   l.hidden = walk_items(std::move(l.hidden), fn);
                   l.body = walk_items(std::move(l.body), fn);
                 },
                 [&](SIPrivate &p) { walk_item(*p.item, fn); },
                 [&](SIExpr &x) { walk_expr(x.expr, fn); },
             },
             item.node);
}

std::vector<StructItem> walk_items(std::vector<StructItem> items, const LevelFn &fn) {
  items = fn(std::move(items));
  for (auto &item : items) walk_item(item, fn);
  return items;
}

void walk_module(ModExpr &m, const LevelFn &fn) {
  std::visit(overloaded{
                 [&](MEPath &) {},
                 [&](MEStruct &s) { s.items = walk_items(std::move(s.items), fn); },
                 [&](MEFunctor &f) { walk_module(*f.body, fn); },
                 [&](MEApply &a) {
                   walk_module(*a.functor, fn);
                   walk_module(*a.arg, fn);
                 },
                 [&](MEAscribe &a) { walk_module(*a.module, fn); },
             },
             m.node);
}

void walk_cases(std::vector<Case> &cs, const LevelFn &fn) {
  for (auto &c : cs) walk_expr(*c.body, fn);
}

void walk_expr(Expr &e, const LevelFn &fn) {
  std::visit(overloaded{
                 [&](ELit &) {},
                 [&](EVar &) {},
                 [&](EConstr &c) {
                   if (c.arg) walk_expr(**c.arg, fn);
                 },
                 [&](EFun &f) { walk_expr(*f.body, fn); },
                 [&](EApply &a) {
                   walk_expr(*a.fn, fn);
                   walk_expr(*a.arg, fn);
                 },
                 [&](ETuple &t) {
                   for (auto &x : t.elems) walk_expr(x, fn);
                 },
                 [&](ELet &l) {
                   for (auto &b : l.bindings) walk_expr(*b.body, fn);
                   walk_expr(*l.body, fn);
                 },
                 [&](EMatch &m) {
                   walk_expr(*m.scrutinee, fn);
                   walk_cases(m.cases, fn);
                 },
                 [&](ETry &t) {
                   walk_expr(*t.body, fn);
                   walk_cases(t.cases, fn);
                 },
                 [&](ERaise &r) { walk_expr(*r.arg, fn); },
                 [&](EAssert &a) { walk_expr(*a.arg, fn); },
                 [&](ESeq &s) {
                   walk_expr(*s.first, fn);
                   walk_expr(*s.second, fn);
                 },
                 [&](EIf &i) {
                   walk_expr(*i.cond, fn);
                   walk_expr(*i.then_branch, fn);
                   if (i.else_branch) walk_expr(**i.else_branch, fn);
                 },
                 [&](ELetModule &m) {
                   walk_module(*m.module, fn);
                   walk_expr(*m.body, fn);
                 },
                 [&](ELetException &x) { walk_expr(*x.body, fn); },
                 [&](ELetOpen &o) {
                   walk_module(*o.module, fn);
                   walk_expr(*o.body, fn);
                 },
             },
             e.node);
}

ModExpr struct_of(SourceSpan span, std::vector<StructItem> items) {
  return ModExpr{std::move(span), MEStruct{std::move(items)}};
}

class FreshModules {
public:
  explicit FreshModules(NameSet taken) : taken_(std::move(taken)) {}
  std::string next() {
    for (;;) {
      std::string n = "M" + std::to_string(counter_++);
      if (taken_.insert(n).second) return n;
    }
  }

private:
  NameSet taken_;
  int counter_ = 0;
};

bool is_path(const ModExpr &m) { return std::holds_alternative<MEPath>(m.node); }

/// Finds the first `open` of a non-path module at or after `start`;
/// returns items.size() if none.
std::size_t first_extended_open(const std::vector<StructItem> &items, std::size_t start) {
  for (std::size_t i = start; i < items.size(); ++i)
    if (const auto *o = std::get_if<SIOpen>(&items[i].node); o && !is_path(o->module)) return i;
  return items.size();
}

std::vector<StructItem> eliminate_opens(const std::vector<StructItem> &items, bool via_local) {
  FreshModules fresh(approx_module_names(items));
  LevelFn level = [&](std::vector<StructItem> in) {
    std::vector<StructItem> out;
    std::size_t start = 0;
    for (;;) {
      std::size_t i = first_extended_open(in, start);
      if (i >= in.size()) {
        for (std::size_t k = start; k < in.size(); ++k) out.push_back(std::move(in[k]));
        return out;
      }
      for (std::size_t k = start; k < i; ++k) out.push_back(std::move(in[k]));
      SourceSpan span = in[i].span;
      std::string name = fresh.next();
      ModExpr m = std::move(std::get<SIOpen>(in[i].node).module);
      StructItem bind{span, SIModule{name, {}, std::nullopt, std::move(m)}};
      StructItem open{span, SIOpen{ModExpr{span, MEPath{ModPathSyntax{MPName{name}}}}}};
      if (via_local) {
        std::vector<StructItem> body;
        body.push_back(std::move(open));
        std::vector<StructItem> rest(std::make_move_iterator(in.begin() + static_cast<std::ptrdiff_t>(i) + 1),
                                     std::make_move_iterator(in.end()));
        std::vector<StructItem> done = level(std::move(rest));
        for (auto &r : done) body.push_back(std::move(r));
        std::vector<StructItem> hidden;
        hidden.push_back(std::move(bind));
        out.push_back(StructItem{span, SILocal{std::move(hidden), std::move(body)}});
        return out;
      }
      out.push_back(StructItem{span, SIPrivate{Box<StructItem>(std::move(bind))}});
      out.push_back(std::move(open));
      start = i + 1;
    }
  };
  return walk_items(items, level);
}

// ---------------------------------------------------------------------------
// Source printer

std::string escape_string(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    case '\\': out += "\\\\"; break;
    case '"': out += "\\\""; break;
    default: out += c;
    }
  }
  return out + "\"";
}

std::string literal(const Literal &l) {
  return std::visit(overloaded{
                        [](std::int64_t v) { return std::to_string(v); },
                        [](const std::string &s) { return escape_string(s); },
                        [](bool b) { return std::string(b ? "true" : "false"); },
                        [](Unit) { return std::string("()"); },
                    },
                    l);
}

std::string long_ident(const LongIdent &id) {
  std::string s;
  for (const auto &q : id.qual) s += q + ".";
  return s + id.name;
}

std::string mod_path(const ModPathSyntax &p) {
  return std::visit(overloaded{
                        [](const MPName &n) { return n.name; },
                        [](const MPDot &d) { return mod_path(*d.prefix) + "." + d.name; },
                        [](const MPApply &a) { return mod_path(*a.functor) + "(" + mod_path(*a.arg) + ")"; },
                    },
                    p.node);
}

std::string type_expr(const TypeExpr &t, int prec = 0) {
  return std::visit(overloaded{
                        [](const TEVar &v) { return "'" + v.name; },
                        [&](const TEArrow &a) {
                          std::string s = type_expr(*a.from, 1) + " -> " + type_expr(*a.to, 0);
                          return prec > 0 ? "(" + s + ")" : s;
                        },
                        [&](const TETuple &tu) {
                          std::string s;
                          for (std::size_t i = 0; i < tu.elems.size(); ++i)
                            s += (i ? " * " : "") + type_expr(tu.elems[i], 2);
                          return prec > 1 ? "(" + s + ")" : s;
                        },
                        [](const TEConstr &c) {
                          std::string head = (c.qual ? mod_path(*c.qual) + "." : "") + c.name;
                          if (c.args.empty()) return head;
                          if (c.args.size() == 1) return type_expr(c.args[0], 2) + " " + head;
                          std::string s = "(";
                          for (std::size_t i = 0; i < c.args.size(); ++i)
                            s += (i ? ", " : "") + type_expr(c.args[i], 0);
                          return s + ") " + head;
                        },
                    },
                    t.node);
}

std::string type_params(const std::vector<std::string> &ps) {
  if (ps.empty()) return "";
  if (ps.size() == 1) return "'" + ps[0] + " ";
  std::string s = "(";
  for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? ", '" : "'") + ps[i];
  return s + ") ";
}

std::string type_def(const TypeDefSyntax &d) {
  std::string s = type_params(d.params) + d.name;
  if (d.manifest) s += " = " + type_expr(*d.manifest);
  if (d.constructors) {
    s += " =";
    for (std::size_t i = 0; i < d.constructors->size(); ++i) {
      const auto &c = (*d.constructors)[i];
      s += (i ? " | " : " ") + c.name;
      if (!c.args.empty()) {
        s += " of ";
        for (std::size_t k = 0; k < c.args.size(); ++k) s += (k ? " * " : "") + type_expr(c.args[k], 2);
      }
    }
  }
  return s;
}

std::string pattern(const Pattern &p) {
  return std::visit(overloaded{
                        [](const PWild &) { return std::string("_"); },
                        [](const PVar &v) { return is_operator_name(v.name) ? operator_ref(v.name) : v.name; },
                        [](const PLit &l) { return literal(l.value); },
                        [](const PConstr &c) {
                          if (!c.arg) return long_ident(c.ctor);
                          return "(" + long_ident(c.ctor) + " " + pattern(**c.arg) + ")";
                        },
                        [](const PTuple &t) {
                          std::string s = "(";
                          for (std::size_t i = 0; i < t.elems.size(); ++i) s += (i ? ", " : "") + pattern(t.elems[i]);
                          return s + ")";
                        },
                        [](const PAnnot &a) { return "(" + pattern(*a.pat) + " : " + type_expr(a.type) + ")"; },
                    },
                    p.node);
}

class SourcePrinter {
public:
  std::string items(const std::vector<StructItem> &items, int indent) {
    std::string out;
    for (const auto &i : items) out += pad(indent) + item(i, indent) + "\n";
    return out;
  }

  std::string expr(const Expr &e, int indent) {
    return std::visit(
        overloaded{
            [](const ELit &l) { return literal(l.value); },
            [](const EVar &v) {
              if (is_operator_name(v.id.name)) return operator_ref(v.id.name);
              return long_ident(v.id);
            },
            [&](const EConstr &c) {
              if (!c.arg) return long_ident(c.ctor);
              return "(" + long_ident(c.ctor) + " " + expr(**c.arg, indent) + ")";
            },
            [&](const EFun &f) { return "(fun " + pattern(f.param) + " -> " + expr(*f.body, indent) + ")"; },
            [&](const EApply &a) { return "(" + expr(*a.fn, indent) + " " + expr(*a.arg, indent) + ")"; },
            [&](const ETuple &t) {
              std::string s = "(";
              for (std::size_t i = 0; i < t.elems.size(); ++i) s += (i ? ", " : "") + expr(t.elems[i], indent);
              return s + ")";
            },
            [&](const ELet &l) {
              return "(let " + bindings(l.rec, l.bindings, indent) + " in " + expr(*l.body, indent) + ")";
            },
            [&](const EMatch &m) {
              return "(match " + expr(*m.scrutinee, indent) + " with" + cases(m.cases, indent) + ")";
            },
            [&](const ETry &t) { return "(try " + expr(*t.body, indent) + " with" + cases(t.cases, indent) + ")"; },
            [&](const ERaise &r) { return "(raise " + expr(*r.arg, indent) + ")"; },
            [&](const EAssert &a) { return "(assert " + expr(*a.arg, indent) + ")"; },
            [&](const ESeq &s) { return "(" + expr(*s.first, indent) + "; " + expr(*s.second, indent) + ")"; },
            [&](const EIf &i) {
              std::string s = "(if " + expr(*i.cond, indent) + " then " + expr(*i.then_branch, indent);
              if (i.else_branch) s += " else " + expr(**i.else_branch, indent);
              return s + ")";
            },
            [&](const ELetModule &m) {
              return "(let module " + m.name + " = " + module(*m.module, indent) + " in " + expr(*m.body, indent) +
                     ")";
            },
            [&](const ELetException &x) {
              std::string s = "(let exception " + x.name;
              if (x.arg) s += " of " + type_expr(*x.arg);
              return s + " in " + expr(*x.body, indent) + ")";
            },
            [&](const ELetOpen &o) {
              return "(let open " + module(*o.module, indent) + " in " + expr(*o.body, indent) + ")";
            },
        },
        e.node);
  }

  std::string module(const ModExpr &m, int indent) {
    return std::visit(overloaded{
                          [](const MEPath &p) { return mod_path(p.path); },
                          [&](const MEStruct &s) {
                            if (s.items.empty()) return std::string("struct end");
                            std::vector<std::string> parts;
                            bool flat = true;
                            for (std::size_t i = 0; i < s.items.size(); ++i) {
                              parts.push_back(item(s.items[i], indent + 2));
                              // An expression item would be read as an argument of the previous one.
                              if (i > 0 && std::holds_alternative<SIExpr>(s.items[i].node)) flat = false;
                            }
                            if (flat)
                              if (std::string one = one_line("struct", parts); !one.empty()) return one;
                            return "struct\n" + items(s.items, indent + 2) + pad(indent) + "end";
                          },
                          [&](const MEFunctor &f) {
                            return "functor (" + f.param + " : " + modtype(*f.param_type, indent) + ") -> " +
                                   module(*f.body, indent);
                          },
                          [&](const MEApply &a) {
                            std::string fn = module(*a.functor, indent);
                            if (std::holds_alternative<MEFunctor>(a.functor->node)) fn = "(" + fn + ")";
                            return fn + "(" + module(*a.arg, indent) + ")";
                          },
                          [&](const MEAscribe &a) {
                            return "(" + module(*a.module, indent) + " : " + modtype(*a.type, indent) + ")";
                          },
                      },
                      m.node);
  }

  std::string modtype(const ModTypeExpr &t, int indent) {
    return std::visit(overloaded{
                          [](const MTName &n) { return (n.qual ? mod_path(*n.qual) + "." : "") + n.name; },
                          [&](const MTSig &s) {
                            if (s.items.empty()) return std::string("sig end");
                            std::vector<std::string> parts;
                            for (const auto &i : s.items) parts.push_back(sig_item(i, indent + 2));
                            if (std::string one = one_line("sig", parts); !one.empty()) return one;
                            return "sig\n" + sig_items(s.items, indent + 2) + pad(indent) + "end";
                          },
                          [&](const MTFunctor &f) {
                            return "functor (" + f.param + " : " + modtype(*f.param_type, indent) + ") -> " +
                                   modtype(*f.result, indent);
                          },
                          [&](const MTWith &w) {
                            std::string base = modtype(*w.base, indent);
                            if (std::holds_alternative<MTFunctor>(w.base->node)) base = "(" + base + ")";
                            return base + " with type " + type_params(w.params) + w.type_name +
                                   (w.mode == WithMode::Equal ? " = " : " := ") + type_expr(w.rhs);
                          },
                      },
                      t.node);
  }

  std::string sig_items(const std::vector<SigItemSurface> &items, int indent) {
    std::string out;
    for (const auto &i : items) out += pad(indent) + sig_item(i, indent) + "\n";
    return out;
  }

private:
  static constexpr std::size_t kFlatWidth = 60;

  static std::string pad(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

  /// `open ... end` on one line, or "" when it would not fit.
  static std::string one_line(const std::string &open, const std::vector<std::string> &parts) {
    std::string s = open;
    for (const auto &p : parts) {
      if (p.find('\n') != std::string::npos) return "";
      s += " " + p;
    }
    s += " end";
    return s.size() <= kFlatWidth ? s : "";
  }

  std::string binding(const Binding &b, int indent) {
    std::string s = pattern(b.pat);
    for (const auto &p : b.params) s += " " + pattern(p);
    return s + " = " + expr(*b.body, indent);
  }

  std::string bindings(bool rec, const std::vector<Binding> &bs, int indent) {
    std::string s = rec ? "rec " : "";
    for (std::size_t i = 0; i < bs.size(); ++i) s += (i ? " and " : "") + binding(bs[i], indent);
    return s;
  }

  std::string cases(const std::vector<Case> &cs, int indent) {
    std::string s;
    for (const auto &c : cs)
      s += std::string(" | ") + (c.is_exception ? "exception " : "") + pattern(c.pat) + " -> " +
           expr(*c.body, indent);
    return s;
  }

  std::string types(bool nonrec, const std::vector<TypeDefSyntax> &defs) {
    std::string s = nonrec ? "type nonrec " : "type ";
    for (std::size_t i = 0; i < defs.size(); ++i) s += (i ? " and " : "") + type_def(defs[i]);
    return s;
  }

  std::string item(const StructItem &it, int indent) {
    return std::visit(
        overloaded{
            [&](const SILet &l) { return "let " + bindings(l.rec, l.bindings, indent); },
            [&](const SITypes &t) { return types(t.nonrec, t.defs); },
            [&](const SIModule &m) {
              std::string s = "module " + m.name;
              for (const auto &p : m.params) s += " (" + p.name + " : " + modtype(p.type, indent) + ")";
              if (m.annot) s += " : " + modtype(*m.annot, indent);
              return s + " = " + module(m.body, indent);
            },
            [&](const SIModType &m) { return "module type " + m.name + " = " + modtype(m.type, indent); },
            [&](const SIException &e) {
              return "exception " + e.name + (e.arg ? " of " + type_expr(*e.arg) : std::string());
            },
            [&](const SIOpen &o) { return "open " + module(o.module, indent); },
            [&](const SIInclude &i) { return "include " + module(i.module, indent); },
            [&](const SILocal &l) {
              return "local\n" + items(l.hidden, indent + 2) + pad(indent) + "in\n" + items(l.body, indent + 2) +
                     pad(indent) + "end";
            },
            [&](const SIPrivate &p) { return "private " + item(*p.item, indent); },
            [&](const SIExpr &x) { return expr(x.expr, indent); },
        },
        it.node);
  }

  std::string sig_item(const SigItemSurface &it, int indent) {
    return std::visit(
        overloaded{
            [&](const SgVal &v) { return "val " + v.name + " : " + type_expr(v.type); },
            [&](const SgTypes &t) { return types(t.nonrec, t.defs); },
            [&](const SgTypeSubst &t) { return "type " + type_params(t.params) + t.name + " := " + type_expr(t.rhs); },
            [&](const SgModule &m) { return "module " + m.name + " : " + modtype(m.type, indent); },
            [&](const SgModType &m) {
              return "module type " + m.name + (m.type ? " = " + modtype(*m.type, indent) : std::string());
            },
            [&](const SgException &e) {
              return "exception " + e.name + (e.arg ? " of " + type_expr(*e.arg) : std::string());
            },
            [&](const SgOpen &o) { return "open " + module(o.module, indent); },
            [&](const SgInclude &i) { return "include " + modtype(i.type, indent); },
            [&](const SgLocal &l) {
              return "local\n" + sig_items(l.hidden, indent + 2) + pad(indent) + "in\n" +
                     sig_items(l.body, indent + 2) + pad(indent) + "end";
            },
        },
        it.node);
  }
};

} // namespace

std::vector<StructItem> expand_local(const std::vector<StructItem> &items) {
  LevelFn level = [](std::vector<StructItem> in) {
    std::vector<StructItem> out;
    for (auto &item : in) {
      auto *l = std::get_if<SILocal>(&item.node);
      if (!l) {
        out.push_back(std::move(item));
        continue;
      }
      std::vector<StructItem> inner;
      inner.push_back(StructItem{item.span, SIOpen{struct_of(item.span, std::move(l->hidden))}});
      for (auto &b : l->body) inner.push_back(std::move(b));
      out.push_back(StructItem{item.span, SIInclude{struct_of(item.span, std::move(inner))}});
    }
    return out;
  };
  return walk_items(items, level);
}

std::vector<StructItem> expand_private(const std::vector<StructItem> &items) {
  LevelFn level = [](std::vector<StructItem> in) {
    std::vector<StructItem> out;
    for (auto &item : in) {
      auto *p = std::get_if<SIPrivate>(&item.node);
      if (!p) {
        out.push_back(std::move(item));
        continue;
      }
      std::vector<StructItem> inner;
      inner.push_back(std::move(*p->item));
      out.push_back(StructItem{item.span, SIOpen{struct_of(item.span, std::move(inner))}});
    }
    return out;
  };
  return walk_items(items, level);
}

std::vector<StructItem> introduce_local(const std::vector<StructItem> &items) {
  return eliminate_opens(items, true);
}

std::vector<StructItem> introduce_private(const std::vector<StructItem> &items) {
  return eliminate_opens(items, false);
}

NameSet approx_module_names(const std::vector<StructItem> &items) {
  NameSet out;
  std::string text = print_source(items);
  static const std::regex upper("[A-Z][A-Za-z0-9_']*");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), upper); it != std::sregex_iterator(); ++it)
    out.insert(it->str());
  return out;
}

std::string print_source(const Program &p) { return print_source(p.items); }

std::string print_source(const std::vector<StructItem> &items) { return SourcePrinter().items(items, 0); }

std::string print_expr(const Expr &e) { return SourcePrinter().expr(e, 0); }

} // namespace minimod
