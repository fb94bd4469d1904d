#include "minimod/syntax.hpp"

#include <sstream>

namespace minimod {

namespace {

class Dumper {
public:
  std::ostringstream out;

  void literal(const Literal &l) {
    std::visit(overloaded{
                   [&](std::int64_t v) { out << v; },
                   [&](const std::string &s) { out << '"' << s << '"'; },
                   [&](bool b) { out << (b ? "true" : "false"); },
                   [&](Unit) { out << "()"; },
               },
               l);
  }

  void long_ident(const LongIdent &id) {
    for (const auto &q : id.qual) out << q << '.';
    out << id.name;
  }

  void mod_path(const ModPathSyntax &p) {
    std::visit(overloaded{
                   [&](const MPName &n) { out << n.name; },
                   [&](const MPDot &d) {
                     mod_path(*d.prefix);
                     out << '.' << d.name;
                   },
                   [&](const MPApply &a) {
                     mod_path(*a.functor);
                     out << '(';
                     mod_path(*a.arg);
                     out << ')';
                   },
               },
               p.node);
  }

  void type(const TypeExpr &t) {
    std::visit(overloaded{
                   [&](const TEVar &v) { out << "'" << v.name; },
                   [&](const TEArrow &a) {
                     out << "(-> ";
                     type(*a.from);
                     out << ' ';
                     type(*a.to);
                     out << ')';
                   },
                   [&](const TETuple &tt) {
                     out << "(*";
                     for (const auto &e : tt.elems) {
                       out << ' ';
                       type(e);
                     }
                     out << ')';
                   },
                   [&](const TEConstr &c) {
                     out << "(tc ";
                     if (c.qual) {
                       mod_path(*c.qual);
                       out << '.';
                     }
                     out << c.name;
                     for (const auto &a : c.args) {
                       out << ' ';
                       type(a);
                     }
                     out << ')';
                   },
               },
               t.node);
  }

  void pattern(const Pattern &p) {
    std::visit(overloaded{
                   [&](const PWild &) { out << '_'; },
                   [&](const PVar &v) { out << v.name; },
                   [&](const PLit &l) { literal(l.value); },
                   [&](const PConstr &c) {
                     out << "(pc ";
                     long_ident(c.ctor);
                     if (c.arg) {
                       out << ' ';
                       pattern(**c.arg);
                     }
                     out << ')';
                   },
                   [&](const PTuple &t) {
                     out << "(ptuple";
                     for (const auto &e : t.elems) {
                       out << ' ';
                       pattern(e);
                     }
                     out << ')';
                   },
                   [&](const PAnnot &a) {
                     out << "(pannot ";
                     pattern(*a.pat);
                     out << ' ';
                     type(a.type);
                     out << ')';
                   },
               },
               p.node);
  }

  void binding(const Binding &b) {
    out << "(bind ";
    pattern(b.pat);
    for (const auto &p : b.params) {
      out << ' ';
      pattern(p);
    }
    out << " = ";
    expr(*b.body);
    out << ')';
  }

  void cases(const std::vector<Case> &cs) {
    for (const auto &c : cs) {
      out << (c.is_exception ? " (exncase " : " (case ");
      pattern(c.pat);
      out << ' ';
      expr(*c.body);
      out << ')';
    }
  }

  void expr(const Expr &e) {
    std::visit(overloaded{
                   [&](const ELit &l) { literal(l.value); },
                   [&](const EVar &v) { long_ident(v.id); },
                   [&](const EConstr &c) {
                     out << "(constr ";
                     long_ident(c.ctor);
                     if (c.arg) {
                       out << ' ';
                       expr(**c.arg);
                     }
                     out << ')';
                   },
                   [&](const EFun &f) {
                     out << "(fun ";
                     pattern(f.param);
                     out << ' ';
                     expr(*f.body);
                     out << ')';
                   },
                   [&](const EApply &a) {
                     out << "(app ";
                     expr(*a.fn);
                     out << ' ';
                     expr(*a.arg);
                     out << ')';
                   },
                   [&](const ETuple &t) {
                     out << "(tuple";
                     for (const auto &x : t.elems) {
                       out << ' ';
                       expr(x);
                     }
                     out << ')';
                   },
                   [&](const ELet &l) {
                     out << (l.rec ? "(letrec" : "(let");
                     for (const auto &b : l.bindings) {
                       out << ' ';
                       binding(b);
                     }
                     out << " in ";
                     expr(*l.body);
                     out << ')';
                   },
                   [&](const EMatch &m) {
                     out << "(match ";
                     expr(*m.scrutinee);
                     cases(m.cases);
                     out << ')';
                   },
                   [&](const ETry &t) {
                     out << "(try ";
                     expr(*t.body);
                     cases(t.cases);
                     out << ')';
                   },
                   [&](const ERaise &r) {
                     out << "(raise ";
                     expr(*r.arg);
                     out << ')';
                   },
                   [&](const EAssert &a) {
                     out << "(assert ";
                     expr(*a.arg);
                     out << ')';
                   },
                   [&](const ESeq &s) {
                     out << "(seq ";
                     expr(*s.first);
                     out << ' ';
                     expr(*s.second);
                     out << ')';
                   },
                   [&](const EIf &i) {
                     out << "(if ";
                     expr(*i.cond);
                     out << ' ';
                     expr(*i.then_branch);
                     if (i.else_branch) {
                       out << ' ';
                       expr(**i.else_branch);
                     }
                     out << ')';
                   },
                   [&](const ELetModule &m) {
                     out << "(letmodule " << m.name << ' ';
                     module(*m.module);
                     out << ' ';
                     expr(*m.body);
                     out << ')';
                   },
                   [&](const ELetException &x) {
                     out << "(letexn " << x.name;
                     if (x.arg) {
                       out << ' ';
                       type(*x.arg);
                     }
                     out << ' ';
                     expr(*x.body);
                     out << ')';
                   },
                   [&](const ELetOpen &o) {
                     out << "(letopen ";
                     module(*o.module);
                     out << ' ';
                     expr(*o.body);
                     out << ')';
                   },
               },
               e.node);
  }

  void typedefs(const std::vector<TypeDefSyntax> &defs) {
    for (const auto &d : defs) {
      out << " (def";
      for (const auto &p : d.params) out << " '" << p;
      out << ' ' << d.name;
      if (d.manifest) {
        out << " = ";
        type(*d.manifest);
      }
      if (d.constructors) {
        out << " =";
        for (const auto &c : *d.constructors) {
          out << " (" << c.name;
          for (const auto &a : c.args) {
            out << ' ';
            type(a);
          }
          out << ')';
        }
      }
      out << ')';
    }
  }

  void module(const ModExpr &m) {
    std::visit(overloaded{
                   [&](const MEPath &p) { mod_path(p.path); },
                   [&](const MEStruct &s) {
                     out << "(struct";
                     items(s.items);
                     out << ')';
                   },
                   [&](const MEFunctor &f) {
                     out << "(functor " << f.param << ' ';
                     module_type(*f.param_type);
                     out << ' ';
                     module(*f.body);
                     out << ')';
                   },
                   [&](const MEApply &a) {
                     out << "(mapp ";
                     module(*a.functor);
                     out << ' ';
                     module(*a.arg);
                     out << ')';
                   },
                   [&](const MEAscribe &a) {
                     out << "(ascribe ";
                     module(*a.module);
                     out << ' ';
                     module_type(*a.type);
                     out << ')';
                   },
               },
               m.node);
  }

  void module_type(const ModTypeExpr &t) {
    std::visit(overloaded{
                   [&](const MTName &n) {
                     if (n.qual) {
                       mod_path(*n.qual);
                       out << '.';
                     }
                     out << n.name;
                   },
                   [&](const MTSig &s) {
                     out << "(sig";
                     sig_items(s.items);
                     out << ')';
                   },
                   [&](const MTFunctor &f) {
                     out << "(functor-type " << f.param << ' ';
                     module_type(*f.param_type);
                     out << ' ';
                     module_type(*f.result);
                     out << ')';
                   },
                   [&](const MTWith &w) {
                     out << "(with ";
                     module_type(*w.base);
                     for (const auto &p : w.params) out << " '" << p;
                     out << ' ' << w.type_name << (w.mode == WithMode::Equal ? " = " : " := ");
                     type(w.rhs);
                     out << ')';
                   },
               },
               t.node);
  }

  void items(const std::vector<StructItem> &xs) {
    for (const auto &i : xs) {
      out << ' ';
      item(i);
    }
  }

  void item(const StructItem &i) {
    std::visit(overloaded{
                   [&](const SILet &l) {
                     out << (l.rec ? "(item-letrec" : "(item-let");
                     for (const auto &b : l.bindings) {
                       out << ' ';
                       binding(b);
                     }
                     out << ')';
                   },
                   [&](const SITypes &t) {
                     out << (t.nonrec ? "(types-nonrec" : "(types");
                     typedefs(t.defs);
                     out << ')';
                   },
                   [&](const SIModule &m) {
                     out << "(module " << m.name;
                     for (const auto &p : m.params) {
                       out << " (param " << p.name << ' ';
                       module_type(p.type);
                       out << ')';
                     }
                     if (m.annot) {
                       out << " : ";
                       module_type(*m.annot);
                     }
                     out << ' ';
                     module(m.body);
                     out << ')';
                   },
                   [&](const SIModType &m) {
                     out << "(module-type " << m.name << ' ';
                     module_type(m.type);
                     out << ')';
                   },
                   [&](const SIException &x) {
                     out << "(exception " << x.name;
                     if (x.arg) {
                       out << ' ';
                       type(*x.arg);
                     }
                     out << ')';
                   },
                   [&](const SIOpen &o) {
                     out << "(open ";
                     module(o.module);
                     out << ')';
                   },
                   [&](const SIInclude &o) {
                     out << "(include ";
                     module(o.module);
                     out << ')';
                   },
                   [&](const SILocal &l) {
                     out << "(local (";
                     items(l.hidden);
                     out << ") (";
                     items(l.body);
                     out << "))";
                   },
                   [&](const SIPrivate &p) {
                     out << "(private ";
                     item(*p.item);
                     out << ')';
                   },
                   [&](const SIExpr &e) {
                     out << "(expr ";
                     expr(e.expr);
                     out << ')';
                   },
               },
               i.node);
  }

  void sig_items(const std::vector<SigItemSurface> &xs) {
    for (const auto &i : xs) {
      out << ' ';
      sig_item(i);
    }
  }

  void sig_item(const SigItemSurface &i) {
    std::visit(overloaded{
                   [&](const SgVal &v) {
                     out << "(val " << v.name << ' ';
                     type(v.type);
                     out << ')';
                   },
                   [&](const SgTypes &t) {
                     out << (t.nonrec ? "(types-nonrec" : "(types");
                     typedefs(t.defs);
                     out << ')';
                   },
                   [&](const SgTypeSubst &t) {
                     out << "(type-subst";
                     for (const auto &p : t.params) out << " '" << p;
                     out << ' ' << t.name << ' ';
                     type(t.rhs);
                     out << ')';
                   },
                   [&](const SgModule &m) {
                     out << "(module " << m.name << ' ';
                     module_type(m.type);
                     out << ')';
                   },
                   [&](const SgModType &m) {
                     out << "(module-type " << m.name;
                     if (m.type) {
                       out << ' ';
                       module_type(*m.type);
                     }
                     out << ')';
                   },
                   [&](const SgException &x) {
                     out << "(exception " << x.name;
                     if (x.arg) {
                       out << ' ';
                       type(*x.arg);
                     }
                     out << ')';
                   },
                   [&](const SgOpen &o) {
                     out << "(open ";
                     module(o.module);
                     out << ')';
                   },
                   [&](const SgInclude &o) {
                     out << "(include ";
                     module_type(o.type);
                     out << ')';
                   },
                   [&](const SgLocal &l) {
                     out << "(local (";
                     sig_items(l.hidden);
                     out << ") (";
                     sig_items(l.body);
                     out << "))";
                   },
               },
               i.node);
  }
};

} // namespace

std::string to_sexp(const Program &p) {
  Dumper d;
  d.out << "(program";
  d.items(p.items);
  d.out << ')';
  return d.out.str();
}

std::string to_sexp(const std::vector<SigItemSurface> &items) {
  Dumper d;
  d.out << "(signature";
  d.sig_items(items);
  d.out << ')';
  return d.out.str();
}

} // namespace minimod
