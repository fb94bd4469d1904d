#include "minimod/printer.hpp"

#include "minimod/box.hpp"
#include "minimod/nondep.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <set>
#include <sstream>

namespace minimod {

std::string TypeNamer::name(int var_id, bool quantified) {
  auto it = names_.find(var_id);
  if (it != names_.end()) return it->second;
  std::string n;
  if (!quantified && weak_) {
    n = "'_weak" + std::to_string(next_weak_++);
  } else {
    int k = next_++;
    n = "'";
    n += static_cast<char>('a' + k % 26);
    if (k >= 26) n += std::to_string(k / 26);
  }
  names_[var_id] = n;
  return n;
}

namespace {

using PathRender = std::function<std::string(const PathPtr &, Namespace)>;

std::string plain_path(const PathPtr &p, Namespace) {
  switch (p->kind) {
  case Path::Kind::Ident: return p->id.display_name();
  case Path::Kind::Dot: return plain_path(p->prefix, Namespace::Module) + "." + p->field;
  case Path::Kind::Apply:
    return plain_path(p->prefix, Namespace::Module) + "(" + plain_path(p->arg, Namespace::Module) + ")";
  }
  return "";
}

std::string type_str(const TypePtr &t0, TypeNamer &names, const std::vector<int> &quantified,
                     const PathRender &render, int prec) {
  TypePtr t = repr(t0);
  switch (t->kind) {
  case Type::Kind::Var: {
    bool q = t->level == INT_MAX ||
             std::find(quantified.begin(), quantified.end(), t->var_id) != quantified.end();
    return names.name(t->var_id, q);
  }
  case Type::Kind::Arrow: {
    std::string s = type_str(t->args[0], names, quantified, render, 1) + " -> " +
                    type_str(t->args[1], names, quantified, render, 0);
    return prec > 0 ? "(" + s + ")" : s;
  }
  case Type::Kind::Tuple: {
    std::string s;
    for (std::size_t i = 0; i < t->args.size(); ++i) {
      if (i) s += " * ";
      s += type_str(t->args[i], names, quantified, render, 2);
    }
    return prec > 1 ? "(" + s + ")" : s;
  }
  case Type::Kind::Constr: {
    std::string head = render(t->path, Namespace::Type);
    if (t->args.empty()) return head;
    if (t->args.size() == 1) return type_str(t->args[0], names, quantified, render, 2) + " " + head;
    std::string s = "(";
    for (std::size_t i = 0; i < t->args.size(); ++i) {
      if (i) s += ", ";
      s += type_str(t->args[i], names, quantified, render, 0);
    }
    return s + ") " + head;
  }
  }
  return "";
}

} // namespace

std::string type_to_string(const TypePtr &t, TypeNamer &names) {
  return type_str(t, names, {}, plain_path, 0);
}

std::string type_to_string(const TypePtr &t) {
  TypeNamer names;
  return type_to_string(t, names);
}

std::string scheme_to_string(const Scheme &s) {
  TypeNamer names(true);
  return type_str(s.body, names, s.vars, plain_path, 0);
}

// ---------------------------------------------------------------------------
// Signatures

namespace {

struct NameKey {
  Namespace ns;
  std::string name;
  bool operator<(const NameKey &o) const {
    return std::tie(ns, name) < std::tie(o.ns, o.name);
  }
};

/// One level of signature nesting while walking.
struct Frame {
  const Signature *items = nullptr;
  std::size_t index = 0;                 // item currently being processed
  std::map<NameKey, Ident> bound;        // names bound so far at this level
  std::map<int, std::size_t> positions;  // stamp -> item index at this level
  std::map<int, std::size_t> arities;    // type stamp -> parameter count
};

struct AliasPoint {
  const Signature *level;
  std::size_t before;
  std::string name;
  Ident target;
  std::size_t arity;
};

bool forward_refs(const std::vector<const SType *> &group) {
  for (std::size_t i = 0; i < group.size(); ++i)
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      const TypeDecl &d = group[i]->decl;
      const Ident &later = group[j]->id;
      bool hit = (d.manifest && type_mentions(*d.manifest, later));
      if (d.constructors)
        for (const auto &c : *d.constructors)
          for (const auto &a : c.args) hit = hit || type_mentions(a, later);
      if (hit) return true;
    }
  return false;
}

class SigPrinter {
public:
  explicit SigPrinter(PrintMode mode) : mode_(mode) {}

  void prepare(const Signature &sig) {
    if (mode_ == PrintMode::Stamps) collect_names(sig);
    if (mode_ == PrintMode::Aliases) {
      collect_all_names(sig);
      collecting_ = true;
      walk_signature(sig, 0);
      collecting_ = false;
      frames_.clear();
    }
  }

  std::string signature(const Signature &sig, int indent) { return walk_signature(sig, indent); }

  std::string modtype(const ModTypePtr &m, int indent, std::size_t prefix_len) {
    return walk_modtype(m, indent, prefix_len);
  }

private:
  PrintMode mode_;
  bool collecting_ = false;
  std::vector<Frame> frames_;
  std::map<NameKey, std::set<int>> uses_;   // Stamps mode
  std::set<std::string> taken_type_names_;  // Aliases mode
  std::map<int, AliasPoint> aliases_;       // target stamp -> alias

  // -- name analysis ---------------------------------------------------------

  void note(Namespace ns, const Ident &id) { uses_[NameKey{ns, id.name}].insert(id.stamp); }

  void note_path(const PathPtr &p, Namespace ns) {
    switch (p->kind) {
    case Path::Kind::Ident: note(ns, p->id); break;
    case Path::Kind::Dot: note_path(p->prefix, Namespace::Module); break;
    case Path::Kind::Apply:
      note_path(p->prefix, Namespace::Module);
      note_path(p->arg, Namespace::Module);
      break;
    }
  }

  void note_type(const TypePtr &t0) {
    TypePtr t = repr(t0);
    if (t->kind == Type::Kind::Constr) note_path(t->path, Namespace::Type);
    for (const auto &a : t->args) note_type(a);
  }

  void note_modtype(const ModTypePtr &m) {
    std::visit(overloaded{
                   [&](const MSig &s) { collect_names(s.items); },
                   [&](const MFunctor &f) {
                     note(Namespace::Module, f.param);
                     note_modtype(f.param_type);
                     note_modtype(f.result);
                   },
                   [&](const MNamed &n) { note_path(n.path, Namespace::ModType); },
               },
               m->node);
  }

  void collect_names(const Signature &sig) {
    for (const auto &item : sig) {
      Namespace ns = item_namespace(item);
      note(ns == Namespace::Exception ? Namespace::Value : ns, item_ident(item));
      std::visit(overloaded{
                     [&](const SValue &v) { note_type(v.scheme.body); },
                     [&](const SType &t) {
                       if (t.decl.manifest) note_type(*t.decl.manifest);
                       if (t.decl.constructors)
                         for (const auto &c : *t.decl.constructors)
                           for (const auto &a : c.args) note_type(a);
                     },
                     [&](const SModule &m) { note_modtype(m.type); },
                     [&](const SModType &m) {
                       if (m.type) note_modtype(m.type);
                     },
                     [&](const SExn &e) {
                       for (const auto &a : e.args) note_type(a);
                     },
                 },
                 item);
    }
  }

  void collect_all_names(const Signature &sig) {
    std::vector<Ident> ids;
    collect_idents(sig, ids);
    for (const auto &id : ids) taken_type_names_.insert(id.name);
  }

  std::string fresh_alias_name(const std::string &base) {
    std::string n = base + "'";
    while (taken_type_names_.count(n)) n += "'";
    taken_type_names_.insert(n);
    return n;
  }

  // -- scope -----------------------------------------------------------------

  void bind(Namespace ns, const Ident &id) {
    Frame &f = frames_.back();
    f.bound[NameKey{ns, id.name}] = id;
    f.positions[id.stamp] = f.index;
  }

  /// Frame depth at which `id` is bound, or -1.
  int binding_depth(const Ident &id) const {
    for (int d = static_cast<int>(frames_.size()) - 1; d >= 0; --d)
      if (frames_[static_cast<std::size_t>(d)].positions.count(id.stamp)) return d;
    return -1;
  }

  std::optional<Ident> resolve(Namespace ns, const std::string &name) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      auto b = it->bound.find(NameKey{ns, name});
      if (b != it->bound.end()) return b->second;
    }
    return std::nullopt;
  }

  bool rebinds(const SigItem &item, Namespace ns, const std::string &name) const {
    if (item_namespace(item) == ns && item_ident(item).name == name) return true;
    return false;
  }

  void need_alias(const Ident &id) {
    int d = binding_depth(id);
    if (d < 0) return;
    const Frame &f = frames_[static_cast<std::size_t>(d)];
    auto ar = f.arities.find(id.stamp);
    std::size_t arity = ar == f.arities.end() ? 0 : ar->second;
    std::size_t pos = f.positions.at(id.stamp);
    std::size_t before = f.index;
    for (std::size_t j = pos + 1; j < f.index; ++j)
      if (rebinds((*f.items)[j], Namespace::Type, id.name)) {
        before = j;
        break;
      }
    auto it = aliases_.find(id.stamp);
    if (it != aliases_.end()) {
      if (it->second.level == f.items && before < it->second.before) it->second.before = before;
      return;
    }
    aliases_[id.stamp] = AliasPoint{f.items, before, fresh_alias_name(id.name), id, arity};
  }

  std::string render_path(const PathPtr &p, Namespace ns) {
    switch (p->kind) {
    case Path::Kind::Ident: {
      const Ident &id = p->id;
      if (id.hidden) throw HiddenIdentPresent("hidden identifier " + id.unique_name() + " in signature");
      if (mode_ == PrintMode::Plain) return id.name;
      if (mode_ == PrintMode::Stamps) {
        auto it = uses_.find(NameKey{ns, id.name});
        return it != uses_.end() && it->second.size() > 1 ? id.unique_name() : id.name;
      }
      auto r = resolve(ns, id.name);
      if (!r || *r == id || binding_depth(id) < 0) return id.name;
      if (ns != Namespace::Type) return id.name;
      if (collecting_) {
        need_alias(id);
        return id.name;
      }
      auto a = aliases_.find(id.stamp);
      return a == aliases_.end() ? id.name : a->second.name;
    }
    case Path::Kind::Dot: return render_path(p->prefix, Namespace::Module) + "." + p->field;
    case Path::Kind::Apply:
      return render_path(p->prefix, Namespace::Module) + "(" + render_path(p->arg, Namespace::Module) + ")";
    }
    return "";
  }

  PathRender renderer() {
    return [this](const PathPtr &p, Namespace ns) { return render_path(p, ns); };
  }

  std::string type(const TypePtr &t, TypeNamer &names, const std::vector<int> &quantified, int prec = 0) {
    return type_str(t, names, quantified, renderer(), prec);
  }

  std::string name_of(const Ident &id, Namespace ns) {
    if (id.hidden) throw HiddenIdentPresent("hidden identifier " + id.unique_name() + " in signature");
    if (mode_ == PrintMode::Stamps) {
      auto it = uses_.find(NameKey{ns, id.name});
      if (it != uses_.end() && it->second.size() > 1) return id.unique_name();
    }
    return id.name;
  }

  // -- printing --------------------------------------------------------------

  static std::string params_str(const std::vector<std::string> &ps) {
    if (ps.empty()) return "";
    if (ps.size() == 1) return ps[0] + " ";
    std::string s = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? ", " : "") + ps[i];
    return s + ") ";
  }

  std::string type_decl(const SType &t, const char *keyword) {
    TypeNamer names(true);
    std::vector<std::string> ps;
    for (int p : t.decl.params) ps.push_back(names.name(p, true));
    std::string s = std::string(keyword) + " " + params_str(ps) + name_of(t.id, Namespace::Type);
    if (t.decl.manifest) s += " = " + type(*t.decl.manifest, names, t.decl.params);
    if (t.decl.constructors) {
      s += " =";
      bool first = true;
      for (const auto &c : *t.decl.constructors) {
        s += first ? " " : " | ";
        first = false;
        s += c.name;
        if (!c.args.empty()) {
          s += " of ";
          for (std::size_t i = 0; i < c.args.size(); ++i) {
            if (i) s += " * ";
            s += type(c.args[i], names, t.decl.params, 2);
          }
        }
      }
    }
    return s;
  }

  std::string alias_line(const AliasPoint &a) {
    TypeNamer names(true);
    std::vector<std::string> ps;
    for (std::size_t i = 0; i < a.arity; ++i) ps.push_back(names.name(-static_cast<int>(i) - 1, true));
    std::string target = render_path(path_ident(a.target), Namespace::Type);
    std::string ps_str = params_str(ps);
    return "type " + ps_str + a.name + " := " + ps_str + target;
  }

  static bool inline_ok(const Signature &sig) {
    for (const auto &item : sig) {
      if (const auto *t = std::get_if<SType>(&item); t && t->decl.constructors) return false;
      if (std::holds_alternative<SModule>(item) || std::holds_alternative<SModType>(item)) return false;
    }
    return true;
  }

  std::vector<std::string> item_lines(const Signature &sig) {
    std::vector<std::string> lines;
    const std::size_t depth = frames_.size() - 1;
    for (std::size_t i = 0; i < sig.size(); ++i) {
      frames_[depth].index = i;
      for (const auto &[stamp, a] : aliases_)
        if (a.level == &sig && a.before == i && !collecting_) lines.push_back(alias_line(a));
      const SigItem &item = sig[i];
      std::visit(
          overloaded{
              [&](const SValue &v) {
                TypeNamer names(true);
                lines.push_back("val " + name_of(v.id, Namespace::Value) + " : " +
                                type(v.scheme.body, names, v.scheme.vars));
                bind(Namespace::Value, v.id);
              },
              [&](const SType &t) {
                std::vector<const SType *> group{&t};
                for (std::size_t j = i + 1; j < sig.size(); ++j) {
                  const auto *n = std::get_if<SType>(&sig[j]);
                  if (!n || n->group != t.group || t.group == 0) break;
                  group.push_back(n);
                }
                if (!forward_refs(group)) group.resize(1);
                for (std::size_t k = 0; k < group.size(); ++k) {
                  frames_[depth].index = i + k;
                  bind(Namespace::Type, group[k]->id);
                  frames_[depth].arities[group[k]->id.stamp] = group[k]->decl.params.size();
                }
                frames_[depth].index = i;
                for (std::size_t k = 0; k < group.size(); ++k)
                  lines.push_back(type_decl(*group[k], k == 0 ? "type" : "and"));
                i += group.size() - 1;
              },
              [&](const SModule &m) {
                std::string head = "module " + name_of(m.id, Namespace::Module) + " : ";
                lines.push_back(head + walk_modtype(m.type, 0, head.size()));
                bind(Namespace::Module, m.id);
              },
              [&](const SModType &m) {
                std::string head = "module type " + name_of(m.id, Namespace::ModType);
                if (m.type) head += " = ";
                lines.push_back(m.type ? head + walk_modtype(m.type, 0, head.size()) : head);
                bind(Namespace::ModType, m.id);
              },
              [&](const SExn &e) {
                TypeNamer names(true);
                std::string s = "exception " + name_of(e.id, Namespace::Value);
                if (!e.args.empty()) {
                  s += " of ";
                  for (std::size_t k = 0; k < e.args.size(); ++k) {
                    if (k) s += " * ";
                    s += type(e.args[k], names, {}, 2);
                  }
                }
                lines.push_back(s);
                bind(Namespace::Value, e.id);
              },
          },
          item);
    }
    return lines;
  }

  std::string walk_signature(const Signature &sig, int indent) {
    frames_.push_back(Frame{&sig, 0, {}, {}, {}});
    std::vector<std::string> lines = item_lines(sig);
    frames_.pop_back();
    std::string out;
    std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto &l : lines) out += pad + indent_nested(l, pad) + "\n";
    return out;
  }

  static std::string indent_nested(const std::string &line, const std::string &pad) {
    std::string out;
    for (char c : line) {
      out += c;
      if (c == '\n') out += pad;
    }
    return out;
  }

  bool has_alias_in(const Signature &sig) const {
    return std::any_of(aliases_.begin(), aliases_.end(),
                       [&](const auto &kv) { return kv.second.level == &sig; });
  }

  /// `prefix_len` is the column at which the module type starts.
  std::string walk_modtype(const ModTypePtr &m, int indent, std::size_t prefix_len) {
    return std::visit(
        overloaded{
            [&](const MSig &s) -> std::string {
              frames_.push_back(Frame{&s.items, 0, {}, {}, {}});
              std::vector<std::string> lines = item_lines(s.items);
              frames_.pop_back();
              if (lines.empty()) return "sig end";
              if (inline_ok(s.items) && !has_alias_in(s.items)) {
                std::string one = "sig";
                for (const auto &l : lines) one += " " + l;
                one += " end";
                if (prefix_len + one.size() <= 80 && one.find('\n') == std::string::npos) return one;
              }
              std::string out = "sig\n";
              std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
              for (const auto &l : lines) out += pad + indent_nested(l, pad) + "\n";
              return out + std::string(static_cast<std::size_t>(indent), ' ') + "end";
            },
            [&](const MFunctor &f) -> std::string {
              std::string head = "functor (" + name_of(f.param, Namespace::Module) + " : ";
              std::string param = walk_modtype(f.param_type, indent, prefix_len + head.size());
              frames_.push_back(Frame{nullptr, 0, {}, {}, {}});
              frames_.back().bound[NameKey{Namespace::Module, f.param.name}] = f.param;
              std::string head2 = head + param + ") -> ";
              std::string res = walk_modtype(f.result, indent, prefix_len + head2.size());
              frames_.pop_back();
              return head2 + res;
            },
            [&](const MNamed &n) { return render_path(n.path, Namespace::ModType); },
        },
        m->node);
  }
};

} // namespace

std::string print_signature(const Signature &sig, PrintMode mode) {
  SigPrinter p(mode);
  p.prepare(sig);
  return p.signature(sig, 0);
}

std::string print_modtype(const ModTypePtr &m, PrintMode mode) {
  SigPrinter p(mode);
  if (const auto *s = std::get_if<MSig>(&m->node)) p.prepare(s->items);
  return p.modtype(m, 0, 0);
}

// ---------------------------------------------------------------------------
// Diagnostics

namespace {

std::string error_word(bool color) { return color ? "\x1b[1mError:\x1b[0m" : "Error:"; }

std::string excerpt(const SourceSpan &span, const std::string &source) {
  std::string line = source_line(source, span.start_line);
  std::string num = std::to_string(span.start_line);
  std::string out = num + " | " + line + "\n";
  int end_col = span.end_line == span.start_line ? span.end_col : static_cast<int>(line.size());
  int width = std::max(1, end_col - span.start_col);
  out += std::string(num.size() + 3 + static_cast<std::size_t>(std::max(0, span.start_col)), ' ') +
         std::string(static_cast<std::size_t>(width), '^') + "\n";
  return out;
}

std::string indent_continuation(const std::string &msg, std::size_t n) {
  std::string out;
  for (char c : msg) {
    out += c;
    if (c == '\n') out += std::string(n, ' ');
  }
  return out;
}

} // namespace

std::string render_diagnostic(const Diagnostic &d, const std::string &source, bool color) {
  std::ostringstream out;
  if (const auto *e = dynamic_cast<const EliminationError *>(&d)) {
    out << excerpt(d.span(), source);
    out << error_word(color) << " " << d.what() << "\n";
    std::string who = e->culprit() ? e->culprit()->unique_name() : e->hidden().unique_name();
    for (const auto &v : e->victims()) {
      out << "       Line " << v.span.start_line << ", characters " << v.span.start_col << "-"
          << (v.span.end_line == v.span.start_line ? v.span.end_col : v.span.start_col + 1) << ":\n";
      if (v.name.empty())
        out << "         This expression has no valid type if " << who << " is hidden\n";
      else
        out << "         The " << namespace_word(v.kind) << " " << v.name << " has no valid type if " << who
            << " is hidden\n";
    }
    return out.str();
  }
  const SourceSpan &s = d.span();
  out << "File \"" << s.file << "\", line " << s.start_line << ", characters " << s.start_col << "-"
      << (s.end_line == s.start_line ? s.end_col : s.start_col + 1) << ":\n";
  if (!source_line(source, s.start_line).empty() || s.start_line == 1) out << excerpt(s, source);
  out << error_word(color) << " " << indent_continuation(d.what(), 7) << "\n";
  return out.str();
}

} // namespace minimod
