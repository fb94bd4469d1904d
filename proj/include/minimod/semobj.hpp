#pragma once

// Semantic objects shared by the type checker, the dependency eliminator and
// the signature printer.

#include "minimod/source.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace minimod {

/// A stamped identifier. Equality is stamp equality; the name is for display.
struct Ident {
  std::string name;
  int stamp = 0;
  /// Elaboration-generated names render as `name#stamp` and cannot be written
  /// in source programs.
  bool hidden = false;

  bool operator==(const Ident &o) const { return stamp == o.stamp; }
  bool operator!=(const Ident &o) const { return stamp != o.stamp; }

  std::string unique_name() const {
    return name + (hidden ? "#" : "/") + std::to_string(stamp);
  }
  std::string display_name() const {
    return hidden ? name + "#" + std::to_string(stamp) : name;
  }
};

/// Owns the stamp and type-variable counters of one compilation session.
class Session {
public:
  Ident fresh_ident(const std::string &name) { return Ident{name, next_stamp_++, false}; }
  Ident fresh_hidden(const std::string &name) { return Ident{name, next_stamp_++, true}; }
  int fresh_var_id() { return next_var_++; }
  int current_stamp() const { return next_stamp_ - 1; }

private:
  int next_stamp_ = 1;
  int next_var_ = 1;
};

// ---------------------------------------------------------------------------
// Paths

struct Path;
using PathPtr = std::shared_ptr<const Path>;

struct Path {
  enum class Kind { Ident, Dot, Apply };
  Kind kind = Kind::Ident;
  Ident id;            // Ident
  PathPtr prefix;      // Dot: module prefix; Apply: functor
  std::string field;   // Dot
  PathPtr arg;         // Apply
};

PathPtr path_ident(const Ident &id);
PathPtr path_dot(PathPtr prefix, const std::string &field);
PathPtr path_apply(PathPtr functor, PathPtr arg);
bool path_equal(const PathPtr &a, const PathPtr &b);
bool path_mentions(const PathPtr &p, const Ident &id);
std::string path_to_string(const PathPtr &p);

// ---------------------------------------------------------------------------
// Core types

struct Type;
using TypePtr = std::shared_ptr<Type>;

struct Type {
  enum class Kind { Var, Arrow, Constr, Tuple };
  Kind kind = Kind::Var;
  // Var
  int var_id = 0;
  int level = 0;
  TypePtr link;
  // Arrow (two args), Constr (type arguments), Tuple (elements)
  std::vector<TypePtr> args;
  PathPtr path; // Constr
};

TypePtr new_var(Session &s, int level);
TypePtr make_arrow(TypePtr from, TypePtr to);
TypePtr make_tuple(std::vector<TypePtr> elems);
TypePtr make_constr(PathPtr path, std::vector<TypePtr> args = {});

/// Variable standing for a declaration or scheme parameter.
TypePtr param_var(int id);
std::vector<TypePtr> param_vars(const std::vector<int> &ids);

/// Follows unification links.
TypePtr repr(TypePtr t);

/// Copies `t` with links resolved; unbound variables are kept as-is.
TypePtr resolve(const TypePtr &t);

/// Replaces variables with the given ids (decl/scheme parameters) by `args`.
TypePtr replace_vars(const TypePtr &t, const std::vector<int> &ids,
                     const std::vector<TypePtr> &args);

bool type_mentions(const TypePtr &t, const Ident &id);

struct Scheme {
  std::vector<int> vars;
  TypePtr body;
};

struct ConstructorDecl {
  std::string name;
  std::vector<TypePtr> args;
};

/// Type declaration: abstract (neither field), alias (manifest), or variant
/// (constructors, optionally re-exported through a manifest equation).
struct TypeDecl {
  std::vector<int> params;
  std::optional<TypePtr> manifest;
  std::optional<std::vector<ConstructorDecl>> constructors;

  std::size_t arity() const { return params.size(); }
  bool is_abstract() const { return !manifest && !constructors; }
};

// ---------------------------------------------------------------------------
// Signatures and module types

struct ModType;
using ModTypePtr = std::shared_ptr<const ModType>;

struct SValue {
  Ident id;
  Scheme scheme;
  SourceSpan span;
};
struct SType {
  Ident id;
  TypeDecl decl;
  int group = 0; // items of one `type ... and ...` share a group number
  SourceSpan span;
};
struct SModule {
  Ident id;
  ModTypePtr type;
  SourceSpan span;
};
struct SModType {
  Ident id;
  ModTypePtr type; // null for an abstract module type
  SourceSpan span;
};
struct SExn {
  Ident id;
  std::vector<TypePtr> args;
  SourceSpan span;
};

using SigItem = std::variant<SValue, SType, SModule, SModType, SExn>;
using Signature = std::vector<SigItem>;

enum class Namespace { Value, Type, Module, ModType, Exception };

const Ident &item_ident(const SigItem &item);
/// "value", "type", "module", "module type" or "exception".
const char *namespace_word(Namespace ns);
Namespace item_namespace(const SigItem &item);

struct MSig {
  Signature items;
};
struct MFunctor {
  Ident param;
  ModTypePtr param_type;
  ModTypePtr result;
};
struct MNamed {
  PathPtr path;
};
struct ModType {
  std::variant<MSig, MFunctor, MNamed> node;
};

ModTypePtr make_sig(Signature items);
ModTypePtr make_functor(Ident param, ModTypePtr param_type, ModTypePtr result);
ModTypePtr make_named(PathPtr path);

bool modtype_mentions(const ModTypePtr &m, const Ident &id);
bool signature_mentions(const Signature &s, const Ident &id);

/// Every identifier (bound or referenced) that occurs in a signature.
void collect_idents(const Signature &s, std::vector<Ident> &out);

// ---------------------------------------------------------------------------
// Substitutions

/// Rebases paths rooted at identifiers onto other paths.
class Subst {
public:
  void add(const Ident &from, PathPtr to) { paths_[from.stamp] = std::move(to); }
  bool empty() const { return paths_.empty(); }

  PathPtr path(const PathPtr &p) const;
  TypePtr type(const TypePtr &t) const;
  Scheme scheme(const Scheme &s) const;
  TypeDecl decl(const TypeDecl &d) const;
  SigItem item(const SigItem &i) const;
  Signature signature(const Signature &s) const;
  ModTypePtr modtype(const ModTypePtr &m) const;

private:
  std::map<int, PathPtr> paths_;
};

/// Replaces the type constructor `id` (of arity `params.size()`) by `body`.
struct TypeAbbrevSubst {
  Ident id;
  std::vector<int> params;
  TypePtr body;

  TypePtr type(const TypePtr &t) const;
  Signature signature(const Signature &s) const;
  ModTypePtr modtype(const ModTypePtr &m) const;
};

// ---------------------------------------------------------------------------
// Environment

struct ValueBinding {
  PathPtr path;
  Scheme scheme;
};

struct ConstructorDesc {
  std::string name;
  std::vector<int> params;    // type parameters of the result type
  std::vector<TypePtr> args;
  TypePtr result;             // instance of the declaring type (or exn)
  bool is_exception = false;
  PathPtr exn_path;           // exception identity, for exceptions
};

/// Paths of the builtin types.
struct Predef {
  PathPtr int_t, string_t, bool_t, unit_t, exn_t, ref_t, option_t, result_t;
  PathPtr match_failure, assert_failure, failure;
};

/// Scoped name tables plus stamp-indexed descriptors. Value semantics: copying
/// an Env snapshots the scope.
class Env {
public:
  explicit Env(Session &session) : session_(&session) {}

  Session &session() const { return *session_; }
  const Predef &predef() const { return *predef_; }
  void set_predef(Predef p) { predef_ = std::make_shared<const Predef>(std::move(p)); }

  // Binding by name (the most recent binding of a name wins).
  void add_value(const Ident &id, Scheme scheme);
  void add_type(const Ident &id, TypeDecl decl);
  void add_module(const Ident &id, ModTypePtr type);
  void add_modtype(const Ident &id, ModTypePtr type);
  void add_exception(const Ident &id, std::vector<TypePtr> args);
  void add_item(const SigItem &item);

  /// Stamp-indexed descriptors only, without binding names.
  void register_item(const SigItem &item);

  /// Makes the components of `sig` (the type of the module at `at`)
  /// accessible by name through paths rooted at `at`.
  void open_signature(const PathPtr &at, const Signature &sig);

  // Lookup by name.
  std::optional<ValueBinding> lookup_value(const std::string &name) const;
  std::optional<PathPtr> lookup_type(const std::string &name) const;
  std::optional<PathPtr> lookup_module(const std::string &name) const;
  std::optional<PathPtr> lookup_modtype(const std::string &name) const;
  std::optional<ConstructorDesc> lookup_constructor(const std::string &name) const;

  /// Qualified lookup of a component of the module at `module`.
  std::optional<ValueBinding> lookup_value_in(const PathPtr &module, const std::string &name) const;
  std::optional<ConstructorDesc> lookup_constructor_in(const PathPtr &module,
                                                       const std::string &name) const;

  // Lookup by path.
  std::optional<TypeDecl> find_type(const PathPtr &p) const;
  ModTypePtr find_module(const PathPtr &p) const; // null when unbound
  /// Outer optional: bound or not; inner pointer null for abstract module types.
  std::optional<ModTypePtr> find_modtype(const PathPtr &p) const;

  /// Resolves `MNamed` until a signature or functor is reached; returns the
  /// named type itself when it is abstract.
  ModTypePtr expand_modtype(const ModTypePtr &m) const;

  /// Signature component of the module at `module` whose items have been
  /// rebased onto `module` (earlier siblings become `module.name`).
  std::optional<SigItem> find_component(const PathPtr &module, Namespace ns,
                                        const std::string &name) const;

private:
  Session *session_;
  std::shared_ptr<const Predef> predef_ = std::make_shared<const Predef>();
  std::map<std::string, ValueBinding> values_;
  std::map<std::string, PathPtr> types_;
  std::map<std::string, PathPtr> modules_;
  std::map<std::string, PathPtr> modtypes_;
  std::map<std::string, ConstructorDesc> constructors_;
  std::map<int, TypeDecl> type_decls_;
  std::map<int, ModTypePtr> module_types_;
  std::map<int, ModTypePtr> modtype_defs_;

  void bind_constructors(const PathPtr &type_path, const TypeDecl &decl);
  void register_deep(const ModTypePtr &m);
};

/// Substitution rebasing the items of `sig` onto `at`. Items shadowed later in
/// the same signature are left untouched since `at.name` would denote the
/// shadowing item.
Subst prefix_subst(const Signature &sig, const PathPtr &at);

/// Replaces every signature item's identifier by a fresh one, consistently.
Signature refresh_signature(Session &session, const Signature &sig);

// ---------------------------------------------------------------------------
// Operations

/// Module type of the module at `at` whose declared type is `mty`, with
/// abstract types made equal to their path-qualified names.
ModTypePtr strengthen(const Env &env, const ModTypePtr &mty, const PathPtr &at);

/// Rebases every path rooted at `from` onto `to`.
ModTypePtr subst_module(const ModTypePtr &mty, const Ident &from, const PathPtr &to);

class MatchError : public Diagnostic {
public:
  enum class Reason { Missing, Arity, TypeMismatch, NotGeneralEnough, KindMismatch };
  MatchError(Reason reason, std::string component, const std::string &message)
      : Diagnostic(SourceSpan{}, message), reason_(reason), component_(std::move(component)) {}
  Reason reason() const { return reason_; }
  const std::string &component() const { return component_; }

private:
  Reason reason_;
  std::string component_;
};

/// Succeeds iff `candidate` is a subtype of `target`; throws MatchError naming
/// the first failing component otherwise.
void match_modtype(const Env &env, const ModTypePtr &candidate, const ModTypePtr &target);

/// Builds the initial environment: builtin types, exceptions and values.
Env initial_env(Session &session);

} // namespace minimod
