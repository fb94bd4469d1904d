#pragma once

// Shared state of one type-checking run: core expressions and modules are
// checked by the same object so that let-levels line up across
// `let module` / `let open` boundaries.

#include "minimod/core_typing.hpp"
#include "minimod/mod_typing.hpp"
#include "minimod/syntax.hpp"

#include <map>

namespace minimod {

using TypeVarMap = std::map<std::string, TypePtr>;

struct PatBinding {
  std::string name;
  TypePtr type;
  SourceSpan span;
};

class Typer {
public:
  explicit Typer(Session &s) : session_(s), state_(s) {}

  Session &session() { return session_; }
  InferState &state() { return state_; }

  // core_typing.cpp
  TypePtr infer(Env &env, const Expr &e);
  TypePtr translate_type(const Env &env, const TypeExpr &t, TypeVarMap &vars, bool allow_new);
  PathPtr module_path(const Env &env, const ModPathSyntax &p, const SourceSpan &span);
  PathPtr type_path(const Env &env, const TEConstr &c, const SourceSpan &span);
  void unify_at(const Env &env, const TypePtr &expected, const TypePtr &actual,
                const SourceSpan &span);
  /// Types `let` bindings and returns the bound names with their schemes.
  std::vector<std::pair<PatBinding, Scheme>> let_bindings(Env &env, bool rec,
                                                          const std::vector<Binding> &bs);
  void reset_annotation_vars() { annot_vars_.clear(); }

  // mod_typing.cpp
  ModuleResult module_expr(Env &env, const ModExpr &m);
  ModTypePtr modtype(Env &env, const ModTypeExpr &m);
  StructureResult structure(Env env, const std::vector<StructItem> &items);
  Signature signature(Env env, const std::vector<SigItemSurface> &items);
  OpenResult open(Env env, const ModExpr &m);

private:
  Session &session_;
  InferState state_;
  TypeVarMap annot_vars_;
  int next_group_ = 1;

  TypePtr infer_node(Env &env, const Expr &e);
  TypePtr infer_apply(Env &env, const Expr &e, const EApply &a);
  TypePtr infer_constr(Env &env, const Expr &e, const EConstr &c);
  TypePtr infer_cases(Env &env, const TypePtr &scrutinee, const std::vector<Case> &cases,
                      bool all_exceptions);
  ConstructorDesc constructor(const Env &env, const LongIdent &id, const SourceSpan &span);
  void pattern(Env &env, const Pattern &p, const TypePtr &expected, std::vector<PatBinding> &out);
  TypePtr literal_type(const Env &env, const Literal &l);
  TypePtr eliminate_local(Env &env, const Ident &hidden, const TypePtr &t, const SourceSpan &site,
                          const SourceSpan &body, const std::string &context);

  std::vector<SigItem> type_defs(Env &env, bool nonrec, const std::vector<TypeDefSyntax> &defs);
  void check_cycles(const Env &env, const std::vector<Ident> &ids, const std::vector<TypeDefSyntax> &defs);
  ModuleResult apply(Env &env, const ModExpr &m, const MEApply &a);
  ModTypePtr with_constraint(Env &env, const ModTypeExpr &m, const MTWith &w);
  Signature open_signature_items(Env &env, const ModTypePtr &mty, const SourceSpan &span);
  StructureResult structure_from(Env env, const std::vector<StructItem> &items, std::size_t start);
  Signature signature_from(Env env, const std::vector<SigItemSurface> &items, std::size_t start);
};

} // namespace minimod
