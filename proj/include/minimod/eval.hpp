#pragma once

// Tree-walking evaluator over elaborated programs.

#include "minimod/syntax.hpp"

#include <map>
#include <memory>
#include <optional>
#include <ostream>

namespace minimod {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;
struct Frame;
using EnvPtr = std::shared_ptr<const Frame>;
struct ModuleValue;
using ModulePtr = std::shared_ptr<const ModuleValue>;

struct ExnTag {
  int id = 0;
  std::string name;
};

struct VInt {
  std::int64_t v;
};
struct VBool {
  bool v;
};
struct VString {
  std::string v;
};
struct VUnit {};
/// Curried function; `params` and `body` point into the evaluated program.
struct VClosure {
  EnvPtr env;
  std::vector<const Pattern *> params;
  const Expr *body;
};
struct VBuiltin {
  std::string name;
  std::vector<ValuePtr> args; // partial application
};
struct VConstr {
  std::string name;
  std::optional<ValuePtr> arg;
};
struct VTuple {
  std::vector<ValuePtr> elems;
};
struct VRef {
  std::size_t cell;
};
struct VExn {
  ExnTag tag;
  std::optional<ValuePtr> arg;
};

struct Value {
  std::variant<VInt, VBool, VString, VUnit, VClosure, VBuiltin, VConstr, VTuple, VRef, VExn> node;
};

/// A constructor name in scope: a variant constructor or an exception tag.
struct CtorBinding {
  std::optional<ExnTag> exn;
};

struct ModTypeDef {
  const ModTypeExpr *expr = nullptr;
  EnvPtr env;
};

struct StructFields {
  std::map<std::string, ValuePtr> values;
  std::map<std::string, ModulePtr> modules;
  std::map<std::string, CtorBinding> ctors;
  std::map<std::string, ModTypeDef> modtypes;
};

struct FunctorValue {
  EnvPtr env;
  std::vector<std::pair<std::string, const ModTypeExpr *>> params;
  const ModExpr *body;
  const ModTypeExpr *result_type = nullptr; // ascription on the result, if any
};

struct ModuleValue {
  std::variant<StructFields, FunctorValue> node;
};

/// One scope level; lookups walk the parent chain.
struct Frame {
  EnvPtr parent;
  StructFields fields;
};

/// A raised exception escaping to the top level.
class UncaughtException : public Diagnostic {
public:
  UncaughtException(SourceSpan span, ValuePtr exn);
  const ValuePtr &exn() const { return exn_; }

private:
  ValuePtr exn_;
};

struct EvalResult {
  EnvPtr env;
  StructFields exports;
  std::optional<UncaughtException> uncaught;
  /// Calls to `print`/`print_int` plus evaluated assertions.
  int effects = 0;
};

/// Evaluates an elaborated program; program output goes to `out`.
EvalResult eval_program(const Program &elab, std::ostream &out);

/// Evaluates an expression in the builtin environment.
ValuePtr eval_expr(const Expr &e, std::ostream &out);

std::string value_to_string(const ValuePtr &v);

} // namespace minimod
