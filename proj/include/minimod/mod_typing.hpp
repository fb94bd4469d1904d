#pragma once

// Module-level checking and elaboration: structures, signatures, functors,
// extended open/include.

#include "minimod/semobj.hpp"
#include "minimod/syntax.hpp"

#include <functional>

namespace minimod {

struct ModuleResult {
  ModTypePtr type;
  ModExpr elab;
};

struct StructureResult {
  Signature sig;
  /// Non-path opens are rewritten to `module M#k = m` followed by `open M#k`.
  std::vector<StructItem> elab;
  Env env;
};

struct OpenResult {
  Ident hidden;
  Signature sig;
  Env env;
  ModExpr elab;
};

struct TypedProgram {
  Program elaborated;
  Signature signature;
  Env env;
};

ModuleResult type_module_expr(Env &env, const ModExpr &m);
OpenResult type_open(Env &env, const ModExpr &m);
StructureResult type_structure(Env &env, const std::vector<StructItem> &items);
ModTypePtr type_signature(Env &env, const std::vector<SigItemSurface> &items);
ModTypePtr type_modtype(Env &env, const ModTypeExpr &m);

/// Checks a whole program against `env` (normally `initial_env`). Throws the
/// first Diagnostic encountered.
TypedProgram check_program(Env &env, const Program &p);
TypedProgram check_program(Session &session, const Program &p);

/// Called after every successful elimination of a hidden module: the
/// environment binding `hidden`, the signature before and after.
using EliminationObserver =
    std::function<void(const Env &, const Ident &hidden, const Signature &before, const Signature &after)>;
/// Installs an observer for the current thread; returns the previous one.
EliminationObserver set_elimination_observer(EliminationObserver obs);

/// Name given to the module introduced for `open <modexp>`.
inline constexpr const char *kHiddenOpenName = "M";

} // namespace minimod
