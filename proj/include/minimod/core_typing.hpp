#pragma once

// Hindley-Milner inference for core expressions.

#include "minimod/semobj.hpp"
#include "minimod/syntax.hpp"

namespace minimod {

/// Raised by `unify`; carries the two (resolved) types that failed to unify.
class UnifyError : public TypeError {
public:
  UnifyError(Kind kind, TypePtr expected, TypePtr actual)
      : TypeError(kind, SourceSpan{}, "type clash"), expected_(std::move(expected)),
        actual_(std::move(actual)) {}
  const TypePtr &expected() const { return expected_; }
  const TypePtr &actual() const { return actual_; }

private:
  TypePtr expected_;
  TypePtr actual_;
};

/// Generalization level and variable supply for one inference run.
struct InferState {
  Session *session;
  int level = 0;

  explicit InferState(Session &s) : session(&s) {}
  TypePtr fresh() { return new_var(*session, level); }
  void enter() { ++level; }
  void leave() { --level; }
};

/// One-step expansion of a manifest type abbreviation at the head of `t`.
/// Returns null when the head is not an abbreviation.
TypePtr expand_head_once(const Env &env, const TypePtr &t);

/// Expands abbreviations at the head until none applies.
TypePtr expand_head(const Env &env, const TypePtr &t);

/// Makes `expected` and `actual` equal, expanding manifest abbreviations
/// before giving up. Throws UnifyError (kind Unify or Occurs).
void unify(const Env &env, const TypePtr &expected, const TypePtr &actual);

/// Quantifies the variables of `t` created above the current level.
Scheme generalize(const InferState &state, const TypePtr &t);

/// Scheme of `t` with no quantified variables; variable levels are lowered
/// to the current level so outer lets cannot generalize them.
Scheme monomorphic(const InferState &state, const TypePtr &t);

TypePtr instantiate(InferState &state, const Scheme &s);

/// Infers the principal type of `e` in `env`.
TypePtr infer_expr(Env &env, InferState &state, const Expr &e);

/// Syntactic values, the only bindings that generalize.
bool is_nonexpansive(const Expr &e);

} // namespace minimod
