#pragma once

// Dependency elimination: a supertype of a signature that does not mention a
// given identifier.

#include "minimod/semobj.hpp"

namespace minimod {

struct Victim {
  Namespace kind;
  std::string name; // empty for an anonymous expression
  SourceSpan span;
};

class EliminationError : public Diagnostic {
public:
  EliminationError(SourceSpan span, Ident hidden, std::optional<Ident> culprit,
                   Namespace culprit_kind, std::string context, std::vector<Victim> victims);

  const Ident &hidden() const { return hidden_; }
  /// Component of the hidden module that the victims depend on.
  const std::optional<Ident> &culprit() const { return culprit_; }
  Namespace culprit_kind() const { return culprit_kind_; }
  /// What introduced the hidden module: "open", "functor argument", ...
  const std::string &context() const { return context_; }
  const std::vector<Victim> &victims() const { return victims_; }

  EliminationError with_site(SourceSpan span, std::string context) const;

private:
  Ident hidden_;
  std::optional<Ident> culprit_;
  Namespace culprit_kind_;
  std::string context_;
  std::vector<Victim> victims_;
};

/// `t` rewritten so it no longer mentions `hidden`, or null when impossible.
TypePtr nondep_type(const Env &env, const Ident &hidden, const TypePtr &t);

/// Throws EliminationError (with an empty site span and context "open") when
/// some value, exception, variant or submodule cannot avoid `hidden`.
Signature nondep_signature(const Env &env, const Ident &hidden, const Signature &sig);
ModTypePtr nondep_modtype(const Env &env, const Ident &hidden, const ModTypePtr &m);

/// Syntactic occurrence of a path rooted at `hidden`.
bool mentions(const Ident &hidden, const TypePtr &t);
bool mentions(const Ident &hidden, const ModTypePtr &m);
bool mentions(const Ident &hidden, const Signature &s);

/// Component of the module `hidden` named by the first path in `t` rooted at
/// `hidden`.
std::optional<std::pair<Ident, Namespace>> culprit_in(const Env &env, const Ident &hidden,
                                                      const TypePtr &t);

} // namespace minimod
