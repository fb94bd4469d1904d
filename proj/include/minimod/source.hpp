#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace minimod {

/// Half-open source region. Lines are 1-based, columns 0-based.
struct SourceSpan {
  std::string file;
  int start_line = 1;
  int start_col = 0;
  int end_line = 1;
  int end_col = 0;

  static SourceSpan merge(const SourceSpan &a, const SourceSpan &b) {
    SourceSpan s = a;
    s.end_line = b.end_line;
    s.end_col = b.end_col;
    return s;
  }
};

/// Base of every user-facing diagnostic raised by the front end and checker.
class Diagnostic : public std::runtime_error {
public:
  Diagnostic(SourceSpan span, const std::string &message)
      : std::runtime_error(message), span_(std::move(span)) {}

  const SourceSpan &span() const { return span_; }

private:
  SourceSpan span_;
};

class LexError : public Diagnostic {
  using Diagnostic::Diagnostic;
};

class ParseError : public Diagnostic {
public:
  ParseError(SourceSpan span, const std::string &message,
             std::vector<std::string> expected = {})
      : Diagnostic(std::move(span), message), expected_(std::move(expected)) {}

  const std::vector<std::string> &expected() const { return expected_; }

private:
  std::vector<std::string> expected_;
};

/// Any static-semantics failure (unbound names, unification, arity, ...).
class TypeError : public Diagnostic {
public:
  enum class Kind {
    Unbound,
    Unify,
    Occurs,
    ConstructorArity,
    TypeArity,
    NotAFunctor,
    CannotOpenFunctor,
    WithOnNonAbstract,
    UnboundTypeInWith,
    CyclicAbbrev,
    Escape,
    Other,
  };

  TypeError(Kind kind, SourceSpan span, const std::string &message)
      : Diagnostic(std::move(span), message), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/// Extracts line `line` (1-based) from `text`, without its terminator.
std::string source_line(const std::string &text, int line);

} // namespace minimod
