#pragma once

// Rendering of types, signatures and diagnostics.

#include "minimod/semobj.hpp"

#include <exception>
#include <map>

namespace minimod {

enum class PrintMode { Plain, Stamps, Aliases };

/// Assigns 'a, 'b, ... to type variables in order of first appearance.
class TypeNamer {
public:
  /// `weak` names ('_weak1) are used for unquantified variables when printing
  /// signatures.
  explicit TypeNamer(bool weak_for_free = false) : weak_(weak_for_free) {}
  std::string name(int var_id, bool quantified);

private:
  bool weak_;
  std::map<int, std::string> names_;
  int next_ = 0;
  int next_weak_ = 1;
};

std::string type_to_string(const TypePtr &t);
std::string type_to_string(const TypePtr &t, TypeNamer &names);
std::string scheme_to_string(const Scheme &s);

/// One item per line, nested signatures indented by two spaces.
std::string print_signature(const Signature &sig, PrintMode mode = PrintMode::Plain);

/// Module type on as few lines as the layout rules allow
/// (`sig val f : int -> int end`).
std::string print_modtype(const ModTypePtr &m, PrintMode mode = PrintMode::Plain);

/// Full user-facing report of a diagnostic against the program text.
std::string render_diagnostic(const Diagnostic &d, const std::string &source, bool color);

class HiddenIdentPresent : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace minimod
