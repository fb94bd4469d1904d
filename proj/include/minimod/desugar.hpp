#pragma once

// Source-to-source translations between `local`, `private` and extended
// `open`, and the source printer.

#include "minimod/syntax.hpp"

#include <set>

namespace minimod {

using NameSet = std::set<std::string>;

/// `local d1 in d2 end` becomes `include struct open struct d1 end d2 end`.
std::vector<StructItem> expand_local(const std::vector<StructItem> &items);

/// `private d` becomes `open struct d end`.
std::vector<StructItem> expand_private(const std::vector<StructItem> &items);

/// `open m; d` (m not a path) becomes
/// `local module M0 = m in open M0 d end`.
std::vector<StructItem> introduce_local(const std::vector<StructItem> &items);

/// `open m; d` (m not a path) becomes `private module M0 = m open M0 d`.
std::vector<StructItem> introduce_private(const std::vector<StructItem> &items);

/// Every capitalized identifier occurring in `items`.
NameSet approx_module_names(const std::vector<StructItem> &items);

std::string print_source(const Program &p);
std::string print_source(const std::vector<StructItem> &items);
std::string print_expr(const Expr &e);

} // namespace minimod
