#pragma once

// Surface syntax of MiniMod: tokens, the span-annotated AST, and the parser.

#include "minimod/box.hpp"
#include "minimod/source.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace minimod {

enum class Tok {
  Eof,
  Ident,    // any identifier; capitalization decides its role
  TyVar,    // 'a
  Int,
  String,
  // keywords
  Open, Include, Struct, Sig, End, Module, Type, Let, Rec, And, In, Nonrec,
  Functor, Exception, Local, Private, Val, With, Of, Match, Try, Raise,
  Assert, Fun, If, Then, Else, True, False, Begin,
  // punctuation
  LParen, RParen, Comma, Arrow, Colon, ColonEq, Eq, Plus, Minus, Star, Lt,
  Semi, Bang, Bar, Dot, Underscore,
};

std::string_view token_name(Tok kind);

struct Token {
  Tok kind = Tok::Eof;
  std::string text; // identifier name, literal contents
  std::int64_t int_value = 0;
  SourceSpan span;
};

/// Splits `source` into tokens. The trailing Eof token is not included.
std::vector<Token> tokenize(std::string_view source, const std::string &file = "");

// ---------------------------------------------------------------------------
// AST

/// A module path as written: `A`, `A.B`, `F(A).B`.
struct ModPathSyntax;
struct MPName {
  std::string name;
};
struct MPDot {
  Box<ModPathSyntax> prefix;
  std::string name;
};
struct MPApply {
  Box<ModPathSyntax> functor;
  Box<ModPathSyntax> arg;
};
struct ModPathSyntax {
  std::variant<MPName, MPDot, MPApply> node;
};

/// `x`, `M.x`, `M.N.C`; `qual` lists module names left to right.
struct LongIdent {
  std::vector<std::string> qual;
  std::string name;
};

struct TypeExpr;
struct TEVar {
  std::string name; // without the quote
};
struct TEArrow {
  Box<TypeExpr> from;
  Box<TypeExpr> to;
};
struct TETuple {
  std::vector<TypeExpr> elems;
};
struct TEConstr {
  std::optional<ModPathSyntax> qual;
  std::string name;
  std::vector<TypeExpr> args;
};
struct TypeExpr {
  SourceSpan span;
  std::variant<TEVar, TEArrow, TETuple, TEConstr> node;
};

struct Unit {
  bool operator==(const Unit &) const = default;
};
using Literal = std::variant<std::int64_t, std::string, bool, Unit>;

struct Pattern;
struct PWild {};
struct PVar {
  std::string name;
};
struct PLit {
  Literal value;
};
struct PConstr {
  LongIdent ctor;
  std::optional<Box<Pattern>> arg;
};
struct PTuple {
  std::vector<Pattern> elems;
};
struct PAnnot {
  Box<Pattern> pat;
  TypeExpr type;
};
struct Pattern {
  SourceSpan span;
  std::variant<PWild, PVar, PLit, PConstr, PTuple, PAnnot> node;
};

struct Expr;
struct ModExpr;

struct Binding {
  Pattern pat;
  std::vector<Pattern> params;
  Box<Expr> body;
  SourceSpan span;
};

struct Case {
  bool is_exception = false;
  Pattern pat;
  Box<Expr> body;
};

struct ELit {
  Literal value;
};
struct EVar {
  LongIdent id; // operators use their symbol as the name
};
struct EConstr {
  LongIdent ctor;
  std::optional<Box<Expr>> arg;
};
struct EFun {
  Pattern param;
  Box<Expr> body;
};
struct EApply {
  Box<Expr> fn;
  Box<Expr> arg;
};
struct ETuple {
  std::vector<Expr> elems;
};
struct ELet {
  bool rec = false;
  std::vector<Binding> bindings;
  Box<Expr> body;
};
struct EMatch {
  Box<Expr> scrutinee;
  std::vector<Case> cases;
};
struct ETry {
  Box<Expr> body;
  std::vector<Case> cases;
};
struct ERaise {
  Box<Expr> arg;
};
struct EAssert {
  Box<Expr> arg;
};
struct ESeq {
  Box<Expr> first;
  Box<Expr> second;
};
struct EIf {
  Box<Expr> cond;
  Box<Expr> then_branch;
  std::optional<Box<Expr>> else_branch;
};
struct ELetModule {
  std::string name;
  Box<ModExpr> module;
  Box<Expr> body;
};
struct ELetException {
  std::string name;
  std::optional<TypeExpr> arg;
  Box<Expr> body;
};
struct ELetOpen {
  Box<ModExpr> module;
  Box<Expr> body;
};
struct Expr {
  SourceSpan span;
  std::variant<ELit, EVar, EConstr, EFun, EApply, ETuple, ELet, EMatch, ETry,
               ERaise, EAssert, ESeq, EIf, ELetModule, ELetException, ELetOpen>
      node;
};

struct ConstructorSyntax {
  std::string name;
  std::vector<TypeExpr> args;
  SourceSpan span;
};

/// One `and`-joined type definition: `('a, 'b) name = rhs`.
struct TypeDefSyntax {
  std::vector<std::string> params;
  std::string name;
  std::optional<TypeExpr> manifest;
  std::optional<std::vector<ConstructorSyntax>> constructors;
  SourceSpan span;
};

struct ModTypeExpr;
struct StructItem;
struct SigItemSurface;

struct MEPath {
  ModPathSyntax path;
};
struct MEStruct {
  std::vector<StructItem> items;
};
struct MEFunctor {
  std::string param;
  Box<ModTypeExpr> param_type;
  Box<ModExpr> body;
};
struct MEApply {
  Box<ModExpr> functor;
  Box<ModExpr> arg;
};
struct MEAscribe {
  Box<ModExpr> module;
  Box<ModTypeExpr> type;
};
struct ModExpr {
  SourceSpan span;
  std::variant<MEPath, MEStruct, MEFunctor, MEApply, MEAscribe> node;
};

enum class WithMode { Equal, Substitute };

struct MTName {
  std::optional<ModPathSyntax> qual;
  std::string name;
};
struct MTSig {
  std::vector<SigItemSurface> items;
};
struct MTFunctor {
  std::string param;
  Box<ModTypeExpr> param_type;
  Box<ModTypeExpr> result;
};
struct MTWith {
  Box<ModTypeExpr> base;
  std::vector<std::string> params;
  std::string type_name;
  WithMode mode = WithMode::Equal;
  TypeExpr rhs;
};
struct ModTypeExpr {
  SourceSpan span;
  std::variant<MTName, MTSig, MTFunctor, MTWith> node;
};

struct FunctorParamSyntax {
  std::string name;
  ModTypeExpr type;
};

struct SILet {
  bool rec = false;
  std::vector<Binding> bindings;
};
struct SITypes {
  bool nonrec = false;
  std::vector<TypeDefSyntax> defs;
};
struct SIModule {
  std::string name;
  std::vector<FunctorParamSyntax> params;
  std::optional<ModTypeExpr> annot;
  ModExpr body;
};
struct SIModType {
  std::string name;
  ModTypeExpr type;
};
struct SIException {
  std::string name;
  std::optional<TypeExpr> arg;
};
struct SIOpen {
  ModExpr module;
};
struct SIInclude {
  ModExpr module;
};
struct SILocal {
  std::vector<StructItem> hidden;
  std::vector<StructItem> body;
};
struct SIPrivate {
  Box<StructItem> item;
};
struct SIExpr {
  Expr expr;
};
struct StructItem {
  SourceSpan span;
  std::variant<SILet, SITypes, SIModule, SIModType, SIException, SIOpen,
               SIInclude, SILocal, SIPrivate, SIExpr>
      node;
};

struct SgVal {
  std::string name;
  TypeExpr type;
};
struct SgTypes {
  bool nonrec = false;
  std::vector<TypeDefSyntax> defs;
};
struct SgTypeSubst {
  std::vector<std::string> params;
  std::string name;
  TypeExpr rhs;
};
struct SgModule {
  std::string name;
  ModTypeExpr type;
};
struct SgModType {
  std::string name;
  std::optional<ModTypeExpr> type;
};
struct SgException {
  std::string name;
  std::optional<TypeExpr> arg;
};
struct SgOpen {
  ModExpr module;
};
struct SgInclude {
  ModTypeExpr type;
};
struct SgLocal {
  std::vector<SigItemSurface> hidden;
  std::vector<SigItemSurface> body;
};
struct SigItemSurface {
  SourceSpan span;
  std::variant<SgVal, SgTypes, SgTypeSubst, SgModule, SgModType, SgException,
               SgOpen, SgInclude, SgLocal>
      node;
};

struct Program {
  std::vector<StructItem> items;
};

Program parse_program(std::string_view source, const std::string &file = "");

/// Parses a bare list of signature items (the text between `sig` and `end`).
std::vector<SigItemSurface> parse_signature(std::string_view source,
                                            const std::string &file = "");

/// Span-free structural rendering used for AST equality in tests and tooling.
std::string to_sexp(const Program &p);
std::string to_sexp(const std::vector<SigItemSurface> &items);

inline bool is_module_name(std::string_view name) {
  return !name.empty() && name[0] >= 'A' && name[0] <= 'Z';
}

bool is_operator_name(std::string_view name);

} // namespace minimod
