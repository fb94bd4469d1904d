#include "minimod/syntax.hpp"

#include <algorithm>

namespace minimod {

namespace {

// Recursive-descent parser over the token vector.
//
// Items are not separated by `;;`. An expression stops absorbing application
// arguments and infix operators at a token that begins a line at or left of
// the column where the enclosing structure item started (the offside column).
class Parser {
public:
  Parser(std::vector<Token> toks, const std::string &file)
      : toks_(std::move(toks)), file_(file) {
    Token eof;
    eof.kind = Tok::Eof;
    if (toks_.empty()) {
      eof.span = SourceSpan{file, 1, 0, 1, 0};
    } else {
      const SourceSpan &last = toks_.back().span;
      eof.span = SourceSpan{file, last.end_line, last.end_col, last.end_line, last.end_col};
    }
    toks_.push_back(eof);
  }

  Program program() {
    Program p;
    p.items = struct_items();
    expect(Tok::Eof);
    return p;
  }

  std::vector<SigItemSurface> signature_only() {
    auto items = sig_items();
    expect(Tok::Eof);
    return items;
  }

private:
  std::vector<Token> toks_;
  const std::string &file_;
  std::size_t pos_ = 0;
  int offside_col_ = -1;

  const Token &cur() const { return toks_[pos_]; }
  const Token &ahead(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  Tok kind() const { return cur().kind; }
  bool at(Tok k) const { return kind() == k; }

  const Token &advance() {
    const Token &t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (at(k)) {
      advance();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    throw ParseError(cur().span, "Syntax error", std::move(expected));
  }

  const Token &expect(Tok k) {
    if (!at(k)) fail({std::string(token_name(k))});
    return advance();
  }

  std::string expect_lower() {
    if (!at(Tok::Ident) || is_module_name(cur().text)) fail({"lowercase identifier"});
    return advance().text;
  }

  std::string expect_upper() {
    if (!at(Tok::Ident) || !is_module_name(cur().text)) fail({"capitalized identifier"});
    return advance().text;
  }

  bool at_lower() const { return at(Tok::Ident) && !is_module_name(cur().text); }
  bool at_upper() const { return at(Tok::Ident) && is_module_name(cur().text); }

  SourceSpan span_from(const SourceSpan &start) const {
    const Token &last = toks_[pos_ == 0 ? 0 : pos_ - 1];
    SourceSpan s = start;
    s.end_line = last.span.end_line;
    s.end_col = last.span.end_col;
    return s;
  }

  /// True when the current token starts a new line left of the offside column.
  bool offside() const {
    if (offside_col_ < 0 || pos_ == 0) return false;
    const Token &prev = toks_[pos_ - 1];
    return cur().span.start_line > prev.span.end_line && cur().span.start_col <= offside_col_;
  }

  struct OffsideGuard {
    Parser &p;
    int saved;
    OffsideGuard(Parser &parser, int col) : p(parser), saved(parser.offside_col_) {
      p.offside_col_ = col;
    }
    ~OffsideGuard() { p.offside_col_ = saved; }
  };

  // ---- module paths -------------------------------------------------------

  ModPathSyntax mod_path_for_type_prefix(std::string first) {
    ModPathSyntax p{MPName{std::move(first)}};
    for (;;) {
      if (at(Tok::LParen) && !offside()) {
        advance();
        ModPathSyntax arg = plain_mod_path();
        expect(Tok::RParen);
        p = ModPathSyntax{MPApply{Box<ModPathSyntax>(std::move(p)), Box<ModPathSyntax>(std::move(arg))}};
        continue;
      }
      if (at(Tok::Dot) && ahead(1).kind == Tok::Ident && is_module_name(ahead(1).text)) {
        advance();
        std::string n = advance().text;
        p = ModPathSyntax{MPDot{Box<ModPathSyntax>(std::move(p)), std::move(n)}};
        continue;
      }
      return p;
    }
  }

  // A path inside a type path's application argument: `List`, `F(A).B`.
  ModPathSyntax plain_mod_path() {
    std::string first = expect_upper();
    return mod_path_for_type_prefix(std::move(first));
  }

  // ---- types --------------------------------------------------------------

  TypeExpr type_expr() {
    SourceSpan start = cur().span;
    TypeExpr lhs = tuple_type();
    if (at(Tok::Arrow) && !offside()) {
      advance();
      TypeExpr rhs = type_expr();
      return TypeExpr{span_from(start), TEArrow{Box<TypeExpr>(std::move(lhs)), Box<TypeExpr>(std::move(rhs))}};
    }
    return lhs;
  }

  TypeExpr tuple_type() {
    SourceSpan start = cur().span;
    TypeExpr first = app_type();
    if (!(at(Tok::Star) && !offside())) return first;
    std::vector<TypeExpr> elems;
    elems.push_back(std::move(first));
    while (at(Tok::Star) && !offside()) {
      advance();
      elems.push_back(app_type());
    }
    return TypeExpr{span_from(start), TETuple{std::move(elems)}};
  }

  bool at_type_constructor() const {
    return at(Tok::Ident) && !offside();
  }

  // Parses `lower` or `Path.lower` at a postfix constructor position.
  std::pair<std::optional<ModPathSyntax>, std::string> type_constructor_name() {
    if (at_lower()) return {std::nullopt, advance().text};
    std::string first = expect_upper();
    ModPathSyntax p = mod_path_for_type_prefix(std::move(first));
    expect(Tok::Dot);
    return {std::move(p), expect_lower()};
  }

  TypeExpr app_type() {
    SourceSpan start = cur().span;
    std::vector<TypeExpr> args;
    TypeExpr base;
    if (at(Tok::LParen)) {
      advance();
      args.push_back(type_expr());
      while (accept(Tok::Comma)) args.push_back(type_expr());
      expect(Tok::RParen);
      if (args.size() == 1) {
        base = std::move(args.front());
        base.span = span_from(start);
        args.clear();
      } else if (!at_type_constructor()) {
        fail({"type constructor"});
      }
    } else if (at(Tok::TyVar)) {
      base = TypeExpr{cur().span, TEVar{cur().text}};
      advance();
    } else if (at(Tok::Ident)) {
      auto [qual, name] = type_constructor_name();
      base = TypeExpr{span_from(start), TEConstr{std::move(qual), std::move(name), {}}};
    } else {
      fail({"type"});
    }
    if (!args.empty()) {
      auto [qual, name] = type_constructor_name();
      base = TypeExpr{span_from(start), TEConstr{std::move(qual), std::move(name), std::move(args)}};
    }
    while (at_type_constructor()) {
      auto [qual, name] = type_constructor_name();
      std::vector<TypeExpr> one;
      one.push_back(std::move(base));
      base = TypeExpr{span_from(start), TEConstr{std::move(qual), std::move(name), std::move(one)}};
    }
    return base;
  }

  std::vector<std::string> type_params() {
    std::vector<std::string> params;
    if (at(Tok::TyVar)) {
      params.push_back(advance().text);
    } else if (at(Tok::LParen) && ahead(1).kind == Tok::TyVar) {
      advance();
      params.push_back(expect(Tok::TyVar).text);
      while (accept(Tok::Comma)) params.push_back(expect(Tok::TyVar).text);
      expect(Tok::RParen);
    }
    return params;
  }

  bool at_constructor_decl() const {
    if (at(Tok::Bar)) return true;
    return at_upper() && ahead(1).kind != Tok::Dot && ahead(1).kind != Tok::LParen;
  }

  std::vector<ConstructorSyntax> constructor_decls() {
    std::vector<ConstructorSyntax> out;
    accept(Tok::Bar);
    for (;;) {
      SourceSpan start = cur().span;
      ConstructorSyntax c;
      c.name = expect_upper();
      if (accept(Tok::Of)) {
        c.args.push_back(app_type());
        while (at(Tok::Star) && !offside()) {
          advance();
          c.args.push_back(app_type());
        }
      }
      c.span = span_from(start);
      out.push_back(std::move(c));
      if (!(at(Tok::Bar) && !offside())) break;
      advance();
    }
    return out;
  }

  TypeDefSyntax type_def() {
    SourceSpan start = cur().span;
    TypeDefSyntax d;
    d.params = type_params();
    d.name = expect_lower();
    if (accept(Tok::Eq)) {
      if (at_constructor_decl()) {
        d.constructors = constructor_decls();
      } else {
        d.manifest = type_expr();
        if (at(Tok::Eq) && !offside()) {
          advance();
          d.constructors = constructor_decls();
        }
      }
    }
    d.span = span_from(start);
    return d;
  }

  // ---- patterns -----------------------------------------------------------

  bool at_simple_pattern() const {
    if (offside()) return false;
    switch (kind()) {
    case Tok::Underscore:
    case Tok::Ident:
    case Tok::Int:
    case Tok::String:
    case Tok::True:
    case Tok::False:
    case Tok::LParen:
      return true;
    default:
      return false;
    }
  }

  LongIdent long_constructor() {
    LongIdent id;
    id.name = expect_upper();
    while (at(Tok::Dot) && ahead(1).kind == Tok::Ident && is_module_name(ahead(1).text)) {
      advance();
      id.qual.push_back(std::move(id.name));
      id.name = advance().text;
    }
    return id;
  }

  Pattern simple_pattern() {
    SourceSpan start = cur().span;
    switch (kind()) {
    case Tok::Underscore:
      advance();
      return Pattern{span_from(start), PWild{}};
    case Tok::Int: {
      auto v = advance().int_value;
      return Pattern{span_from(start), PLit{Literal{v}}};
    }
    case Tok::String: {
      auto v = advance().text;
      return Pattern{span_from(start), PLit{Literal{v}}};
    }
    case Tok::True:
      advance();
      return Pattern{span_from(start), PLit{Literal{true}}};
    case Tok::False:
      advance();
      return Pattern{span_from(start), PLit{Literal{false}}};
    case Tok::Ident: {
      if (is_module_name(cur().text)) {
        LongIdent c = long_constructor();
        return Pattern{span_from(start), PConstr{std::move(c), std::nullopt}};
      }
      std::string name = advance().text;
      return Pattern{span_from(start), PVar{std::move(name)}};
    }
    case Tok::LParen: {
      advance();
      if (accept(Tok::RParen)) return Pattern{span_from(start), PLit{Literal{Unit{}}}};
      Pattern inner = pattern();
      if (accept(Tok::Colon)) {
        TypeExpr t = type_expr();
        expect(Tok::RParen);
        return Pattern{span_from(start), PAnnot{Box<Pattern>(std::move(inner)), std::move(t)}};
      }
      expect(Tok::RParen);
      inner.span = span_from(start);
      return inner;
    }
    default:
      fail({"pattern"});
    }
  }

  Pattern app_pattern() {
    SourceSpan start = cur().span;
    if (at_upper()) {
      LongIdent c = long_constructor();
      std::optional<Box<Pattern>> arg;
      if (at_simple_pattern()) arg = Box<Pattern>(simple_pattern());
      return Pattern{span_from(start), PConstr{std::move(c), std::move(arg)}};
    }
    return simple_pattern();
  }

  Pattern pattern() {
    SourceSpan start = cur().span;
    Pattern first = app_pattern();
    if (!at(Tok::Comma)) return first;
    std::vector<Pattern> elems;
    elems.push_back(std::move(first));
    while (accept(Tok::Comma)) elems.push_back(app_pattern());
    return Pattern{span_from(start), PTuple{std::move(elems)}};
  }

  // ---- expressions --------------------------------------------------------

  static Expr make_app(SourceSpan span, Expr fn, Expr arg) {
    return Expr{std::move(span), EApply{Box<Expr>(std::move(fn)), Box<Expr>(std::move(arg))}};
  }

  static Expr make_binop(const SourceSpan &opspan, const std::string &op, Expr lhs, Expr rhs) {
    SourceSpan whole = SourceSpan::merge(lhs.span, rhs.span);
    Expr fn{opspan, EVar{LongIdent{{}, op}}};
    Expr partial = make_app(SourceSpan::merge(lhs.span, opspan), std::move(fn), std::move(lhs));
    return make_app(whole, std::move(partial), std::move(rhs));
  }

  bool seq_continues() const {
    switch (ahead(1).kind) {
    case Tok::Type:
    case Tok::Module:
    case Tok::Open:
    case Tok::Include:
    case Tok::Exception:
    case Tok::Local:
    case Tok::Private:
    case Tok::End:
    case Tok::Eof:
    case Tok::In:
    case Tok::RParen:
    case Tok::Bar:
    case Tok::Then:
    case Tok::Else:
    case Tok::With:
    case Tok::And:
      return false;
    default:
      return true;
    }
  }

  Expr expr() {
    SourceSpan start = cur().span;
    Expr lhs = assign_expr();
    if (at(Tok::Semi)) {
      if (!seq_continues()) {
        advance();
        return lhs;
      }
      advance();
      Expr rhs = expr();
      return Expr{span_from(start), ESeq{Box<Expr>(std::move(lhs)), Box<Expr>(std::move(rhs))}};
    }
    return lhs;
  }

  Expr assign_expr() {
    Expr lhs = tuple_expr();
    if (at(Tok::ColonEq) && !offside()) {
      SourceSpan op = advance().span;
      Expr rhs = assign_expr();
      return make_binop(op, ":=", std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr tuple_expr() {
    SourceSpan start = cur().span;
    Expr first = cmp_expr();
    if (!(at(Tok::Comma) && !offside())) return first;
    std::vector<Expr> elems;
    elems.push_back(std::move(first));
    while (at(Tok::Comma) && !offside()) {
      advance();
      elems.push_back(cmp_expr());
    }
    return Expr{span_from(start), ETuple{std::move(elems)}};
  }

  Expr cmp_expr() {
    Expr lhs = add_expr();
    while ((at(Tok::Eq) || at(Tok::Lt)) && !offside()) {
      std::string op = at(Tok::Eq) ? "=" : "<";
      SourceSpan opspan = advance().span;
      Expr rhs = add_expr();
      lhs = make_binop(opspan, op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr add_expr() {
    Expr lhs = mul_expr();
    while ((at(Tok::Plus) || at(Tok::Minus)) && !offside()) {
      std::string op = at(Tok::Plus) ? "+" : "-";
      SourceSpan opspan = advance().span;
      Expr rhs = mul_expr();
      lhs = make_binop(opspan, op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr mul_expr() {
    Expr lhs = app_expr();
    while (at(Tok::Star) && !offside()) {
      SourceSpan opspan = advance().span;
      Expr rhs = app_expr();
      lhs = make_binop(opspan, "*", std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  bool at_atom() const {
    if (offside()) return false;
    switch (kind()) {
    case Tok::Int:
    case Tok::String:
    case Tok::True:
    case Tok::False:
    case Tok::LParen:
    case Tok::Begin:
    case Tok::Ident:
    case Tok::Bang:
      return true;
    default:
      return false;
    }
  }

  Expr app_expr() {
    SourceSpan start = cur().span;
    switch (kind()) {
    case Tok::Let:
    case Tok::Fun:
    case Tok::Match:
    case Tok::Try:
    case Tok::If:
      return compound_expr();
    case Tok::Raise: {
      advance();
      Expr arg = prefix_expr();
      return Expr{span_from(start), ERaise{Box<Expr>(std::move(arg))}};
    }
    case Tok::Assert: {
      advance();
      Expr arg = prefix_expr();
      return Expr{span_from(start), EAssert{Box<Expr>(std::move(arg))}};
    }
    default:
      break;
    }

    if (at_upper()) {
      // Qualified value `M.x` or constructor `M.C arg`.
      LongIdent id;
      id.name = advance().text;
      while (at(Tok::Dot) && ahead(1).kind == Tok::Ident) {
        advance();
        id.qual.push_back(std::move(id.name));
        id.name = advance().text;
        if (!is_module_name(id.name)) break;
      }
      if (!is_module_name(id.name)) {
        Expr fn{span_from(start), EVar{std::move(id)}};
        return app_tail(start, std::move(fn));
      }
      std::optional<Box<Expr>> arg;
      if (at_atom()) arg = Box<Expr>(prefix_expr());
      return Expr{span_from(start), EConstr{std::move(id), std::move(arg)}};
    }

    Expr fn = prefix_expr();
    return app_tail(start, std::move(fn));
  }

  Expr app_tail(const SourceSpan &start, Expr fn) {
    while (at_atom()) {
      Expr arg = prefix_expr();
      fn = make_app(span_from(start), std::move(fn), std::move(arg));
    }
    return fn;
  }

  Expr prefix_expr() {
    SourceSpan start = cur().span;
    if (at(Tok::Bang)) {
      SourceSpan op = advance().span;
      Expr arg = prefix_expr();
      Expr fn{op, EVar{LongIdent{{}, "!"}}};
      return make_app(span_from(start), std::move(fn), std::move(arg));
    }
    return atom_expr();
  }

  Expr atom_expr() {
    SourceSpan start = cur().span;
    switch (kind()) {
    case Tok::Int: {
      auto v = advance().int_value;
      return Expr{span_from(start), ELit{Literal{v}}};
    }
    case Tok::String: {
      auto v = advance().text;
      return Expr{span_from(start), ELit{Literal{v}}};
    }
    case Tok::True:
      advance();
      return Expr{span_from(start), ELit{Literal{true}}};
    case Tok::False:
      advance();
      return Expr{span_from(start), ELit{Literal{false}}};
    case Tok::Begin: {
      advance();
      OffsideGuard g(*this, -1);
      if (accept(Tok::End)) return Expr{span_from(start), ELit{Literal{Unit{}}}};
      Expr e = expr();
      expect(Tok::End);
      e.span = span_from(start);
      return e;
    }
    case Tok::LParen: {
      advance();
      if (accept(Tok::RParen)) return Expr{span_from(start), ELit{Literal{Unit{}}}};
      if (ahead(1).kind == Tok::RParen) {
        std::string op;
        switch (kind()) {
        case Tok::Plus: op = "+"; break;
        case Tok::Minus: op = "-"; break;
        case Tok::Star: op = "*"; break;
        case Tok::Eq: op = "="; break;
        case Tok::Lt: op = "<"; break;
        case Tok::ColonEq: op = ":="; break;
        case Tok::Bang: op = "!"; break;
        default: break;
        }
        if (!op.empty()) {
          advance();
          advance();
          return Expr{span_from(start), EVar{LongIdent{{}, op}}};
        }
      }
      OffsideGuard g(*this, -1);
      Expr e = expr();
      expect(Tok::RParen);
      e.span = span_from(start);
      return e;
    }
    case Tok::Ident: {
      if (is_module_name(cur().text)) {
        LongIdent c = long_constructor();
        if (at(Tok::Dot) && ahead(1).kind == Tok::Ident) {
          advance();
          c.qual.push_back(std::move(c.name));
          c.name = expect_lower();
          return Expr{span_from(start), EVar{std::move(c)}};
        }
        return Expr{span_from(start), EConstr{std::move(c), std::nullopt}};
      }
      std::string name = advance().text;
      return Expr{span_from(start), EVar{LongIdent{{}, std::move(name)}}};
    }
    default:
      fail({"expression"});
    }
  }

  Binding binding() {
    SourceSpan start = cur().span;
    Pattern pat = simple_pattern();
    std::vector<Pattern> params;
    if (std::holds_alternative<PVar>(pat.node)) {
      while (!at(Tok::Eq)) params.push_back(simple_pattern());
    }
    expect(Tok::Eq);
    Expr body = expr();
    return Binding{std::move(pat), std::move(params), Box<Expr>(std::move(body)), span_from(start)};
  }

  std::vector<Binding> bindings() {
    std::vector<Binding> out;
    out.push_back(binding());
    while (accept(Tok::And)) out.push_back(binding());
    return out;
  }

  std::vector<Case> cases() {
    std::vector<Case> out;
    accept(Tok::Bar);
    for (;;) {
      bool is_exception = accept(Tok::Exception);
      Pattern pat = pattern();
      expect(Tok::Arrow);
      out.push_back(Case{is_exception, std::move(pat), Box<Expr>(expr())});
      if (!accept(Tok::Bar)) break;
    }
    return out;
  }

  Expr compound_expr() {
    SourceSpan start = cur().span;
    switch (kind()) {
    case Tok::Let: {
      advance();
      if (accept(Tok::Module)) {
        std::string name = expect_upper();
        expect(Tok::Eq);
        ModExpr m = module_expr();
        expect(Tok::In);
        Expr body = expr();
        return Expr{span_from(start), ELetModule{std::move(name), Box<ModExpr>(std::move(m)), Box<Expr>(std::move(body))}};
      }
      if (accept(Tok::Exception)) {
        std::string name = expect_upper();
        std::optional<TypeExpr> arg;
        if (accept(Tok::Of)) arg = type_expr();
        expect(Tok::In);
        Expr body = expr();
        return Expr{span_from(start), ELetException{std::move(name), std::move(arg), Box<Expr>(std::move(body))}};
      }
      if (accept(Tok::Open)) {
        ModExpr m = module_expr();
        expect(Tok::In);
        Expr body = expr();
        return Expr{span_from(start), ELetOpen{Box<ModExpr>(std::move(m)), Box<Expr>(std::move(body))}};
      }
      bool rec = accept(Tok::Rec);
      auto bs = bindings();
      expect(Tok::In);
      Expr body = expr();
      return Expr{span_from(start), ELet{rec, std::move(bs), Box<Expr>(std::move(body))}};
    }
    case Tok::Fun: {
      advance();
      std::vector<Pattern> params;
      params.push_back(simple_pattern());
      while (!at(Tok::Arrow)) params.push_back(simple_pattern());
      expect(Tok::Arrow);
      Expr body = expr();
      for (auto it = params.rbegin(); it != params.rend(); ++it) {
        body = Expr{span_from(start), EFun{std::move(*it), Box<Expr>(std::move(body))}};
      }
      return body;
    }
    case Tok::Match: {
      advance();
      Expr scrut = expr();
      expect(Tok::With);
      auto cs = cases();
      return Expr{span_from(start), EMatch{Box<Expr>(std::move(scrut)), std::move(cs)}};
    }
    case Tok::Try: {
      advance();
      Expr body = expr();
      expect(Tok::With);
      auto cs = cases();
      return Expr{span_from(start), ETry{Box<Expr>(std::move(body)), std::move(cs)}};
    }
    case Tok::If: {
      advance();
      Expr c = expr();
      expect(Tok::Then);
      Expr t = assign_expr();
      std::optional<Box<Expr>> e;
      if (accept(Tok::Else)) e = Box<Expr>(assign_expr());
      return Expr{span_from(start), EIf{Box<Expr>(std::move(c)), Box<Expr>(std::move(t)), std::move(e)}};
    }
    default:
      fail({"expression"});
    }
  }

  // ---- module expressions -------------------------------------------------

  ModExpr module_expr() {
    SourceSpan start = cur().span;
    if (accept(Tok::Functor)) {
      expect(Tok::LParen);
      std::string param = expect_upper();
      expect(Tok::Colon);
      ModTypeExpr pt = module_type();
      expect(Tok::RParen);
      expect(Tok::Arrow);
      ModExpr body = module_expr();
      return ModExpr{span_from(start), MEFunctor{std::move(param), Box<ModTypeExpr>(std::move(pt)), Box<ModExpr>(std::move(body))}};
    }
    ModExpr m = module_atom();
    while (at(Tok::LParen) && !offside()) {
      advance();
      ModExpr arg = module_arg();
      expect(Tok::RParen);
      m = ModExpr{span_from(start), MEApply{Box<ModExpr>(std::move(m)), Box<ModExpr>(std::move(arg))}};
    }
    return m;
  }

  // Contents of a parenthesized module expression: `m` or `m : S`.
  ModExpr module_arg() {
    SourceSpan start = cur().span;
    OffsideGuard g(*this, -1);
    ModExpr m = module_expr();
    if (accept(Tok::Colon)) {
      ModTypeExpr t = module_type();
      return ModExpr{span_from(start), MEAscribe{Box<ModExpr>(std::move(m)), Box<ModTypeExpr>(std::move(t))}};
    }
    return m;
  }

  ModExpr module_atom() {
    SourceSpan start = cur().span;
    if (accept(Tok::Struct)) {
      auto items = struct_items();
      expect(Tok::End);
      return ModExpr{span_from(start), MEStruct{std::move(items)}};
    }
    if (accept(Tok::LParen)) {
      ModExpr m = module_arg();
      expect(Tok::RParen);
      m.span = span_from(start);
      return m;
    }
    if (at_upper()) {
      ModPathSyntax p{MPName{advance().text}};
      while (at(Tok::Dot) && ahead(1).kind == Tok::Ident && is_module_name(ahead(1).text)) {
        advance();
        p = ModPathSyntax{MPDot{Box<ModPathSyntax>(std::move(p)), advance().text}};
      }
      return ModExpr{span_from(start), MEPath{std::move(p)}};
    }
    fail({"module expression"});
  }

  // ---- module types -------------------------------------------------------

  ModTypeExpr module_type() {
    SourceSpan start = cur().span;
    if (accept(Tok::Functor)) {
      expect(Tok::LParen);
      std::string param = expect_upper();
      expect(Tok::Colon);
      ModTypeExpr pt = module_type();
      expect(Tok::RParen);
      expect(Tok::Arrow);
      ModTypeExpr res = module_type();
      return ModTypeExpr{span_from(start), MTFunctor{std::move(param), Box<ModTypeExpr>(std::move(pt)), Box<ModTypeExpr>(std::move(res))}};
    }
    ModTypeExpr t = module_type_atom();
    while (at(Tok::With) && !offside()) {
      advance();
      do {
        expect(Tok::Type);
        MTWith w{Box<ModTypeExpr>(std::move(t)), {}, {}, WithMode::Equal, TypeExpr{}};
        w.params = type_params();
        w.type_name = expect_lower();
        if (accept(Tok::ColonEq)) {
          w.mode = WithMode::Substitute;
        } else {
          expect(Tok::Eq);
        }
        w.rhs = type_expr();
        t = ModTypeExpr{span_from(start), std::move(w)};
      } while (accept(Tok::And));
    }
    return t;
  }

  ModTypeExpr module_type_atom() {
    SourceSpan start = cur().span;
    if (accept(Tok::Sig)) {
      auto items = sig_items();
      expect(Tok::End);
      return ModTypeExpr{span_from(start), MTSig{std::move(items)}};
    }
    if (accept(Tok::LParen)) {
      OffsideGuard g(*this, -1);
      ModTypeExpr t = module_type();
      expect(Tok::RParen);
      t.span = span_from(start);
      return t;
    }
    if (at_upper()) {
      std::vector<std::string> parts{advance().text};
      while (at(Tok::Dot) && ahead(1).kind == Tok::Ident && is_module_name(ahead(1).text)) {
        advance();
        parts.push_back(advance().text);
      }
      MTName n;
      n.name = parts.back();
      parts.pop_back();
      if (!parts.empty()) {
        ModPathSyntax p{MPName{parts.front()}};
        for (std::size_t i = 1; i < parts.size(); ++i)
          p = ModPathSyntax{MPDot{Box<ModPathSyntax>(std::move(p)), parts[i]}};
        n.qual = std::move(p);
      }
      return ModTypeExpr{span_from(start), std::move(n)};
    }
    fail({"module type"});
  }

  // ---- structure items ----------------------------------------------------

  bool local_head_ = false;

  bool at_struct_end() const { return at(Tok::End) || at(Tok::Eof) || at(Tok::In); }

  std::vector<StructItem> struct_items(bool local_head = false) {
    bool saved = local_head_;
    local_head_ = local_head;
    std::vector<StructItem> items;
    while (!at_struct_end()) {
      if (accept(Tok::Semi)) continue;
      OffsideGuard g(*this, cur().span.start_col);
      items.push_back(struct_item());
    }
    local_head_ = saved;
    return items;
  }

  StructItem struct_item() {
    SourceSpan start = cur().span;
    switch (kind()) {
    case Tok::Let: {
      Tok next = ahead(1).kind;
      if (next == Tok::Module || next == Tok::Exception || next == Tok::Open) {
        Expr e = expr();
        return StructItem{span_from(start), SIExpr{std::move(e)}};
      }
      advance();
      bool rec = accept(Tok::Rec);
      auto bs = bindings();
      if (at(Tok::In) && !local_head_) {
        advance();
        Expr body = expr();
        Expr e{span_from(start), ELet{rec, std::move(bs), Box<Expr>(std::move(body))}};
        return StructItem{span_from(start), SIExpr{std::move(e)}};
      }
      return StructItem{span_from(start), SILet{rec, std::move(bs)}};
    }
    case Tok::Type: {
      advance();
      bool nonrec = accept(Tok::Nonrec);
      std::vector<TypeDefSyntax> defs;
      defs.push_back(type_def());
      while (accept(Tok::And)) defs.push_back(type_def());
      return StructItem{span_from(start), SITypes{nonrec, std::move(defs)}};
    }
    case Tok::Module: {
      advance();
      if (accept(Tok::Type)) {
        std::string name = expect_upper();
        expect(Tok::Eq);
        ModTypeExpr t = module_type();
        return StructItem{span_from(start), SIModType{std::move(name), std::move(t)}};
      }
      std::string name = expect_upper();
      std::vector<FunctorParamSyntax> params;
      while (accept(Tok::LParen)) {
        std::string p = expect_upper();
        expect(Tok::Colon);
        ModTypeExpr t = module_type();
        expect(Tok::RParen);
        params.push_back(FunctorParamSyntax{std::move(p), std::move(t)});
      }
      std::optional<ModTypeExpr> annot;
      if (accept(Tok::Colon)) annot = module_type();
      expect(Tok::Eq);
      ModExpr body = module_expr();
      return StructItem{span_from(start), SIModule{std::move(name), std::move(params), std::move(annot), std::move(body)}};
    }
    case Tok::Exception: {
      advance();
      std::string name = expect_upper();
      std::optional<TypeExpr> arg;
      if (accept(Tok::Of)) arg = type_expr();
      return StructItem{span_from(start), SIException{std::move(name), std::move(arg)}};
    }
    case Tok::Open: {
      advance();
      ModExpr m = module_expr();
      return StructItem{span_from(start), SIOpen{std::move(m)}};
    }
    case Tok::Include: {
      advance();
      ModExpr m = module_expr();
      return StructItem{span_from(start), SIInclude{std::move(m)}};
    }
    case Tok::Local: {
      advance();
      auto hidden = struct_items(true);
      expect(Tok::In);
      auto body = struct_items();
      expect(Tok::End);
      return StructItem{span_from(start), SILocal{std::move(hidden), std::move(body)}};
    }
    case Tok::Private: {
      advance();
      StructItem inner = struct_item();
      return StructItem{span_from(start), SIPrivate{Box<StructItem>(std::move(inner))}};
    }
    default: {
      Expr e = expr();
      return StructItem{span_from(start), SIExpr{std::move(e)}};
    }
    }
  }

  // ---- signature items ----------------------------------------------------

  std::vector<SigItemSurface> sig_items() {
    std::vector<SigItemSurface> items;
    while (!at_struct_end()) {
      OffsideGuard g(*this, cur().span.start_col);
      items.push_back(sig_item());
    }
    return items;
  }

  SigItemSurface sig_item() {
    SourceSpan start = cur().span;
    switch (kind()) {
    case Tok::Val: {
      advance();
      std::string name = expect_lower();
      expect(Tok::Colon);
      TypeExpr t = type_expr();
      return SigItemSurface{span_from(start), SgVal{std::move(name), std::move(t)}};
    }
    case Tok::Type: {
      advance();
      bool nonrec = accept(Tok::Nonrec);
      std::size_t save = pos_;
      if (!nonrec) {
        // `type ('a) t := e` is a signature-local binding.
        auto params = type_params();
        if (at_lower() && ahead(1).kind == Tok::ColonEq) {
          std::string name = advance().text;
          advance();
          TypeExpr rhs = type_expr();
          return SigItemSurface{span_from(start), SgTypeSubst{std::move(params), std::move(name), std::move(rhs)}};
        }
        pos_ = save;
      }
      std::vector<TypeDefSyntax> defs;
      defs.push_back(type_def());
      while (accept(Tok::And)) defs.push_back(type_def());
      return SigItemSurface{span_from(start), SgTypes{nonrec, std::move(defs)}};
    }
    case Tok::Module: {
      advance();
      if (accept(Tok::Type)) {
        std::string name = expect_upper();
        std::optional<ModTypeExpr> t;
        if (accept(Tok::Eq)) t = module_type();
        return SigItemSurface{span_from(start), SgModType{std::move(name), std::move(t)}};
      }
      std::string name = expect_upper();
      std::vector<std::pair<SourceSpan, FunctorParamSyntax>> params;
      while (at(Tok::LParen)) {
        SourceSpan ps = advance().span;
        std::string p = expect_upper();
        expect(Tok::Colon);
        ModTypeExpr t = module_type();
        expect(Tok::RParen);
        params.emplace_back(ps, FunctorParamSyntax{std::move(p), std::move(t)});
      }
      expect(Tok::Colon);
      ModTypeExpr t = module_type();
      for (auto it = params.rbegin(); it != params.rend(); ++it) {
        SourceSpan s = span_from(it->first);
        t = ModTypeExpr{s, MTFunctor{std::move(it->second.name), Box<ModTypeExpr>(std::move(it->second.type)), Box<ModTypeExpr>(std::move(t))}};
      }
      return SigItemSurface{span_from(start), SgModule{std::move(name), std::move(t)}};
    }
    case Tok::Exception: {
      advance();
      std::string name = expect_upper();
      std::optional<TypeExpr> arg;
      if (accept(Tok::Of)) arg = type_expr();
      return SigItemSurface{span_from(start), SgException{std::move(name), std::move(arg)}};
    }
    case Tok::Open: {
      advance();
      ModExpr m = module_expr();
      return SigItemSurface{span_from(start), SgOpen{std::move(m)}};
    }
    case Tok::Include: {
      advance();
      ModTypeExpr t = module_type();
      return SigItemSurface{span_from(start), SgInclude{std::move(t)}};
    }
    case Tok::Local: {
      advance();
      auto hidden = sig_items();
      expect(Tok::In);
      auto body = sig_items();
      expect(Tok::End);
      return SigItemSurface{span_from(start), SgLocal{std::move(hidden), std::move(body)}};
    }
    default:
      fail({"val", "type", "module", "exception", "open", "include", "local", "end"});
    }
  }
};

} // namespace

Program parse_program(std::string_view source, const std::string &file) {
  return Parser(tokenize(source, file), file).program();
}

std::vector<SigItemSurface> parse_signature(std::string_view source, const std::string &file) {
  return Parser(tokenize(source, file), file).signature_only();
}

} // namespace minimod
