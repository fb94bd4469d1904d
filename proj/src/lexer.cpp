#include "minimod/syntax.hpp"

#include <unordered_map>

namespace minimod {

namespace {

const std::unordered_map<std::string_view, Tok> &keywords() {
  static const std::unordered_map<std::string_view, Tok> table = {
      {"open", Tok::Open},         {"include", Tok::Include},
      {"struct", Tok::Struct},     {"sig", Tok::Sig},
      {"end", Tok::End},           {"module", Tok::Module},
      {"type", Tok::Type},         {"let", Tok::Let},
      {"rec", Tok::Rec},           {"and", Tok::And},
      {"in", Tok::In},             {"nonrec", Tok::Nonrec},
      {"functor", Tok::Functor},   {"exception", Tok::Exception},
      {"local", Tok::Local},       {"private", Tok::Private},
      {"val", Tok::Val},           {"with", Tok::With},
      {"of", Tok::Of},             {"match", Tok::Match},
      {"try", Tok::Try},           {"raise", Tok::Raise},
      {"assert", Tok::Assert},     {"fun", Tok::Fun},
      {"if", Tok::If},             {"then", Tok::Then},
      {"else", Tok::Else},         {"true", Tok::True},
      {"false", Tok::False},       {"begin", Tok::Begin},
  };
  return table;
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
  Lexer(std::string_view src, const std::string &file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blanks();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    return out;
  }

private:
  std::string_view src_;
  const std::string &file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 0;

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 0;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SourceSpan here() const { return SourceSpan{file_, line_, col_, line_, col_}; }

  void skip_blanks() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '(' && peek(1) == '*') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void skip_comment() {
    SourceSpan start = here();
    advance();
    advance();
    int depth = 1;
    while (depth > 0) {
      if (pos_ >= src_.size()) {
        start.end_line = line_;
        start.end_col = col_;
        throw LexError(start, "Unterminated comment");
      }
      if (peek() == '(' && peek(1) == '*') {
        advance();
        advance();
        ++depth;
      } else if (peek() == '*' && peek(1) == ')') {
        advance();
        advance();
        --depth;
      } else {
        advance();
      }
    }
  }

  Token finish(Tok kind, SourceSpan span, std::string text = {}) {
    span.end_line = line_;
    span.end_col = col_;
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.span = std::move(span);
    return t;
  }

  Token next() {
    SourceSpan span = here();
    char c = peek();

    if (is_ident_start(c)) {
      std::size_t begin = pos_;
      while (pos_ < src_.size() && is_ident_char(peek())) advance();
      std::string text(src_.substr(begin, pos_ - begin));
      if (text == "_") return finish(Tok::Underscore, span);
      if (auto it = keywords().find(text); it != keywords().end())
        return finish(it->second, span);
      return finish(Tok::Ident, span, std::move(text));
    }

    if (is_digit(c)) {
      std::size_t begin = pos_;
      while (pos_ < src_.size() && is_digit(peek())) advance();
      std::string text(src_.substr(begin, pos_ - begin));
      Token t = finish(Tok::Int, span, text);
      try {
        t.int_value = std::stoll(text);
      } catch (const std::out_of_range &) {
        throw LexError(t.span, "Integer literal exceeds the range of int");
      }
      return t;
    }

    if (c == '\'') {
      if (is_ident_start(peek(1)) && peek(1) != '_') {
        advance();
        std::size_t begin = pos_;
        while (pos_ < src_.size() && is_ident_char(peek())) advance();
        return finish(Tok::TyVar, span, std::string(src_.substr(begin, pos_ - begin)));
      }
      advance();
      throw LexError(finish(Tok::Eof, span).span, "Illegal character (')");
    }

    if (c == '"') return string_literal(span);

    auto two = [&](char a, char b) { return c == a && peek(1) == b; };
    auto single = [&](Tok kind) {
      advance();
      return finish(kind, span);
    };
    auto pair = [&](Tok kind) {
      advance();
      advance();
      return finish(kind, span);
    };

    if (two('-', '>')) return pair(Tok::Arrow);
    if (two(':', '=')) return pair(Tok::ColonEq);
    switch (c) {
    case '(': return single(Tok::LParen);
    case ')': return single(Tok::RParen);
    case ',': return single(Tok::Comma);
    case ':': return single(Tok::Colon);
    case '=': return single(Tok::Eq);
    case '+': return single(Tok::Plus);
    case '-': return single(Tok::Minus);
    case '*': return single(Tok::Star);
    case '<': return single(Tok::Lt);
    case ';': return single(Tok::Semi);
    case '!': return single(Tok::Bang);
    case '|': return single(Tok::Bar);
    case '.': return single(Tok::Dot);
    default: break;
    }

    advance();
    std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                            ? "\\" + std::to_string(static_cast<unsigned char>(c))
                            : std::string(1, c);
    throw LexError(finish(Tok::Eof, span).span, "Illegal character (" + shown + ")");
  }

  Token string_literal(SourceSpan span) {
    advance();
    std::string value;
    for (;;) {
      if (pos_ >= src_.size()) {
        throw LexError(finish(Tok::Eof, span).span, "String literal not terminated");
      }
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) continue;
        char e = peek();
        switch (e) {
        case 'n': value += '\n'; break;
        case 't': value += '\t'; break;
        case '\\': value += '\\'; break;
        case '"': value += '"'; break;
        default:
          advance();
          throw LexError(finish(Tok::Eof, span).span,
                         std::string("Illegal escape sequence \\") + e);
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    return finish(Tok::String, span, std::move(value));
  }
};

} // namespace

std::string_view token_name(Tok kind) {
  switch (kind) {
  case Tok::Eof: return "end of input";
  case Tok::Ident: return "identifier";
  case Tok::TyVar: return "type variable";
  case Tok::Int: return "integer";
  case Tok::String: return "string";
  case Tok::Open: return "open";
  case Tok::Include: return "include";
  case Tok::Struct: return "struct";
  case Tok::Sig: return "sig";
  case Tok::End: return "end";
  case Tok::Module: return "module";
  case Tok::Type: return "type";
  case Tok::Let: return "let";
  case Tok::Rec: return "rec";
  case Tok::And: return "and";
  case Tok::In: return "in";
  case Tok::Nonrec: return "nonrec";
  case Tok::Functor: return "functor";
  case Tok::Exception: return "exception";
  case Tok::Local: return "local";
  case Tok::Private: return "private";
  case Tok::Val: return "val";
  case Tok::With: return "with";
  case Tok::Of: return "of";
  case Tok::Match: return "match";
  case Tok::Try: return "try";
  case Tok::Raise: return "raise";
  case Tok::Assert: return "assert";
  case Tok::Fun: return "fun";
  case Tok::If: return "if";
  case Tok::Then: return "then";
  case Tok::Else: return "else";
  case Tok::True: return "true";
  case Tok::False: return "false";
  case Tok::Begin: return "begin";
  case Tok::LParen: return "(";
  case Tok::RParen: return ")";
  case Tok::Comma: return ",";
  case Tok::Arrow: return "->";
  case Tok::Colon: return ":";
  case Tok::ColonEq: return ":=";
  case Tok::Eq: return "=";
  case Tok::Plus: return "+";
  case Tok::Minus: return "-";
  case Tok::Star: return "*";
  case Tok::Lt: return "<";
  case Tok::Semi: return ";";
  case Tok::Bang: return "!";
  case Tok::Bar: return "|";
  case Tok::Dot: return ".";
  case Tok::Underscore: return "_";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view source, const std::string &file) {
  return Lexer(source, file).run();
}

bool is_operator_name(std::string_view name) {
  return name == "+" || name == "-" || name == "*" || name == "=" || name == "<" ||
         name == ":=" || name == "!";
}

std::string source_line(const std::string &text, int line) {
  int current = 1;
  std::size_t begin = 0;
  while (current < line) {
    std::size_t nl = text.find('\n', begin);
    if (nl == std::string::npos) return "";
    begin = nl + 1;
    ++current;
  }
  std::size_t end = text.find('\n', begin);
  std::string out = text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
  if (!out.empty() && out.back() == '\r') out.pop_back();
  return out;
}

} // namespace minimod
