#include "parallax/vpdsl/parser.hpp"

#include <cctype>

#include "parallax/vpdsl/cells.hpp"

namespace parallax::vpdsl {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
 public:
  Parser(std::string_view source, std::vector<Token> tokens)
      : source_(source), tokens_(std::move(tokens)) {}

  ParseResult run() {
    ParseResult result;
    result.program.source_text = std::string(source_);
    while (peek().kind != TokenKind::End) {
      Assignment stmt;
      const std::size_t start = pos_;
      if (statement(stmt)) {
        result.program.statements.push_back(std::move(stmt));
      } else {
        result.diagnostics.push_back(error_);
        recover(start);
      }
      ++index_;
    }
    if (result.program.statements.empty() && result.diagnostics.empty()) {
      result.diagnostics.push_back(
          {DiagnosticKind::ParseError, 0, {0, source_.size()}, "no statements", {}, {}});
    }
    return result;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  bool expect(TokenKind kind, const char* what, Token& out) {
    if (peek().kind != kind) {
      const Token& t = peek();
      std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
      error_ = {DiagnosticKind::ParseError, index_, t.span, std::string("expected ") + what + ", found " + found, {}, {}};
      return false;
    }
    out = advance();
    return true;
  }

  bool statement(Assignment& stmt) {
    Token target, eq, cell, lparen;
    if (!expect(TokenKind::Ident, "assignment target", target)) return false;
    if (!expect(TokenKind::Equals, "'='", eq)) return false;
    if (!expect(TokenKind::Ident, "cell name", cell)) return false;
    if (!expect(TokenKind::LParen, "'('", lparen)) return false;
    stmt.target = target.text;
    stmt.target_span = target.span;
    stmt.cell = cell.text;
    stmt.cell_span = cell.span;

    if (peek().kind != TokenKind::RParen) {
      for (;;) {
        Argument arg;
        Token name, aeq;
        if (!expect(TokenKind::Ident, "argument name", name)) return false;
        if (!expect(TokenKind::Equals, "'=' after argument name", aeq)) return false;
        if (!value(arg.value)) return false;
        arg.name = name.text;
        arg.span = {name.span.begin, arg.value.span.end};
        stmt.args.push_back(std::move(arg));
        if (peek().kind == TokenKind::Comma) {
          advance();
          continue;
        }
        break;
      }
    }
    Token rparen;
    if (!expect(TokenKind::RParen, "',' or ')'", rparen)) return false;
    stmt.span = {target.span.begin, rparen.span.end};
    return true;
  }

  bool value(Value& out) {
    const Token& t = peek();
    if (t.kind == TokenKind::String) {
      out.kind = Value::Kind::String;
      out.text = t.text;
      out.span = t.span;
      advance();
      return true;
    }
    if (t.kind == TokenKind::Ident) {
      out.span = t.span;
      if (iequals(t.text, "NULL")) {
        out.kind = Value::Kind::Null;
        out.text = t.text;
        advance();
        return true;
      }
      out.kind = Value::Kind::Identifier;
      out.text = t.text;
      advance();
      if (peek().kind == TokenKind::Dot) {
        advance();
        Token attr;
        if (!expect(TokenKind::Ident, "attribute name after '.'", attr)) return false;
        out.attribute = attr.text;
        out.span.end = attr.span.end;
      }
      return true;
    }
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    error_ = {DiagnosticKind::ParseError, index_, t.span, "expected a string, identifier or NULL, found " + found, {}, {}};
    return false;
  }

  bool newline_before(const Token& t) const {
    if (t.span.begin == 0) return true;
    for (std::size_t i = t.span.begin; i-- > 0;) {
      const char c = source_[i];
      if (c == '\n') return true;
      if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
  }

  // Skip to the first identifier that starts a later line.
  void recover(std::size_t statement_start) {
    while (peek().kind != TokenKind::End) {
      if (pos_ > statement_start && peek().kind == TokenKind::Ident && newline_before(peek())) return;
      advance();
    }
  }

  std::string_view source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t index_ = 0;
  ProgramDiagnostic error_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = source.size();
  while (i < n) {
    const char c = source[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    if (ident_start(c)) {
      while (i < n && ident_char(source[i])) ++i;
      tokens.push_back({TokenKind::Ident, std::string(source.substr(begin, i - begin)), {begin, i}});
      continue;
    }
    if (c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < n) {
        if (source[i] == '\\' && i + 1 < n) {
          text.push_back(source[i + 1]);
          i += 2;
          continue;
        }
        if (source[i] == '"') {
          closed = true;
          ++i;
          break;
        }
        if (source[i] == '\n') break;
        text.push_back(source[i++]);
      }
      if (closed) {
        tokens.push_back({TokenKind::String, std::move(text), {begin, i}});
      } else {
        tokens.push_back({TokenKind::Invalid, std::string(source.substr(begin, i - begin)), {begin, i}});
      }
      continue;
    }
    TokenKind kind = TokenKind::Invalid;
    switch (c) {
      case '=': kind = TokenKind::Equals; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case ',': kind = TokenKind::Comma; break;
      case '.': kind = TokenKind::Dot; break;
      default: break;
    }
    ++i;
    if (kind == TokenKind::Invalid) {
      // Keep multi-byte UTF-8 sequences in one token.
      while (i < n && (static_cast<unsigned char>(source[i]) & 0xC0) == 0x80) ++i;
    }
    tokens.push_back({kind, std::string(source.substr(begin, i - begin)), {begin, i}});
  }
  tokens.push_back({TokenKind::End, {}, {n, n}});
  return tokens;
}

ParseResult parse_program(std::string_view source) {
  return Parser(source, tokenize(source)).run();
}

std::string strip_latex_escapes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size() &&
        (text[i + 1] == '_' || text[i + 1] == '#' || text[i + 1] == '%' || text[i + 1] == '&')) {
      continue;
    }
    out.push_back(text[i]);
  }
  return out;
}

}  // namespace parallax::vpdsl
